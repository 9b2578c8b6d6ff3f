// Benchmark and episode CLI for the cyber-defense planner.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cdp/harness.hpp"

namespace {

std::vector<cdp::DefenderMethod> parse_methods(const std::vector<std::string>& names) {
    std::vector<cdp::DefenderMethod> out;
    for (const auto& n : names) out.push_back(cdp::defender_method_from_string(n));
    return out;
}

std::vector<std::uint64_t> effective_seeds(std::vector<std::uint64_t> seeds) {
    if (const char* env = std::getenv("CDP_SEED")) {
        try {
            return {static_cast<std::uint64_t>(std::stoull(env))};
        } catch (const std::exception&) {
            throw cdp::ConfigError("CDP_SEED: not a valid unsigned integer");
        }
    }
    if (seeds.empty()) seeds = {1, 2, 3};
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cyber-defense planning benchmark (tree search with causal pruning)"};
    app.require_subcommand(1);

    int scenario = 1;
    std::vector<std::string> method_names = {"c-pomcp"};
    int horizon = 30;
    int budget_sims = 1000;
    double budget_seconds = 0.0;
    int particles = 1000;
    std::vector<std::uint64_t> seeds;
    cdp::PruningConfig pruning;
    std::string config_path;
    std::string out_dir;
    std::uint64_t episode_seed = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", scenario, "Evaluation scenario")->check(CLI::Range(1, 4));
        cmd->add_option("--horizon", horizon, "Episode length");
        cmd->add_option("--budget-sims", budget_sims, "Simulations per search");
        cmd->add_option("--budget-seconds", budget_seconds,
                        "Wall-clock search budget (overrides --budget-sims when > 0)");
        cmd->add_option("--particles", particles, "Particle filter size");
        cmd->add_option("--tau-compromised", pruning.tau_compromised,
                        "Belief below which defensive interventions are pruned");
        cmd->add_option("--tau-deceptive", pruning.tau_deceptive,
                        "Belief above which forensic/deceptive interventions are pruned");
        cmd->add_option("--config", config_path, "Scenario file (JSON)");
    };

    CLI::App* bench = app.add_subcommand("bench", "Run a benchmark across methods and seeds");
    add_common(bench);
    bench->add_option("--method", method_names, "Defender methods")->delimiter(',');
    bench->add_option("--seeds", seeds, "Episode seeds")->delimiter(',');
    bench->add_option("--out", out_dir, "Output directory for benchmark.csv / summary.json");

    CLI::App* episode = app.add_subcommand("episode", "Run one episode and print the trajectory");
    add_common(episode);
    std::string episode_method = "c-pomcp";
    bool trace_belief = false;
    episode->add_option("--method", episode_method, "Defender method");
    episode->add_option("--seed", episode_seed, "Episode seed");
    episode->add_flag("--trace-belief", trace_belief, "Print per-step belief marginals");

    CLI::App* scenario_cmd = app.add_subcommand("scenario", "Print the scenario as JSON");
    scenario_cmd->add_option("--config", config_path, "Scenario file (JSON)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scenario_cmd->parsed()) {
            cdp::Scenario sc = config_path.empty() ? cdp::Scenario::default_instance()
                                                   : cdp::Scenario::load_file(config_path);
            std::cout << sc.to_json() << "\n";
            return 0;
        }
        if (bench->parsed()) {
            cdp::BenchmarkConfig cfg;
            cfg.scenario = scenario;
            cfg.methods = parse_methods(method_names);
            cfg.horizon = horizon;
            cfg.budget_sims = budget_sims;
            cfg.budget_seconds = budget_seconds;
            cfg.particles = particles;
            cfg.seeds = effective_seeds(seeds);
            cfg.pruning = pruning;
            cfg.scenario_file = config_path;
            cfg.out_dir = out_dir;
            cdp::BenchmarkResult result = cdp::run_benchmark(cfg);
            std::cout << result.summary_json() << "\n";
            if (!out_dir.empty())
                std::cerr << "wrote " << out_dir << "/benchmark.csv and " << out_dir
                          << "/summary.json\n";
            return 0;
        }
        // episode
        std::uint64_t seed = effective_seeds({episode_seed}).front();
        cdp::Scenario base = config_path.empty() ? cdp::Scenario::default_instance()
                                                 : cdp::Scenario::load_file(config_path);
        cdp::Scenario sc = cdp::scenario_for_run(base, scenario, horizon, seed);
        cdp::CyberEnv env(std::move(sc));
        cdp::SearchConfig search;
        search.budget_sims = budget_sims;
        search.budget_seconds = budget_seconds;
        search.particles = particles;
        search.gamma = env.scenario().rewards.gamma;
        search.record_belief = trace_belief;
        cdp::DefenderMethod method = cdp::defender_method_from_string(episode_method);
        cdp::EpisodeResult ep = cdp::run_episode(env, search, method, seed, pruning);
        std::cout << "seed=" << seed << " attacker=" << cdp::to_string(ep.tag) << "\n";
        std::cout << "step\tintervention\tattacker\treward\tcum\tsearch_ms\tpruned\n";
        for (const auto& st : ep.steps) {
            std::cout << st.step << '\t' << cdp::to_string(st.intervention) << '\t'
                      << cdp::to_string(st.attacker_action) << '\t' << st.reward << '\t'
                      << st.cum_discounted << '\t' << st.search_ms << '\t' << st.pruned_size << '/'
                      << st.full_size << "\n";
            if (!st.belief_summary.empty()) {
                std::cout << "  obs: z=";
                for (auto z : st.obs.activity) std::cout << cdp::to_string(z);
                std::cout << " s=";
                for (auto sv : st.obs.service) std::cout << int(sv);
                std::cout << " c=" << st.obs.client_count << "\n";
                std::cout << "  belief: " << st.belief_summary << "\n";
            }
        }
        std::cout << "discounted return: " << ep.discounted_return << "\n";
        return 0;
    } catch (const cdp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
