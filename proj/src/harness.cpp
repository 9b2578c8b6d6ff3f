#include "cdp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace cdp {

const char* const kBenchmarkCsvHeader =
    "scenario,method,seed,step,intervention,reward,cum_discounted_reward,"
    "search_ms,tree_nodes,full_size,pruned_size,pruned_fraction";

void BenchmarkConfig::validate() const {
    if (scenario < 1 || scenario > 4) throw ConfigError("scenario: must be in 1..4");
    if (methods.empty()) throw ConfigError("methods: need at least one method");
    if (horizon < 1) throw ConfigError("horizon: must be >= 1");
    if (budget_sims < 1 && budget_seconds <= 0.0)
        throw ConfigError("budget: need --budget-sims >= 1 or --budget-seconds > 0");
    if (particles < 1) throw ConfigError("particles: must be >= 1");
    if (seeds.empty()) throw ConfigError("seeds: need at least one seed");
}

Scenario scenario_for_run(const Scenario& base, int scenario_id, int horizon,
                          std::uint64_t seed) {
    Scenario sc = base;
    sc.horizon = horizon;
    switch (scenario_id) {
        case 1: sc.attacker = AttackerSpec::fixed(AttackerTag::BLine); break;
        case 2: sc.attacker = AttackerSpec::fixed(AttackerTag::Meander); break;
        case 3: sc.attacker = AttackerSpec::mixed(0.5); break;
        case 4: {
            sc.attacker = AttackerSpec::fixed(AttackerTag::BLine);
            Rng rng(seed);
            Rng topo_rng = rng.split("topology");
            sc.topology = randomize_intra_zone_edges(sc.topology, topo_rng);
            break;
        }
        default: throw ConfigError("scenario: must be in 1..4");
    }
    return sc;
}

namespace {

std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return {mean, std::sqrt(var)};
}

}  // namespace

double regret(std::span<const double> per_minute_returns, double j_star, int n) {
    if (n < 0 || static_cast<std::size_t>(n) > per_minute_returns.size())
        throw PreconditionError("regret needs at least n per-minute returns");
    double total = 0.0;
    for (int l = 0; l < n; ++l) total += per_minute_returns[l];
    return static_cast<double>(n) * j_star - total;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
    cfg.validate();
    Scenario base =
        cfg.scenario_file.empty() ? Scenario::default_instance() : Scenario::load_file(cfg.scenario_file);

    BenchmarkResult result;
    result.config = cfg;
    for (DefenderMethod method : cfg.methods) {
        MethodSummary summary;
        summary.scenario = cfg.scenario;
        summary.method = method;
        double search_ms = 0.0;
        double pruned = 0.0;
        std::size_t steps = 0;
        for (std::uint64_t seed : cfg.seeds) {
            Scenario sc = scenario_for_run(base, cfg.scenario, cfg.horizon, seed);
            CyberEnv env(std::move(sc));
            SearchConfig search;
            search.budget_sims = cfg.budget_sims;
            search.budget_seconds = cfg.budget_seconds;
            search.particles = cfg.particles;
            search.gamma = env.scenario().rewards.gamma;
            EpisodeResult ep = run_episode(env, search, method, seed, cfg.pruning);
            summary.returns.push_back(ep.discounted_return);
            for (const auto& st : ep.steps) {
                search_ms += st.search_ms;
                pruned += st.pruned_fraction;
                ++steps;
            }
            result.episodes.emplace_back(method, std::move(ep));
        }
        auto [mean, sd] = mean_stddev(summary.returns);
        summary.mean_return = mean;
        summary.stddev_return = sd;
        summary.mean_search_ms = steps ? search_ms / static_cast<double>(steps) : 0.0;
        summary.mean_pruned_fraction = steps ? pruned / static_cast<double>(steps) : 0.0;
        summary.total_search_minutes = search_ms / 1e3 / 60.0;
        result.summaries.push_back(std::move(summary));
    }
    result.j_star = -std::numeric_limits<double>::infinity();
    for (const auto& s : result.summaries) result.j_star = std::max(result.j_star, s.mean_return);
    for (auto& s : result.summaries) s.regret = result.j_star - s.mean_return;

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        std::ofstream csv(std::filesystem::path(cfg.out_dir) / "benchmark.csv");
        csv << result.to_csv();
        std::ofstream js(std::filesystem::path(cfg.out_dir) / "summary.json");
        js << result.summary_json() << "\n";
    }
    return result;
}

std::string BenchmarkResult::to_csv() const {
    std::ostringstream os;
    os << kBenchmarkCsvHeader << "\n";
    os.precision(17);
    for (const auto& [method, ep] : episodes) {
        for (const auto& st : ep.steps) {
            os << config.scenario << ',' << to_string(method) << ',' << ep.seed << ',' << st.step
               << ',' << to_string(st.intervention) << ',' << st.reward << ','
               << st.cum_discounted << ',' << st.search_ms << ',' << st.tree_nodes << ','
               << st.full_size << ',' << st.pruned_size << ',' << st.pruned_fraction << "\n";
        }
    }
    return os.str();
}

std::string BenchmarkResult::summary_json() const {
    nlohmann::json j;
    j["scenario"] = config.scenario;
    j["horizon"] = config.horizon;
    j["budget_sims"] = config.budget_sims;
    j["budget_seconds"] = config.budget_seconds;
    j["particles"] = config.particles;
    j["seeds"] = config.seeds;
    j["j_star"] = j_star;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : summaries) {
        nlohmann::json row;
        row["method"] = to_string(s.method);
        row["returns"] = s.returns;
        row["mean_return"] = s.mean_return;
        row["stddev_return"] = s.stddev_return;
        row["mean_search_ms"] = s.mean_search_ms;
        row["mean_pruned_fraction"] = s.mean_pruned_fraction;
        row["total_search_minutes"] = s.total_search_minutes;
        row["regret_vs_best"] = s.regret;
        rows.push_back(row);
    }
    j["methods"] = rows;
    return j.dump(2);
}

}  // namespace cdp
