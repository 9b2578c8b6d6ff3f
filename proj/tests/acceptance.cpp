// Acceptance suite: one check per published claim, one pass/fail line each.
// Exits non-zero when any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "cdp/belief.hpp"
#include "cdp/harness.hpp"
#include "cdp/planner.hpp"
#include "cdp/pruning.hpp"
#include "test_scenarios.hpp"

using namespace cdp;
using cdp::testing::micro2;
using cdp::testing::micro3;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail, double seconds) {
    std::printf("[%s] criterion %d: %-34s %s (%.1fs)\n", pass ? "PASS" : "FAIL", idx, name,
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

double chi_sq_pvalue(double stat, int dof) {
    if (dof <= 0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

// ---------------------------------------------------------------------------
// 1. Particle filter converges to the exact posterior on a micro instance.
void criterion_1() {
    Timer timer;
    const std::vector<int> particle_counts{100, 1000, 10000};
    const int kSeeds = 20;
    const int kSteps = 10;
    Scenario sc = micro3();
    CyberEnv env(sc);

    std::map<int, std::vector<double>> tv;
    for (int seed = 0; seed < kSeeds; ++seed) {
        // One shared true trajectory per seed; each filter size replays it.
        Rng er_base(9000 + seed);
        std::vector<Intervention> ivs;
        std::vector<Observation> observations;
        {
            Rng er = er_base.split("env");
            WorldState truth = env.initial_state(er);
            for (int t = 1; t <= kSteps; ++t) {
                Intervention iv = Intervention::none();
                ivs.push_back(iv);
                auto res = env.step(truth, iv, er);
                truth = res.state;
                observations.push_back(res.obs);
            }
        }
        ExactBelief exact = exact_initial(env);
        for (int t = 0; t < kSteps; ++t) exact = exact_update(exact, ivs[t], observations[t], env);

        for (int m : particle_counts) {
            Rng fr = er_base.split("filter").split(m);
            ParticleBelief approx = initial_belief(env, m, fr);
            for (int t = 0; t < kSteps; ++t) {
                Rng step_rng = fr.split(t + 1);
                auto predicted = predict(approx, ivs[t], env, step_rng);
                approx = reweight_resample(std::move(predicted), observations[t], ivs[t], env,
                                           step_rng);
            }
            tv[m].push_back(total_variation(approx, exact));
        }
    }
    double m100 = median(tv[100]);
    double m1k = median(tv[1000]);
    double m10k = median(tv[10000]);
    bool pass = m10k <= 0.05 && m100 >= m1k && m1k >= m10k && timer.seconds() < 120.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "median TV %.3f >= %.3f >= %.3f (last <= 0.05)", m100, m1k,
                  m10k);
    report(1, "particle filter convergence", pass, buf, timer.seconds());
}

// ---------------------------------------------------------------------------
// 2. The planner matches an exhaustive oracle on an enumerable instance.
namespace oracle {

double value(const CyberEnv& env, const WorldState& state, int depth,
             const std::vector<Intervention>& admissible, double gamma,
             std::map<std::pair<std::string, int>, double>& memo) {
    if (depth == 0) return 0.0;
    auto key = std::make_pair(state.key(), depth);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& iv : admissible) {
        double q = 0.0;
        for (const auto& [next, p] : env.transition_support(state, iv))
            q += p * (env.reward(next, iv) + gamma * value(env, next, depth - 1, admissible, gamma, memo));
        best = std::max(best, q);
    }
    memo[key] = best;
    return best;
}

std::vector<Intervention> best_arms(const CyberEnv& env, const WorldState& state, int depth,
                                    const std::vector<Intervention>& admissible, double gamma) {
    std::map<std::pair<std::string, int>, double> memo;
    std::vector<std::pair<Intervention, double>> qs;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& iv : admissible) {
        double q = 0.0;
        for (const auto& [next, p] : env.transition_support(state, iv))
            q += p * (env.reward(next, iv) + gamma * value(env, next, depth - 1, admissible, gamma, memo));
        qs.emplace_back(iv, q);
        best = std::max(best, q);
    }
    std::vector<Intervention> out;
    for (const auto& [iv, q] : qs)
        if (q > best - 1e-9) out.push_back(iv);
    return out;
}

}  // namespace oracle

void criterion_2() {
    Timer timer;
    CyberEnv env(micro2());
    WorldState start = env.initial_state(AttackerTag::BLine);
    start.nodes[0].intrusion = IntrusionLevel::Root;
    start.nodes[1].intrusion = IntrusionLevel::Known;
    start.last_activity[0] = IntrusionLevel::Compromised;

    ParticleBelief belief;
    belief.particles.assign(512, start);
    auto admissible =
        pruned_intervention_set(env.observation_of(start), belief, env.topology()).admissible;
    auto best = oracle::best_arms(env, start, 3, admissible, 0.99);

    const int kRuns = 50;
    int matches = 0;
    for (int run = 0; run < kRuns; ++run) {
        SearchConfig cfg;
        cfg.budget_sims = 100000;
        Planner planner(env, cfg, causal_pruning_hook(env.topology(), {}));
        Rng rng(3100 + run);
        Intervention iv = planner.search(belief, 3, rng);
        for (const auto& b : best)
            if (b == iv) {
                ++matches;
                break;
            }
    }
    bool pass = matches >= 45 && timer.seconds() < 300.0;
    char buf[120];
    std::snprintf(buf, sizeof buf, "oracle matches %d/%d (need >= 45)", matches, kRuns);
    report(2, "planner optimality at desk scale", pass, buf, timer.seconds());
}

// ---------------------------------------------------------------------------
// 3. Causal pruning strictly improves on the plain planner, per scenario.
void criterion_3() {
    Timer timer;
    bool pass = true;
    std::string detail;
    for (int scenario = 1; scenario <= 3; ++scenario) {
        BenchmarkConfig cfg;
        cfg.scenario = scenario;
        cfg.methods = {DefenderMethod::CPomcp, DefenderMethod::Pomcp};
        cfg.horizon = 30;
        cfg.budget_sims = 1000;
        cfg.particles = 1000;
        cfg.seeds = {1, 2, 3};
        auto result = run_benchmark(cfg);
        double causal = 0, plain = 0, causal_regret = 0, plain_regret = 0;
        for (const auto& s : result.summaries) {
            if (s.method == DefenderMethod::CPomcp) causal = s.mean_return, causal_regret = s.regret;
            if (s.method == DefenderMethod::Pomcp) plain = s.mean_return, plain_regret = s.regret;
        }
        pass = pass && causal > plain && causal_regret <= plain_regret;
        char buf[80];
        std::snprintf(buf, sizeof buf, "s%d %.2f vs %.2f; ", scenario, causal, plain);
        detail += buf;
    }
    pass = pass && timer.seconds() < 900.0;
    report(3, "causal dominance (3 seeds each)", pass, detail, timer.seconds());
}

// ---------------------------------------------------------------------------
// 4. Episode-average search-tree reduction in the published band.
void criterion_4() {
    Timer timer;
    BenchmarkConfig cfg;
    cfg.scenario = 1;
    cfg.methods = {DefenderMethod::CPomcp};
    cfg.horizon = 30;
    cfg.budget_sims = 1000;
    cfg.particles = 1000;
    cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto result = run_benchmark(cfg);
    double fraction = result.summaries.front().mean_pruned_fraction;
    bool pass = fraction >= 0.85 && fraction <= 0.96 && timer.seconds() < 120.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "episode-average pruned fraction %.4f in [0.85, 0.96]",
                  fraction);
    report(4, "pruning fraction", pass, buf, timer.seconds());
}

// ---------------------------------------------------------------------------
// 5. Reduction-factor formula against direct evaluation.
void criterion_5() {
    Timer timer;
    double a = prune_factor(0.9, 10);
    double b = prune_factor(0.99, 100);
    bool pass = std::abs(a - 0.6513) < 1e-4 + 1e-7 && std::abs(b - 0.6340) < 1e-4 + 1e-7;
    char buf[96];
    std::snprintf(buf, sizeof buf, "factor(0.9,10)=%.5f factor(0.99,100)=%.5f", a, b);
    report(5, "reduction-factor formula", pass, buf, timer.seconds());
}

// ---------------------------------------------------------------------------
// 6. Robustness to intra-zone topology randomization.
void criterion_6() {
    Timer timer;
    auto run = [&](int scenario, DefenderMethod method) {
        BenchmarkConfig cfg;
        cfg.scenario = scenario;
        cfg.methods = {method};
        cfg.horizon = 30;
        cfg.budget_sims = 1000;
        cfg.particles = 1000;
        cfg.seeds = {1, 2, 3};
        return run_benchmark(cfg).summaries.front().mean_return;
    };
    double fixed_topo = run(1, DefenderMethod::CPomcp);
    double random_topo = run(4, DefenderMethod::CPomcp);
    double idle = run(4, DefenderMethod::Noop);
    bool degrade_ok = std::abs(random_topo) < 1.25 * std::abs(fixed_topo);
    bool idle_ok = std::abs(idle) >= 3.0 * std::abs(random_topo);
    bool pass = degrade_ok && idle_ok && timer.seconds() < 900.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "random-topo %.2f vs fixed %.2f; idle %.1f", random_topo,
                  fixed_topo, idle);
    report(6, "topology robustness", pass, buf, timer.seconds());
}

// ---------------------------------------------------------------------------
// 7. Environment property suite.
void criterion_7() {
    Timer timer;
    CyberEnv env(Scenario::default_instance());
    bool monotone = true, sign_ok = true, clients_ok = true, persist_ok = true;

    auto all = env.all_interventions();
    std::vector<Intervention> benign;
    for (const auto& iv : all)
        if (iv.kind != Intervention::Kind::Remove && iv.kind != Intervention::Kind::Restore)
            benign.push_back(iv);
    Rng rng(7100);
    for (int ep = 0; ep < 1000; ++ep) {
        Rng er = rng.split(ep);
        WorldState w = env.initial_state(er);
        for (int t = 0; t < 25; ++t) {
            auto iv = benign[er.integer(benign.size())];
            auto prev = w;
            auto res = env.step(w, iv, er);
            w = std::move(res.state);
            sign_ok = sign_ok && res.reward <= 1e-12;
            clients_ok = clients_ok && w.client_count >= 0;
            for (int i = 0; i < env.node_count(); ++i) {
                monotone = monotone && !(w.nodes[i].intrusion < prev.nodes[i].intrusion);
                bool touched = (iv.kind == Intervention::Kind::Decoy ||
                                iv.kind == Intervention::Kind::Restore) &&
                               iv.node == i;
                persist_ok = persist_ok && (touched || w.nodes[i].decoys == prev.nodes[i].decoys);
            }
        }
    }

    // Reward sign under the full intervention set, including restores.
    Rng rng2(7200);
    for (int ep = 0; ep < 200; ++ep) {
        Rng er = rng2.split(ep);
        WorldState w = env.initial_state(er);
        for (int t = 0; t < 25; ++t) {
            auto res = env.step(w, all[er.integer(all.size())], er);
            w = std::move(res.state);
            sign_ok = sign_ok && res.reward <= 1e-12;
        }
    }

    // Exhaustive decoy shield over the update cases.
    bool shield_ok = true;
    for (int lvl = 0; lvl < 5; ++lvl)
        for (Privilege priv : {Privilege::User, Privilege::Root})
            for (bool success : {false, true}) {
                NodeState n;
                n.intrusion = static_cast<IntrusionLevel>(lvl);
                n.decoys = 1u << 5;
                AttackerAction a{AttackKind::Exploit, 3, 5, priv};
                shield_ok = shield_ok &&
                            env.step_intrusion(n, 3, a, success) == static_cast<IntrusionLevel>(lvl);
            }

    // Markov property: the next-state distribution depends on the present
    // state only; compare transition counts across predecessor contexts.
    CyberEnv menv(micro2());
    std::map<std::string, std::map<std::pair<std::string, std::string>, int>> triples;
    Rng mr(7300);
    int transitions = 0;
    while (transitions < 100000) {
        Rng er = mr.split(transitions);
        WorldState w = menv.initial_state(er);
        std::string prev_key;
        for (int t = 0; t < 12 && transitions < 100000; ++t) {
            std::string cur_key = w.key();
            w = menv.transition(w, Intervention::none(), er);
            std::string next_key = w.key();
            if (t > 0) {
                triples[cur_key][{prev_key, next_key}]++;
                ++transitions;
            }
            prev_key = cur_key;
        }
    }
    // Homogeneity test per current state: the next-state distribution must
    // not depend on the predecessor context.
    double stat = 0.0;
    int dof = 0;
    for (const auto& [cur, table] : triples) {
        std::map<std::string, std::map<std::string, int>> by_prev;
        for (const auto& [pn, c] : table) by_prev[pn.first][pn.second] += c;
        std::vector<std::map<std::string, int>> rows;
        for (const auto& [prev, row] : by_prev) {
            int row_total = 0;
            for (const auto& [nk, c] : row) row_total += c;
            if (row_total >= 20) rows.push_back(row);
        }
        if (rows.size() < 2) continue;
        std::map<std::string, int> col_totals;
        int total = 0;
        for (const auto& row : rows)
            for (const auto& [nk, c] : row) {
                col_totals[nk] += c;
                total += c;
            }
        if (col_totals.size() < 2) continue;
        for (const auto& row : rows) {
            int row_total = 0;
            for (const auto& [nk, c] : row) row_total += c;
            for (const auto& [nk, ct] : col_totals) {
                double expected = static_cast<double>(row_total) * ct / total;
                if (expected <= 0.0) continue;
                auto it = row.find(nk);
                double observed = it == row.end() ? 0.0 : it->second;
                stat += (observed - expected) * (observed - expected) / expected;
            }
        }
        dof += static_cast<int>((rows.size() - 1) * (col_totals.size() - 1));
    }
    double p_markov = chi_sq_pvalue(stat, dof);
    bool markov_ok = dof >= 1 && p_markov > 0.01;

    // Seed determinism.
    auto trajectory = [&](std::uint64_t seed) {
        Rng er(seed);
        WorldState w = env.initial_state(er);
        std::string log;
        for (int t = 0; t < 30; ++t) {
            auto res = env.step(w, Intervention::none(), er);
            w = std::move(res.state);
            log += w.key();
        }
        return log;
    };
    bool deterministic = trajectory(424242) == trajectory(424242);

    bool pass = monotone && sign_ok && clients_ok && persist_ok && shield_ok && markov_ok &&
                deterministic && timer.seconds() < 180.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "monotone=%d sign=%d clients=%d decoys=%d shield=%d markov(p=%.3f,dof=%d)=%d det=%d",
                  monotone, sign_ok, clients_ok, persist_ok, shield_ok, p_markov, dof, markov_ok,
                  deterministic);
    report(7, "environment property suite", pass, buf, timer.seconds());
}

// ---------------------------------------------------------------------------
// 8. Intervention-set and d-separation fixtures.
void criterion_8() {
    Timer timer;
    CausalGraph fig_a;
    VariableId x{"X", kStaticTime}, z{"Z", kStaticTime}, j{"J", kStaticTime};
    fig_a.add_node(x, NodeClass::Manipulative);
    fig_a.add_node(z, NodeClass::Manipulative);
    fig_a.add_node(j, NodeClass::Target);
    fig_a.add_edge(x, z);
    fig_a.add_edge(z, j);
    auto sets = fig_a.pomis_markovian(j);
    bool pomis_ok = sets.size() == 1 && sets.front() == std::vector<VariableId>{z};

    std::vector<VariableId> xs{x}, js{j}, zs{z}, none{};
    bool chain_ok = fig_a.d_separated(xs, js, zs) && !fig_a.d_separated(xs, js, none);

    CausalGraph collider;
    collider.add_edge(x, z);
    collider.add_edge(j, z);
    bool collider_ok = collider.d_separated(xs, js, none) && !collider.d_separated(xs, js, zs);

    bool pass = pomis_ok && chain_ok && collider_ok;
    char buf[96];
    std::snprintf(buf, sizeof buf, "intervention set {{Z}}=%d chain=%d collider=%d", pomis_ok,
                  chain_ok, collider_ok);
    report(8, "intervention-set fixtures", pass, buf, timer.seconds());
}

}  // namespace

int main() {
    Timer total;
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf("%s: %d criterion(s) failed (%.1fs total)\n", g_failures ? "FAIL" : "OK",
                g_failures, total.seconds());
    return g_failures ? 1 : 0;
}
