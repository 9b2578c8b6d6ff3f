#pragma once

#include <map>
#include <string>
#include <vector>

#include "cdp/planner.hpp"

namespace cdp {

// Fixed CSV schema for per-step records; golden-file tested.
extern const char* const kBenchmarkCsvHeader;

struct BenchmarkConfig {
    int scenario = 1;  // 1 direct attacker, 2 exploring attacker, 3 mixed, 4 random topology
    std::vector<DefenderMethod> methods = {DefenderMethod::CPomcp};
    int horizon = 30;
    int budget_sims = 1000;
    double budget_seconds = 0.0;
    int particles = 1000;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    PruningConfig pruning;      // thresholds for the causal pruning rules
    std::string scenario_file;  // empty: built-in default instance
    std::string out_dir;        // empty: no files written

    void validate() const;
};

struct MethodSummary {
    int scenario = 0;
    DefenderMethod method = DefenderMethod::CPomcp;
    std::vector<double> returns;  // one per seed
    double mean_return = 0.0;
    double stddev_return = 0.0;
    double mean_search_ms = 0.0;
    double mean_pruned_fraction = 0.0;
    double total_search_minutes = 0.0;
    double regret = 0.0;  // against the best mean return in the run
};

struct BenchmarkResult {
    BenchmarkConfig config;
    std::vector<std::pair<DefenderMethod, EpisodeResult>> episodes;
    std::vector<MethodSummary> summaries;
    double j_star = 0.0;

    std::string to_csv() const;
    std::string summary_json() const;
};

// Instantiates the scenario variant for one episode seed: attacker mix for
// scenarios 1-3, resampled intra-zone connectivity for scenario 4.
Scenario scenario_for_run(const Scenario& base, int scenario_id, int horizon, std::uint64_t seed);

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

// Shortfall against a reference per-minute return over n minutes:
// n * j_star - sum of the first n entries.
double regret(std::span<const double> per_minute_returns, double j_star, int n);

}  // namespace cdp
