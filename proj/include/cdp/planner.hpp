#pragma once

#include <deque>
#include <functional>
#include <unordered_map>

#include "cdp/belief.hpp"
#include "cdp/pruning.hpp"

namespace cdp {

// Score used by the tree policy; unvisited children are handled by the
// caller (forced first visit). Counts must be >= 1.
double ucb_score(double child_value, double child_visits, double parent_visits, double c);

struct SearchConfig {
    double exploration_c = 0.5;
    int budget_sims = 1000;       // simulation budget (primary mode)
    double budget_seconds = 0.0;  // wall-clock budget; used when > 0
    int rollout_depth = 4;
    int rollout_samples = 3;  // rollouts averaged for a leaf estimate
    int max_depth = 50;
    double gamma = 0.99;
    int particles = 1000;
    double base_value = 0.0;   // terminal estimate beyond the rollout
    double reuse_decay = 0.5;  // visit-count scale applied to a reused root
    bool record_belief = false;  // fill StepRecord::belief_summary
};

// Restriction applied to a node's children at expansion time. The causal
// hook returns the pruned set; the identity hook returns every candidate
// (the plain, non-causal planner). The hook is evaluated once per step on
// the root belief and the resulting set applies tree-wide.
using PruningHook =
    std::function<PrunedInterventionSet(const Observation&, const ParticleBelief&)>;

PruningHook causal_pruning_hook(const Topology& topo, PruningConfig cfg = {});
PruningHook identity_pruning_hook(const CyberEnv& env);

struct SearchStats {
    int simulations = 0;
    std::size_t tree_nodes = 0;  // history nodes plus intervention nodes
    int max_depth_reached = 0;
    double elapsed_ms = 0.0;
};

// Single-owner sequential search; a fixed seed reproduces the tree and the
// returned intervention exactly, which is the reference behavior the tests
// rely on. Distinct planners may run concurrently on one const environment.
class Planner {
  public:
    Planner(const CyberEnv& env, SearchConfig cfg, PruningHook hook);

    // Runs simulations from a root built on `belief` until the budget is
    // exhausted, then returns the root intervention with the highest value
    // estimate (unvisited children count as the default value 0; ties break
    // by canonical intervention order). When the root carries statistics
    // from a previous step (see advance), its children are refreshed against
    // the current belief: newly admissible interventions are added, pruned
    // ones dropped, surviving statistics kept.
    Intervention search(const ParticleBelief& belief, int remaining_horizon, Rng& rng,
                        SearchStats* stats = nullptr);

    // Moves the root to the subtree reached by performing `iv` and observing
    // `obs`, keeping its statistics for the next search; discards the tree
    // when that history was never simulated.
    void advance(const Intervention& iv, const Observation& obs);
    void reset();

    // Test instrumentation: called with every value backpropagated through a
    // node; the node pointer identifies the bookkeeping entry.
    std::function<void(const void* node, double ret)> backprop_observer;

    struct ArmStats {
        Intervention action;
        int visits = 0;
        double value = 0.0;
        bool blocked = false;
        const void* id = nullptr;
    };
    std::vector<ArmStats> root_child_stats() const;
    std::pair<int, double> root_stats() const;  // (visits, value)
    const void* root_id() const;

  private:
    struct ActionChild {
        Intervention action;
        int visits = 0;
        double value = 0.0;
        bool blocked = false;  // outside the current admissible set; stats kept
        std::unordered_map<Observation, int, ObservationHash> children;
    };
    struct HistNode {
        int visits = 0;
        double value = 0.0;
        bool expanded = false;
        std::vector<ActionChild> actions;
        std::vector<WorldState> pool;
        std::size_t pool_cursor = 0;
    };

    int new_node();
    void expand(HistNode& node);
    void refresh_root(HistNode& node, const ParticleBelief& belief);
    void push_pool(HistNode& node, const WorldState& state);
    int select_child(const HistNode& node) const;
    double rollout(WorldState state, int depth, int remaining, Rng& rng) const;
    double simulate(int node_id, WorldState state, int depth, int remaining, Rng& rng,
                    SearchStats& stats);
    void record(int& visits, double& value, double ret, const void* id);
    int copy_subtree(const std::deque<HistNode>& from, int node_id);

    const CyberEnv& env_;
    SearchConfig cfg_;
    PruningHook hook_;
    std::deque<HistNode> arena_;
    std::vector<Intervention> step_admissible_;
    int root_ = -1;
};

enum class DefenderMethod { CPomcp, Pomcp, Noop, Random };
std::string to_string(DefenderMethod m);
DefenderMethod defender_method_from_string(const std::string& s);

struct StepRecord {
    int step = 0;
    Intervention intervention;
    AttackerAction attacker_action;
    Observation obs;
    double reward = 0.0;
    double cum_discounted = 0.0;
    double search_ms = 0.0;
    std::size_t tree_nodes = 0;
    std::size_t full_size = 0;
    std::size_t pruned_size = 0;
    double pruned_fraction = 0.0;  // estimated search-tree size reduction
    std::string belief_summary;    // json marginals, when requested
};

struct EpisodeResult {
    std::vector<StepRecord> steps;
    double discounted_return = 0.0;
    AttackerTag tag = AttackerTag::BLine;
    std::uint64_t seed = 0;
};

// One full episode: filter, prune, search, act, observe, repeat for the
// scenario horizon. Fully determined by (env scenario, config, method, seed).
// `hook_override` replaces the method's pruning hook when provided (used to
// verify that the two planning methods differ only in that hook).
EpisodeResult run_episode(const CyberEnv& env, const SearchConfig& cfg, DefenderMethod method,
                          std::uint64_t seed, const PruningConfig& pruning = {},
                          PruningHook hook_override = nullptr);

}  // namespace cdp
