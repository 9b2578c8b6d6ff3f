#pragma once

#include <span>
#include <vector>

#include "cdp/belief.hpp"
#include "cdp/causal_graph.hpp"
#include "cdp/cyber_env.hpp"

namespace cdp {

struct PruningConfig {
    // A node counts as clean/compromised when the particle-marginal
    // probability of {Compromised, Root} crosses these thresholds. The
    // defaults are asymmetric: defensive interventions are pruned only on
    // nodes that are clean with high confidence, deceptive and forensic ones
    // only on nodes that are compromised with high confidence, so that a
    // node under actively contested belief keeps both toolsets.
    double tau_compromised = 0.15;  // below: remove/restore pruned
    double tau_deceptive = 0.9;     // above: analyze/decoy pruned
    double determinism = 0.99;      // agreement level that removes a variable
};

struct PrunedInterventionSet {
    std::vector<Intervention> admissible;  // canonical order; always contains do-nothing
    std::size_t full_size = 0;
    std::size_t pruned_size = 0;  // |admissible|

    double admissible_ratio() const {
        return full_size == 0 ? 1.0
                              : static_cast<double>(pruned_size) / static_cast<double>(full_size);
    }
};

// Admissible defender interventions for the current belief. Excluded are:
// decoys already running, remove/restore on nodes believed clean, and
// analyze/decoy on nodes believed compromised. Do-nothing always stays.
PrunedInterventionSet pruned_intervention_set(const Observation& observables,
                                              const ParticleBelief& belief, const Topology& topo,
                                              const PruningConfig& cfg = {});

// Fractional reduction of the search tree's intervention count when level k
// keeps ratio_k of its candidates: 1 - prod_k ratio_k. Ratios in (0, 1].
double prune_factor(std::span<const double> per_step_ratio);
double prune_factor(double ratio, int depth);

// Per-step two-slice subgraph used to reason about which interventions can
// influence the objective. Slices t-1 and t of the unrolled graph are kept,
// variables whose value is pinned by the belief (>= `determinism` particle
// agreement) are dropped, and an objective node is appended whose parents are
// the slice-t variables the objective depends on when the defender follows
// the do-nothing base strategy from here on.
CausalGraph reduced_step_graph(const CausalGraph& unrolled, int t, const ParticleBelief& belief,
                               const PruningConfig& cfg = {});

}  // namespace cdp
