#pragma once

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cdp/errors.hpp"

namespace cdp {

// Time index for variables that do not belong to a particular step.
inline constexpr int kStaticTime = 0;

// A variable of a causal model: a symbolic name plus a time step (>= 1),
// or kStaticTime for variables shared by all steps.
struct VariableId {
    std::string name;
    int time_index = kStaticTime;

    auto operator<=>(const VariableId&) const = default;
};

std::string to_string(const VariableId& v);        // "name@t", or "name" when static
VariableId parse_variable(std::string_view text);  // inverse of to_string

enum class NodeClass { Manipulative, NonManipulative, Observed, Latent, Target };

// Directed acyclic graph over variables. Latent variables are explicit nodes
// (no bidirected edges). Immutable once built; all queries are const.
class CausalGraph {
  public:
    void add_node(VariableId v, NodeClass cls = NodeClass::Observed);
    // Adds an edge, inserting unknown endpoints as Observed nodes. Enforces
    // temporal order: the head's time index must be >= the tail's, unless
    // either endpoint is static.
    void add_edge(const VariableId& tail, const VariableId& head);

    bool contains(const VariableId& v) const { return index_.count(v) != 0; }
    std::size_t node_count() const { return ids_.size(); }
    std::size_t edge_count() const;
    std::vector<VariableId> nodes() const;

    std::vector<VariableId> parents(const VariableId& v) const;
    std::vector<VariableId> children(const VariableId& v) const;
    NodeClass node_class(const VariableId& v) const;
    std::vector<VariableId> latent_nodes() const;

    bool is_acyclic() const;

    // Standard d-separation (reachability over active trails). The three sets
    // must be pairwise disjoint and all members must be known variables.
    bool d_separated(std::span<const VariableId> a, std::span<const VariableId> b,
                     std::span<const VariableId> given) const;

    // The possibly-optimal minimal intervention sets in the Markovian special
    // case (no latent nodes): exactly one set, the parents of the target.
    std::vector<std::vector<VariableId>> pomis_markovian(const VariableId& target) const;

    // Copy of the graph with all edges into `vars` removed; the graphical
    // surgery corresponding to forcing those variables, used to test whether
    // an intervention can influence a target at all.
    CausalGraph without_incoming(std::span<const VariableId> vars) const;

    // Subgraph induced by `keep` (edges with both endpoints retained).
    CausalGraph induced_subgraph(std::span<const VariableId> keep) const;

    // Plain-text edge list: `latent:` lines first, then one `tail -> head`
    // per line; bare variable lines declare isolated nodes.
    std::string to_edge_list() const;
    static CausalGraph from_edge_list(std::string_view text);

  private:
    int index_of(const VariableId& v) const;

    std::vector<VariableId> ids_;
    std::vector<NodeClass> cls_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
    std::map<VariableId, int> index_;
};

// Causal graph of the simulator dynamics, unrolled for a fixed horizon.
// One step contributes, per target-system node i: intrusion I<i>, service
// S<i>, decoy state D<i>, activity Z<i>, noise W<i>; plus shared nodes:
// attacker action A, exploit success E, client count C with arrivals ARR and
// departures DEP, and reward R. Static nodes: attacker strategy STRAT and the
// objective J. Edge set mirrors the causal functions of the step dynamics.
struct UnrollSpec {
    int system_nodes = 2;
    int horizon = 2;
    std::vector<std::pair<int, int>> workflow_edges;  // 0-based node indices
};
CausalGraph unrolled_dynamics_graph(const UnrollSpec& spec);

// Variable-id helpers for the unrolled graph.
VariableId intrusion_var(int node, int t);
VariableId service_var(int node, int t);
VariableId decoy_var(int node, int t);
VariableId activity_var(int node, int t);
VariableId client_var(int t);
VariableId action_var(int t);
VariableId reward_var(int t);
VariableId strategy_var();
VariableId objective_var();

}  // namespace cdp
