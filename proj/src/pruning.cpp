#include "cdp/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace cdp {

PrunedInterventionSet pruned_intervention_set(const Observation& observables,
                                              const ParticleBelief& belief, const Topology& topo,
                                              const PruningConfig& cfg) {
    const int n = topo.size();
    PrunedInterventionSet out;
    out.full_size = static_cast<std::size_t>(n) * (2 + kDecoySlots + 1) + 1;
    std::vector<double> p_comp(n);
    for (int i = 0; i < n; ++i) p_comp[i] = belief.marginal_compromised(i);

    out.admissible.push_back(Intervention::none());
    for (int i = 0; i < n; ++i)
        if (!(p_comp[i] > cfg.tau_deceptive)) out.admissible.push_back(Intervention::analyze(i));
    for (int i = 0; i < n; ++i) {
        const auto& vulns = topo.nodes[i].vulnerabilities;
        for (int s = 0; s < kDecoySlots; ++s) {
            // A slot counts as running when the decoy is up or when a live
            // service already occupies it (the decoy could never start).
            bool running = ((observables.decoys[i] >> s) & 1) ||
                           std::find(vulns.begin(), vulns.end(), s) != vulns.end();
            if (!running && !(p_comp[i] > cfg.tau_deceptive))
                out.admissible.push_back(Intervention::start_decoy(i, s));
        }
    }
    for (int i = 0; i < n; ++i)
        if (!(p_comp[i] < cfg.tau_compromised)) out.admissible.push_back(Intervention::remove(i));
    for (int i = 0; i < n; ++i)
        if (!(p_comp[i] < cfg.tau_compromised)) out.admissible.push_back(Intervention::restore(i));
    std::sort(out.admissible.begin(), out.admissible.end());
    out.pruned_size = out.admissible.size();
    return out;
}

double prune_factor(std::span<const double> per_step_ratio) {
    double prod = 1.0;
    for (double r : per_step_ratio) {
        if (!(r > 0.0) || r > 1.0)
            throw DomainError("prune_factor ratios must lie in (0, 1], got " + std::to_string(r));
        prod *= r;
    }
    return 1.0 - prod;
}

double prune_factor(double ratio, int depth) {
    if (!(ratio > 0.0) || ratio > 1.0)
        throw DomainError("prune_factor ratio must lie in (0, 1], got " + std::to_string(ratio));
    if (depth < 0) throw DomainError("prune_factor depth must be >= 0");
    return 1.0 - std::pow(ratio, depth);
}

namespace {

// Extracts the value a particle assigns to a slice-t variable of the
// unrolled graph; empty when the variable is not represented in the state.
std::optional<long> particle_value(const WorldState& p, const VariableId& v, int t) {
    if (v == strategy_var()) return static_cast<long>(p.attacker_tag);
    if (v.time_index != t) return std::nullopt;
    if (v == client_var(t)) return p.client_count;
    if (v == action_var(t)) {
        if (!p.last_attacker_action) return -1;
        const auto& a = *p.last_attacker_action;
        return (static_cast<long>(a.kind) << 24) | (static_cast<long>(a.target + 1) << 12) |
               (static_cast<long>(a.vulnerability + 1) << 4) | static_cast<long>(a.privilege);
    }
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        int idx = static_cast<int>(i);
        if (v == intrusion_var(idx, t)) return static_cast<long>(p.nodes[i].intrusion);
        if (v == service_var(idx, t)) return p.nodes[i].service;
        if (v == decoy_var(idx, t)) return p.nodes[i].decoys;
        if (v == activity_var(idx, t)) return static_cast<long>(p.last_activity[i]);
    }
    return std::nullopt;
}

}  // namespace

CausalGraph reduced_step_graph(const CausalGraph& unrolled, int t, const ParticleBelief& belief,
                               const PruningConfig& cfg) {
    if (t < 2) throw PreconditionError("reduced_step_graph needs a step index >= 2");
    std::vector<VariableId> keep;
    for (const auto& v : unrolled.nodes()) {
        if (v == objective_var()) continue;
        if (v.time_index == t || v.time_index == t - 1 || v.time_index == kStaticTime)
            keep.push_back(v);
    }

    // Drop slice-t variables whose value is pinned by the belief.
    if (!belief.particles.empty()) {
        std::vector<VariableId> remaining;
        for (const auto& v : keep) {
            std::optional<long> first = particle_value(belief.particles.front(), v, t);
            if (!first.has_value()) {
                remaining.push_back(v);
                continue;
            }
            std::size_t agree = 0;
            for (const auto& p : belief.particles)
                if (particle_value(p, v, t) == first) ++agree;
            double frac = static_cast<double>(agree) / static_cast<double>(belief.size());
            bool determined = false;
            if (frac >= cfg.determinism) {
                determined = true;
            } else if (frac < cfg.determinism) {
                // A different value could still dominate; check the mode.
                std::map<long, std::size_t> counts;
                for (const auto& p : belief.particles) {
                    auto val = particle_value(p, v, t);
                    if (val) ++counts[*val];
                }
                for (const auto& [val, c] : counts)
                    if (static_cast<double>(c) / static_cast<double>(belief.size()) >=
                        cfg.determinism)
                        determined = true;
            }
            if (!determined) remaining.push_back(v);
        }
        keep = std::move(remaining);
    }

    CausalGraph g = unrolled.induced_subgraph(keep);

    // Objective under the do-nothing base strategy: future rewards depend on
    // the current intrusion, service and decoy states and on the attacker
    // strategy; past-slice rewards are already realized and also feed it.
    g.add_node(objective_var(), NodeClass::Target);
    auto link = [&](const VariableId& v) {
        if (g.contains(v)) g.add_edge(v, objective_var());
    };
    link(strategy_var());
    link(reward_var(t - 1));
    link(reward_var(t));
    if (!belief.particles.empty()) {
        for (std::size_t i = 0; i < belief.particles.front().nodes.size(); ++i) {
            int idx = static_cast<int>(i);
            link(intrusion_var(idx, t));
            link(service_var(idx, t));
            link(decoy_var(idx, t));
        }
    } else {
        for (const auto& v : g.nodes())
            if (v.time_index == t &&
                (v.name.starts_with("I") || v.name.starts_with("S") || v.name.starts_with("D")))
                g.add_edge(v, objective_var());
    }
    return g;
}

}  // namespace cdp
