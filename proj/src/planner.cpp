#include "cdp/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace cdp {

double ucb_score(double child_value, double child_visits, double parent_visits, double c) {
    if (child_visits < 1.0 || parent_visits < 1.0)
        throw PreconditionError("ucb_score requires visit counts >= 1");
    if (c < 0.0) throw PreconditionError("ucb_score requires a non-negative exploration constant");
    return child_value + c * std::sqrt(std::log(parent_visits) / child_visits);
}

PruningHook causal_pruning_hook(const Topology& topo, PruningConfig cfg) {
    return [topo, cfg](const Observation& obs, const ParticleBelief& belief) {
        return pruned_intervention_set(obs, belief, topo, cfg);
    };
}

PruningHook identity_pruning_hook(const CyberEnv& env) {
    auto all = env.all_interventions();
    return [all](const Observation&, const ParticleBelief&) {
        PrunedInterventionSet out;
        out.admissible = all;
        out.full_size = all.size();
        out.pruned_size = all.size();
        return out;
    };
}

Planner::Planner(const CyberEnv& env, SearchConfig cfg, PruningHook hook)
    : env_(env), cfg_(cfg), hook_(std::move(hook)) {
    if (cfg_.budget_sims < 1 && cfg_.budget_seconds <= 0.0)
        throw PreconditionError("search budget must be positive");
}

int Planner::new_node() {
    arena_.emplace_back();
    return static_cast<int>(arena_.size()) - 1;
}

void Planner::push_pool(HistNode& node, const WorldState& state) {
    std::size_t cap = static_cast<std::size_t>(std::max(64, cfg_.particles));
    if (node.pool.size() < cap) {
        node.pool.push_back(state);
    } else {
        node.pool[node.pool_cursor] = state;
        node.pool_cursor = (node.pool_cursor + 1) % cap;
    }
}

void Planner::expand(HistNode& node) {
    node.actions.reserve(step_admissible_.size());
    for (const auto& a : step_admissible_) {
        ActionChild ac;
        ac.action = a;
        node.actions.push_back(std::move(ac));
    }
    node.expanded = true;
}

int Planner::select_child(const HistNode& node) const {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.actions.size(); ++i) {
        const auto& ac = node.actions[i];
        if (ac.blocked) continue;
        if (ac.visits == 0) return static_cast<int>(i);  // forced first visit, canonical order
        double score = ucb_score(ac.value, ac.visits, std::max(node.visits, 1), cfg_.exploration_c);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    return best;
}

double Planner::rollout(WorldState state, int depth, int remaining, Rng& rng) const {
    int steps = std::min({cfg_.rollout_depth, remaining, cfg_.max_depth - depth});
    int samples = std::max(1, cfg_.rollout_samples);
    double total = 0.0;
    for (int s = 0; s < samples; ++s) {
        WorldState cur = state;
        double disc = 1.0;
        for (int k = 0; k < steps; ++k) {
            cur = env_.transition(cur, Intervention::none(), rng);
            total += disc * env_.reward(cur, Intervention::none());
            disc *= cfg_.gamma;
        }
        total += disc * cfg_.base_value;
    }
    return total / samples;
}

void Planner::record(int& visits, double& value, double ret, const void* id) {
    ++visits;
    value += (ret - value) / static_cast<double>(visits);
    if (backprop_observer) backprop_observer(id, ret);
}

double Planner::simulate(int node_id, WorldState state, int depth, int remaining, Rng& rng,
                         SearchStats& stats) {
    if (remaining <= 0 || depth >= cfg_.max_depth) return cfg_.base_value;
    if (!arena_[node_id].expanded) {
        expand(arena_[node_id]);
        double ret = rollout(std::move(state), depth, remaining, rng);
        HistNode& nd = arena_[node_id];
        record(nd.visits, nd.value, ret, &nd);
        return ret;
    }
    int ai = select_child(arena_[node_id]);
    if (ai < 0) return cfg_.base_value;
    StepResult sr = env_.step(state, arena_[node_id].actions[ai].action, rng);
    int child_id;
    {
        auto& children = arena_[node_id].actions[ai].children;
        auto it = children.find(sr.obs);
        if (it == children.end()) {
            child_id = new_node();
            arena_[node_id].actions[ai].children.emplace(sr.obs, child_id);
        } else {
            child_id = it->second;
        }
    }
    push_pool(arena_[child_id], sr.state);
    stats.max_depth_reached = std::max(stats.max_depth_reached, depth + 1);
    double ret =
        sr.reward + cfg_.gamma * simulate(child_id, std::move(sr.state), depth + 1, remaining - 1,
                                          rng, stats);
    HistNode& nd = arena_[node_id];
    ActionChild& ac = nd.actions[ai];
    record(ac.visits, ac.value, ret, &ac);
    record(nd.visits, nd.value, ret, &nd);
    return ret;
}

void Planner::reset() {
    arena_.clear();
    root_ = -1;
}

int Planner::copy_subtree(const std::deque<HistNode>& from, int node_id) {
    int id = new_node();
    HistNode& dst = arena_[id];
    const HistNode& src = from[node_id];
    dst.visits = src.visits;
    dst.value = src.value;
    dst.expanded = src.expanded;
    dst.pool = src.pool;
    dst.pool_cursor = src.pool_cursor;
    dst.actions.reserve(src.actions.size());
    for (const auto& ac : src.actions) {
        ActionChild copy;
        copy.action = ac.action;
        copy.visits = ac.visits;
        copy.value = ac.value;
        for (const auto& [obs, child] : ac.children)
            copy.children.emplace(obs, copy_subtree(from, child));
        arena_[id].actions.push_back(std::move(copy));
    }
    return id;
}

void Planner::advance(const Intervention& iv, const Observation& obs) {
    if (root_ < 0) return;
    int next = -1;
    for (const auto& ac : arena_[root_].actions) {
        if (!(ac.action == iv)) continue;
        auto it = ac.children.find(obs);
        if (it != ac.children.end()) next = it->second;
        break;
    }
    if (next < 0) {
        reset();
        return;
    }
    std::deque<HistNode> old;
    old.swap(arena_);
    root_ = copy_subtree(old, next);
}

void Planner::refresh_root(HistNode& node, const ParticleBelief& belief) {
    // The admissible set for this step, computed once from the root belief
    // and applied at every expansion during this search.
    auto pruned = hook_(env_.observation_of(belief.particles.front()), belief);
    step_admissible_ = pruned.admissible;
    std::vector<ActionChild> refreshed;
    refreshed.reserve(pruned.admissible.size());
    // Admissible arms first, in canonical order, then previously simulated
    // arms that fell out of the admissible set; the latter are blocked from
    // selection but keep their subtree statistics in case they return.
    std::vector<char> used(node.actions.size(), 0);
    for (const auto& a : pruned.admissible) {
        ActionChild next;
        next.action = a;
        for (std::size_t i = 0; i < node.actions.size(); ++i)
            if (!used[i] && node.actions[i].action == a) {
                next = std::move(node.actions[i]);
                used[i] = 1;
                break;
            }
        next.blocked = false;
        refreshed.push_back(std::move(next));
    }
    for (std::size_t i = 0; i < node.actions.size(); ++i) {
        if (used[i] || node.actions[i].visits == 0) continue;
        node.actions[i].blocked = true;
        refreshed.push_back(std::move(node.actions[i]));
    }
    // Carried-over estimates were learned under an older belief; shrinking
    // their visit counts lets fresh simulations overturn them quickly while
    // keeping their ordering as guidance. Arms whose count decays to zero
    // are re-probed by the forced first-visit sweep.
    for (auto& ac : refreshed)
        ac.visits = static_cast<int>(std::floor(ac.visits * cfg_.reuse_decay));
    int visits = 0;
    double weighted = 0.0;
    for (const auto& ac : refreshed) {
        visits += ac.visits;
        weighted += ac.value * ac.visits;
    }
    node.actions = std::move(refreshed);
    node.visits = visits;
    node.value = visits > 0 ? weighted / visits : 0.0;
    node.pool = belief.particles;
    node.pool_cursor = 0;
    node.expanded = true;
}

Intervention Planner::search(const ParticleBelief& belief, int remaining_horizon, Rng& rng,
                             SearchStats* stats_out) {
    if (belief.particles.empty()) throw PreconditionError("search needs a non-empty belief");
    SearchStats stats;
    auto started = std::chrono::steady_clock::now();
    if (root_ < 0) {
        root_ = new_node();
    }
    int root = root_;
    refresh_root(arena_[root], belief);

    auto elapsed_s = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };
    Rng sim_rng = rng.split("simulations");
    int sims = 0;
    while (true) {
        if (cfg_.budget_seconds > 0.0) {
            if (sims > 0 && elapsed_s() >= cfg_.budget_seconds) break;
        } else if (sims >= cfg_.budget_sims) {
            break;
        }
        Rng r = sim_rng.split(static_cast<std::uint64_t>(sims));
        const WorldState& s0 =
            belief.particles[r.integer(belief.particles.size())];
        simulate(root, s0, 0, remaining_horizon, r, stats);
        ++sims;
    }
    stats.simulations = sims;
    stats.tree_nodes = arena_.size();
    for (const auto& nd : arena_) stats.tree_nodes += nd.actions.size();
    stats.elapsed_ms = elapsed_s() * 1e3;
    if (stats_out) *stats_out = stats;

    const auto& actions = arena_[root].actions;
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (actions[i].blocked) continue;
        double v = actions[i].visits > 0 ? actions[i].value : 0.0;
        if (v > best_value) {
            best_value = v;
            best = static_cast<int>(i);
        }
    }
    return actions[best].action;
}

std::vector<Planner::ArmStats> Planner::root_child_stats() const {
    std::vector<ArmStats> out;
    if (root_ < 0) return out;
    for (const auto& ac : arena_[root_].actions)
        out.push_back({ac.action, ac.visits, ac.value, ac.blocked, &ac});
    return out;
}

std::pair<int, double> Planner::root_stats() const {
    if (root_ < 0) return {0, 0.0};
    return {arena_[root_].visits, arena_[root_].value};
}

const void* Planner::root_id() const { return root_ < 0 ? nullptr : &arena_[root_]; }

std::string to_string(DefenderMethod m) {
    switch (m) {
        case DefenderMethod::CPomcp: return "c-pomcp";
        case DefenderMethod::Pomcp: return "pomcp";
        case DefenderMethod::Noop: return "noop";
        default: return "random";
    }
}

DefenderMethod defender_method_from_string(const std::string& s) {
    if (s == "c-pomcp" || s == "cpomcp") return DefenderMethod::CPomcp;
    if (s == "pomcp") return DefenderMethod::Pomcp;
    if (s == "noop") return DefenderMethod::Noop;
    if (s == "random") return DefenderMethod::Random;
    throw ConfigError("method: unknown defender method '" + s +
                      "' (want c-pomcp|pomcp|noop|random)");
}

EpisodeResult run_episode(const CyberEnv& env, const SearchConfig& cfg, DefenderMethod method,
                          std::uint64_t seed, const PruningConfig& pruning,
                          PruningHook hook_override) {
    const int horizon = env.scenario().horizon;
    Rng root(seed);
    Rng env_rng = root.split("env");
    Rng filter_rng = root.split("filter");
    Rng search_rng = root.split("search");

    WorldState state = env.initial_state(env_rng);
    ParticleBelief belief = initial_belief(env, cfg.particles, filter_rng);
    Observation obs = env.initial_observation();

    PruningHook hook = hook_override ? std::move(hook_override)
                       : method == DefenderMethod::CPomcp
                           ? causal_pruning_hook(env.topology(), pruning)
                           : identity_pruning_hook(env);
    Planner planner(env, cfg, hook);
    auto all = env.all_interventions();

    EpisodeResult out;
    out.seed = seed;
    out.tag = state.attacker_tag;
    double disc = 1.0;
    double cum = 0.0;
    for (int t = 1; t <= horizon; ++t) {
        Rng step_rng = search_rng.split(static_cast<std::uint64_t>(t));
        Rng filter_step = filter_rng.split(static_cast<std::uint64_t>(t));

        StepRecord rec;
        rec.step = t;
        SearchStats stats;
        PrunedInterventionSet pruned = hook(obs, belief);
        Intervention iv;
        switch (method) {
            case DefenderMethod::CPomcp:
            case DefenderMethod::Pomcp:
                iv = planner.search(belief, horizon - t + 1, step_rng, &stats);
                break;
            case DefenderMethod::Noop: iv = Intervention::none(); break;
            case DefenderMethod::Random: iv = all[step_rng.integer(all.size())]; break;
        }
        StepResult sr = env.step(state, iv, env_rng);
        if (method == DefenderMethod::CPomcp || method == DefenderMethod::Pomcp)
            planner.advance(iv, sr.obs);
        auto predicted = predict(belief, iv, env, filter_step);
        belief = reweight_resample(std::move(predicted), sr.obs, iv, env, filter_step);

        state = std::move(sr.state);
        obs = sr.obs;
        cum += disc * sr.reward;
        disc *= env.scenario().rewards.gamma;

        rec.intervention = iv;
        rec.obs = sr.obs;
        if (cfg.record_belief) rec.belief_summary = belief.to_json();
        rec.attacker_action = *state.last_attacker_action;
        rec.reward = sr.reward;
        rec.cum_discounted = cum;
        rec.search_ms = stats.elapsed_ms;
        rec.tree_nodes = stats.tree_nodes;
        rec.full_size = pruned.full_size;
        rec.pruned_size = pruned.pruned_size;
        int depth = std::min(cfg.max_depth, horizon - t + 1);
        rec.pruned_fraction = prune_factor(pruned.admissible_ratio(), depth);
        out.steps.push_back(std::move(rec));
    }
    out.discounted_return = cum;
    return out;
}

}  // namespace cdp
