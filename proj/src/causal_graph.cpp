#include "cdp/causal_graph.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <deque>
#include <set>
#include <sstream>

namespace cdp {

std::string to_string(const VariableId& v) {
    if (v.time_index == kStaticTime) return v.name;
    return v.name + "@" + std::to_string(v.time_index);
}

VariableId parse_variable(std::string_view text) {
    auto at = text.rfind('@');
    if (at == std::string_view::npos) return {std::string(text), kStaticTime};
    int t = 0;
    auto digits = text.substr(at + 1);
    auto res = std::from_chars(digits.data(), digits.data() + digits.size(), t);
    if (res.ec != std::errc{} || res.ptr != digits.data() + digits.size() || t < 1)
        throw DomainError("bad variable time index in '" + std::string(text) + "'");
    return {std::string(text.substr(0, at)), t};
}

void CausalGraph::add_node(VariableId v, NodeClass cls) {
    auto [it, inserted] = index_.try_emplace(v, static_cast<int>(ids_.size()));
    if (!inserted) {
        cls_[it->second] = cls;
        return;
    }
    ids_.push_back(std::move(v));
    cls_.push_back(cls);
    out_.emplace_back();
    in_.emplace_back();
}

void CausalGraph::add_edge(const VariableId& tail, const VariableId& head) {
    if (tail == head) throw PreconditionError("self edge on " + to_string(tail));
    if (tail.time_index != kStaticTime && head.time_index != kStaticTime &&
        head.time_index < tail.time_index)
        throw PreconditionError("edge violates temporal order: " + to_string(tail) + " -> " +
                                to_string(head));
    if (!contains(tail)) add_node(tail);
    if (!contains(head)) add_node(head);
    int t = index_.at(tail), h = index_.at(head);
    if (std::find(out_[t].begin(), out_[t].end(), h) != out_[t].end()) return;
    out_[t].push_back(h);
    in_[h].push_back(t);
}

std::size_t CausalGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& adj : out_) n += adj.size();
    return n;
}

std::vector<VariableId> CausalGraph::nodes() const {
    std::vector<VariableId> out(ids_);
    std::sort(out.begin(), out.end());
    return out;
}

int CausalGraph::index_of(const VariableId& v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw UnknownVariableError("unknown variable " + to_string(v));
    return it->second;
}

std::vector<VariableId> CausalGraph::parents(const VariableId& v) const {
    std::vector<VariableId> out;
    for (int p : in_[index_of(v)]) out.push_back(ids_[p]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VariableId> CausalGraph::children(const VariableId& v) const {
    std::vector<VariableId> out;
    for (int c : out_[index_of(v)]) out.push_back(ids_[c]);
    std::sort(out.begin(), out.end());
    return out;
}

NodeClass CausalGraph::node_class(const VariableId& v) const { return cls_[index_of(v)]; }

std::vector<VariableId> CausalGraph::latent_nodes() const {
    std::vector<VariableId> out;
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (cls_[i] == NodeClass::Latent) out.push_back(ids_[i]);
    std::sort(out.begin(), out.end());
    return out;
}

bool CausalGraph::is_acyclic() const {
    std::vector<int> indeg(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) indeg[i] = static_cast<int>(in_[i].size());
    std::deque<int> q;
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (indeg[i] == 0) q.push_back(static_cast<int>(i));
    std::size_t seen = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        ++seen;
        for (int c : out_[v])
            if (--indeg[c] == 0) q.push_back(c);
    }
    return seen == ids_.size();
}

bool CausalGraph::d_separated(std::span<const VariableId> a, std::span<const VariableId> b,
                              std::span<const VariableId> given) const {
    std::vector<char> in_a(ids_.size()), in_b(ids_.size()), cond(ids_.size());
    auto mark = [&](std::span<const VariableId> vs, std::vector<char>& flags) {
        for (const auto& v : vs) flags[index_of(v)] = 1;
    };
    mark(a, in_a);
    mark(b, in_b);
    mark(given, cond);
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (in_a[i] + in_b[i] + cond[i] > 1)
            throw PreconditionError("d_separated requires pairwise disjoint sets");

    // Ancestors of the conditioning set (inclusive), for collider activation.
    std::vector<char> anc(cond);
    std::deque<int> work;
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (cond[i]) work.push_back(static_cast<int>(i));
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        for (int p : in_[v])
            if (!anc[p]) {
                anc[p] = 1;
                work.push_back(p);
            }
    }

    // Active-trail reachability. Direction encodes how the node was entered:
    // 0 = from a child (moving up), 1 = from a parent (moving down).
    std::vector<std::array<char, 2>> visited(ids_.size(), {0, 0});
    std::deque<std::pair<int, int>> frontier;
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (in_a[i]) frontier.emplace_back(static_cast<int>(i), 0);
    while (!frontier.empty()) {
        auto [v, dir] = frontier.front();
        frontier.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = 1;
        if (!cond[v] && in_b[v]) return false;
        if (dir == 0 && !cond[v]) {
            for (int p : in_[v]) frontier.emplace_back(p, 0);
            for (int c : out_[v]) frontier.emplace_back(c, 1);
        } else if (dir == 1) {
            if (!cond[v])
                for (int c : out_[v]) frontier.emplace_back(c, 1);
            if (anc[v])
                for (int p : in_[v]) frontier.emplace_back(p, 0);
        }
    }
    return true;
}

std::vector<std::vector<VariableId>> CausalGraph::pomis_markovian(const VariableId& target) const {
    int t = index_of(target);
    if (!latent_nodes().empty())
        throw PreconditionError(
            "pomis_markovian requires a graph without latent nodes; "
            "use the approximate per-step reduction instead");
    (void)t;
    return {parents(target)};
}

CausalGraph CausalGraph::without_incoming(std::span<const VariableId> vars) const {
    std::vector<char> cut(ids_.size());
    for (const auto& v : vars) cut[index_of(v)] = 1;
    CausalGraph g;
    for (std::size_t i = 0; i < ids_.size(); ++i) g.add_node(ids_[i], cls_[i]);
    for (std::size_t h = 0; h < ids_.size(); ++h) {
        if (cut[h]) continue;
        for (int t = 0; t < static_cast<int>(ids_.size()); ++t)
            if (std::find(in_[h].begin(), in_[h].end(), t) != in_[h].end())
                g.add_edge(ids_[t], ids_[h]);
    }
    return g;
}

CausalGraph CausalGraph::induced_subgraph(std::span<const VariableId> keep) const {
    std::vector<char> keep_flag(ids_.size());
    for (const auto& v : keep) keep_flag[index_of(v)] = 1;
    CausalGraph g;
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (keep_flag[i]) g.add_node(ids_[i], cls_[i]);
    for (std::size_t t = 0; t < ids_.size(); ++t) {
        if (!keep_flag[t]) continue;
        for (int h : out_[t])
            if (keep_flag[h]) g.add_edge(ids_[t], ids_[h]);
    }
    return g;
}

std::string CausalGraph::to_edge_list() const {
    std::ostringstream os;
    for (const auto& v : latent_nodes()) os << "latent: " << to_string(v) << "\n";
    std::set<int> with_edges;
    std::vector<std::pair<VariableId, VariableId>> edges;
    for (std::size_t t = 0; t < ids_.size(); ++t)
        for (int h : out_[t]) {
            edges.emplace_back(ids_[t], ids_[h]);
            with_edges.insert(static_cast<int>(t));
            with_edges.insert(h);
        }
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 0; i < ids_.size(); ++i)
        if (!with_edges.count(static_cast<int>(i)) && cls_[i] != NodeClass::Latent)
            os << to_string(ids_[i]) << "\n";
    for (const auto& [t, h] : edges) os << to_string(t) << " -> " << to_string(h) << "\n";
    return os.str();
}

CausalGraph CausalGraph::from_edge_list(std::string_view text) {
    CausalGraph g;
    std::istringstream is{std::string(text)};
    std::string line;
    auto trim = [](std::string s) {
        auto b = s.find_first_not_of(" \t\r");
        auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("latent:", 0) == 0) {
            g.add_node(parse_variable(trim(line.substr(7))), NodeClass::Latent);
            continue;
        }
        auto arrow = line.find("->");
        if (arrow == std::string::npos) {
            auto v = parse_variable(line);
            if (!g.contains(v)) g.add_node(v);
            continue;
        }
        g.add_edge(parse_variable(trim(line.substr(0, arrow))),
                   parse_variable(trim(line.substr(arrow + 2))));
    }
    return g;
}

VariableId intrusion_var(int node, int t) { return {"I" + std::to_string(node), t}; }
VariableId service_var(int node, int t) { return {"S" + std::to_string(node), t}; }
VariableId decoy_var(int node, int t) { return {"D" + std::to_string(node), t}; }
VariableId activity_var(int node, int t) { return {"Z" + std::to_string(node), t}; }
VariableId client_var(int t) { return {"C", t}; }
VariableId action_var(int t) { return {"A", t}; }
VariableId reward_var(int t) { return {"R", t}; }
VariableId strategy_var() { return {"STRAT", kStaticTime}; }
VariableId objective_var() { return {"J", kStaticTime}; }

CausalGraph unrolled_dynamics_graph(const UnrollSpec& spec) {
    if (spec.system_nodes < 1 || spec.horizon < 1)
        throw PreconditionError("unrolled_dynamics_graph needs >= 1 node and horizon >= 1");
    CausalGraph g;
    const int n = spec.system_nodes;
    g.add_node(strategy_var(), NodeClass::Latent);
    g.add_node(objective_var(), NodeClass::Target);
    for (int i = 0; i < n; ++i) {
        g.add_node(intrusion_var(i, 1), NodeClass::Latent);
        g.add_node(service_var(i, 1), NodeClass::Observed);
        g.add_node(decoy_var(i, 1), NodeClass::Observed);
        g.add_node(activity_var(i, 1), NodeClass::Observed);
    }
    g.add_node(client_var(1), NodeClass::Observed);
    g.add_node(reward_var(1), NodeClass::Target);
    for (int i = 0; i < n; ++i) {
        g.add_edge(intrusion_var(i, 1), reward_var(1));
        g.add_edge(service_var(i, 1), reward_var(1));
    }
    g.add_edge(reward_var(1), objective_var());

    for (int t = 2; t <= spec.horizon; ++t) {
        VariableId act = action_var(t);
        VariableId exploit = {"E", t};
        VariableId arrivals = {"ARR", t};
        VariableId departures = {"DEP", t};
        g.add_node(act, NodeClass::Latent);
        g.add_node(exploit, NodeClass::Latent);
        g.add_node(arrivals, NodeClass::Latent);
        g.add_node(departures, NodeClass::Latent);
        g.add_edge(strategy_var(), act);
        for (int j = 0; j < n; ++j) g.add_edge(intrusion_var(j, t - 1), act);

        g.add_node(client_var(t), NodeClass::Observed);
        g.add_edge(client_var(t - 1), client_var(t));
        g.add_edge(arrivals, client_var(t));
        g.add_edge(departures, client_var(t));

        g.add_node(reward_var(t), NodeClass::Target);
        for (int i = 0; i < n; ++i) {
            VariableId noise = {"W" + std::to_string(i), t};
            g.add_node(intrusion_var(i, t), NodeClass::Latent);
            g.add_node(service_var(i, t), NodeClass::Observed);
            g.add_node(decoy_var(i, t), NodeClass::Observed);
            g.add_node(activity_var(i, t), NodeClass::Observed);
            g.add_node(noise, NodeClass::Latent);

            g.add_edge(intrusion_var(i, t - 1), intrusion_var(i, t));
            g.add_edge(act, intrusion_var(i, t));
            g.add_edge(decoy_var(i, t), intrusion_var(i, t));
            g.add_edge(exploit, intrusion_var(i, t));
            for (const auto& [wp, wc] : spec.workflow_edges)
                if (wc == i) g.add_edge(intrusion_var(wp, t - 1), intrusion_var(i, t));

            g.add_edge(service_var(i, t - 1), service_var(i, t));
            g.add_edge(act, service_var(i, t));

            g.add_edge(decoy_var(i, t - 1), decoy_var(i, t));

            g.add_edge(client_var(t), activity_var(i, t));
            g.add_edge(act, activity_var(i, t));
            g.add_edge(noise, activity_var(i, t));

            g.add_edge(intrusion_var(i, t), reward_var(t));
            g.add_edge(service_var(i, t), reward_var(t));
        }
        g.add_edge(reward_var(t), objective_var());
    }
    return g;
}

}  // namespace cdp
