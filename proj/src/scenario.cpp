#include "cdp/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace cdp {

using nlohmann::json;

std::vector<int> Topology::zone_hosts(int zone) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (nodes[i].role == NodeRole::Host && nodes[i].zone == zone) out.push_back(i);
    return out;
}

std::vector<int> Topology::workflow_parents(int node) const {
    std::vector<int> out;
    for (const auto& [a, b] : workflow_edges)
        if (b == node) out.push_back(a);
    return out;
}

std::vector<int> Topology::workflow_children(int node) const {
    std::vector<int> out;
    for (const auto& [a, b] : workflow_edges)
        if (a == node) out.push_back(b);
    return out;
}

bool Topology::workflow_acyclic() const {
    std::vector<int> indeg(size(), 0);
    for (const auto& [a, b] : workflow_edges) {
        (void)a;
        ++indeg[b];
    }
    std::vector<int> q;
    for (int i = 0; i < size(); ++i)
        if (indeg[i] == 0) q.push_back(i);
    int seen = 0;
    while (!q.empty()) {
        int v = q.back();
        q.pop_back();
        ++seen;
        for (int c : workflow_children(v))
            if (--indeg[c] == 0) q.push_back(c);
    }
    return seen == size();
}

std::string to_string(AttackerTag tag) { return tag == AttackerTag::BLine ? "b-line" : "meander"; }

AttackerTag attacker_tag_from_string(const std::string& s) {
    if (s == "b-line" || s == "bline") return AttackerTag::BLine;
    if (s == "meander") return AttackerTag::Meander;
    throw ConfigError("attacker: unknown strategy '" + s + "' (want b-line|meander)");
}

AttackerTag AttackerSpec::draw(Rng& rng) const {
    return rng.bernoulli(p_bline) ? AttackerTag::BLine : AttackerTag::Meander;
}

void Scenario::validate() const {
    const auto& topo = topology;
    if (topo.nodes.empty()) throw ConfigError("nodes: scenario needs at least one node");
    if (horizon < 1) throw ConfigError("horizon: must be >= 1");
    for (int i = 0; i < topo.size(); ++i) {
        const auto& n = topo.nodes[i];
        if (n.role == NodeRole::Host && (n.zone < 1 || n.zone > kZones))
            throw ConfigError("nodes[" + std::to_string(i) + "].zone: host zone must be in 1.." +
                              std::to_string(kZones));
        for (int v : n.vulnerabilities)
            if (v < 0 || v >= kDecoySlots)
                throw ConfigError("nodes[" + std::to_string(i) +
                                  "].vulnerabilities: slot out of range");
    }
    auto check_edges = [&](const std::vector<std::pair<int, int>>& edges, const char* field) {
        for (const auto& [a, b] : edges)
            if (a < 0 || b < 0 || a >= topo.size() || b >= topo.size())
                throw ConfigError(std::string(field) + ": endpoint out of range");
    };
    check_edges(topo.system_edges, "system_edges");
    check_edges(topo.workflow_edges, "workflow_edges");
    if (!topo.workflow_acyclic()) throw ConfigError("workflow_edges: graph must be acyclic");
    if (topo.op_server < 0 || topo.op_server >= topo.size())
        throw ConfigError("op_server: out of range");
    if (attacker.p_bline < 0.0 || attacker.p_bline > 1.0)
        throw ConfigError("attacker.p_bline: must be in [0,1]");
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    const auto& st = stochastics;
    for (double p : st.p_exploit_success)
        if (!prob(p)) throw ConfigError("stochastics.p_exploit_success: must be in [0,1]");
    if (st.arrival_rate < 0.0) throw ConfigError("stochastics.arrival_rate: must be >= 0");
    if (!prob(st.departure_prob)) throw ConfigError("stochastics.departure_prob: must be in [0,1]");
    if (!prob(st.p_detect_scan)) throw ConfigError("stochastics.p_detect_scan: must be in [0,1]");
    if (!prob(st.p_detect_exploit))
        throw ConfigError("stochastics.p_detect_exploit: must be in [0,1]");
    if (!prob(st.false_positive_rate))
        throw ConfigError("stochastics.false_positive_rate: must be in [0,1]");
    if (st.client_ref <= 0.0) throw ConfigError("stochastics.client_ref: must be > 0");
    if (rewards.q_restore < 0.0) throw ConfigError("rewards.q_restore: must be >= 0");
    for (double c : rewards.psi)
        if (c < 0.0) throw ConfigError("rewards.psi: must be >= 0");
    for (double c : rewards.beta_root)
        if (c < 0.0) throw ConfigError("rewards.beta_root: must be >= 0");
    if (rewards.gamma < 0.0 || rewards.gamma > 1.0)
        throw ConfigError("rewards.gamma: must be in [0,1]");
}

namespace {

json zone_array_to_json(const std::array<double, kZones + 1>& a) {
    return json{a[1], a[2], a[3]};
}

std::array<double, kZones + 1> zone_array_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.size() != kZones)
        throw ConfigError(std::string(field) + ": expected an array of " + std::to_string(kZones));
    return {0.0, j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string role_name(NodeRole r) {
    switch (r) {
        case NodeRole::Host: return "host";
        case NodeRole::Defender: return "defender";
        default: return "attacker";
    }
}

NodeRole role_from_name(const std::string& s, int idx) {
    if (s == "host") return NodeRole::Host;
    if (s == "defender") return NodeRole::Defender;
    if (s == "attacker") return NodeRole::Attacker;
    throw ConfigError("nodes[" + std::to_string(idx) + "].role: unknown role '" + s + "'");
}

}  // namespace

std::string Scenario::to_json() const {
    json j;
    j["name"] = name;
    j["horizon"] = horizon;
    j["decoy_catalog"] = decoy_names;
    json nodes = json::array();
    for (const auto& n : topology.nodes) {
        json jn;
        jn["hostname"] = n.hostname;
        jn["zone"] = n.zone;
        jn["role"] = role_name(n.role);
        json vulns = json::array();
        for (int v : n.vulnerabilities) vulns.push_back(decoy_names[v]);
        jn["vulnerabilities"] = vulns;
        nodes.push_back(jn);
    }
    j["nodes"] = nodes;
    auto edges_to_json = [](const std::vector<std::pair<int, int>>& edges) {
        json out = json::array();
        for (const auto& [a, b] : edges) out.push_back(json{a + 1, b + 1});
        return out;
    };
    j["system_edges"] = edges_to_json(topology.system_edges);
    j["workflow_edges"] = edges_to_json(topology.workflow_edges);
    j["op_server"] = topology.op_server + 1;
    j["attacker"] = {{"p_bline", attacker.p_bline}};
    j["rewards"] = {{"q_restore", rewards.q_restore},
                    {"psi", zone_array_to_json(rewards.psi)},
                    {"beta_root", zone_array_to_json(rewards.beta_root)},
                    {"beta_level", rewards.beta_level},
                    {"gamma", rewards.gamma}};
    json pexp;
    for (int s = 0; s < kDecoySlots; ++s) pexp[decoy_names[s]] = stochastics.p_exploit_success[s];
    j["stochastics"] = {{"p_exploit_success", pexp},
                        {"arrival_rate", stochastics.arrival_rate},
                        {"departure_prob", stochastics.departure_prob},
                        {"p_detect_scan", stochastics.p_detect_scan},
                        {"p_detect_exploit", stochastics.p_detect_exploit},
                        {"false_positive_rate", stochastics.false_positive_rate},
                        {"client_ref", stochastics.client_ref},
                        {"impact_self_recovery", stochastics.impact_self_recovery}};
    return j.dump(2);
}

Scenario Scenario::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
    }
    Scenario sc;
    try {
        sc.name = j.value("name", std::string("scenario"));
        sc.horizon = j.value("horizon", 30);
        if (j.contains("decoy_catalog")) {
            auto cat = j.at("decoy_catalog");
            if (!cat.is_array() || cat.size() != kDecoySlots)
                throw ConfigError("decoy_catalog: expected " + std::to_string(kDecoySlots) +
                                  " names");
            for (int s = 0; s < kDecoySlots; ++s) sc.decoy_names[s] = cat[s].get<std::string>();
        }
        auto slot_of = [&](const std::string& service, const char* field) {
            for (int s = 0; s < kDecoySlots; ++s)
                if (sc.decoy_names[s] == service) return s;
            throw ConfigError(std::string(field) + ": unknown service '" + service + "'");
        };
        int idx = 0;
        for (const auto& jn : j.at("nodes")) {
            NodeSpec n;
            n.hostname = jn.value("hostname", "node-" + std::to_string(idx + 1));
            n.zone = jn.value("zone", 0);
            n.role = role_from_name(jn.value("role", std::string("host")), idx);
            for (const auto& v : jn.value("vulnerabilities", json::array()))
                n.vulnerabilities.push_back(slot_of(v.get<std::string>(), "vulnerabilities"));
            sc.topology.nodes.push_back(std::move(n));
            ++idx;
        }
        auto edges_from_json = [&](const json& arr, const char* field) {
            std::vector<std::pair<int, int>> out;
            for (const auto& e : arr) {
                if (!e.is_array() || e.size() != 2)
                    throw ConfigError(std::string(field) + ": expected [from, to] pairs");
                out.emplace_back(e[0].get<int>() - 1, e[1].get<int>() - 1);
            }
            return out;
        };
        sc.topology.system_edges = edges_from_json(j.value("system_edges", json::array()), "system_edges");
        sc.topology.workflow_edges =
            edges_from_json(j.value("workflow_edges", json::array()), "workflow_edges");
        sc.topology.op_server = j.value("op_server", 0) - 1;
        if (j.contains("attacker")) sc.attacker.p_bline = j["attacker"].value("p_bline", 1.0);
        if (j.contains("rewards")) {
            const auto& jr = j["rewards"];
            sc.rewards.q_restore = jr.value("q_restore", sc.rewards.q_restore);
            if (jr.contains("psi")) sc.rewards.psi = zone_array_from_json(jr["psi"], "rewards.psi");
            if (jr.contains("beta_root"))
                sc.rewards.beta_root = zone_array_from_json(jr["beta_root"], "rewards.beta_root");
            if (jr.contains("beta_level")) {
                auto bl = jr["beta_level"];
                if (!bl.is_array() || bl.size() != 5)
                    throw ConfigError("rewards.beta_level: expected 5 entries");
                for (int k = 0; k < 5; ++k) sc.rewards.beta_level[k] = bl[k].get<double>();
            }
            sc.rewards.gamma = jr.value("gamma", sc.rewards.gamma);
        }
        if (j.contains("stochastics")) {
            const auto& js = j["stochastics"];
            if (js.contains("p_exploit_success"))
                for (const auto& [service, p] : js["p_exploit_success"].items())
                    sc.stochastics.p_exploit_success[slot_of(service, "p_exploit_success")] =
                        p.get<double>();
            sc.stochastics.arrival_rate = js.value("arrival_rate", sc.stochastics.arrival_rate);
            sc.stochastics.departure_prob =
                js.value("departure_prob", sc.stochastics.departure_prob);
            sc.stochastics.p_detect_scan = js.value("p_detect_scan", sc.stochastics.p_detect_scan);
            sc.stochastics.p_detect_exploit =
                js.value("p_detect_exploit", sc.stochastics.p_detect_exploit);
            sc.stochastics.false_positive_rate =
                js.value("false_positive_rate", sc.stochastics.false_positive_rate);
            sc.stochastics.client_ref = js.value("client_ref", sc.stochastics.client_ref);
            sc.stochastics.impact_self_recovery =
                js.value("impact_self_recovery", sc.stochastics.impact_self_recovery);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
    sc.validate();
    return sc;
}

Scenario Scenario::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return from_json(os.str());
}

void Scenario::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("scenario: cannot write '" + path + "'");
    out << to_json() << "\n";
}

Scenario Scenario::default_instance() {
    // Decoy slots: 0 apache, 1 femitter, 2 smtp, 3 smss, 4 sshd, 5 svchost,
    // 6 tomcat, 7 vsftpd.
    Scenario sc;
    sc.name = "cage2-default";
    sc.horizon = 30;
    auto& topo = sc.topology;
    auto host = [&](const std::string& hostname, int zone, std::vector<int> vulns) {
        topo.nodes.push_back({hostname, zone, NodeRole::Host, std::move(vulns)});
    };
    host("client-1", 1, {4, 1});
    host("client-2", 1, {5});
    host("client-3", 1, {5, 0, 2});
    host("client-4", 1, {4, 0, 2});
    host("enterprise-1", 2, {4});
    host("enterprise-2", 2, {4, 5, 3, 6});
    host("enterprise-3", 2, {4, 5, 3, 6});
    host("operational-1", 3, {4});
    host("operational-2", 3, {4});
    host("operational-3", 3, {4});
    host("operational-4", 3, {4});
    topo.nodes.push_back({"defender", 0, NodeRole::Defender, {4}});
    topo.nodes.push_back({"attacker", 0, NodeRole::Attacker, {4, 1}});

    // Service dependencies: clients feed the enterprise servers, which feed
    // the gateway server, which feeds the first operational server.
    topo.workflow_edges = {{0, 4}, {1, 4}, {2, 5}, {3, 5}, {4, 6}, {5, 6}, {6, 7}};
    topo.op_server = 7;

    // Physical connectivity: full mesh within each zone, gateway links
    // between adjacent zones, and the defender/attacker boxes attached to
    // the zones they border.
    auto clique = [&](int lo, int hi) {
        for (int a = lo; a <= hi; ++a)
            for (int b = a + 1; b <= hi; ++b) topo.system_edges.emplace_back(a, b);
    };
    clique(0, 3);
    clique(4, 6);
    clique(7, 10);
    topo.system_edges.emplace_back(0, 4);   // user gateway -> enterprise
    topo.system_edges.emplace_back(4, 7);   // enterprise gateway -> operational
    topo.system_edges.emplace_back(11, 7);  // defender box sits in the operational zone
    topo.system_edges.emplace_back(12, 0);  // attacker box reaches the user zone
    sc.validate();
    return sc;
}

Topology randomize_intra_zone_edges(const Topology& topo, Rng& rng) {
    Topology out = topo;
    std::vector<std::pair<int, int>> kept;
    std::set<int> zoned;
    for (int z = 1; z <= kZones; ++z)
        for (int v : topo.zone_hosts(z)) zoned.insert(v);
    for (const auto& e : topo.system_edges) {
        bool internal = zoned.count(e.first) && zoned.count(e.second) &&
                        topo.nodes[e.first].zone == topo.nodes[e.second].zone;
        if (!internal) kept.push_back(e);
    }
    for (int z = 1; z <= kZones; ++z) {
        auto hosts = topo.zone_hosts(z);
        if (hosts.size() < 2) continue;
        // Random spanning tree, then each remaining pair with probability 0.3.
        std::vector<int> shuffled = hosts;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.integer(i)]);
        for (std::size_t i = 1; i < shuffled.size(); ++i) {
            int other = shuffled[rng.integer(i)];
            kept.emplace_back(std::min(shuffled[i], other), std::max(shuffled[i], other));
        }
        for (std::size_t a = 0; a < hosts.size(); ++a)
            for (std::size_t b = a + 1; b < hosts.size(); ++b) {
                std::pair<int, int> e{hosts[a], hosts[b]};
                if (std::find(kept.begin(), kept.end(), e) == kept.end() && rng.bernoulli(0.3))
                    kept.push_back(e);
            }
    }
    out.system_edges = std::move(kept);
    return out;
}

}  // namespace cdp
