#include "cdp/cyber_env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace cdp {

std::string to_string(IntrusionLevel level) {
    switch (level) {
        case IntrusionLevel::Unknown: return "U";
        case IntrusionLevel::Known: return "K";
        case IntrusionLevel::Scanned: return "S";
        case IntrusionLevel::Compromised: return "C";
        default: return "R";
    }
}

std::string to_string(const AttackerAction& a) {
    switch (a.kind) {
        case AttackKind::Scan: return "scan:" + std::to_string(a.target + 1);
        case AttackKind::Exploit:
            return "exploit:" + std::to_string(a.target + 1) + ":v" +
                   std::to_string(a.vulnerability) +
                   (a.privilege == Privilege::Root ? ":root" : ":user");
        case AttackKind::PrivEsc: return "privesc:" + std::to_string(a.target + 1);
        case AttackKind::Impact: return "impact:" + std::to_string(a.target + 1);
        default: return "discover:z" + std::to_string(a.target);
    }
}

std::string to_string(const Intervention& iv) {
    switch (iv.kind) {
        case Intervention::Kind::None: return "none";
        case Intervention::Kind::Analyze: return "analyze:" + std::to_string(iv.node + 1);
        case Intervention::Kind::Decoy:
            return "decoy:" + std::to_string(iv.node + 1) + ":" + std::to_string(iv.decoy);
        case Intervention::Kind::Remove: return "remove:" + std::to_string(iv.node + 1);
        default: return "restore:" + std::to_string(iv.node + 1);
    }
}

void WorldState::append_key(std::string& out) const {
    for (const auto& n : nodes) {
        out.push_back(static_cast<char>(n.intrusion));
        out.push_back(static_cast<char>(n.service));
        out.push_back(static_cast<char>(n.decoys));
        out.push_back(static_cast<char>(n.restarting));
    }
    for (int shift = 0; shift < 32; shift += 8)
        out.push_back(static_cast<char>((client_count >> shift) & 0xff));
    if (last_attacker_action) {
        const auto& a = *last_attacker_action;
        out.push_back(static_cast<char>(static_cast<int>(a.kind) + 1));
        out.push_back(static_cast<char>(a.target + 1));
        out.push_back(static_cast<char>(a.vulnerability + 1));
        out.push_back(static_cast<char>(static_cast<int>(a.privilege)));
    } else {
        out.append(4, '\0');
    }
    out.push_back(static_cast<char>(attacker_tag));
    for (auto s : prev_service) out.push_back(static_cast<char>(s));
    for (auto z : last_activity) out.push_back(static_cast<char>(z));
}

std::string WorldState::key() const {
    std::string out;
    out.reserve(nodes.size() * 6 + 16);
    append_key(out);
    return out;
}

std::uint64_t Observation::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    for (std::size_t i = 0; i < decoys.size(); ++i) {
        feed(decoys[i]);
        feed(static_cast<std::uint64_t>(service[i]) << 8 |
             static_cast<std::uint64_t>(activity[i]));
    }
    feed(static_cast<std::uint64_t>(client_count));
    return h;
}

CyberEnv::CyberEnv(Scenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    const auto& topo = scenario_.topology;
    for (const auto& n : topo.nodes)
        if (n.role == NodeRole::Host && n.vulnerabilities.empty())
            throw ConfigError("nodes: host '" + n.hostname + "' needs at least one vulnerability");
    // Direct attack path: walk workflow parents back from the op server,
    // always taking the lowest-numbered parent.
    int cur = topo.op_server;
    chain_.push_back(cur);
    while (true) {
        auto parents = topo.workflow_parents(cur);
        if (parents.empty()) break;
        cur = *std::min_element(parents.begin(), parents.end());
        chain_.push_back(cur);
    }
    std::reverse(chain_.begin(), chain_.end());
}

WorldState CyberEnv::initial_state(AttackerTag tag) const {
    WorldState w;
    int n = node_count();
    w.nodes.assign(n, NodeState{});
    w.client_count = 0;
    w.attacker_tag = tag;
    w.prev_service.assign(n, 1);
    w.last_activity.assign(n, IntrusionLevel::Unknown);
    return w;
}

WorldState CyberEnv::initial_state(Rng& rng) const {
    return initial_state(scenario_.attacker.draw(rng));
}

Observation CyberEnv::initial_observation() const {
    Observation o;
    int n = node_count();
    o.decoys.assign(n, 0);
    o.service.assign(n, 1);
    o.activity.assign(n, IntrusionLevel::Unknown);
    o.client_count = 0;
    return o;
}

IntrusionLevel CyberEnv::step_intrusion(const NodeState& node, int node_index,
                                        const AttackerAction& action, bool exploit_success) const {
    const auto& topo = scenario_.topology;
    if (action.kind == AttackKind::Discover && action.target == topo.nodes[node_index].zone)
        return IntrusionLevel::Known;
    if (action.kind == AttackKind::PrivEsc) {
        auto parents = topo.workflow_parents(node_index);
        if (std::find(parents.begin(), parents.end(), action.target) != parents.end())
            return IntrusionLevel::Known;
    }
    if (action.kind == AttackKind::Scan && action.target == node_index)
        return IntrusionLevel::Scanned;
    if (action.kind == AttackKind::Exploit && action.target == node_index &&
        action.privilege == Privilege::User && !node.decoy_active(action.vulnerability) &&
        exploit_success)
        return IntrusionLevel::Compromised;
    if (action.kind == AttackKind::Exploit && action.target == node_index &&
        action.privilege == Privilege::Root && !node.decoy_active(action.vulnerability) &&
        exploit_success)
        return IntrusionLevel::Root;
    if (action.kind == AttackKind::PrivEsc && action.target == node_index)
        return IntrusionLevel::Root;
    return node.intrusion;
}

std::uint8_t CyberEnv::step_service(std::uint8_t service, const AttackerAction* action, int node) {
    if (action && action->kind == AttackKind::Impact && action->target == node) return 0;
    return service;
}

int CyberEnv::step_clients(int count, int arrivals, int departures) {
    if (count < 0 || arrivals < 0 || departures < 0)
        throw PreconditionError("step_clients requires non-negative inputs");
    return std::max(0, count + arrivals - departures);
}

WorldState CyberEnv::apply_intervention(WorldState world, const Intervention& iv) const {
    if (iv.kind == Intervention::Kind::None) return world;
    if (iv.node < 0 || iv.node >= node_count())
        throw PreconditionError("intervention node out of range");
    NodeState& n = world.nodes[iv.node];
    switch (iv.kind) {
        case Intervention::Kind::Analyze:
            break;  // effect lands on this step's activity reading
        case Intervention::Kind::Decoy: {
            if (iv.decoy < 0 || iv.decoy >= kDecoySlots)
                throw PreconditionError("decoy slot out of range");
            // A decoy is a fake service on an unused port; a slot occupied by
            // a live service on this node cannot host one.
            const auto& vulns = scenario_.topology.nodes[iv.node].vulnerabilities;
            if (std::find(vulns.begin(), vulns.end(), iv.decoy) == vulns.end())
                n.decoys |= static_cast<std::uint8_t>(1u << iv.decoy);
            break;
        }
        case Intervention::Kind::Remove:
            if (n.intrusion == IntrusionLevel::Compromised) n.intrusion = IntrusionLevel::Scanned;
            break;
        case Intervention::Kind::Restore:
            if (n.intrusion == IntrusionLevel::Compromised ||
                n.intrusion == IntrusionLevel::Root) {
                n.intrusion = IntrusionLevel::Scanned;
                n.decoys = 0;
                n.service = 0;
                n.restarting = 2;  // down this step, back next step
            }
            break;
        default: break;
    }
    return world;
}

std::vector<int> CyberEnv::apparent_vulnerabilities(const WorldState& world, int node) const {
    std::vector<int> out = scenario_.topology.nodes[node].vulnerabilities;
    for (int s = 0; s < kDecoySlots; ++s)
        if (world.nodes[node].decoy_active(s)) out.push_back(s);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

struct PolicyChoice {
    AttackerAction action;
    bool pick_vulnerability = false;
};

PolicyChoice advance_node(const WorldState& world, int node, int zone) {
    switch (world.nodes[node].intrusion) {
        case IntrusionLevel::Unknown:
            return {{AttackKind::Discover, zone, -1, Privilege::None}, false};
        case IntrusionLevel::Known:
            return {{AttackKind::Scan, node, -1, Privilege::None}, false};
        case IntrusionLevel::Scanned:
            return {{AttackKind::Exploit, node, -1, Privilege::User}, true};
        default:
            return {{AttackKind::PrivEsc, node, -1, Privilege::None}, false};
    }
}

}  // namespace

std::vector<std::pair<AttackerAction, double>> CyberEnv::attacker_action_support(
    const WorldState& world) const {
    const auto& topo = scenario_.topology;
    PolicyChoice choice{{AttackKind::Impact, topo.op_server, -1, Privilege::None}, false};
    bool decided = false;
    if (world.attacker_tag == AttackerTag::BLine) {
        for (int node : chain_) {
            if (world.nodes[node].intrusion == IntrusionLevel::Root) continue;
            choice = advance_node(world, node, topo.nodes[node].zone);
            decided = true;
            break;
        }
    } else {
        for (int zone = 1; zone <= kZones && !decided; ++zone) {
            auto hosts = topo.zone_hosts(zone);
            if (hosts.empty()) continue;
            bool all_rooted = true;
            bool any_unknown = false;
            for (int h : hosts) {
                all_rooted = all_rooted && world.nodes[h].intrusion == IntrusionLevel::Root;
                any_unknown = any_unknown || world.nodes[h].intrusion == IntrusionLevel::Unknown;
            }
            if (all_rooted) continue;
            if (any_unknown) {
                choice = {{AttackKind::Discover, zone, -1, Privilege::None}, false};
            } else {
                for (int h : hosts)
                    if (world.nodes[h].intrusion < IntrusionLevel::Root) {
                        choice = advance_node(world, h, zone);
                        break;
                    }
            }
            decided = true;
        }
    }
    if (!choice.pick_vulnerability) return {{choice.action, 1.0}};
    auto apparent = apparent_vulnerabilities(world, choice.action.target);
    std::vector<std::pair<AttackerAction, double>> out;
    double p = 1.0 / static_cast<double>(apparent.size());
    for (int v : apparent) {
        AttackerAction a = choice.action;
        a.vulnerability = v;
        out.emplace_back(a, p);
    }
    return out;
}

AttackerAction CyberEnv::attacker_next_action(const WorldState& world, Rng& rng) const {
    auto support = attacker_action_support(world);
    if (support.size() == 1) return support.front().first;
    return support[rng.integer(support.size())].first;
}

double CyberEnv::reward(const WorldState& after, const Intervention& iv) const {
    const auto& rp = scenario_.rewards;
    double r = iv.kind == Intervention::Kind::Restore ? -rp.q_restore : 0.0;
    for (int i = 0; i < node_count(); ++i) {
        int zone = scenario_.topology.nodes[i].zone;
        r += rp.psi[zone] * (static_cast<double>(after.nodes[i].service) - 1.0);
        r -= rp.beta_root[zone] * rp.beta_level[static_cast<int>(after.nodes[i].intrusion)];
    }
    return r;
}

namespace {

enum class ChannelMode { Exact, ScanFlash, ExploitFlash, Quiet };

ChannelMode channel_mode(const NodeState& node, int node_index, const AttackerAction* action,
                         bool analyzed) {
    if (analyzed) return ChannelMode::Exact;
    if (action && action->kind == AttackKind::Scan && action->target == node_index)
        return ChannelMode::ScanFlash;
    if (action && action->kind == AttackKind::Exploit && action->target == node_index &&
        !node.decoy_active(action->vulnerability) &&
        (node.intrusion == IntrusionLevel::Compromised || node.intrusion == IntrusionLevel::Root))
        return ChannelMode::ExploitFlash;
    return ChannelMode::Quiet;
}

}  // namespace

double CyberEnv::activity_prob(const NodeState& node, int node_index, IntrusionLevel prev,
                               const AttackerAction* action, int client_count, bool analyzed,
                               IntrusionLevel z) const {
    const auto& st = scenario_.stochastics;
    double fp = st.false_positive_rate *
                std::min(1.0, static_cast<double>(client_count) / st.client_ref);
    auto quiet = [&](IntrusionLevel v) {
        double p = 0.0;
        if (v == IntrusionLevel::Scanned) p += fp;
        if (v == prev) p += 1.0 - fp;
        return p;
    };
    switch (channel_mode(node, node_index, action, analyzed)) {
        case ChannelMode::Exact: return z == node.intrusion ? 1.0 : 0.0;
        case ChannelMode::ScanFlash:
            return st.p_detect_scan * (z == IntrusionLevel::Scanned ? 1.0 : 0.0) +
                   (1.0 - st.p_detect_scan) * quiet(z);
        case ChannelMode::ExploitFlash:
            return st.p_detect_exploit * (z == IntrusionLevel::Compromised ? 1.0 : 0.0) +
                   (1.0 - st.p_detect_exploit) * quiet(z);
        default: return quiet(z);
    }
}

IntrusionLevel CyberEnv::observe_node(const NodeState& node, int node_index, IntrusionLevel prev,
                                      const AttackerAction* action, int client_count, bool analyzed,
                                      Rng& rng) const {
    const auto& st = scenario_.stochastics;
    double fp = st.false_positive_rate *
                std::min(1.0, static_cast<double>(client_count) / st.client_ref);
    auto quiet = [&]() { return rng.bernoulli(fp) ? IntrusionLevel::Scanned : prev; };
    switch (channel_mode(node, node_index, action, analyzed)) {
        case ChannelMode::Exact: return node.intrusion;
        case ChannelMode::ScanFlash:
            return rng.bernoulli(st.p_detect_scan) ? IntrusionLevel::Scanned : quiet();
        case ChannelMode::ExploitFlash:
            return rng.bernoulli(st.p_detect_exploit) ? IntrusionLevel::Compromised : quiet();
        default: return quiet();
    }
}

WorldState CyberEnv::advance_core(WorldState s, const AttackerAction& action, bool exploit_success,
                                  int arrivals, int departures,
                                  const std::vector<std::uint8_t>& entry_service) const {
    s.prev_service = entry_service;
    for (int i = 0; i < node_count(); ++i)
        s.nodes[i].intrusion = step_intrusion(s.nodes[i], i, action, exploit_success);
    for (int i = 0; i < node_count(); ++i) {
        NodeState& n = s.nodes[i];
        if (action.kind == AttackKind::Impact && action.target == i) {
            n.service = 0;
            n.restarting = scenario_.stochastics.impact_self_recovery ? 2 : 0;
        } else if (n.restarting > 0) {
            if (--n.restarting == 0) n.service = 1;
        }
    }
    s.client_count = step_clients(s.client_count, arrivals, departures);
    s.last_attacker_action = action;
    return s;
}

WorldState CyberEnv::transition(const WorldState& world, const Intervention& iv, Rng& rng) const {
    std::vector<std::uint8_t> entry_service(world.nodes.size());
    for (std::size_t i = 0; i < world.nodes.size(); ++i)
        entry_service[i] = world.nodes[i].service;
    WorldState s = apply_intervention(world, iv);
    AttackerAction action = attacker_next_action(s, rng);
    bool exploit_success = false;
    if (action.kind == AttackKind::Exploit)
        exploit_success =
            rng.bernoulli(scenario_.stochastics.p_exploit_success[action.vulnerability]);
    int arrivals = rng.poisson(scenario_.stochastics.arrival_rate);
    int departures = rng.binomial(s.client_count, scenario_.stochastics.departure_prob);
    return advance_core(std::move(s), action, exploit_success, arrivals, departures,
                        entry_service);
}

Observation CyberEnv::observation_of(const WorldState& after) const {
    Observation o;
    int n = node_count();
    o.decoys.resize(n);
    o.service.resize(n);
    for (int i = 0; i < n; ++i) {
        o.decoys[i] = after.nodes[i].decoys;
        o.service[i] = after.nodes[i].service;
    }
    o.activity = after.last_activity;
    o.client_count = after.client_count;
    return o;
}

StepResult CyberEnv::step(const WorldState& world, const Intervention& iv, Rng& rng) const {
    WorldState s = transition(world, iv, rng);
    const AttackerAction* action = s.last_attacker_action ? &*s.last_attacker_action : nullptr;
    std::vector<IntrusionLevel> activity(node_count());
    for (int i = 0; i < node_count(); ++i) {
        bool analyzed = iv.kind == Intervention::Kind::Analyze && iv.node == i;
        activity[i] =
            observe_node(s.nodes[i], i, s.last_activity[i], action, s.client_count, analyzed, rng);
    }
    s.last_activity = std::move(activity);
    Observation obs = observation_of(s);
    double r = reward(s, iv);
    return {std::move(s), std::move(obs), r};
}

double CyberEnv::observation_loglik(const WorldState& after, const Intervention& iv,
                                    const Observation& obs) const {
    constexpr double kZero = -std::numeric_limits<double>::infinity();
    const AttackerAction* action =
        after.last_attacker_action ? &*after.last_attacker_action : nullptr;
    // The client count evolves independently of the latent state and every
    // particle shares the previous count, so its likelihood factor is common
    // and cancels after normalization; the observed count enters only
    // through the false-positive rate. Resampling then adopts the observed
    // count into every particle.
    double ll = 0.0;
    for (int i = 0; i < node_count(); ++i) {
        if (obs.decoys[i] != after.nodes[i].decoys || obs.service[i] != after.nodes[i].service)
            return kZero;
        bool analyzed = iv.kind == Intervention::Kind::Analyze && iv.node == i;
        double p = activity_prob(after.nodes[i], i, after.last_activity[i], action,
                                 obs.client_count, analyzed, obs.activity[i]);
        if (p <= 0.0) return kZero;
        ll += std::log(p);
    }
    return ll;
}

double CyberEnv::coincidence_loglik(const std::vector<IntrusionLevel>& prev_activity,
                                    const Observation& obs) const {
    const auto& st = scenario_.stochastics;
    double fp = st.false_positive_rate *
                std::min(1.0, static_cast<double>(obs.client_count) / st.client_ref);
    double ll = 0.0;
    for (std::size_t i = 0; i < prev_activity.size(); ++i) {
        double p = 0.0;
        if (obs.activity[i] == IntrusionLevel::Scanned) p += fp;
        if (obs.activity[i] == prev_activity[i]) p += 1.0 - fp;
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        ll += std::log(p);
    }
    return ll;
}

std::vector<std::pair<WorldState, double>> CyberEnv::transition_support(
    const WorldState& world, const Intervention& iv) const {
    const auto& st = scenario_.stochastics;
    if (st.arrival_rate != 0.0 || st.departure_prob != 0.0)
        throw PreconditionError(
            "transition_support needs the client process switched off (micro instances)");
    std::vector<std::uint8_t> entry_service(world.nodes.size());
    for (std::size_t i = 0; i < world.nodes.size(); ++i)
        entry_service[i] = world.nodes[i].service;
    WorldState s = apply_intervention(world, iv);

    std::vector<std::pair<WorldState, double>> out;
    std::unordered_map<std::string, std::size_t> seen;
    auto emit = [&](WorldState next, double p) {
        std::string k = next.key();
        auto [it, inserted] = seen.try_emplace(k, out.size());
        if (inserted)
            out.emplace_back(std::move(next), p);
        else
            out[it->second].second += p;
    };
    for (const auto& [action, pa] : attacker_action_support(s)) {
        if (action.kind == AttackKind::Exploit) {
            double pe = st.p_exploit_success[action.vulnerability];
            if (pe > 0.0) emit(advance_core(s, action, true, 0, 0, entry_service), pa * pe);
            if (pe < 1.0) emit(advance_core(s, action, false, 0, 0, entry_service), pa * (1 - pe));
        } else {
            emit(advance_core(s, action, false, 0, 0, entry_service), pa);
        }
    }
    return out;
}

std::vector<Intervention> CyberEnv::all_interventions() const {
    std::vector<Intervention> out;
    out.push_back(Intervention::none());
    int n = node_count();
    for (int i = 0; i < n; ++i) out.push_back(Intervention::analyze(i));
    for (int i = 0; i < n; ++i)
        for (int s = 0; s < kDecoySlots; ++s) out.push_back(Intervention::start_decoy(i, s));
    for (int i = 0; i < n; ++i) out.push_back(Intervention::remove(i));
    for (int i = 0; i < n; ++i) out.push_back(Intervention::restore(i));
    return out;
}

}  // namespace cdp
