#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdp/errors.hpp"
#include "cdp/rng.hpp"

namespace cdp {

inline constexpr int kDecoySlots = 8;
inline constexpr int kZones = 3;

enum class NodeRole : std::uint8_t { Host, Defender, Attacker };

struct NodeSpec {
    std::string hostname;
    int zone = 0;  // 1..kZones for hosts, 0 for defender/attacker boxes
    NodeRole role = NodeRole::Host;
    std::vector<int> vulnerabilities;  // decoy-slot indices of exploitable services
};

struct Topology {
    std::vector<NodeSpec> nodes;
    std::vector<std::pair<int, int>> system_edges;    // physical connectivity
    std::vector<std::pair<int, int>> workflow_edges;  // service dependencies, acyclic
    int op_server = -1;                               // workflow sink the attacker disrupts

    int size() const { return static_cast<int>(nodes.size()); }
    std::vector<int> zone_hosts(int zone) const;
    std::vector<int> workflow_parents(int node) const;
    std::vector<int> workflow_children(int node) const;
    bool workflow_acyclic() const;
};

struct RewardParams {
    double q_restore = 1.0;
    std::array<double, kZones + 1> psi = {0.0, 0.0, 0.0, 10.0};        // downtime cost by zone
    std::array<double, kZones + 1> beta_root = {0.0, 0.1, 1.0, 1.0};   // intrusion cost by zone
    std::array<double, 5> beta_level = {0.0, 0.0, 0.0, 0.0, 1.0};      // scale per intrusion level
    double gamma = 0.99;
};

struct StochasticParams {
    std::array<double, kDecoySlots> p_exploit_success = {0.8, 0.8, 0.8, 0.8, 0.8, 0.8, 0.8, 0.8};
    double arrival_rate = 2.0;
    double departure_prob = 0.2;
    double p_detect_scan = 1.0;
    double p_detect_exploit = 0.95;
    double false_positive_rate = 0.02;
    double client_ref = 20.0;
    bool impact_self_recovery = false;  // disrupted services stay down until restore
};

enum class AttackerTag : std::uint8_t { BLine, Meander };

std::string to_string(AttackerTag tag);
AttackerTag attacker_tag_from_string(const std::string& s);

// Distribution over attacker strategies, drawn once per episode.
struct AttackerSpec {
    double p_bline = 1.0;  // probability of the direct-path attacker; rest is meander

    AttackerTag draw(Rng& rng) const;
    static AttackerSpec fixed(AttackerTag tag) { return {tag == AttackerTag::BLine ? 1.0 : 0.0}; }
    static AttackerSpec mixed(double p) { return {p}; }
};

struct Scenario {
    std::string name = "scenario";
    int horizon = 30;
    Topology topology;
    RewardParams rewards;
    StochasticParams stochastics;
    AttackerSpec attacker;
    std::array<std::string, kDecoySlots> decoy_names = {"apache", "femitter", "smtp",  "smss",
                                                        "sshd",   "svchost",  "tomcat", "vsftpd"};

    void validate() const;  // throws ConfigError with field diagnostics

    std::string to_json() const;
    static Scenario from_json(const std::string& text);
    static Scenario load_file(const std::string& path);
    void save_file(const std::string& path) const;

    // The default 13-node instance: four user-zone clients, three enterprise
    // servers, four operational hosts, a defender box and the attacker's box;
    // workflow chain ending at the first operational server.
    static Scenario default_instance();
};

// Resamples intra-zone physical connectivity uniformly among connected
// layouts; node counts, zones, and the workflow graph are preserved.
Topology randomize_intra_zone_edges(const Topology& topo, Rng& rng);

}  // namespace cdp
