#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "cdp/rng.hpp"
#include "cdp/scenario.hpp"

namespace cdp {

// Attacker's view of a node, ordered by progress.
enum class IntrusionLevel : std::uint8_t { Unknown = 0, Known, Scanned, Compromised, Root };

inline bool operator<(IntrusionLevel a, IntrusionLevel b) {
    return static_cast<int>(a) < static_cast<int>(b);
}
std::string to_string(IntrusionLevel level);

enum class AttackKind : std::uint8_t { Scan, Exploit, PrivEsc, Impact, Discover };
enum class Privilege : std::uint8_t { None, User, Root };

struct AttackerAction {
    AttackKind kind = AttackKind::Scan;
    int target = -1;         // node index; zone id when kind == Discover
    int vulnerability = -1;  // decoy slot, present iff kind == Exploit
    Privilege privilege = Privilege::None;

    bool operator==(const AttackerAction&) const = default;
    bool targets_node(int node) const { return kind != AttackKind::Discover && target == node; }
};
std::string to_string(const AttackerAction& a);

struct NodeState {
    IntrusionLevel intrusion = IntrusionLevel::Unknown;
    std::uint8_t service = 1;
    std::uint8_t decoys = 0;      // bitmask over decoy slots
    std::uint8_t restarting = 0;  // countdown of a restore-induced service restart

    bool decoy_active(int slot) const { return (decoys >> slot) & 1; }
    bool operator==(const NodeState&) const = default;
};

// One realization of the per-step Markov state, plus the previously emitted
// per-node activity (observable, carried for the sticky alert channel).
struct WorldState {
    std::vector<NodeState> nodes;
    int client_count = 0;
    std::optional<AttackerAction> last_attacker_action;
    AttackerTag attacker_tag = AttackerTag::BLine;
    std::vector<std::uint8_t> prev_service;
    std::vector<IntrusionLevel> last_activity;

    bool operator==(const WorldState&) const = default;
    void append_key(std::string& out) const;
    std::string key() const;
};

struct Intervention {
    enum class Kind : std::uint8_t { None = 0, Analyze, Decoy, Remove, Restore };
    Kind kind = Kind::None;
    int node = -1;
    int decoy = -1;  // slot, present iff kind == Decoy

    static Intervention none() { return {}; }
    static Intervention analyze(int node) { return {Kind::Analyze, node, -1}; }
    static Intervention start_decoy(int node, int slot) { return {Kind::Decoy, node, slot}; }
    static Intervention remove(int node) { return {Kind::Remove, node, -1}; }
    static Intervention restore(int node) { return {Kind::Restore, node, -1}; }

    bool operator==(const Intervention&) const = default;
    // Canonical order: none < analyze < decoy(0..7) < remove < restore,
    // node index ascending within a kind.
    auto ordering_key() const { return std::tuple(static_cast<int>(kind), node, decoy); }
    bool operator<(const Intervention& o) const { return ordering_key() < o.ordering_key(); }
};
std::string to_string(const Intervention& iv);

struct Observation {
    std::vector<std::uint8_t> decoys;
    std::vector<std::uint8_t> service;
    std::vector<IntrusionLevel> activity;
    int client_count = 0;

    bool operator==(const Observation&) const = default;
    std::uint64_t hash() const;
};

struct ObservationHash {
    std::size_t operator()(const Observation& o) const { return o.hash(); }
};

struct StepResult {
    WorldState state;
    Observation obs;
    double reward = 0.0;
};

// Executable step dynamics for a scenario: attacker, defender interventions,
// client load, noisy activity readings, and rewards. Pure given explicit RNG
// state; a const instance is safe to share across threads.
class CyberEnv {
  public:
    explicit CyberEnv(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }
    const Topology& topology() const { return scenario_.topology; }
    int node_count() const { return scenario_.topology.size(); }
    const std::vector<int>& attack_chain() const { return chain_; }

    WorldState initial_state(Rng& rng) const;  // draws the attacker strategy
    WorldState initial_state(AttackerTag tag) const;
    Observation initial_observation() const;

    // Single-node intrusion update; the case order mirrors the step dynamics.
    IntrusionLevel step_intrusion(const NodeState& node, int node_index,
                                  const AttackerAction& action, bool exploit_success) const;
    static std::uint8_t step_service(std::uint8_t service, const AttackerAction* action, int node);
    static int step_clients(int count, int arrivals, int departures);

    // Defender intervention surgery; guarded kinds degrade to no-ops.
    WorldState apply_intervention(WorldState world, const Intervention& iv) const;

    AttackerAction attacker_next_action(const WorldState& world, Rng& rng) const;
    // Enumerates the attacker action distribution (used by exact inference).
    std::vector<std::pair<AttackerAction, double>> attacker_action_support(
        const WorldState& world) const;

    double reward(const WorldState& after, const Intervention& iv) const;

    // Per-node activity reading. `analyzed` forces an exact report.
    IntrusionLevel observe_node(const NodeState& node, int node_index, IntrusionLevel prev,
                                const AttackerAction* action, int client_count, bool analyzed,
                                Rng& rng) const;
    double activity_prob(const NodeState& node, int node_index, IntrusionLevel prev,
                         const AttackerAction* action, int client_count, bool analyzed,
                         IntrusionLevel z) const;

    // Advances the Markov state one step without sampling an observation.
    WorldState transition(const WorldState& world, const Intervention& iv, Rng& rng) const;
    // Full step: transition, activity sampling, observation and reward.
    StepResult step(const WorldState& world, const Intervention& iv, Rng& rng) const;

    // Log-probability of an observation given the post-transition state (its
    // last_activity must still hold the previous step's readings).
    double observation_loglik(const WorldState& after, const Intervention& iv,
                              const Observation& obs) const;

    // Log-probability of the activity readings under the pure-noise channel
    // (no attacker contact anywhere). A particle whose likelihood does not
    // exceed this explains the observation only as coincidence.
    double coincidence_loglik(const std::vector<IntrusionLevel>& prev_activity,
                              const Observation& obs) const;

    // Exact successor distribution; only available when the client process is
    // switched off (micro instances used by exact inference).
    std::vector<std::pair<WorldState, double>> transition_support(const WorldState& world,
                                                                  const Intervention& iv) const;

    Observation observation_of(const WorldState& after) const;

    // All candidate (node, intervention) pairs plus do-nothing, canonically
    // ordered. The defender action space the planner searches over.
    std::vector<Intervention> all_interventions() const;

  private:
    WorldState advance_core(WorldState post_intervention, const AttackerAction& action,
                            bool exploit_success, int arrivals, int departures,
                            const std::vector<std::uint8_t>& entry_service) const;
    std::vector<int> apparent_vulnerabilities(const WorldState& world, int node) const;

    Scenario scenario_;
    std::vector<int> chain_;  // direct attack path ending at the op server
};

}  // namespace cdp
