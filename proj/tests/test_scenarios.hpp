#pragma once

// Hand-sized scenario fixtures shared by the test suites. The micro
// instances keep the client process switched off so the state space stays
// enumerable for exact inference.

#include "cdp/scenario.hpp"

namespace cdp::testing {

// Three nodes in a workflow chain across the three zones; moderate
// detection and exploit probabilities keep several latent trajectories
// plausible per observation.
inline Scenario micro3() {
    Scenario sc;
    sc.name = "micro3";
    sc.horizon = 10;
    sc.attacker = AttackerSpec::mixed(0.5);
    auto& topo = sc.topology;
    topo.nodes.push_back({"m-client", 1, NodeRole::Host, {0}});
    topo.nodes.push_back({"m-gateway", 2, NodeRole::Host, {1}});
    topo.nodes.push_back({"m-server", 3, NodeRole::Host, {0}});
    topo.workflow_edges = {{0, 1}, {1, 2}};
    topo.system_edges = {{0, 1}, {1, 2}};
    topo.op_server = 2;
    sc.stochastics.arrival_rate = 0.0;
    sc.stochastics.departure_prob = 0.0;
    sc.stochastics.false_positive_rate = 0.0;
    sc.stochastics.p_detect_scan = 1.0;
    sc.stochastics.p_detect_exploit = 0.6;
    sc.stochastics.p_exploit_success.fill(0.7);
    sc.validate();
    return sc;
}

// Two nodes, user-zone foothold plus the operational server; used by the
// exhaustive planning oracle and the Markov-property check.
inline Scenario micro2() {
    Scenario sc;
    sc.name = "micro2";
    sc.horizon = 6;
    sc.attacker = AttackerSpec::fixed(AttackerTag::BLine);
    auto& topo = sc.topology;
    topo.nodes.push_back({"m-foothold", 1, NodeRole::Host, {0}});
    topo.nodes.push_back({"m-op", 3, NodeRole::Host, {1}});
    topo.workflow_edges = {{0, 1}};
    topo.system_edges = {{0, 1}};
    topo.op_server = 1;
    sc.stochastics.arrival_rate = 0.0;
    sc.stochastics.departure_prob = 0.0;
    sc.stochastics.false_positive_rate = 0.0;
    sc.stochastics.p_detect_scan = 1.0;
    sc.stochastics.p_detect_exploit = 0.95;
    sc.stochastics.p_exploit_success.fill(0.8);
    sc.validate();
    return sc;
}

// Single node; handy for channel and bandit-style checks.
inline Scenario micro1(int zone = 1) {
    Scenario sc;
    sc.name = "micro1";
    sc.horizon = 4;
    sc.attacker = AttackerSpec::fixed(AttackerTag::BLine);
    sc.topology.nodes.push_back({"m-solo", zone, NodeRole::Host, {0}});
    sc.topology.op_server = 0;
    sc.stochastics.arrival_rate = 0.0;
    sc.stochastics.departure_prob = 0.0;
    sc.stochastics.false_positive_rate = 0.0;
    sc.validate();
    return sc;
}

}  // namespace cdp::testing
