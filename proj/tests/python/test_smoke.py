"""Smoke tests for the python bindings."""

import json
import os
import sys

sys.path.insert(0, os.environ.get("CDP_PY_DIR", "."))

import cdp_core as cdp  # noqa: E402


def test_default_scenario():
    sc = cdp.Scenario.default_instance()
    assert sc.node_count == 13
    assert sc.horizon == 30
    data = json.loads(sc.to_json())
    assert len(data["workflow_edges"]) == 7
    assert data["op_server"] == 8


def test_scenario_roundtrip():
    sc = cdp.Scenario.default_instance()
    again = cdp.Scenario.from_json(sc.to_json())
    assert again.to_json() == sc.to_json()


def test_env_step_is_deterministic():
    env = cdp.CyberEnv(cdp.Scenario.default_instance())
    results = []
    for _ in range(2):
        rng = cdp.Rng(7)
        state = env.initial_state(rng)
        res = env.step(state, cdp.Intervention.none(), rng)
        results.append((res.state.key(), res.reward, res.obs.client_count))
    assert results[0] == results[1]


def test_noop_episode_runs_full_horizon():
    base = cdp.Scenario.default_instance()
    sc = cdp.scenario_for_run(base, 1, 12, 0)
    env = cdp.CyberEnv(sc)
    cfg = cdp.SearchConfig()
    cfg.particles = 50
    cfg.budget_sims = 10
    ep = cdp.run_episode(env, cfg, cdp.DefenderMethod.NOOP, 0)
    assert len(ep.steps) == 12
    assert ep.discounted_return < 0  # the undefended sweep always costs
    assert ep.attacker == "b-line"


def test_planner_episode_smoke():
    base = cdp.Scenario.default_instance()
    sc = cdp.scenario_for_run(base, 1, 6, 1)
    env = cdp.CyberEnv(sc)
    cfg = cdp.SearchConfig()
    cfg.particles = 100
    cfg.budget_sims = 100
    ep = cdp.run_episode(env, cfg, cdp.DefenderMethod.CPOMCP, 1)
    assert len(ep.steps) == 6
    step = ep.steps[0]
    assert step.full_size == 13 * 11 + 1
    assert 0 < step.pruned_size <= step.full_size
    assert repr(step.intervention)


def test_prune_factor():
    assert abs(cdp.prune_factor(0.9, 10) - 0.6513215599) < 1e-6
    assert cdp.prune_factor(1.0, 30) == 0.0


def test_causal_queries():
    chain = "X -> Z\nZ -> J\n"
    assert cdp.d_separated(chain, ["X"], ["J"], ["Z"])
    assert not cdp.d_separated(chain, ["X"], ["J"], [])
    collider = "X -> Z\nJ -> Z\n"
    assert cdp.d_separated(collider, ["X"], ["J"], [])
    assert not cdp.d_separated(collider, ["X"], ["J"], ["Z"])
    assert cdp.pomis_markovian(chain, "J") == [["Z"]]
