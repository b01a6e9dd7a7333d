import json
import os
import sys

module_dir = os.environ.get("CSG_MODULE_DIR")
if module_dir:
    sys.path.insert(0, module_dir)

import _csg  # noqa: E402

INSTANCE_DIR = os.environ.get("CSG_INSTANCE_DIR", "instances")


def load(name):
    return _csg.load_instance(os.path.join(INSTANCE_DIR, name))


def test_load_and_shapes():
    inst = load("rotation_k2.json")
    assert inst.leader_actions == 2
    assert inst.follower_actions == 2
    assert inst.num_types == 2
    assert inst.context_labels[0] == "c0"


def test_parse_round_trip():
    inst = load("threshold_k2.json")
    again = _csg.parse_instance(inst.to_json())
    assert again.num_types == inst.num_types


def test_best_response_and_utility():
    inst = _csg.build_olt_instance()
    # Type 0 always prefers action 0, type 1 always action 1.
    assert _csg.follower_best_response(inst, 0, [0.5], [0.7, 0.3]) == 0
    assert _csg.follower_best_response(inst, 1, [0.5], [0.7, 0.3]) == 1
    u = _csg.expected_leader_utility(inst, [0.5], [0.7, 0.3], 0)
    assert abs(u - 0.7) < 1e-12


def test_extreme_points_and_spanner():
    inst = load("threshold_k2.json")
    pts = _csg.extreme_points(inst, "c0", 1e-3)
    assert len(pts) >= 3
    for x, sigma in pts:
        assert abs(sum(x) - 1.0) < 1e-9
        assert len(sigma) == 2
    rank, elements = _csg.barycentric_spanner(inst, 1e-3)
    assert rank == 2
    assert len(elements) == rank


def test_region_report():
    inst = load("threshold_k2.json")
    report = _csg.region_report(inst, "c0", 1e-3)
    assert "nonempty regions" in report


def test_run_experiment():
    inst = load("rotation_k2.json")
    result = _csg.run_experiment(
        inst,
        scenario="fully-stochastic",
        alg="greedy-typefreq",
        T=30,
        seeds=2,
        base_seed=7,
    )
    assert len(result["mean_regret"]) == 30
    assert len(result["std_regret"]) == 30
    # Same call is deterministic.
    again = _csg.run_experiment(
        inst,
        scenario="fully-stochastic",
        alg="greedy-typefreq",
        T=30,
        seeds=2,
        base_seed=7,
    )
    assert result["mean_regret"] == again["mean_regret"]


def test_scenario_names():
    names = _csg.scenario_names()
    assert "olt-lower-bound" in names
    assert "fully-stochastic" in names
