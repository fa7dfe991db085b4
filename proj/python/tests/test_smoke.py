import math
import os

import pytest

import hierfed

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "..", "configs")


def test_round_sums_gradients():
    t = hierfed.Topology(3, [[0, 1], [0, 1, 2], [1, 2]], [0, 1, 2], z_bs=1)
    grads = [[1, 2, 3, 4, 5, 6], [10, 20, 30, 40, 50, 60], [100, 0, 100, 0, 100, 0]]
    r = hierfed.run_round(t, grads, q=101, seed=9)
    expected = [sum(col) % 101 for col in zip(*grads)]
    assert r["aggregate"] == expected
    assert r["replayed"] == expected
    assert r["cost"]["matches_prediction"]
    assert r["cost"]["c_ue"] == hierfed.predict_costs(t, 6)["c_ue"]


def test_topology_queries():
    t = hierfed.Topology.random(6, 4, 1, 2, seed=1)
    assert t.n_clients == 6 and t.n_bs == 4
    assert all(t.nu(i) == 2 for i in range(6))
    members = sorted(m for _, ms in t.patterns() for m in ms)
    assert members == list(range(6))
    with pytest.raises(hierfed.TopologyError):
        hierfed.Topology(2, [[0]], [1], z_bs=0)


def test_sweep_first_row():
    csv = hierfed.sweep(10000, 100, 3, 1000000, 1, 2).splitlines()
    assert csv[1] == "1,4.0004,5.0104,9.01"


def test_audit_honest_and_broken():
    t = hierfed.Topology(2, [[0, 1]], [1], z_bs=1)
    ok = hierfed.audit(t, 3)
    assert ok["pass"] and ok["max_mi_bits"] < 1e-9
    bad = hierfed.audit(t, 3, broken=True)
    assert not bad["pass"]
    assert math.isclose(bad["max_mi_bits"], math.log2(3))
    assert "B{2}" in bad["worst"]


def test_audit_budget():
    t = hierfed.Topology.random(4, 3, 1, 1, seed=0)
    with pytest.raises(hierfed.BudgetExceeded):
        hierfed.audit(t, 5, budget=10)


def test_private_training_matches_plaintext():
    t = hierfed.Topology(2, [[0, 1], [0, 1]], [0, 1], z_bs=1)
    x = [[[1.0, 0.5], [0.2, -1.0]], [[-0.3, 0.8]]]
    y = [[1.0, -0.5], [0.25]]
    a = hierfed.train(t, x, y, [0.0, 0.0], iters=10, seed=4)
    b = hierfed.train(t, x, y, [0.0, 0.0], iters=10, seed=4, private=False)
    assert a == b
    single = hierfed.Topology(1, [[0]], [0])
    assert hierfed.train(single, [[[1.0]]], [[1.0]], [0.0], iters=1)[1][2] == [0.1]


def test_cli_entry(tmp_path):
    out = tmp_path / "sweep.csv"
    code, stdout, _ = hierfed.run_cli("sweep", os.path.join(CONFIGS, "sweep.conf"), out=str(out))
    assert code == 0
    assert out.read_text().startswith("nu,c_min_norm")
    assert "c_min_closed_form=4.0004" in stdout
    code, _, err = hierfed.run_cli("audit", os.path.join(CONFIGS, "audit_oversized.conf"))
    assert code == 4 and err
