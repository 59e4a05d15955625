import math

import numpy as np
import pytest

import uekit


def test_metrics():
    assert uekit.prr([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    assert uekit.auroc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    assert uekit.auroc([1.0, 1.0], [1, 0]) == 0.5
    curve = uekit.rejection_curve([0.9, 0.1], [1, 0])
    assert len(curve) == 3
    t = uekit.threshold_at_recall([0.1, 0.4, 0.35, 0.8], [0, 1, 0, 1], 0.5)
    assert uekit.recall_at([0.1, 0.4, 0.35, 0.8], [0, 1, 0, 1], t) == 0.5
    assert uekit.are([0.1, 0.4, 0.8], [0, 1, 1], [0.1, 0.4, 0.8], [0, 1, 1], step=0.5) == 0.0


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        uekit.prr([0.1, 0.2], [0, 0])
    with pytest.raises(ValueError):
        uekit.auroc([0.1], [0, 1])


def test_graph_scorers():
    ones = np.ones((5, 5))
    assert uekit.degmat(ones) == pytest.approx(0.0, abs=1e-12)
    assert uekit.sum_eigv(ones) == pytest.approx(1.0, abs=1e-12)
    assert uekit.kle(np.eye(4)) == pytest.approx(math.log(4), abs=1e-12)
    assert uekit.eccentricity(ones) == pytest.approx(0.0, abs=1e-9)
    assert uekit.eccentricity(np.eye(3), k=0) == 0.0
    w = np.array([[1.0, 0.9, 0.1], [0.9, 1.0, 0.2], [0.1, 0.2, 1.0]])
    assert uekit.eccentricity_c(w, j=2) >= uekit.eccentricity_c(w, j=0)
    assert uekit.degmat_c(w, j=0) == pytest.approx(-2.0 / 3.0)


def test_inside_and_entropy():
    assert uekit.inside_eigenscore(np.zeros((8, 4)), alpha=0.001) == pytest.approx(-6.9078, abs=1e-4)
    assert uekit.cluster_size_entropy([3, 2]) == pytest.approx(0.6730, abs=1e-4)
    assert uekit.SENTINEL > 1e300


def test_typo_and_cli(tmp_path):
    assert uekit.typo("Who wrote Hamlet?", 1, 5) == uekit.typo("Who wrote Hamlet?", 1, 5)
    scores = tmp_path / "s.jsonl"
    scores.write_text('{"id":"a","label":1,"scores":{"m":0.9}}\n{"id":"b","label":0,"scores":{"m":0.1}}\n')
    rc, out, err = uekit.run_cli(["evaluate", "--in", str(scores), "--metric", "prr"])
    assert rc == 0, err
    assert out == "m prr 1.0\n"
    rc, _, err = uekit.run_cli(["evaluate", "--in", str(tmp_path / "missing.jsonl")])
    assert rc == 1
    assert "error" in err
