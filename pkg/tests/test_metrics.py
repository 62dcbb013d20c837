import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cllsr.errors import LengthMismatch
from cllsr.metrics import MetricReport, accuracy, ari, contingency, evaluate, f_measure, nmi

from oracles import accuracy_oracle, ari_oracle, f_measure_oracle, nmi_oracle

labels = st.integers(2, 40).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 4), min_size=n, max_size=n),
                        st.lists(st.integers(0, 4), min_size=n, max_size=n)))


def test_small_examples():
    assert accuracy([0, 0, 1], [0, 1, 1]) == pytest.approx(2 / 3)
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-12)
    assert ari([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(-0.5)
    assert f_measure([0, 1, 2], [0, 0, 0]) == 0.0
    assert nmi([0, 0, 0], [0, 1, 2]) == 0.0


def test_identical_partitions_score_one(rng):
    for _ in range(20):
        t = rng.integers(0, 4, size=30)
        if len(set(t)) < 2:
            continue
        relabel = rng.permutation(10)[t]
        for m, v in evaluate(relabel, t).items():
            assert v == pytest.approx(1.0), m


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        contingency([0, 1], [0])


def test_contingency_counts():
    M = contingency([5, 5, 7], ["a", "b", "b"])
    assert M.sum() == 3 and sorted(M.ravel().tolist()) == [0, 1, 1, 1]


@settings(max_examples=100, deadline=None)
@given(labels)
def test_against_pair_count_oracles(pair):
    pred, truth = pair
    assert f_measure(pred, truth) == pytest.approx(f_measure_oracle(pred, truth), abs=1e-12)
    assert ari(pred, truth) == pytest.approx(ari_oracle(pred, truth), abs=1e-12)
    assert nmi(pred, truth) == pytest.approx(nmi_oracle(pred, truth), abs=1e-12)


def test_accuracy_against_permutation_oracle(rng):
    for _ in range(100):
        n = int(rng.integers(1, 25))
        pred = rng.integers(0, rng.integers(1, 6), size=n).tolist()
        truth = rng.integers(0, rng.integers(1, 6), size=n).tolist()
        assert accuracy(pred, truth) == pytest.approx(accuracy_oracle(pred, truth))


def test_relabel_invariance(rng):
    pred, truth = rng.integers(0, 4, 40), rng.integers(0, 3, 40)
    base = evaluate(pred, truth)
    again = evaluate(rng.permutation(4)[pred] + 10, truth)
    for m in base:
        assert again[m] == pytest.approx(base[m], abs=1e-12)


def test_nmi_normalizations():
    pred, truth = [0, 0, 1, 1, 2], [0, 0, 1, 1, 1]
    vals = {k: nmi(pred, truth, k) for k in ("sqrt", "max", "arithmetic")}
    assert vals["max"] <= vals["sqrt"] and vals["max"] <= vals["arithmetic"]
    with pytest.raises(ValueError):
        nmi(pred, truth, "geometric-ish")


def test_sklearn_agreement(rng):
    skm = pytest.importorskip("sklearn.metrics")
    for _ in range(30):
        p, t = rng.integers(0, 4, 50), rng.integers(0, 3, 50)
        assert ari(p, t) == pytest.approx(skm.adjusted_rand_score(t, p), abs=1e-12)
        assert nmi(p, t) == pytest.approx(
            skm.normalized_mutual_info_score(t, p, average_method="geometric"), abs=1e-12)


def test_report_round_trip(tmp_path):
    runs = [{"acc": 1.0, "nmi": 0.5, "fs": 0.25, "ari": 0.0},
            {"acc": 0.5, "nmi": 0.5, "fs": 0.75, "ari": 1.0}]
    rep = MetricReport.from_runs(runs)
    assert rep.mean["acc"] == 0.75 and rep.std["nmi"] == 0.0
    assert "0.7500(0.2500)" in rep.summary()
    rep.to_csv(tmp_path / "r.csv")
    assert MetricReport.from_csv(tmp_path / "r.csv") == rep
    single = MetricReport.from_runs(runs[:1])
    assert all(v == 0.0 for v in single.std.values())
