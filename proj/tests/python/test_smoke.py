import numpy as np
import pytest

import seqcpd


def test_mean_dgp_round_trip():
    g = seqcpd.generate("mean", 3)
    assert g["values"].shape == (1000, 3)
    assert g["true_change_points"] == [300, 700]
    r = seqcpd.detect(g["values"], family="mean")
    assert len(r["change_points"]) == 2
    for got, want in zip(r["change_points"], [300, 700]):
        assert abs(got - want) <= 5
    assert len(r["cost_values"]) == 3
    assert r["residuals"].shape == (1000,)


def test_cp_only_and_manual_beta():
    rng = np.random.default_rng(0)
    x = np.concatenate([rng.normal(0, 1, 200), rng.normal(4, 1, 200)]).reshape(-1, 1)
    r = seqcpd.detect(x, beta=10.0, cp_only=True)
    assert r["residuals"] is None
    assert len(r["change_points"]) == 1
    assert abs(r["change_points"][0] - 200) <= 5


def test_ar_order():
    g = seqcpd.generate("ar3", 2)
    r = seqcpd.detect(g["values"], family="ar", order=g["order"], cp_only=True)
    assert len(r["change_points"]) == 1
    assert abs(r["change_points"][0] - 600) <= 25


def test_errors_map_to_python_exceptions():
    x = np.zeros((50, 1))
    with pytest.raises(ValueError):
        seqcpd.detect(x, trim=0.7)
    with pytest.raises(RuntimeError):
        seqcpd.generate("nope", 1)


def test_helpers():
    assert seqcpd.beta_value("BIC", 1, 1000) == pytest.approx(np.log(1000))
    assert "mean" in seqcpd.dgp_ids()
    assert "lasso" in seqcpd.family_ids()
    assert seqcpd.laplace_rice(np.array([0.0, 3.0])) == pytest.approx(8.0)
