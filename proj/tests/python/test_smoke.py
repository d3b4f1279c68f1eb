import numpy as np
import pytest

import treelimit as tl


def test_tree_basics():
    x = tl.Tree(["", "0", "00", "1"])
    assert len(x) == 4
    assert x.height == 2
    assert sorted(x.boundary()) == ["000", "001", "01", "10", "11"]
    assert x.subtree_size("0") == 2
    assert x.t("0") == pytest.approx(0.5)
    assert "00" in x and "11" not in x
    with pytest.raises(ValueError):
        tl.Tree(["", "00"])


def test_grow_is_seeded():
    a = tl.grow("dst", 500, seed=3, measure="bernoulli:0.3")
    b = tl.grow("dst", 500, seed=3, measure="bernoulli:0.3")
    assert a == b
    assert len(tl.grow("bst", 100, seed=1)) == 100
    assert len(tl.grow("remy", 50, seed=1)) == 50
    assert len(tl.grow("catalan", 50, seed=1)) == 50


def test_measures_and_covariance():
    mu = tl.parse_measure("uniform")
    assert mu.mass("01") == pytest.approx(0.25)
    cov = tl.theoretical_cov(mu, ["0", "1", "00"])
    assert isinstance(cov, np.ndarray)
    np.testing.assert_allclose(cov, [[0.25, -0.25, 0.125], [-0.25, 0.25, -0.125], [0.125, -0.125, 0.1875]])
    assert tl.increment_pmf(tl.parse_measure("bernoulli:0.3"), "") == pytest.approx([0.7, 0.0, 0.3])
    with pytest.raises(ValueError):
        tl.parse_measure("bernoulli:1.5")


def test_increments_never_zero_at_root():
    y = tl.increments("uniform", 2000, "", seed=2)
    assert len(y) == 1999
    assert set(y) <= {-1, 1}


def test_clt_report():
    report = tl.clt_experiment("uniform", ["0", "1"], n=400, reps=200, seed=5).as_dict()
    assert report["empirical"].shape == (2, 2)
    assert report["theoretical"][0, 0] == pytest.approx(0.25)
    assert not report["low_power"]


def test_selftest():
    assert tl.selftest(1)
