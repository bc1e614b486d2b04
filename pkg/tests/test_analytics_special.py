import math

import numpy as np
import pytest
import scipy.special
import scipy.stats

from chunkchain.analytics import f_sf, regularized_incomplete_beta, t_two_sided_p


def test_incomplete_beta_against_scipy():
    rng = np.random.default_rng(7)
    for _ in range(500):
        a = rng.uniform(0.1, 80.0)
        b = rng.uniform(0.1, 80.0)
        x = rng.uniform(0.0, 1.0)
        ours = regularized_incomplete_beta(a, b, x)
        ref = scipy.special.betainc(a, b, x)
        assert abs(ours - ref) < 1e-10


def test_incomplete_beta_edges():
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        regularized_incomplete_beta(0.0, 1.0, 0.5)


def test_t_p_values_match_scipy_to_1e10():
    rng = np.random.default_rng(11)
    for _ in range(500):
        t = rng.uniform(-8.0, 8.0)
        df = int(rng.integers(1, 300))
        ours = t_two_sided_p(t, df)
        ref = 2.0 * scipy.stats.t.sf(abs(t), df)
        assert abs(ours - ref) < 1e-10


def test_t_p_symmetry_and_monotonicity():
    df = 17
    ts = [0.0, 0.3, 0.9, 1.7, 2.5, 4.0, 7.5]
    ps = [t_two_sided_p(t, df) for t in ts]
    for t, p in zip(ts, ps):
        assert t_two_sided_p(-t, df) == p
    assert ps == sorted(ps, reverse=True)
    assert t_two_sided_p(0.0, df) == 1.0
    assert t_two_sided_p(math.inf, df) == 0.0


def test_f_sf_matches_scipy():
    rng = np.random.default_rng(13)
    for _ in range(300):
        f = rng.uniform(0.0, 15.0)
        df1 = int(rng.integers(1, 12))
        df2 = int(rng.integers(2, 300))
        ours = f_sf(f, df1, df2)
        ref = scipy.stats.f.sf(f, df1, df2)
        assert abs(ours - ref) < 1e-10


def test_f_sf_edges():
    assert f_sf(0.0, 2, 10) == 1.0
    assert f_sf(math.inf, 2, 10) == 0.0
    with pytest.raises(ValueError):
        f_sf(1.0, 0, 10)
