import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matchq import QueueModel, blocks_at, drift_rates, poisson

from reference_models import D2_2, random_map, table1_model


def test_scalar_blocks():
    m = QueueModel(poisson(1.5), poisson(2.5), 0.4, 0.7)
    b = blocks_at(m, 3)
    assert b.up.tolist() == [[1.5]]
    assert b.local[0, 0] == pytest.approx(-1.5 - 2.5 - 3 * 0.4)
    assert b.down[0, 0] == pytest.approx(2.5 + 3 * 0.4)
    b = blocks_at(m, -2)
    assert b.up[0, 0] == pytest.approx(1.5 + 2 * 0.7)
    assert b.down[0, 0] == pytest.approx(2.5)
    b = blocks_at(m, 0)
    assert (b.up[0, 0], b.local[0, 0], b.down[0, 0]) == (1.5, -4.0, 2.5)


def test_level_one_down_block():
    m = table1_model("map2", (0.25, 1.0))
    expected = np.kron(np.array(D2_2, float), np.eye(2)) + 0.25 * np.eye(4)
    np.testing.assert_allclose(m.blocks_at(1).down, expected, atol=0)


def test_level_zero_local_is_sum_of_halves():
    m = table1_model("map4", (0.25, 1.0))
    a, b = m.map_a, m.map_b
    expected = np.kron(b.c, np.eye(4)) + np.kron(np.eye(4), a.c)
    np.testing.assert_array_equal(m.blocks_at(0).local, expected)


@pytest.mark.parametrize("kind", ["poisson", "map2", "map4"])
@pytest.mark.parametrize("k", [-50, -7, -1, 0, 1, 2, 13, 200])
def test_blocks_conserve(kind, k):
    m = table1_model(kind, (0.25, 1.0))
    b = m.blocks_at(k)
    assert b.level == k
    assert np.abs((b.down + b.local + b.up).sum(axis=1)).max() < 1e-12
    assert (b.up >= 0).all() and (b.down >= 0).all()
    off = b.local - np.diag(np.diag(b.local))
    assert (off >= 0).all()
    assert (np.diag(b.local) < 0).all()


def test_order():
    assert table1_model("map4", (0.25, 1.0)).order == 16


def test_blocks_read_only():
    b = table1_model("map2", (0.25, 1.0)).blocks_at(4)
    with pytest.raises(ValueError):
        b.up[0, 0] = 1.0


def test_negative_theta_rejected():
    with pytest.raises(ValueError):
        QueueModel(poisson(1), poisson(1), -0.1, 1.0)


def test_mirrored():
    m = table1_model("map2", (0.25, 1.0))
    r = m.mirrored()
    assert r.map_a == m.map_b and r.theta1 == 1.0 and r.mirrored() == m


def test_drift_examples():
    m = QueueModel(poisson(5.0), poisson(41 / 9), 1.0, 1.0)
    up, down = drift_rates(m, 2)
    assert up == pytest.approx(5.0) and down == pytest.approx(6 + 5 / 9)
    m = QueueModel(poisson(1.0), poisson(2.0), 0.5, 2.0)
    assert drift_rates(m, -3) == pytest.approx((7.0, 2.0))
    m = QueueModel(poisson(1.0), poisson(2.0), 0.0, 0.0)
    assert all(drift_rates(m, k) == pytest.approx((1.0, 2.0)) for k in (-4, -1, 1, 9))
    with pytest.raises(ValueError):
        drift_rates(m, 0)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
def test_kronecker_drift_identity(seed, th1, th2):
    rng = np.random.default_rng(seed)
    m = QueueModel(random_map(rng, rng.integers(1, 4)), random_map(rng, rng.integers(1, 4)), th1, th2)
    alpha = np.kron(m.map_b.summary.alpha, m.map_a.summary.alpha)
    for k in (1, 5, 37):
        b = m.blocks_at(k)
        assert alpha @ b.up.sum(axis=1) == pytest.approx(m.lambda1, abs=1e-10)
        assert alpha @ b.down.sum(axis=1) == pytest.approx(m.lambda2 + k * th1, abs=1e-10)
        b = m.blocks_at(-k)
        assert alpha @ b.up.sum(axis=1) == pytest.approx(m.lambda1 + k * th2, abs=1e-10)
        assert alpha @ b.down.sum(axis=1) == pytest.approx(m.lambda2, abs=1e-10)


def test_stationary_phase_of_product():
    m = table1_model("map4", (0.25, 1.0))
    alpha = np.kron(m.map_b.summary.alpha, m.map_a.summary.alpha)
    gen = np.kron(m.map_b.generator, np.eye(4)) + np.kron(np.eye(4), m.map_a.generator)
    assert np.abs(alpha @ gen).max() < 1e-12


def test_local_diagonal_negative_far_out():
    m = table1_model("map2", (0.25, 1.0))
    for k in (10**6, -(10**6)):
        assert (np.diag(m.blocks_at(k).local) < 0).all()
