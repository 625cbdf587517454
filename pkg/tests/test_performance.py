import itertools

import numpy as np
import pytest

from matchq import QueueModel, birth_death_solve, poisson, report, solve
from matchq.performance import FIELDS, measures_from_levels

from reference_models import table1_maps, table1_model, table2_model

# Published Poisson rows (no MAP correlation involved).
POISSON_ROWS = {
    (0.25, 1.0): (0.2850, 0.8174, 0.1024, 3.3181, 0.3851, 2.4429),
    (0.75, 1.0): (0.4699, 0.6989, 0.1688, 1.4392, 0.6350, 0.9542),
}

# Dense global-balance solve of the reflected generator at K = 150.
ORACLE_ROWS = {
    ("map2", (0.25, 1.0)): (0.3289473147, 0.7405082416, 0.0694555563, 4.8215077281, 0.7609324876, 3.4329414174),
    ("map2", (0.75, 1.0)): (0.4879026256, 0.6186219036, 0.1065245292, 2.0777422245, 1.1138622239, 1.4888089924),
    ("map4", (0.25, 1.0)): (0.2865861647, 0.8104673443, 0.0970535090, 3.4740833330, 0.4240763888, 2.5588354390),
    ("map4", (0.75, 1.0)): (0.4662222922, 0.6914239880, 0.1576462803, 1.5147894283, 0.6916476268, 1.0219866952),
}


@pytest.mark.parametrize("thetas", POISSON_ROWS)
def test_poisson_rows(thetas):
    rep = report(solve(table1_model("poisson", thetas)))
    got = tuple(getattr(rep, f) for f in FIELDS[:6])
    assert got == pytest.approx(POISSON_ROWS[thetas], abs=5e-5)


@pytest.mark.parametrize("key", ORACLE_ROWS)
def test_map_rows_against_dense_oracle(key):
    rep = report(solve(table1_model(*key)))
    got = tuple(getattr(rep, f) for f in FIELDS[:6])
    assert got == pytest.approx(ORACLE_ROWS[key], abs=1e-9)


def test_composite_mean_reading():
    # the published composite mean is consistent with the published marginals
    assert 3.3181 * (1 - 0.2850) + 0.3851 * (1 - 0.8174) == pytest.approx(2.4429, abs=3e-4)


def test_deep_exponential_row():
    rep = report(solve(table2_model("exponential", (0.01, 0.02))))
    assert round(rep.mean_level_diff, 3) == -50.0


def test_symmetric():
    rep = report(solve(QueueModel(poisson(1.7), poisson(1.7), 0.3, 0.3)))
    assert rep.mean_level_diff == pytest.approx(0.0, abs=1e-12)
    assert rep.p_no_a == pytest.approx(rep.p_no_b, abs=1e-12)


@pytest.mark.parametrize("kind", ["poisson", "map2", "map4"])
@pytest.mark.parametrize("thetas", [(0.25, 1.0), (0.75, 1.0), (2.0, 0.1)])
def test_invariants(kind, thetas):
    model = table1_model(kind, thetas)
    rep = report(solve(model))
    assert rep.p_no_a + rep.p_no_b - rep.p_empty == pytest.approx(1.0, abs=1e-10)
    assert rep.p_empty <= min(rep.p_no_a, rep.p_no_b)
    assert rep.mean_q_a >= 0 and rep.mean_q_b >= 0
    assert rep.mean_q_paper <= rep.mean_q_a + rep.mean_q_b
    assert rep.mean_q_total_abs == pytest.approx(rep.mean_q_a + rep.mean_q_b)
    assert rep.mean_level_diff == pytest.approx(rep.mean_q_a - rep.mean_q_b, abs=1e-12)
    assert rep.truncation_error_bound == rep.tail_mass * (rep.k_star + 1)
    # flow conservation: lambda1 - lambda2 = theta1 E[Q_A] - theta2 E[Q_B]
    assert model.theta1 * rep.mean_q_a - model.theta2 * rep.mean_q_b == pytest.approx(
        model.lambda1 - model.lambda2, abs=1e-9)


@pytest.mark.parametrize("args", [(5, 41 / 9, 0.25, 1), (1, 2, 1, 2), (3, 1, 0.2, 5)])
def test_poisson_against_birth_death(args):
    rep = report(solve(QueueModel(poisson(args[0]), poisson(args[1]), *args[2:])))
    bd = birth_death_solve(*args, K=800)
    ref = measures_from_levels(bd.levels, bd.p)
    for name in FIELDS:
        assert getattr(rep, name) == pytest.approx(ref[name], abs=1e-8), name


def test_measures_from_levels_clips_negative_roundoff():
    out = measures_from_levels(np.array([-1, 0, 1]), np.array([-1e-18, 0.5, 0.5]))
    assert out["p_no_a"] == 0.5 and out["mean_q_b"] == 0.0


def test_as_dict_round_trip():
    rep = report(solve(table1_model("poisson", (0.25, 1.0))))
    d = rep.as_dict()
    assert set(FIELDS) <= set(d) and d["k_star"] == rep.k_star


GRID = (0.2, 0.6, 1.0, 1.4)


@pytest.fixture(scope="module")
def grid_reports():
    a, b = table1_maps("map2")
    return {(t1, t2): report(solve(QueueModel(a, b, t1, t2))) for t1, t2 in itertools.product(GRID, GRID)}


@pytest.mark.parametrize("field, sign1, sign2", [
    ("p_no_a", +1, -1),
    ("p_no_b", -1, +1),
    ("mean_q_a", -1, +1),
    ("mean_q_b", +1, -1),
])
def test_monotone_trends(grid_reports, field, sign1, sign2):
    for t2 in GRID:
        vals = [getattr(grid_reports[t1, t2], field) for t1 in GRID]
        assert all(sign1 * (y - x) > 0 for x, y in zip(vals, vals[1:])), (field, "theta1", t2, vals)
    for t1 in GRID:
        vals = [getattr(grid_reports[t1, t2], field) for t2 in GRID]
        assert all(sign2 * (y - x) > 0 for x, y in zip(vals, vals[1:])), (field, "theta2", t1, vals)
