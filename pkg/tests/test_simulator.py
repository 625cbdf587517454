import pytest

from matchq import QueueModel, SimConfig, poisson, report, simulate, solve
from matchq.performance import FIELDS

from reference_models import table1_model, table2_model

SHORT = SimConfig(horizon=3e4, warmup=5e2, seed=11)


@pytest.fixture(scope="module")
def exp_run(exp_model):
    return simulate(exp_model, SHORT)


@pytest.mark.parametrize("kwargs", [
    {"horizon": 10.0, "warmup": 20.0},
    {"horizon": 10.0, "warmup": 10.0},
    {"batches": 1},
    {"batches": 2.5},
    {"horizon": -1.0},
    {"seed": -1},
])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)


def test_deterministic(exp_model):
    cfg = SimConfig(horizon=3e3, warmup=1e2, seed=42)
    assert simulate(exp_model, cfg).as_dict() == simulate(exp_model, cfg).as_dict()


def test_seed_matters(exp_model):
    a = simulate(exp_model, SimConfig(horizon=3e3, warmup=1e2, seed=1))
    b = simulate(exp_model, SimConfig(horizon=3e3, warmup=1e2, seed=2))
    assert a.as_dict() != b.as_dict()


def test_one_side_empty():
    model = table1_model("map2", (0.25, 1.0))
    seen = []

    def watch(t, n_a, n_b, j1, j2):
        seen.append((n_a, n_b))

    simulate(model, SimConfig(horizon=2e3, warmup=1e2, seed=5), observer=watch)
    assert seen
    assert all(n_a == 0 or n_b == 0 for n_a, n_b in seen)


def test_everyone_abandons():
    model = QueueModel(poisson(1.0), poisson(1.0), 1e4, 1e4)
    rep = simulate(model, SimConfig(horizon=2e3, warmup=1e1, seed=9))
    assert rep.p_empty.value > 0.99


def test_ranges(exp_run):
    for name in ("p_no_a", "p_no_b", "p_empty", "abandon_frac_a", "abandon_frac_b"):
        est = getattr(exp_run, name)
        assert 0.0 <= est.value <= 1.0
    for name, est in exp_run.as_dict().items():
        if name != "events":
            assert est["half_width"] >= 0


def test_agrees_with_solver(exp_model, exp_run):
    rep = report(solve(exp_model))
    for name in FIELDS:
        est = getattr(exp_run, name)
        assert est.covers(getattr(rep, name), widen=3), (name, est, getattr(rep, name))


def test_littles_law(exp_model, exp_run):
    # every A-customer counts, including those matched at once with zero wait
    expected = exp_run.mean_q_a.value / exp_model.lambda1
    assert exp_run.mean_wait_a.value == pytest.approx(expected, rel=0.05)


def test_abandonment_fraction(exp_model, exp_run):
    rep = report(solve(exp_model))
    expected = exp_model.theta1 * rep.mean_q_a / exp_model.lambda1
    assert exp_run.abandon_frac_a.covers(expected, widen=3)


def test_erlang_short_run():
    model = table2_model("erlang", (1.0, 2.0))
    sim = simulate(model, SHORT)
    rep = report(solve(model))
    assert sim.mean_level_diff.covers(rep.mean_level_diff, widen=3)


def test_partition_identity(exp_run):
    total = exp_run.p_no_a.value + exp_run.p_no_b.value - exp_run.p_empty.value
    assert total == pytest.approx(1.0, abs=1e-9)
