import math

import numpy as np
import pytest

from bmo_bellman.candidates import bellman, dispatch, eval_global
from bmo_bellman.errors import ArgumentError, DomainError, NumericError
from bmo_bellman.geometry import BellmanParams, CandidateKind, contains
from bmo_bellman.testfn import PiecewiseFn, canonical_extremizers, constant, moments, p_mean
from bmo_bellman import verify as V

K = CandidateKind
SENSES = [(K.M, 1.5), (K.M, 3.0), (K.N, 1.5), (K.N, 3.0), (K.P, 0.5), (K.R, 0.5)]


@pytest.mark.parametrize("kind,p", SENSES)
def test_midpoint_both_directions(kind, p):
    params = BellmanParams(1.0, p)
    sense = V.natural_sense(kind, p)
    good = V.midpoint_concavity(params, kind, sense, trials=1500, seed=2)
    assert good.passed and good.trials == 1500
    flipped = "convex" if sense == "concave" else "concave"
    bad = V.midpoint_concavity(params, kind, flipped, trials=1500, seed=2)
    assert not bad.passed
    with pytest.raises(ArgumentError):
        V.midpoint_concavity(params, kind, "flat", trials=1)


def test_report_serialises():
    rep = V.midpoint_concavity(BellmanParams(1.0, 1.5), K.M, "concave", trials=50, seed=9)
    d = rep.to_dict()
    assert set(d) >= {"name", "trials", "violations", "worst_slack", "seed", "passed"}
    assert d["seed"] == 9
    assert V.Report("x", 0).to_dict()["worst_slack"] is None


@pytest.mark.parametrize("kind,p", SENSES + [(K.R, 0.9), (K.P, 0.1), (K.N, 1.0), (K.M, 1.0)])
@pytest.mark.parametrize("eps", [0.5, 2.0])
def test_gluing(kind, p, eps):
    rep = V.gluing_jumps(BellmanParams(eps, p), kind)
    assert rep.passed, rep.violations


def test_gluing_jump_value_for_r():
    eps, p = 1.0, 0.5
    rep = V.gluing_jumps(BellmanParams(eps, p), K.R)
    inner = rep.details["curves"][0]
    assert inner["expected"] == pytest.approx((2 * eps) ** (p - 2) * (2 - p))
    for row in inner["points"]:
        assert row["jump"] == pytest.approx(inner["expected"], rel=1e-6)


@pytest.mark.parametrize("kind,p,x", [
    (K.M, 1.5, (0.3, 0.5)), (K.M, 3.0, (2.0, 4.5)), (K.M, 1.5, (-2.5, 6.5)),
    (K.N, 1.5, (2.0, 4.5)), (K.N, 3.0, (-3.0, 9.2)),
    (K.P, 0.5, (0.3, 0.5)), (K.P, 0.5, (2.0, 4.5)), (K.P, 0.5, (6.0, 36.5)),
    (K.R, 0.5, (0.75, 0.75)), (K.R, 0.5, (3.0, 9.5)),
])
def test_trajectories_are_straight(kind, p, x):
    rep = V.trajectory_linearity(BellmanParams(1.0, p), kind, x)
    assert rep.passed, rep.violations
    a, b = rep.details["from"], rep.details["to"]
    params = BellmanParams(1.0, p)
    assert contains(a, params) and contains(b, params)


def test_trajectory_errors():
    params = BellmanParams(1.0, 1.5)
    with pytest.raises(ArgumentError):
        V.trajectory_linearity(params, K.N, (0.1, 0.5))
    with pytest.raises(DomainError):
        V.trajectory_linearity(params, K.M, (0.1, 1.5))


def test_induction_on_two_point_extremizer_is_flat():
    eps, p = 1.0, 1.5
    phi1 = canonical_extremizers(BellmanParams(eps, p))[0]
    rep = V.induction_engine(phi1, BellmanParams(eps, p), K.M, "upper", depth=14, delta=1.01 * eps)
    assert rep.passed
    assert np.allclose(rep.details["levels"], eps ** p, atol=1e-12)


def test_induction_on_constant():
    rep = V.induction_engine(constant(-1.7), BellmanParams(1.0, 3.0), K.N, "upper", depth=5)
    assert rep.passed
    assert rep.details["levels"] == pytest.approx([1.7 ** 3] * 6)


def test_induction_eight_steps_upper_p3():
    rng = np.random.default_rng(12)
    phi = V.random_step_function(rng, 0.9)
    rep = V.induction_engine(phi, BellmanParams(0.9, 3.0), K.N, "upper", depth=14, delta=1.05 * 0.9)
    assert rep.passed
    assert rep.details["levels"][-1] >= p_mean(phi, 3.0) - 1e-6


def test_induction_errors():
    params = BellmanParams(1.0, 1.5)
    phi = canonical_extremizers(params)[0]
    with pytest.raises(ArgumentError):
        V.induction_engine(phi, params, K.M, "upper", delta=1.0)
    with pytest.raises(ArgumentError):
        V.induction_engine(phi, params, K.M, "upper", depth=15)
    with pytest.raises(ArgumentError):
        V.induction_engine(PiecewiseFn.steps([-2.0, 2.0]), params, K.M, "upper")
    with pytest.raises(ArgumentError):
        V.induction_engine(phi, params, K.M, "sideways")


def test_induction_reports_missing_split(monkeypatch):
    # with every segment rejected no admissible split exists
    monkeypatch.setattr(V, "segment_inside", lambda *a, **k: np.zeros(np.broadcast(*a[:4]).shape, dtype=bool))
    params = BellmanParams(1.0, 1.5)
    phi = PiecewiseFn.steps([-0.5, 0.5, 0.1])
    with pytest.raises(NumericError):
        V.induction_engine(phi, params, K.M, "upper", depth=3)


def test_delta_convergence():
    # the initial aggregate is the candidate on the enlarged strip; it decreases to the eps value
    eps, p = 1.0, 3.0
    rng = np.random.default_rng(5)
    phi = V.random_step_function(rng, eps)
    bp = moments(phi)
    s0 = []
    for f in (1.2, 1.1, 1.05, 1.01):
        rep = V.induction_engine(phi, BellmanParams(eps, p), K.N, "upper", depth=12, delta=f * eps)
        assert rep.passed
        s0.append(rep.details["levels"][0])
    assert all(a >= b for a, b in zip(s0, s0[1:]))
    target = eval_global((bp.x1, bp.x2), BellmanParams(eps, p), K.N)
    assert s0[-1] - target < s0[0] - target
    assert s0[-1] >= target - 1e-12


def test_random_step_function_norm():
    from bmo_bellman.testfn import bmo_norm
    rng = np.random.default_rng(0)
    for _ in range(5):
        phi = V.random_step_function(rng, 2.0)
        assert 0.4 - 1e-9 <= bmo_norm(phi) <= 1.8 + 1e-9
        assert len(phi.pieces) == 8


def test_oracle_simple_cases():
    params = BellmanParams(1.0, 1.5)
    assert V.brute_force_sup((0.7, 0.49), params, 1.5, 4, "upper", budget=100) == pytest.approx(0.7 ** 1.5)
    with pytest.raises(DomainError):
        V.brute_force_sup((0.0, 2.0), params, 1.5, 4, "upper")
    with pytest.raises(ArgumentError):
        V.brute_force_sup((0.0, 0.5), params, 1.5, 17, "upper")
    with pytest.raises(DomainError):
        V.brute_force_sup((0.0, 0.5), params, 1.5, 1, "upper")


def test_oracle_three_step_extremizer():
    eps = 1.0
    params = BellmanParams(eps, 0.5)
    val = V.brute_force_sup((0.0, eps * eps), params, 0.5, 8, "lower", budget=20000, seed=1)
    assert val == pytest.approx(2 ** -1.5 * eps ** 0.5, abs=1e-6)


def test_oracle_stays_below_upper_function():
    params = BellmanParams(1.0, 3.0)
    val = V.brute_force_sup((0.0, 1.0), params, 3.0, 16, "upper", budget=20000, seed=3)
    assert val <= 3.0 + 1e-6
    # equal-width 16-step functions only get part of the way to the logarithmic extremizer
    assert val >= 0.75 * 3.0


def test_oracle_is_deterministic():
    params = BellmanParams(1.0, 1.5)
    a = V.brute_force_sup((0.2, 0.6), params, 1.5, 8, "lower", budget=3000, seed=4)
    b = V.brute_force_sup((0.2, 0.6), params, 1.5, 8, "lower", budget=3000, seed=4)
    assert a == b
    assert a >= bellman((0.2, 0.6), params, "lower") - 1e-6


def test_theorem_checks_on_extremizers():
    eps = 0.5
    phi1, phi2, phi3 = canonical_extremizers(BellmanParams(eps, 1.0))
    rep = V.check_theorems(phi2, 1.0, 3.0)
    assert rep.passed
    assert rep.details["ratio_constant"] == pytest.approx(6.0)
    upper = next(c for c in rep.details["checks"] if c["name"] == "ratio upper")
    assert upper["margin"] == pytest.approx(0.0, abs=1e-10)
    assert rep.details["exp_mean"] == pytest.approx(1.5, abs=1e-8)
    rep1 = V.check_theorems(phi1, 1.5, 2.5)
    assert rep1.passed
    eq = next(c for c in rep1.details["checks"] if c["name"] == "oscillation upper p=1.5")
    assert eq["margin"] == pytest.approx(0.0, abs=1e-12)
    assert V.check_theorems(phi3, 1.0, 2.0).passed
    with pytest.raises(ArgumentError):
        V.check_theorems(constant(1.0), 1.0, 2.0)


def test_theorem_checks_random():
    rng = np.random.default_rng(21)
    for _ in range(100):
        phi = V.random_piecewise(rng)
        p1, p2 = float(rng.uniform(1, 2)), float(rng.uniform(2, 5))
        rep = V.check_theorems(phi, p1, p2)
        assert rep.passed, rep.violations


def test_constants_helpers():
    assert V.norm_constants(0.5) == (2 ** -3, 1.0)
    lo, hi = V.norm_constants(3.0)
    assert lo == 1.0 and hi == pytest.approx(3 ** (1 / 3))
    assert V.jn_bounds(0.5) == (1.5, 1.75)
    with pytest.raises(ArgumentError):
        V.jn_bounds(1.0)
    with pytest.raises(ArgumentError):
        V.norm_constants(0.0)


@pytest.mark.parametrize("kind,p", [(K.M, 1.5), (K.N, 1.5), (K.P, 0.5), (K.R, 0.5)])
def test_foliation_vertices_in_domain(kind, p):
    params = BellmanParams(1.5, p)
    lines = V.foliation_trace(params, kind, 5)
    assert lines
    for line in lines:
        assert len(line) >= 2
        for v in line:
            assert contains(v, params)
    with pytest.raises(ArgumentError):
        V.foliation_trace(params, kind, 0)


def test_foliation_lines_are_trajectories():
    # the candidate is affine along every emitted segment
    params = BellmanParams(1.0, 1.5)
    for line in V.foliation_trace(params, K.M, 3):
        (a1, a2), (b1, b2) = line
        ga = eval_global((a1, a2), params, K.M)
        gb = eval_global((b1, b2), params, K.M)
        gm = eval_global(((a1 + b1) / 2, (a2 + b2) / 2), params, K.M)
        assert gm == pytest.approx((ga + gb) / 2, abs=1e-9)


def test_suites_runner():
    reps = V.verify_suites(BellmanParams(1.0, 0.5), ("concavity", "theorems"), trials=200, seed=1)
    assert all(r.passed for r in reps)
    with pytest.raises(ArgumentError):
        V.verify_suites(BellmanParams(1.0, 0.5), ("nope",))
