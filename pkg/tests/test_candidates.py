import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from bmo_bellman.candidates import (
    bellman,
    dispatch,
    eval_Fminus,
    eval_Fplus,
    eval_global,
    eval_L0,
    eval_Lpm,
    eval_T,
    kind_supports,
    t0_slope,
    tangent_data,
)
from bmo_bellman.errors import ArgumentError, DomainError
from bmo_bellman.geometry import BellmanParams, CandidateKind, Ext, classify
from bmo_bellman.quadrature import cached_mu

K = CandidateKind
KIND_P = [(K.M, 1.0), (K.M, 1.5), (K.M, 3.0), (K.N, 1.0), (K.N, 1.5), (K.N, 3.0),
          (K.P, 0.25), (K.P, 0.75), (K.R, 0.25), (K.R, 0.75), (K.R, 1.0)]


def strip(eps, reach=6.0):
    return st.tuples(st.floats(-reach, reach), st.floats(0, 1)).map(lambda t: (t[0], t[0] ** 2 + eps * eps * t[1]))


def test_block_examples():
    e1 = BellmanParams(1.0, 1.0)
    assert eval_Fplus((1.0, 2.0), 1.0, e1) == pytest.approx(1 + math.exp(-1), abs=1e-14)
    # left half of M is the mirror image of its right tangent block
    assert eval_Fminus((-1.0, 2.0), -1.0, e1) == pytest.approx(1 + math.exp(-1), abs=1e-14)
    assert eval_Fminus((2.0, 4.5), Ext.POS_INF, e1) == pytest.approx(2.0, abs=1e-14)
    assert eval_Fplus((-2.0, 4.5), Ext.NEG_INF, e1) == pytest.approx(2.0, abs=1e-14)
    assert eval_L0((0.3, 0.64), e1) == pytest.approx(0.8)
    with pytest.raises(DomainError):
        eval_L0((0.5, 1.2), e1)
    with pytest.raises(ArgumentError):
        eval_Fplus((2.0, 4.5), Ext.POS_INF, e1)
    with pytest.raises(ArgumentError):
        eval_Fminus((2.0, 4.5), Ext.NEG_INF, e1)


def test_chord_block():
    params = BellmanParams(1.0, 0.5)
    # chord from (0, 0) to (2, 4) through (1, 2), on the tangent at a = 1
    assert eval_Lpm((1.0, 2.0), 1.0, -1, params) == pytest.approx(2 ** 0.5 / 2)
    # value at the chord's lower end
    assert eval_Lpm((0.0, 0.0), 1.0, -1, params) == 0.0
    with pytest.raises(DomainError):
        eval_Lpm((0.0, 0.9), 1.0, -1, params)
    with pytest.raises(ArgumentError):
        eval_Lpm((1.0, 2.0), 1.0, 0, params)


def test_linear_blocks():
    params = BellmanParams(1.0, 1.5)
    assert t0_slope(params, K.N) == pytest.approx(0.75 * math.gamma(1.5))
    assert t0_slope(BellmanParams(1.0, 0.5), K.R) == pytest.approx(2 ** -1.5)
    with pytest.raises(ArgumentError):
        t0_slope(params, K.M)
    with pytest.raises(ArgumentError):
        eval_T((0.1, 0.5), 0.0, params)
    assert eval_T((0.1, 0.5), 0.0, params, alpha=2.0) == 1.0
    with pytest.raises(DomainError):
        eval_T((3.0, 9.5), 0.0, params, alpha=1.0)


def test_dispatch_table():
    assert dispatch(3.0, "upper") is K.N and dispatch(3.0, "lower") is K.M
    assert dispatch(1.5, "upper") is K.M and dispatch(1.5, "lower") is K.N
    assert dispatch(0.5, "upper") is K.P and dispatch(0.5, "lower") is K.R
    assert dispatch(1.0, "upper") is K.M
    with pytest.raises(ArgumentError):
        dispatch(1.0, "middle")
    with pytest.raises(ArgumentError):
        dispatch(0.0, "upper")
    assert kind_supports(K.R, 1.0) and not kind_supports(K.P, 1.0)
    with pytest.raises(ArgumentError):
        eval_global((0.0, 0.5), BellmanParams(1.0, 1.5), K.P)


def test_p2_is_the_second_moment():
    params = BellmanParams(1.0, 2.0)
    assert bellman((0.3, 0.5), params, "lower") == 0.5
    assert bellman((0.3, 0.5), params, "upper") == 0.5
    with pytest.raises(DomainError):
        bellman((0.3, 2.0), params, "upper")


def test_spec_point_values():
    assert bellman((0.0, 1.0), BellmanParams(1.0, 3.0), "upper") == pytest.approx(3.0, abs=1e-12)
    assert eval_global((3.0, 9.5), BellmanParams(1.0, 1.0), K.N) == pytest.approx(3.0, abs=1e-13)


@pytest.mark.parametrize("kind,p", KIND_P)
@settings(max_examples=40, deadline=None)
@given(x=strip(1.0))
def test_even_in_x1(kind, p, x):
    params = BellmanParams(1.0, p)
    assert eval_global(x, params, kind) == pytest.approx(eval_global((-x[0], x[1]), params, kind), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("kind,p", KIND_P)
@settings(max_examples=30, deadline=None)
@given(t=st.floats(-6, 6), eps=st.sampled_from([0.5, 1.0, 2.0]))
def test_lower_boundary_trace(kind, p, t, eps):
    params = BellmanParams(eps, p)
    assert eval_global((t, t * t), params, kind) == pytest.approx(abs(t) ** p, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("p", [0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.5])
@settings(max_examples=40, deadline=None)
@given(x=strip(1.0))
def test_upper_dominates_lower(p, x):
    params = BellmanParams(1.0, p)
    hi = bellman(x, params, "upper")
    lo = bellman(x, params, "lower")
    assert hi >= lo - 1e-10 * max(1.0, hi)
    # Jensen: the lower function is at least |x1|^p for p >= 1 and the upper at most x2^(p/2) for p <= 2
    if p >= 1:
        assert lo >= abs(x[0]) ** p - 1e-10 * max(1.0, lo)
    if p <= 2:
        assert hi <= x[1] ** (p / 2) + 1e-10 * max(1.0, hi)


@pytest.mark.parametrize("kind,p", KIND_P)
@settings(max_examples=40, deadline=None)
@given(x=strip(1.0, reach=5.0), dx1=st.floats(-1, 1), dx2=st.floats(-1, 1))
def test_continuity(kind, p, x, dx1, dx2):
    params = BellmanParams(1.0, p)
    h = 1e-7
    y = (x[0] + h * dx1, x[1] + h * dx2)
    assume(y[0] ** 2 <= y[1] <= y[0] ** 2 + 1.0)
    # near the origin the candidates are only Hoelder continuous for small p
    assume(x[1] > 1e-3)
    a, b = eval_global(x, params, kind), eval_global(y, params, kind)
    assert abs(a - b) <= 1e-4 * max(1.0, abs(a))


def test_continuity_across_gluing_curves():
    # values approach each other from both sides of every block boundary
    for kind, p, pts in [
        (K.M, 1.5, [(0.5, 1.0)]),
        (K.N, 3.0, [(0.5, 1.0), (0.99, 1.98)]),
        (K.R, 0.5, [(0.5, 1.0), (1.5, 3.0)]),
    ]:
        params = BellmanParams(1.0, p)
        for x1, x2 in pts:
            up = eval_global((x1, x2 + 1e-9), params, kind)
            down = eval_global((x1, x2 - 1e-9), params, kind)
            assert up == pytest.approx(down, abs=1e-7)
    params = BellmanParams(1.0, 0.5)
    xi = cached_mu(0.5)
    for f in (0.3, 0.7):
        x1 = xi - f
        x2 = 2 * (xi - 1) * x1 + 2 * xi - xi * xi
        assert eval_global((x1, x2 + 1e-9), params, K.P) == pytest.approx(eval_global((x1, x2 - 1e-9), params, K.P), abs=1e-7)
        x1 = xi + f
        x2 = 2 * (xi + 1) * x1 - 2 * xi - xi * xi
        assert eval_global((x1, x2 + 1e-9), params, K.P) == pytest.approx(eval_global((x1, x2 - 1e-9), params, K.P), abs=1e-7)


@pytest.mark.parametrize("kind,p,x", [(K.M, 1.5, (2.0, 4.5)), (K.N, 3.0, (0.2, 0.6)), (K.P, 0.5, (5.0, 25.5)),
                                      (K.R, 0.5, (0.75, 0.75))])
def test_tangent_data_reconstructs_value(kind, p, x):
    params = BellmanParams(1.0, p)
    td = tangent_data(x, params, kind)
    assert td.t0 + td.t1 * x[0] + td.t2 * x[1] == pytest.approx(eval_global(x, params, kind), rel=1e-12)


def test_tangent_data_rejects_boundary_stencil():
    params = BellmanParams(1.0, 1.5)
    with pytest.raises(DomainError):
        tangent_data((0.0, 0.0), params, K.M)
    with pytest.raises(DomainError):
        tangent_data((0.5, 1.0), params, K.M)  # sits on the x2 = eps^2 gluing line
    with pytest.raises(ArgumentError):
        tangent_data((0.5, 0.5), params, K.M, h=0.0)


# closed forms at p = 1
def m_closed(x1, x2, eps):
    y = abs(x1)
    if x2 <= eps * eps:
        return math.sqrt(x2)
    r = math.sqrt(max(eps * eps - x2 + x1 * x1, 0.0))
    return y + (eps - r) * math.exp((-y + r) / eps)


def n_closed(x1, x2, eps):
    y = abs(x1)
    if y <= eps and x2 >= 2 * eps * y:
        return x2 / (2 * eps)
    return y


@settings(max_examples=100, deadline=None)
@given(x=strip(1.0), eps=st.sampled_from([0.5, 1.0, 2.0]))
def test_p1_closed_forms(x, eps):
    x = (x[0] * eps, x[0] ** 2 * eps * eps + (x[1] - x[0] ** 2) * eps * eps)
    params = BellmanParams(eps, 1.0)
    assert eval_global(x, params, K.M) == pytest.approx(m_closed(*x, eps), rel=1e-10, abs=1e-12)
    assert eval_global(x, params, K.N) == pytest.approx(n_closed(*x, eps), rel=1e-10, abs=1e-12)


def test_classify_matches_evaluation_region():
    params = BellmanParams(1.0, 0.5)
    mu = cached_mu(0.5)
    assert classify((mu, mu * mu + 0.3), params, K.P, mu).kind.value == "T"
