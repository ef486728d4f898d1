"""Canonical blocks, the four global candidates and the upper/lower dispatch.

All candidates are even in x1 and are evaluated on |x1|. Blocks that live
in the left half of the strip are computed by reflecting into the right half.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArgumentError, DomainError
from .geometry import (
    TOL,
    BellmanParams,
    CandidateKind,
    Ext,
    Region,
    RegionKind,
    classify,
    contains,
    in_t_region,
    u_minus,
    u_plus,
)
from .quadrature import cached_mu, gamma, m_minus_inf, m_plus

__all__ = [
    "CandidateKind",
    "TangentData",
    "eval_L0",
    "eval_Lpm",
    "eval_Fplus",
    "eval_Fminus",
    "eval_T",
    "eval_global",
    "bellman",
    "tangent_data",
    "dispatch",
    "kind_supports",
    "t0_slope",
    "gluing_mu",
]


@dataclass(frozen=True)
class TangentData:
    t1: float
    t2: float
    t0: float


def _f(s: float, p: float) -> float:
    return abs(s) ** p


def _point(x, params: BellmanParams):
    if not contains(x, params):
        raise DomainError(f"point {tuple(x)} is outside the strip for eps={params.eps}")
    if not params.p > 0:
        raise ArgumentError(f"candidates need p > 0, got {params.p}")
    return float(x[0]), float(x[1])


def eval_L0(x, params: BellmanParams) -> float:
    x1, x2 = _point(x, params)
    if x2 > params.eps ** 2 + TOL:
        raise DomainError("L0 block needs x2 <= eps^2")
    return max(x2, 0.0) ** (params.p / 2)


def eval_Lpm(x, a: float, side: int, params: BellmanParams) -> float:
    """Chord block under the upper tangent at abscissa a.

    The chord joins (v, v^2), v = a + side*eps, to the second lower-boundary
    point (u, u^2) on the line through x.
    """
    x1, x2 = _point(x, params)
    eps, p = params.eps, params.p
    if side not in (-1, 1):
        raise ArgumentError("side must be +1 or -1")
    if x2 > 2 * a * x1 + eps * eps - a * a + TOL:
        raise DomainError(f"point {tuple(x)} is above the tangent at a={a}")
    v = a + side * eps
    # |t|^p is not Lipschitz at 0, so only an exact coincidence is treated as the limit
    if x1 == v:
        return _f(v, p)
    u = (x2 - v * x1) / (x1 - v)
    if u == v:
        return _f(v, p)
    slope = (_f(v, p) - _f(u, p)) / (v - u)
    return slope * (x1 - v) + _f(v, p)


def eval_Fplus(x, u1, params: BellmanParams) -> float:
    """Right-tangent block started at u1 (finite) or the mirrored block from -inf."""
    x1, x2 = _point(x, params)
    if u1 is Ext.NEG_INF:
        return eval_Fminus((-x1, x2), Ext.POS_INF, params)
    if isinstance(u1, Ext):
        raise ArgumentError("a right-tangent block cannot start at +inf")
    u = u_plus((x1, x2), params)
    if u < u1 - 1e-10:
        raise DomainError(f"point {tuple(x)} has u+={u} below the block start {u1}")
    return m_plus(max(u, u1), u1, params) * (x1 - u) + _f(u, params.p)


def eval_Fminus(x, u2, params: BellmanParams) -> float:
    """Left-tangent block ending at u2 (finite, mirrored use) or extending to +inf."""
    x1, x2 = _point(x, params)
    if u2 is Ext.POS_INF:
        u = u_minus((x1, x2), params)
        if u < -1e-10:
            raise DomainError(f"point {tuple(x)} has u-={u} < 0")
        return m_minus_inf(max(u, 0.0), params) * (x1 - u) + _f(u, params.p)
    if isinstance(u2, Ext):
        raise ArgumentError("a left-tangent block cannot end at -inf")
    return eval_Fplus((-x1, x2), -u2, params)


def t0_slope(params: BellmanParams, kind: CandidateKind) -> float:
    """Coefficient alpha of the linear block alpha*x2 around the origin."""
    eps, p = params.eps, params.p
    if kind is CandidateKind.N:
        return 0.5 * p * eps ** (p - 2) * gamma(p)
    if kind is CandidateKind.R:
        return (2 * eps) ** (p - 2)
    raise ArgumentError(f"kind {kind.value} has no linear block at the origin")


def eval_T(x, u: float, params: BellmanParams, alpha: float | None = None) -> float:
    """Linear transition block sharing the lower-boundary point (u, u^2).

    u = 0 needs the slope alpha from the global context; for u > 0 the
    coefficients follow from the left-tangent slope at u.
    """
    x1, x2 = _point(x, params)
    eps, p = params.eps, params.p
    y = abs(x1)
    if not in_t_region(y, x2, abs(u), eps, tol=1e-9):
        raise DomainError(f"point {tuple(x)} is outside T({u})")
    if u == 0:
        if alpha is None:
            raise ArgumentError("T(0) needs alpha")
        return alpha * x2
    xi = abs(u)
    fp = p * xi ** (p - 1)
    return fp * y + (m_minus_inf(xi, params) - fp) / (2 * eps) * (x2 - 2 * y * xi + xi * xi) + (1 - p) * xi ** p


def kind_supports(kind: CandidateKind, p: float) -> bool:
    if kind in (CandidateKind.M, CandidateKind.N):
        return p >= 1
    if kind is CandidateKind.P:
        return 0 < p < 1
    return 0 < p <= 1


def gluing_mu(params: BellmanParams) -> float:
    return cached_mu(params.p)


def eval_global(x, params: BellmanParams, kind: CandidateKind) -> float:
    """Value of the global candidate `kind` at x."""
    x1, x2 = _point(x, params)
    p = params.p
    if not kind_supports(kind, p):
        raise ArgumentError(f"candidate {kind.value} is not defined for p={p}")
    if p == 2:
        return x2
    y = abs(x1)
    mu = gluing_mu(params) if kind is CandidateKind.P else None
    region = classify((y, x2), params, kind, mu)
    return _eval_region((y, x2), region, params, kind)


def _eval_region(x, region: Region, params: BellmanParams, kind: CandidateKind) -> float:
    k = region.kind
    if k is RegionKind.L0:
        return eval_L0(x, params)
    if k is RegionKind.LA:
        return eval_Lpm(x, region.a, region.side, params)
    if k is RegionKind.FPLUS:
        return eval_Fplus(x, region.u1, params)
    if k is RegionKind.FMINUS:
        return eval_Fminus(x, region.u2, params)
    alpha = t0_slope(params, kind) if region.u == 0 else None
    return eval_T(x, region.u, params, alpha)


def dispatch(p: float, which: str) -> CandidateKind:
    """Candidate that gives the upper or lower Bellman function at power p."""
    if which not in ("upper", "lower"):
        raise ArgumentError(f"which must be 'upper' or 'lower', got {which!r}")
    if not p > 0:
        raise ArgumentError(f"p must be positive, got {p}")
    if p >= 2:
        pair = (CandidateKind.N, CandidateKind.M)
    elif p >= 1:
        pair = (CandidateKind.M, CandidateKind.N)
    else:
        pair = (CandidateKind.P, CandidateKind.R)
    return pair[0] if which == "upper" else pair[1]


def bellman(x, params: BellmanParams, which: str) -> float:
    kind = dispatch(params.p, which)
    if params.p == 2:
        return _point(x, params)[1]
    return eval_global(x, params, kind)


def tangent_data(x, params: BellmanParams, kind: CandidateKind, h: float = 1e-5) -> TangentData:
    """Central-difference gradient (t1, t2) and intercept t0 of the candidate at x."""
    x1, x2 = _point(x, params)
    if h <= 0:
        raise ArgumentError("step must be positive")
    mu = gluing_mu(params) if kind is CandidateKind.P else None
    region = classify((x1, x2), params, kind, mu)
    stencil = [(x1 + h, x2), (x1 - h, x2), (x1, x2 + h), (x1, x2 - h)]
    for pt in stencil:
        if not contains(pt, params, tol=0.0) or classify(pt, params, kind, mu) != region:
            raise DomainError(f"finite-difference stencil at {(x1, x2)} leaves {region.describe()}")
    g = [eval_global(pt, params, kind) for pt in stencil]
    t1 = (g[0] - g[1]) / (2 * h)
    t2 = (g[2] - g[3]) / (2 * h)
    value = eval_global((x1, x2), params, kind)
    return TangentData(t1, t2, value - t1 * x1 - t2 * x2)
