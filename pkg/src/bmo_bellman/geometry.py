"""The parabolic strip {x1^2 <= x2 <= x1^2 + eps^2} and its foliation regions.

Every global candidate is symmetric in x1, so classification works on |x1|
and the region found for the right half is reflected when x1 < 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError, DomainError

TOL = 1e-12


@dataclass(frozen=True)
class BellmanParams:
    """Radius `eps` of the BMO ball and the power `p`."""

    eps: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.eps) and self.eps > 0):
            raise ArgumentError(f"eps must be positive and finite, got {self.eps}")
        if not math.isfinite(self.p):
            raise ArgumentError(f"p must be finite, got {self.p}")

    def with_eps(self, eps: float) -> "BellmanParams":
        return BellmanParams(eps, self.p)


class DomainPoint(NamedTuple):
    x1: float
    x2: float


class CandidateKind(enum.Enum):
    M = "M"
    N = "N"
    P = "P"
    R = "R"


class Ext(enum.Enum):
    """Extended-real endpoints of a foliation range."""

    NEG_INF = "-inf"
    POS_INF = "+inf"

    def __neg__(self):
        return Ext.POS_INF if self is Ext.NEG_INF else Ext.NEG_INF


def _neg(v):
    return -v if isinstance(v, Ext) else -float(v)


class RegionKind(enum.Enum):
    L0 = "L0"
    LA = "La"
    FPLUS = "FPlus"
    FMINUS = "FMinus"
    T = "T"


@dataclass(frozen=True)
class Region:
    """A canonical block of a foliation.

    `a`/`side` describe an La chord block (tangency abscissa and the sign of
    the lower endpoint v = a + side*eps); `u1`/`u2` the foliation range of an
    F block; `u` the shared lower-boundary abscissa of a T block.
    """

    kind: RegionKind
    a: float | None = None
    side: int = 0
    u1: float | Ext | None = None
    u2: float | Ext | None = None
    u: float | None = None

    @staticmethod
    def l0() -> "Region":
        return Region(RegionKind.L0)

    @staticmethod
    def la(a: float, side: int) -> "Region":
        if side not in (-1, 1):
            raise ArgumentError("side must be +1 or -1")
        return Region(RegionKind.LA, a=float(a), side=side)

    @staticmethod
    def fplus(u1, u2) -> "Region":
        return Region(RegionKind.FPLUS, u1=u1, u2=u2)

    @staticmethod
    def fminus(u1, u2) -> "Region":
        return Region(RegionKind.FMINUS, u1=u1, u2=u2)

    @staticmethod
    def t(u: float) -> "Region":
        return Region(RegionKind.T, u=float(u))

    def mirror(self) -> "Region":
        """The region obtained by the reflection x1 -> -x1."""
        k = self.kind
        if k is RegionKind.L0:
            return self
        if k is RegionKind.LA:
            return Region.la(-self.a, -self.side)
        if k is RegionKind.FPLUS:
            return Region.fminus(_neg(self.u2), _neg(self.u1))
        if k is RegionKind.FMINUS:
            return Region.fplus(_neg(self.u2), _neg(self.u1))
        return Region.t(-self.u if self.u else 0.0)

    def describe(self) -> str:
        def fmt(v):
            return v.value if isinstance(v, Ext) else f"{v:.12g}"

        k = self.kind
        if k is RegionKind.L0:
            return "L0"
        if k is RegionKind.LA:
            return f"La({fmt(self.a)},{'+' if self.side > 0 else '-'})"
        if k is RegionKind.T:
            return f"T({fmt(self.u)})"
        return f"{k.value}({fmt(self.u1)},{fmt(self.u2)})"


def contains(x, params: BellmanParams, tol: float = TOL) -> bool:
    x1, x2 = float(x[0]), float(x[1])
    return x1 * x1 - tol <= x2 <= x1 * x1 + params.eps ** 2 + tol


def _require(x, params: BellmanParams):
    if not contains(x, params):
        raise DomainError(f"point {tuple(x)} is outside the strip for eps={params.eps}")
    return float(x[0]), float(x[1])


def _root_gap(x1: float, x2: float, eps: float) -> float:
    # eps^2 - x2 + x1^2 lies in [0, eps^2] inside the strip; clip rounding noise
    return math.sqrt(min(max(eps * eps - x2 + x1 * x1, 0.0), eps * eps))


def u_plus(x, params: BellmanParams) -> float:
    """Abscissa where the right tangent through x meets the lower parabola."""
    x1, x2 = _require(x, params)
    return x1 + params.eps - _root_gap(x1, x2, params.eps)


def u_minus(x, params: BellmanParams) -> float:
    """Abscissa where the left tangent through x meets the lower parabola."""
    x1, x2 = _require(x, params)
    return x1 - params.eps + _root_gap(x1, x2, params.eps)


def upper_tangent(a: float, x1: float, params: BellmanParams) -> float:
    """Height at x1 of the line tangent to the upper parabola at abscissa a."""
    return 2 * a * x1 + params.eps ** 2 - a * a


def in_t_region(y: float, x2: float, u: float, eps: float, tol: float = TOL) -> bool:
    """Membership of (y, x2) in the triangle-like block T(u), right half only."""
    if not (u - eps - tol <= y <= u + eps + tol):
        return False
    return x2 >= 2 * u * y - u * u + 2 * eps * abs(u - y) - tol


def classify(x, params: BellmanParams, kind: CandidateKind, mu: float | None = None) -> Region:
    """Region of the candidate's foliation that contains x.

    Points on a gluing curve go to the block checked first; adjacent blocks
    agree there, so the choice does not affect values.
    """
    x1, x2 = _require(x, params)
    if kind is CandidateKind.P and mu is None:
        raise ArgumentError("classifying for kind P needs the gluing parameter mu")
    eps = params.eps
    y = abs(x1)
    if kind is CandidateKind.M:
        region = Region.l0() if x2 <= eps * eps else Region.fplus(eps, Ext.POS_INF)
    elif kind is CandidateKind.N:
        if y <= eps and x2 >= 2 * eps * y:
            region = Region.t(0.0)
        else:
            region = Region.fminus(0.0, Ext.POS_INF)
    elif kind is CandidateKind.P:
        xi = mu * eps
        if x2 <= eps * eps:
            region = Region.l0()
        elif in_t_region(y, x2, xi, eps, tol=TOL * max(1.0, x2)):
            region = Region.t(xi)
        elif u_plus((y, x2), params) <= xi:
            region = Region.fplus(eps, xi)
        else:
            region = Region.fminus(xi, Ext.POS_INF)
    elif kind is CandidateKind.R:
        if y <= eps and x2 >= 2 * eps * y:
            region = Region.t(0.0)
        elif x2 <= 2 * eps * y:
            region = Region.la(eps, -1)
        else:
            region = Region.fplus(2 * eps, Ext.POS_INF)
    else:  # pragma: no cover - enum is closed
        raise ArgumentError(f"unknown kind {kind!r}")
    return region.mirror() if x1 < 0 else region


def segment_in_domain(a, b, params: BellmanParams, n: int = 101) -> bool:
    """Sampled membership test: all n equally spaced points of [a, b] in the strip."""
    if n < 2:
        raise ArgumentError("need at least two sample points")
    s = np.linspace(0.0, 1.0, n)
    x1 = a[0] + s * (b[0] - a[0])
    x2 = a[1] + s * (b[1] - a[1])
    return bool(np.all((x2 >= x1 * x1 - TOL) & (x2 <= x1 * x1 + params.eps ** 2 + TOL)))


def segment_inside(a1, a2, b1, b2, eps, tol: float = TOL):
    """Exact test that the whole segment [a, b] lies in the strip of radius eps.

    Works elementwise on numpy arrays. The lower constraint is concave along
    the segment, so its endpoints decide it; the upper one is a convex
    quadratic whose minimum is found in closed form.
    """
    a1, a2, b1, b2 = (np.asarray(v, dtype=float) for v in (a1, a2, b1, b2))
    ok_ends = (a2 >= a1 * a1 - tol) & (b2 >= b1 * b1 - tol)
    d1, d2 = b1 - a1, b2 - a2
    qa = d1 * d1
    qb = 2 * a1 * d1 - d2
    qc = a1 * a1 + eps * eps - a2
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(qa > 0, np.clip(-qb / (2 * qa), 0.0, 1.0), 0.0)
    gmin = np.minimum.reduce([qc, qa + qb + qc, qa * s * s + qb * s + qc])
    return ok_ends & (gmin >= -tol)
