"""Special integrals of t^(p-1) e^(+-t), slope coefficients and the gluing root.

Finite integrals use QUADPACK's adaptive Gauss-Kronrod rule through
scipy.integrate.quad. Upper incomplete gamma values are evaluated by a
series or a continued fraction and are returned pre-multiplied by e^x where
that avoids overflow.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import ArgumentError, ConsistencyError, NumericError
from .geometry import BellmanParams


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ArgumentError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ArgumentError("max_subdivisions must be at least 1")


DEFAULT = QuadratureConfig()


@dataclass(frozen=True)
class MuSolution:
    mu: float
    residual: float
    iterations: int


def gamma(p: float) -> float:
    if not p > 0:
        raise ArgumentError(f"gamma needs p > 0, got {p}")
    return math.gamma(p)


def integrate_fn(fn, lo: float, hi: float, config: QuadratureConfig = DEFAULT, points=None) -> float:
    """Adaptive quadrature that turns QUADPACK failure codes into NumericError.

    `lo` may be -inf and `hi` may be +inf.
    """
    if lo == hi:
        return 0.0
    kw = dict(epsabs=config.abs_tol, epsrel=config.rel_tol, limit=config.max_subdivisions, full_output=1)
    if points is not None and math.isfinite(lo) and math.isfinite(hi):
        pts = [t for t in points if lo < t < hi]
        if pts:
            kw["points"] = pts
    out = integrate.quad(fn, lo, hi, **kw)
    value, err = out[0], out[1]
    if len(out) > 3:
        info = out[3]
        # roundoff (ier=2) at an error below tolerance is harmless
        if not (err <= max(config.abs_tol, config.rel_tol * abs(value)) * 10):
            raise NumericError(f"quadrature did not converge on [{lo}, {hi}]: {info}")
    return float(value)


def int_exp_pos_scaled(p: float, lo: float, hi: float, config: QuadratureConfig = DEFAULT) -> float:
    """e^(-hi) * integral of t^(p-1) e^t over [lo, hi]; bounded for any hi."""
    if lo > hi:
        raise ArgumentError(f"lower limit {lo} exceeds upper limit {hi}")
    if lo <= 0:
        raise ArgumentError("lower limit must be positive")
    if lo == hi:
        return 0.0
    return integrate_fn(lambda t: t ** (p - 1) * math.exp(t - hi), lo, hi, config)


def int_exp_pos(p: float, lo: float, hi: float, config: QuadratureConfig = DEFAULT) -> float:
    """Integral of t^(p-1) e^t over [lo, hi]."""
    scaled = int_exp_pos_scaled(p, lo, hi, config)
    return scaled * math.exp(hi) if scaled else 0.0


def _lower_series(a: float, x: float) -> float:
    # sum_n x^n / (a (a+1) ... (a+n)) so that gamma_lower(a, x) = x^a e^-x * sum
    term = 1.0 / a
    total = term
    for n in range(1, 100000):
        term *= x / (a + n)
        total += term
        if abs(term) < abs(total) * 1e-17:
            return total
    raise NumericError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _upper_cf(a: float, x: float) -> float:
    # modified Lentz evaluation of Gamma(a, x) e^x x^-a
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, 100000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        d = tiny if abs(d) < tiny else d
        c = b + an / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise NumericError(f"incomplete gamma continued fraction did not converge for a={a}, x={x}")


def upper_gamma_scaled(a: float, x: float) -> float:
    """e^x * Gamma(a, x) for x >= 0 and real a (a > 0 when x = 0)."""
    if x < 0:
        raise ArgumentError("incomplete gamma needs a nonnegative lower limit")
    if x == 0:
        if a <= 0:
            raise ArgumentError("Gamma(a, 0) diverges for a <= 0")
        return math.gamma(a)
    if a > 0:
        if x < a + 1.0:
            return math.gamma(a) * math.exp(x) - x ** a * _lower_series(a, x)
        return x ** a * _upper_cf(a, x)
    if x >= 1.0 or a == math.floor(a):
        return x ** a * _upper_cf(a, x)
    # Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x) / a moves a into (0, 1]
    return (upper_gamma_scaled(a + 1.0, x) - x ** a) / a


def int_exp_neg_upper(p: float, lo: float) -> float:
    """Upper incomplete gamma: integral of t^(p-1) e^(-t) over [lo, inf)."""
    if lo < 0:
        raise ArgumentError("lower limit must be nonnegative")
    if lo == 0 and p <= 0:
        raise ArgumentError("integral diverges at the origin for p <= 0")
    return math.exp(-lo) * upper_gamma_scaled(p, lo)


def _check_p(params: BellmanParams):
    if not params.p > 0:
        raise ArgumentError(f"candidate evaluation needs p > 0, got {params.p}")


def m_plus(u: float, u1: float, params: BellmanParams, config: QuadratureConfig = DEFAULT) -> float:
    """Slope coefficient of a right-tangent block started at u1."""
    _check_p(params)
    eps, p = params.eps, params.p
    if u < u1:
        if u1 - u > 1e-12 * max(1.0, abs(u1)):
            raise ArgumentError(f"m_plus needs u >= u1, got u={u}, u1={u1}")
        u = u1
    if u1 <= 0:
        raise ArgumentError("m_plus needs u1 > 0")
    jump = (u1 ** p - abs(u1 - 2 * eps) ** p) / (2 * eps)
    head = jump * math.exp((u1 - u) / eps) if jump else 0.0
    tail = p * eps ** (p - 1) * int_exp_pos_scaled(p, u1 / eps, u / eps, config) if u > u1 else 0.0
    return head + tail


def m_minus_inf(u: float, params: BellmanParams) -> float:
    """Slope coefficient of the left-tangent block that extends to +infinity."""
    _check_p(params)
    if u < 0:
        if u < -1e-12:
            raise ArgumentError(f"m_minus_inf needs u >= 0, got {u}")
        u = 0.0
    eps, p = params.eps, params.p
    if p == 1:
        return 1.0
    return p * eps ** (p - 1) * upper_gamma_scaled(p, u / eps)


def tau_plus(u: float, u1: float, params: BellmanParams, config: QuadratureConfig = DEFAULT) -> float:
    """Sign indicator of the second x2-derivative on a right-tangent block."""
    _check_p(params)
    eps, p = params.eps, params.p
    if u < u1:
        raise ArgumentError(f"tau_plus needs u >= u1, got u={u}, u1={u1}")
    z = u / eps
    if math.isclose(u1, eps, rel_tol=1e-14):
        integral = int_exp_pos(p - 2, 1.0, z, config) if z > 1 else 0.0
        return p * (p - 2) * eps ** (p - 2) * (math.e + (p - 1) * integral)
    if math.isclose(u1, 2 * eps, rel_tol=1e-14):
        integral = int_exp_pos(p - 2, 2.0, z, config) if z > 2 else 0.0
        return (p - 1) * (p - 2) * eps ** (p - 2) * (2 ** (p - 2) * math.e ** 2 + p * integral)
    raise ArgumentError("tau_plus is defined for u1 = eps or u1 = 2 eps only")


def tau_minus_inf(u: float, params: BellmanParams) -> float:
    """Sign indicator on the left-tangent block extending to +infinity."""
    _check_p(params)
    eps, p = params.eps, params.p
    if u < 0:
        raise ArgumentError("tau_minus_inf needs u >= 0")
    if p == 2:
        return 0.0
    if u == 0 and p <= 2:
        raise ArgumentError("the defining integral diverges at u = 0 for p <= 2")
    if p == 1:
        return 0.0
    return -p * (p - 1) * (p - 2) * eps ** (p - 2) * int_exp_neg_upper(p - 2, u / eps)


def h_mu(mu: float, p: float, config: QuadratureConfig = DEFAULT) -> float:
    """Gluing function whose root on (1, inf) fixes the transition block of P."""
    if mu < 1:
        raise ArgumentError("h is defined for mu >= 1")
    return int_exp_pos_scaled(p, 1.0, mu, config) + upper_gamma_scaled(p, mu) - 2 * mu ** (p - 1)


def side_condition_gap(mu: float, p: float, config: QuadratureConfig = DEFAULT) -> float:
    """mu^(p-1) + (1-p) mu^(p-2) minus the scaled integral; nonnegative at the root."""
    return mu ** (p - 1) + (1 - p) * mu ** (p - 2) - int_exp_pos_scaled(p, 1.0, mu, config)


MU_BRACKET_LIMIT = 500.0


def solve_mu(params: BellmanParams, config: QuadratureConfig = DEFAULT) -> MuSolution:
    """Unique root mu > 1 of the gluing equation; it does not depend on eps."""
    p = params.p
    if not 0 < p < 1:
        raise ArgumentError(f"the gluing equation is posed for 0 < p < 1, got {p}")
    lo = 1.0 + 1e-8
    h_lo = h_mu(lo, p, config)
    if h_lo >= 0:
        raise NumericError(f"h is not negative near 1 (h={h_lo}); cannot bracket")
    hi = 2.0
    while h_mu(hi, p, config) <= 0:
        lo, hi = hi, 2 * hi
        if hi > MU_BRACKET_LIMIT:
            raise NumericError(f"no sign change of h below mu={MU_BRACKET_LIMIT} for p={p}")
    root, res = optimize.brentq(
        h_mu, lo, hi, args=(p, config), xtol=1e-15, rtol=4 * np.finfo(float).eps,
        maxiter=200, full_output=True, disp=False,
    )
    if not res.converged:
        raise NumericError(f"root search for mu did not converge: {res.flag}")
    residual = h_mu(root, p, config)
    if abs(residual) > 1e-10:
        raise NumericError(f"residual {residual} at mu={root} exceeds 1e-10")
    if side_condition_gap(root, p, config) < -1e-12:
        raise ConsistencyError(f"side condition fails at mu={root} for p={p}")
    return MuSolution(float(root), float(residual), int(res.iterations))


_MU_CACHE: dict[float, float] = {}
_MU_LOCK = threading.Lock()


def cached_mu(p: float) -> float:
    """Memoised root of the gluing equation for a given p."""
    mu = _MU_CACHE.get(p)
    if mu is None:
        with _MU_LOCK:
            mu = _MU_CACHE.get(p)
            if mu is None:
                mu = solve_mu(BellmanParams(1.0, p)).mu
                _MU_CACHE[p] = mu
    return mu
