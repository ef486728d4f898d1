"""Test functions on (0, 1) built from constant and logarithmic pieces.

A logarithmic piece has value base + scale * ln((t - origin) / width). The
width may be negative, which gives a ramp that is singular at its right end.
First and second moments are exact (antiderivatives of ln and ln^2); other
averages go through one-dimensional quadrature after the substitution
z = ln((t - origin) / width).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ArgumentError, DomainError
from .geometry import BellmanParams, CandidateKind, RegionKind, classify, contains, u_minus, u_plus
from .candidates import gluing_mu, kind_supports
from .quadrature import integrate_fn

_TILE_TOL = 1e-12


@dataclass(frozen=True)
class Constant:
    v: float

    def value(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.v)


@dataclass(frozen=True)
class LogRamp:
    base: float
    scale: float
    origin: float
    width: float

    def __post_init__(self):
        if self.width == 0 or not math.isfinite(self.width):
            raise ArgumentError("LogRamp width must be finite and nonzero")

    def arg(self, t):
        return (np.asarray(t, dtype=float) - self.origin) / self.width

    def value(self, t):
        with np.errstate(divide="ignore"):
            return self.base + self.scale * np.log(self.arg(t))


Shape = Constant | LogRamp


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    shape: Shape


class BellmanPoint(NamedTuple):
    x1: float
    x2: float
    interval: tuple[float, float]


@dataclass(frozen=True)
class PiecewiseFn:
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        if not pieces:
            raise ArgumentError("a piecewise function needs at least one piece")
        if abs(pieces[0].lo) > _TILE_TOL or abs(pieces[-1].hi - 1) > _TILE_TOL:
            raise ArgumentError("pieces must tile (0, 1)")
        for prev, nxt in zip(pieces, pieces[1:]):
            if abs(prev.hi - nxt.lo) > _TILE_TOL:
                raise ArgumentError(f"gap or overlap between pieces at {prev.hi} / {nxt.lo}")
        for pc in pieces:
            if not pc.lo < pc.hi:
                raise ArgumentError(f"empty piece ({pc.lo}, {pc.hi})")
            if isinstance(pc.shape, LogRamp):
                ya, yb = pc.shape.arg(pc.lo), pc.shape.arg(pc.hi)
                if min(ya, yb) < -1e-12 or max(ya, yb) <= 0:
                    raise ArgumentError("LogRamp argument must be positive inside its piece")

    @classmethod
    def from_segments(cls, segments: Sequence[tuple[float, float, Shape]]) -> "PiecewiseFn":
        """Build from (lo, hi, shape) triples, dropping empty ones and snapping ends."""
        kept = [(lo, hi, sh) for lo, hi, sh in segments if hi - lo > 1e-15]
        pieces = []
        for k, (lo, hi, sh) in enumerate(kept):
            lo = 0.0 if k == 0 else pieces[-1].hi
            hi = 1.0 if k == len(kept) - 1 else hi
            pieces.append(Piece(float(lo), float(hi), sh))
        return cls(tuple(pieces))

    @classmethod
    def steps(cls, values: Sequence[float], breaks: Sequence[float] | None = None) -> "PiecewiseFn":
        """Step function with the given values; equal widths unless breaks are given."""
        n = len(values)
        if breaks is None:
            breaks = [k / n for k in range(n + 1)]
        if len(breaks) != n + 1:
            raise ArgumentError("need one more breakpoint than values")
        return cls.from_segments([(breaks[k], breaks[k + 1], Constant(float(v))) for k, v in enumerate(values)])

    @property
    def breakpoints(self) -> list[float]:
        return [self.pieces[0].lo] + [pc.hi for pc in self.pieces]

    @property
    def is_step(self) -> bool:
        return all(isinstance(pc.shape, Constant) for pc in self.pieces)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        for k, pc in enumerate(self.pieces):
            upper = t <= pc.hi if k == len(self.pieces) - 1 else t < pc.hi
            sel = (t >= pc.lo) & upper
            if np.any(sel):
                out[sel] = pc.shape.value(t[sel])
        return out

    def map_shapes(self, fn) -> "PiecewiseFn":
        return PiecewiseFn(tuple(Piece(pc.lo, pc.hi, fn(pc.shape)) for pc in self.pieces))

    def shifted(self, m: float) -> "PiecewiseFn":
        """The function phi - m."""
        def sh(s):
            if isinstance(s, Constant):
                return Constant(s.v - m)
            return LogRamp(s.base - m, s.scale, s.origin, s.width)
        return self.map_shapes(sh)

    def negated(self) -> "PiecewiseFn":
        def neg(s):
            if isinstance(s, Constant):
                return Constant(-s.v)
            return LogRamp(-s.base, -s.scale, s.origin, s.width)
        return self.map_shapes(neg)

    def to_dict(self) -> dict:
        out = []
        for pc in self.pieces:
            if isinstance(pc.shape, Constant):
                shape = {"kind": "const", "v": pc.shape.v}
            else:
                s = pc.shape
                shape = {"kind": "logramp", "base": s.base, "scale": s.scale, "origin": s.origin, "width": s.width}
            out.append({"lo": pc.lo, "hi": pc.hi, "shape": shape})
        return {"pieces": out}

    @classmethod
    def from_dict(cls, data: dict) -> "PiecewiseFn":
        try:
            pieces = []
            for item in data["pieces"]:
                sh = item["shape"]
                if sh["kind"] == "const":
                    shape = Constant(float(sh["v"]))
                elif sh["kind"] == "logramp":
                    shape = LogRamp(float(sh["base"]), float(sh["scale"]), float(sh["origin"]), float(sh["width"]))
                else:
                    raise ArgumentError(f"unknown shape kind {sh['kind']!r}")
                pieces.append(Piece(float(item["lo"]), float(item["hi"]), shape))
        except (KeyError, TypeError) as exc:
            raise ArgumentError(f"malformed piecewise function: {exc}") from exc
        return cls(tuple(pieces))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PiecewiseFn":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------- integrals

def _xlogx(y):
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ly = np.where(y > 0, np.log(np.where(y > 0, y, 1.0)), 0.0)
    return y, ly


def _ramp_antiderivatives(s: LogRamp, y):
    """Antiderivatives in y of (base + scale ln y) and its square, zero at y = 0."""
    y, ly = _xlogx(np.clip(y, 0.0, None))
    a1 = y * ly - y
    a2 = y * ly * ly - 2 * y * ly + 2 * y
    g1 = s.base * y + s.scale * a1
    g2 = s.base ** 2 * y + 2 * s.base * s.scale * a1 + s.scale ** 2 * a2
    return g1, g2


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _piece_integrals(pc: Piece, a, b):
    """Integrals of phi and phi^2 over [a, b], a <= b inside the piece (arrays).

    On a log piece the antiderivative difference loses digits when the
    argument barely changes across [a, b]; Gauss-Legendre is used there
    instead, where the integrand is smooth and nearly constant.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = pc.shape
    if isinstance(s, Constant):
        return s.v * (b - a), s.v * s.v * (b - a)
    ya, yb = s.arg(a), s.arg(b)
    g1b, g2b = _ramp_antiderivatives(s, yb)
    g1a, g2a = _ramp_antiderivatives(s, ya)
    i1 = s.width * (g1b - g1a)
    i2 = s.width * (g2b - g2a)
    ylo = np.minimum(ya, yb)
    flat = np.abs(yb - ya) < 1e-2 * ylo
    if np.any(flat):
        af, bf = a[flat] if a.ndim else a, b[flat] if b.ndim else b
        half = 0.5 * (bf - af)
        mid = 0.5 * (bf + af)
        tq = mid[..., None] + half[..., None] * _GL_NODES
        vq = s.base + s.scale * np.log((tq - s.origin) / s.width)
        q1 = half * np.sum(_GL_WEIGHTS * vq, axis=-1)
        q2 = half * np.sum(_GL_WEIGHTS * vq * vq, axis=-1)
        if a.ndim:
            i1 = np.array(i1, dtype=float)
            i2 = np.array(i2, dtype=float)
            i1[flat], i2[flat] = q1, q2
        else:
            i1, i2 = q1, q2
    return i1, i2


def interval_integrals(phi: PiecewiseFn, c, d):
    """Integrals of phi and phi^2 over (c, d), elementwise for arrays c <= d."""
    c, d = np.broadcast_arrays(np.asarray(c, dtype=float), np.asarray(d, dtype=float))
    f1 = np.zeros(c.shape)
    f2 = np.zeros(c.shape)
    for pc in phi.pieces:
        a = np.clip(c, pc.lo, pc.hi)
        b = np.clip(d, pc.lo, pc.hi)
        live = b > a
        if not np.any(live):
            continue
        i1, i2 = _piece_integrals(pc, a[live], b[live])
        f1[live] += i1
        f2[live] += i2
    return f1, f2


def cumulative(phi: PiecewiseFn, t):
    """Integrals of phi and phi^2 over (0, t) for an array of t."""
    t = np.asarray(t, dtype=float)
    return interval_integrals(phi, np.zeros_like(t), t)


def _check_interval(c: float, d: float):
    if not (0 <= c < d <= 1):
        raise ArgumentError(f"need 0 <= c < d <= 1, got ({c}, {d})")


def moments(phi: PiecewiseFn, c: float = 0.0, d: float = 1.0) -> BellmanPoint:
    _check_interval(c, d)
    f1, f2 = interval_integrals(phi, np.array([c]), np.array([d]))
    n = d - c
    return BellmanPoint(float(f1[0] / n), float(f2[0] / n), (c, d))


def _ramp_mean_integral(s: LogRamp, a: float, b: float, g, kink: float | None, log_g=None) -> float:
    # integral over t in [a, b] of g(phi(t)) via t = origin + width e^z
    ya, yb = sorted((float(s.arg(a)), float(s.arg(b))))
    za = math.log(ya) if ya > 0 else -math.inf
    zb = math.log(yb)
    if log_g is None:
        integrand = lambda z: g(s.base + s.scale * z) * math.exp(z)
    else:
        # g itself may overflow where the product with e^z is tiny
        integrand = lambda z: math.exp(log_g(s.base + s.scale * z) + z)
    cuts = [za]
    if kink is not None and s.scale != 0:
        zk = (kink - s.base) / s.scale
        if za < zk < zb:
            cuts.append(zk)
    cuts.append(zb)
    total = sum(integrate_fn(integrand, lo, hi) for lo, hi in zip(cuts, cuts[1:]))
    return abs(s.width) * total


def mean_of(phi: PiecewiseFn, g, c: float = 0.0, d: float = 1.0, kink: float | None = 0.0,
            log_g=None) -> float:
    """Average of g(phi) over (c, d); `kink` is a point where g is not smooth.

    `log_g`, when given, is log g and is used on logarithmic pieces.
    """
    _check_interval(c, d)
    total = 0.0
    for pc in phi.pieces:
        a, b = max(pc.lo, c), min(pc.hi, d)
        if b <= a:
            continue
        if isinstance(pc.shape, Constant):
            total += g(pc.shape.v) * (b - a)
        else:
            total += _ramp_mean_integral(pc.shape, a, b, g, kink, log_g)
    return total / (d - c)


def p_mean(phi: PiecewiseFn, p: float, c: float = 0.0, d: float = 1.0) -> float:
    if not p > 0:
        raise ArgumentError("p_mean needs p > 0")
    if p == 2:
        return moments(phi, c, d).x2
    return mean_of(phi, lambda v: abs(v) ** p, c, d)


def exp_abs_mean(phi: PiecewiseFn, c: float = 0.0, d: float = 1.0) -> float:
    """Average of e^|phi - <phi>| over (c, d)."""
    m = moments(phi, c, d).x1
    return mean_of(phi.shifted(m), lambda v: math.exp(abs(v)), c, d, log_g=abs)


def oscillation(phi: PiecewiseFn, c: float = 0.0, d: float = 1.0) -> float:
    bp = moments(phi, c, d)
    return max(bp.x2 - bp.x1 ** 2, 0.0)


# ---------------------------------------------------------------- BMO norm

def _edge_best(w0, s1, s2, v, hmax):
    """Best variance when a length b in [0, hmax] of value v joins a fixed block."""
    with np.errstate(divide="ignore", invalid="ignore"):
        m0 = np.where(w0 > 0, s1 / np.where(w0 > 0, w0, 1.0), 0.0)
        var0 = np.where(w0 > 0, np.maximum(s2 / np.where(w0 > 0, w0, 1.0) - m0 * m0, 0.0), 0.0)
        dd = (v - m0) ** 2
        wmax = hmax / (w0 + hmax)
        w = np.where(dd > 0, (dd - var0) / (2 * np.where(dd > 0, dd, 1.0)), 0.0)
        w = np.clip(w, 0.0, wmax)
        val = (1 - w) * var0 + w * (1 - w) * dd
        val = np.where(w0 > 0, val, 0.0)
        b = np.where(w < 1, w * w0 / (1 - w), hmax)
    return val, b


def step_oscillation_sup(values, widths=None):
    """Exact supremum of the oscillation of a step function over subintervals.

    `values` may carry leading batch dimensions. Returns (sup, c, d) arrays.
    For an interval whose ends cut steps i < j, the oscillation as a function
    of the two cut lengths has no isolated interior maximum, so the four edges
    of the box of cut lengths suffice, and on each edge it is a concave
    quadratic in the weight fraction of the moving step.
    """
    v = np.asarray(values, dtype=float)
    n = v.shape[-1]
    h = np.full(n, 1.0 / n) if widths is None else np.asarray(widths, dtype=float)
    starts = np.concatenate([[0.0], np.cumsum(h)])
    if n == 1:
        zero = np.zeros(v.shape[:-1])
        return zero, zero, zero + 1.0
    i, j = np.triu_indices(n, k=1)
    zero_pad = np.zeros(v.shape[:-1] + (1,))
    p1 = np.concatenate([zero_pad, np.cumsum(v * h, axis=-1)], axis=-1)
    p2 = np.concatenate([zero_pad, np.cumsum(v * v * h, axis=-1)], axis=-1)
    wm = starts[j] - starts[i + 1]
    s1m = p1[..., j] - p1[..., i + 1]
    s2m = p2[..., j] - p2[..., i + 1]
    vi, vj = v[..., i], v[..., j]
    hi_, hj = h[i], h[j]
    cands = []
    # a = 0: middle only, extend into step j
    val, b = _edge_best(wm, s1m, s2m, vj, hj)
    cands.append((val, starts[i + 1] + 0 * b, starts[j] + b))
    # a = h_i: middle plus step i, extend into step j
    val, b = _edge_best(wm + hi_, s1m + vi * hi_, s2m + vi * vi * hi_, vj, hj)
    cands.append((val, starts[i] + 0 * b, starts[j] + b))
    # b = 0: middle only, extend into step i
    val, a = _edge_best(wm, s1m, s2m, vi, hi_)
    cands.append((val, starts[i + 1] - a, starts[j] + 0 * a))
    # b = h_j: middle plus step j, extend into step i
    val, a = _edge_best(wm + hj, s1m + vj * hj, s2m + vj * vj * hj, vi, hi_)
    cands.append((val, starts[i + 1] - a, starts[j + 1] + 0 * a))
    vals = np.concatenate([c[0] for c in cands], axis=-1)
    cs = np.concatenate([np.broadcast_to(c[1], c[0].shape) for c in cands], axis=-1)
    ds = np.concatenate([np.broadcast_to(c[2], c[0].shape) for c in cands], axis=-1)
    k = np.argmax(vals, axis=-1)
    take = lambda arr: np.take_along_axis(arr, k[..., None], axis=-1)[..., 0]
    total = starts[-1]
    return take(vals), np.clip(take(cs), 0.0, total), np.clip(take(ds), 0.0, total)


def _singular_end(pc: Piece) -> list[float]:
    """Geometric points on both sides of a logarithmic singularity at a piece end.

    Points mirrored across the end cover intervals that straddle an interior
    singularity such as ln|t - b|.
    """
    if not isinstance(pc.shape, LogRamp):
        return []
    ya, yb = float(pc.shape.arg(pc.lo)), float(pc.shape.arg(pc.hi))
    span = pc.hi - pc.lo
    pts = []
    for k in range(2, 25):
        off = span * 10.0 ** (-k / 2)
        if ya <= 1e-14:
            pts += [pc.lo + off, pc.lo - off]
        if yb <= 1e-14:
            pts += [pc.hi - off, pc.hi + off]
    return [t for t in pts if 0.0 <= t <= 1.0]


def _osc_at(phi, c, d):
    if d - c < 1e-14:
        return 0.0
    f1, f2 = interval_integrals(phi, np.array([c]), np.array([d]))
    m1 = f1[0] / (d - c)
    return max(f2[0] / (d - c) - m1 * m1, 0.0)


def _golden_max(fn, lo, hi, evals):
    gr = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    x1, x2 = b - gr * (b - a), a + gr * (b - a)
    f1, f2 = fn(x1), fn(x2)
    best = max((fn(lo), lo), (fn(hi), hi), (f1, x1), (f2, x2))
    for _ in range(max(evals - 4, 0)):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - gr * (b - a)
            f1 = fn(x1)
            best = max(best, (f1, x1))
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + gr * (b - a)
            f2 = fn(x2)
            best = max(best, (f2, x2))
        if b - a < 1e-15:
            break
    return best


def oscillation_sup(phi: PiecewiseFn, budget: int = 200) -> tuple[float, float, float]:
    """(sup of oscillation, c, d): the best interval found by the search."""
    if phi.is_step:
        widths = [pc.hi - pc.lo for pc in phi.pieces]
        vals = [pc.shape.v for pc in phi.pieces]
        s, c, d = step_oscillation_sup(vals, widths)
        return float(s), float(c), float(d)
    grid = set(np.linspace(0.0, 1.0, 65).tolist()) | set(phi.breakpoints)
    for pc in phi.pieces:
        grid.update(np.linspace(pc.lo, pc.hi, 10).tolist())
        grid.update(_singular_end(pc))
    # near a jump the sup is approached by ever smaller intervals around it
    for left, right in zip(phi.pieces, phi.pieces[1:]):
        b = left.hi
        span = min(left.hi - left.lo, right.hi - right.lo)
        for k in range(2, 17):
            grid.add(b - span * 10.0 ** (-k / 2))
            grid.add(b + span * 10.0 ** (-k / 2))
    t = np.array(sorted(grid))
    cc, dd = np.meshgrid(t, t, indexing="ij")
    dd = np.maximum(dd, cc)
    f1, f2 = interval_integrals(phi, cc, dd)
    dt = dd - cc
    with np.errstate(divide="ignore", invalid="ignore"):
        m1 = f1 / dt
        osc = f2 / dt - m1 * m1
    osc = np.where(dt > 1e-13, osc, -np.inf)
    order = np.argsort(osc, axis=None)[::-1][:6]
    best = (float(np.max(osc)), *(float(t[k]) for k in np.unravel_index(int(order[0]), osc.shape)))
    for flat in order:
        ic, id_ = np.unravel_index(int(flat), osc.shape)
        c, d = float(t[ic]), float(t[id_])
        cur = _osc_at(phi, c, d)
        left = (float(t[max(ic - 1, 0)]), float(t[min(ic + 1, len(t) - 1)]))
        right = (float(t[max(id_ - 1, 0)]), float(t[min(id_ + 1, len(t) - 1)]))
        for _ in range(3):
            val, c = _golden_max(lambda s: _osc_at(phi, s, d) if s < d else 0.0, left[0], min(left[1], d), budget // 6)
            val, d = _golden_max(lambda s: _osc_at(phi, c, s) if s > c else 0.0, max(right[0], c), right[1], budget // 6)
            if val <= cur + 1e-16:
                break
            cur = val
        if cur > best[0]:
            best = (cur, c, d)
    return max(best[0], 0.0), best[1], best[2]


def bmo_norm(phi: PiecewiseFn) -> float:
    """Square root of the supremum of the oscillation over subintervals."""
    return math.sqrt(oscillation_sup(phi)[0])


def bmo_witness(phi: PiecewiseFn) -> tuple[float, tuple[float, float]]:
    s, c, d = oscillation_sup(phi)
    return math.sqrt(s), (c, d)


# ---------------------------------------------------------------- algebra

def _clamp_shape(s: Shape, lo, hi):
    if isinstance(s, Constant):
        return Constant(min(max(s.v, lo), hi))
    return s


def cutoff(phi: PiecewiseFn, c: float | None = None, d: float | None = None) -> PiecewiseFn:
    """Pointwise clamp of phi to [c, d]; None or an infinity means no bound."""
    lo = -math.inf if c is None else float(c)
    hi = math.inf if d is None else float(d)
    if not lo < hi:
        raise ArgumentError("cutoff needs c < d")
    segs = []
    for pc in phi.pieces:
        s = pc.shape
        if isinstance(s, Constant):
            segs.append((pc.lo, pc.hi, _clamp_shape(s, lo, hi)))
            continue
        cuts = [pc.lo, pc.hi]
        for level in (lo, hi):
            if math.isfinite(level) and s.scale != 0:
                z = (level - s.base) / s.scale
                ya, yb = sorted((float(s.arg(pc.lo)), float(s.arg(pc.hi))))
                if (ya <= 0 or z > math.log(ya)) and z < math.log(yb):
                    tc = s.origin + s.width * math.exp(z)
                    if pc.lo < tc < pc.hi:
                        cuts.append(tc)
        cuts.sort()
        for a, b in zip(cuts, cuts[1:]):
            mid = float(s.value(0.5 * (a + b)))
            if mid < lo:
                segs.append((a, b, Constant(lo)))
            elif mid > hi:
                segs.append((a, b, Constant(hi)))
            else:
                segs.append((a, b, s))
    return PiecewiseFn.from_segments(segs)


def concat(parts: Sequence[tuple[PiecewiseFn, float]]) -> PiecewiseFn:
    """Place each part, compressed by its weight, one after another on (0, 1)."""
    weights = [float(w) for _, w in parts]
    if any(w <= 0 for w in weights) or abs(sum(weights) - 1) > 1e-12:
        raise ArgumentError("concat weights must be positive and sum to 1")
    segs = []
    start = 0.0
    for phi, w in parts:
        for pc in phi.pieces:
            s = pc.shape
            if isinstance(s, LogRamp):
                s = LogRamp(s.base, s.scale, start + w * s.origin, w * s.width)
            segs.append((start + w * pc.lo, start + w * pc.hi, s))
        start += w
    return PiecewiseFn.from_segments(segs)


def constant(v: float) -> PiecewiseFn:
    return PiecewiseFn((Piece(0.0, 1.0, Constant(float(v))),))


# ---------------------------------------------------------------- optimizers

def canonical_extremizers(params: BellmanParams):
    """The two-step, logarithmic and three-step extremals at (0, eps^2)."""
    e = params.eps
    phi1 = PiecewiseFn.steps([-e, e])
    phi2 = PiecewiseFn.from_segments([
        (0.0, 0.25, LogRamp(0.0, e, 0.0, 0.25)),
        (0.25, 0.75, Constant(0.0)),
        (0.75, 1.0, LogRamp(0.0, -e, 1.0, -0.25)),
    ])
    phi3 = PiecewiseFn.steps([-2 * e, 0.0, 2 * e], [0.0, 0.125, 0.875, 1.0])
    return phi1, phi2, phi3


def _two_level(y: float, x2: float) -> PiecewiseFn:
    s = math.sqrt(max(x2, 0.0))
    if s == 0:
        return constant(0.0)
    alpha = min(max(0.5 * (1 - y / s), 0.0), 1.0)
    return PiecewiseFn.from_segments([(0.0, alpha, Constant(-s)), (alpha, 1.0, Constant(s))])


def _chord_to_origin(y: float, x2: float) -> PiecewiseFn:
    if x2 <= 0:
        return constant(0.0)
    u = x2 / y
    alpha = min(y * y / x2, 1.0)
    return PiecewiseFn.from_segments([(0.0, alpha, Constant(u)), (alpha, 1.0, Constant(0.0))])


def _right_tangent(y: float, x2: float, u1: float, params: BellmanParams) -> PiecewiseFn:
    eps = params.eps
    u = u_plus((y, x2), params)
    mu = min(max((u - y) / eps, 0.0), 1.0)
    if mu == 0:
        return constant(u)
    nu = math.exp((u1 - u) / eps)
    return PiecewiseFn.from_segments([
        (0.0, mu * nu / 2, Constant(u1 - 2 * eps)),
        (mu * nu / 2, mu * nu, Constant(u1)),
        (mu * nu, mu, LogRamp(u, eps, 0.0, mu)),
        (mu, 1.0, Constant(u)),
    ])


def _left_tangent(y: float, x2: float, params: BellmanParams) -> PiecewiseFn:
    eps = params.eps
    u = u_minus((y, x2), params)
    mu = min(max((y - u) / eps, 0.0), 1.0)
    if mu == 0:
        return constant(u)
    return PiecewiseFn.from_segments([(0.0, mu, LogRamp(u, -eps, 0.0, mu)), (mu, 1.0, Constant(u))])


def transition_weights(y: float, x2: float, u: float, eps: float) -> tuple[float, float]:
    """Lengths (mu_minus, mu_plus) of the two log tails of a T-block optimizer."""
    q = (x2 - 2 * u * y + u * u) / (4 * eps * eps)
    r = (y - u) / (2 * eps)
    return max(q - r, 0.0), max(q + r, 0.0)


def _right_ramp(base: float, eps: float, mp: float):
    # singular at t = 1, equal to `base` at t = 1 - mp
    return (1.0 - mp, 1.0, LogRamp(base, -eps, 1.0, -mp))


def _transition_origin_log(y, x2, params):
    eps = params.eps
    mm, mp = transition_weights(y, x2, 0.0, eps)
    segs = [(0.0, mm, LogRamp(0.0, eps, 0.0, mm))] if mm > 0 else []
    segs.append((mm, 1.0 - mp, Constant(0.0)))
    if mp > 0:
        segs.append(_right_ramp(0.0, eps, mp))
    return PiecewiseFn.from_segments(segs)


def _transition_origin_steps(y, x2, params):
    eps = params.eps
    mm, mp = transition_weights(y, x2, 0.0, eps)
    return PiecewiseFn.from_segments([
        (0.0, mm / 2, Constant(-2 * eps)),
        (mm / 2, 1.0 - mp / 2, Constant(0.0)),
        (1.0 - mp / 2, 1.0, Constant(2 * eps)),
    ])


def _transition_xi(y, x2, xi, params):
    eps = params.eps
    mm, mp = transition_weights(y, x2, xi, eps)
    nu = math.exp(1.0 - xi / eps)
    segs = [
        (0.0, mm * nu / 2, Constant(-eps)),
        (mm * nu / 2, mm * nu, Constant(eps)),
    ]
    if mm > 0:
        segs.append((mm * nu, mm, LogRamp(xi, eps, 0.0, mm)))
    segs.append((mm, 1.0 - mp, Constant(xi)))
    if mp > 0:
        segs.append(_right_ramp(xi, eps, mp))
    return PiecewiseFn.from_segments(segs)


def make_optimizer(x, params: BellmanParams, kind: CandidateKind) -> PiecewiseFn:
    """A function on (0, 1) whose Bellman point is x and whose p-mean is the candidate value."""
    if not contains(x, params):
        raise DomainError(f"point {tuple(x)} is outside the strip for eps={params.eps}")
    if not kind_supports(kind, params.p):
        raise ArgumentError(f"candidate {kind.value} is not defined for p={params.p}")
    x1, x2 = float(x[0]), float(x[1])
    y = abs(x1)
    eps = params.eps
    mu = gluing_mu(params) if kind is CandidateKind.P else None
    region = classify((y, x2), params, kind, mu)
    rk = region.kind
    if rk is RegionKind.L0:
        phi = _two_level(y, x2)
    elif rk is RegionKind.LA:
        phi = _chord_to_origin(y, x2)
    elif rk is RegionKind.FPLUS:
        phi = _right_tangent(y, x2, region.u1, params)
    elif rk is RegionKind.FMINUS:
        phi = _left_tangent(y, x2, params)
    elif kind is CandidateKind.N:
        phi = _transition_origin_log(y, x2, params)
    elif kind is CandidateKind.R:
        phi = _transition_origin_steps(y, x2, params)
    else:
        phi = _transition_xi(y, x2, mu * eps, params)
    return phi.negated() if x1 < 0 else phi
