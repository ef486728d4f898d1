"""Numerical checks of the candidates: local concavity, smooth fit, straight
trajectories, induction on scales, a brute-force step-function oracle and the
sharp inequalities that follow from the Bellman functions.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .candidates import bellman, dispatch, eval_global, gluing_mu, kind_supports, tangent_data
from .errors import ArgumentError, DomainError, NumericError
from .geometry import (
    BellmanParams,
    CandidateKind,
    Ext,
    RegionKind,
    classify,
    contains,
    segment_inside,
    u_minus,
    u_plus,
)
from .quadrature import gamma
from .testfn import (
    PiecewiseFn,
    bmo_witness,
    exp_abs_mean,
    interval_integrals,
    moments,
    p_mean,
    step_oscillation_sup,
)


@dataclass
class Report:
    name: str
    trials: int
    violations: list = field(default_factory=list)
    worst_slack: float = math.inf
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        if not math.isfinite(d["worst_slack"]):
            d["worst_slack"] = None
        return d


def natural_sense(kind: CandidateKind, p: float) -> str:
    """'concave' or 'convex': the local shape the candidate has at power p."""
    if kind is CandidateKind.M:
        return "concave" if p <= 2 else "convex"
    if kind is CandidateKind.N:
        return "convex" if p <= 2 else "concave"
    if kind is CandidateKind.P:
        return "concave"
    return "convex"


def _sample_radius(params: BellmanParams, kind: CandidateKind) -> float:
    eps = params.eps
    if kind is CandidateKind.P:
        return gluing_mu(params) * eps + 2 * eps
    return 4 * eps


def midpoint_concavity(params: BellmanParams, kind: CandidateKind, sense: str, trials: int = 10000,
                       seed: int = 0, slack_tol: float = 1e-8) -> Report:
    """Midpoint test on random segments lying inside the strip.

    For sense='concave' the slack is G(mid) - (G(a) + G(b))/2, for 'convex'
    its negative; a slack below -slack_tol is a violation.
    """
    if sense not in ("concave", "convex"):
        raise ArgumentError("sense must be 'concave' or 'convex'")
    rng = np.random.default_rng(seed)
    eps = params.eps
    radius = _sample_radius(params, kind)
    sign = 1.0 if sense == "concave" else -1.0
    rep = Report(f"midpoint_{sense}_{kind.value}", trials, seed=seed,
                 details={"p": params.p, "eps": eps})
    done = 0
    while done < trials:
        m = 4 * (trials - done)
        a1 = rng.uniform(-radius, radius, m)
        a2 = a1 * a1 + eps * eps * rng.uniform(0, 1, m)
        b1 = a1 + eps * rng.uniform(-2, 2, m)
        b2 = b1 * b1 + eps * eps * rng.uniform(0, 1, m)
        ok = np.flatnonzero(segment_inside(a1, a2, b1, b2, eps, tol=0.0))
        for k in ok[: trials - done]:
            ga = eval_global((a1[k], a2[k]), params, kind)
            gb = eval_global((b1[k], b2[k]), params, kind)
            mid = (0.5 * (a1[k] + b1[k]), 0.5 * (a2[k] + b2[k]))
            gm = eval_global(mid, params, kind)
            slack = sign * (gm - 0.5 * (ga + gb))
            rep.worst_slack = min(rep.worst_slack, slack)
            if slack < -slack_tol:
                rep.violations.append({"a": [a1[k], a2[k]], "b": [b1[k], b2[k]], "slack": slack})
        done += min(len(ok), trials - done)
    return rep


# ---------------------------------------------------------------- smooth fit

def _t2_one_sided(params, kind, x1, x2, h, direction, exponents=(1.0, 2.0), levels=5):
    """One-sided x2-derivative by Richardson extrapolation of forward quotients.

    The quotients behave like t2 + sum c_j h^e_j; each pass removes one exponent.
    """
    g0 = eval_global((x1, x2), params, kind)
    hs = [h / 4 ** k for k in range(levels)]
    d = [(eval_global((x1, x2 + direction * hk), params, kind) - g0) / (direction * hk) for hk in hs]
    for e in exponents[: levels - 1]:
        r = 4.0 ** e
        d = [(r * d[k + 1] - d[k]) / (r - 1) for k in range(len(d) - 1)]
    return d[0]


def _exponents(params, kind):
    # u^p is not C^2 at u = 0, which is where N is glued to its linear block
    p = params.p
    if kind is CandidateKind.N and 1 < p < 2:
        return tuple(sorted({p - 1, 1.0, p, 2.0}))
    return (1.0, 2.0, 3.0)


def gluing_curves(params: BellmanParams, kind: CandidateKind):
    """(label, points, expected jump of t2) for each gluing curve of a kind."""
    eps, p = params.eps, params.p
    frac = np.linspace(0.2, 0.8, 5)
    if kind is CandidateKind.M:
        return [("x2=eps^2", [(f * eps, eps * eps) for f in frac], 0.0)]
    if kind is CandidateKind.N:
        # at p = 1 the outer block is x1 itself and the fit is only continuous
        jump = 1 / (2 * eps) if p == 1 else 0.0
        return [("x2=2eps*x1", [(f * eps, 2 * eps * f * eps) for f in frac], jump)]
    if kind is CandidateKind.R:
        inner = [(f * eps, 2 * eps * f * eps) for f in frac]
        outer = [((1 + f) * eps, 2 * eps * (1 + f) * eps) for f in frac]
        return [("x2=2eps*x1, 0<x1<eps", inner, (2 * eps) ** (p - 2) * (2 - p)),
                ("x2=2eps*x1, eps<x1<2eps", outer, 0.0)]
    xi = gluing_mu(params) * eps
    left = [(xi - f * eps, 2 * (xi - eps) * (xi - f * eps) + 2 * xi * eps - xi * xi) for f in frac]
    right = [(xi + f * eps, 2 * (xi + eps) * (xi + f * eps) - 2 * xi * eps - xi * xi) for f in frac]
    return [("x2=eps^2", [(f * eps, eps * eps) for f in frac], 0.0),
            ("left tangent of T(xi)", left, 0.0),
            ("right tangent of T(xi)", right, 0.0)]


def gluing_jumps(params: BellmanParams, kind: CandidateKind, h: float | None = None,
                 tol: float = 1e-6) -> Report:
    """One-sided t2 = dG/dx2 above and below each gluing curve.

    A zero expected jump is checked absolutely, a nonzero one relatively.
    """
    rep = Report(f"gluing_{kind.value}", 0, details={"p": params.p, "eps": params.eps, "curves": []})
    worst = 0.0
    h = 1e-3 * params.eps ** 2 if h is None else h
    ex = _exponents(params, kind)
    for label, points, expected in gluing_curves(params, kind):
        rows = []
        for x1, x2 in points:
            above = _t2_one_sided(params, kind, x1, x2, h, +1, ex)
            below = _t2_one_sided(params, kind, x1, x2, h, -1, ex)
            jump = above - below
            err = abs(jump - expected) / (abs(expected) if expected else 1.0)
            worst = max(worst, err)
            rows.append({"x": [x1, x2], "t2_above": above, "t2_below": below, "jump": jump})
            rep.trials += 1
            if err > tol:
                rep.violations.append({"curve": label, "x": [x1, x2], "jump": jump, "expected": expected})
        rep.details["curves"].append({"curve": label, "expected": expected, "points": rows})
    rep.worst_slack = -worst
    return rep


# ---------------------------------------------------------------- trajectories

def trajectory_through(x, params: BellmanParams, kind: CandidateKind):
    """End points of the straight extremal trajectory through x."""
    x1, x2 = float(x[0]), float(x[1])
    eps = params.eps
    y = abs(x1)
    mu = gluing_mu(params) if kind is CandidateKind.P else None
    region = classify((y, x2), params, kind, mu)
    rk = region.kind
    if rk is RegionKind.T:
        raise ArgumentError("the candidate is linear on a T block; there is no distinguished trajectory")
    if rk is RegionKind.L0:
        s = math.sqrt(x2)
        a, b = (-s, x2), (s, x2)
    elif rk is RegionKind.LA:
        u = x2 / y
        a, b = (0.0, 0.0), (u, u * u)
    elif rk is RegionKind.FPLUS:
        u = u_plus((y, x2), params)
        t = u - eps
        a, b = (t, t * t + eps * eps), (u, u * u)
    else:
        u = u_minus((y, x2), params)
        t = u + eps
        a, b = (u, u * u), (t, t * t + eps * eps)
    if x1 < 0:
        a, b = (-a[0], a[1]), (-b[0], b[1])
    return a, b


def trajectory_linearity(params: BellmanParams, kind: CandidateKind, x, samples: int = 20,
                         tol: float = 1e-8, grad_tol: float = 1e-6, h: float = 1e-5) -> Report:
    if not contains(x, params):
        raise DomainError(f"point {tuple(x)} is outside the strip")
    a, b = trajectory_through(x, params, kind)
    s = np.linspace(0.05, 0.95, samples)
    pts = [(a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])) for t in s]
    vals = np.array([eval_global(pt, params, kind) for pt in pts])
    secant = vals[0] + (vals[-1] - vals[0]) * (s - s[0]) / (s[-1] - s[0])
    scale = max(1.0, float(np.max(np.abs(vals))))
    dev = float(np.max(np.abs(vals - secant))) / scale
    rep = Report(f"trajectory_{kind.value}", samples, worst_slack=-dev,
                 details={"from": list(a), "to": list(b), "max_deviation": dev})
    if dev > tol:
        rep.violations.append({"what": "not affine", "deviation": dev})
    tds = []
    for t, pt in zip(s, pts):
        if 0.2 <= t <= 0.8:
            try:
                tds.append(tangent_data(pt, params, kind, h))
            except DomainError:
                continue
    if len(tds) >= 3:
        spread = max(max(getattr(td, k) for td in tds) - min(getattr(td, k) for td in tds)
                     for k in ("t1", "t2", "t0"))
        rep.details["tangent_spread"] = spread
        if spread > grad_tol * scale:
            rep.violations.append({"what": "tangent data varies", "spread": spread})
    else:
        rep.details["tangent_spread"] = None
    return rep


# ---------------------------------------------------------------- induction

_ALPHAS = np.linspace(0.1, 0.9, 81)
_ALPHA_ORDER = _ALPHAS[np.argsort(np.abs(_ALPHAS - 0.5), kind="stable")]


def _constant_on(phi: PiecewiseFn, l: float, r: float):
    inside = [pc for pc in phi.pieces if min(pc.hi, r) - max(pc.lo, l) > 1e-15]
    if len(inside) == 1 and not hasattr(inside[0].shape, "scale"):
        return inside[0].shape.v
    return None


def induction_engine(phi: PiecewiseFn, params: BellmanParams, kind: CandidateKind, which: str,
                     depth: int = 14, delta: float | None = None, mono_tol: float = 1e-9,
                     terminal_tol: float = 1e-6) -> Report:
    """Split (0, 1) recursively so every split segment stays in the strip of radius delta.

    S_n is the sum of |I| G(x^I) over the intervals of level n, with G the
    candidate for radius delta. Intervals on which phi is constant are not
    split further since their children carry the same lower-boundary point.
    """
    if which not in ("upper", "lower"):
        raise ArgumentError("which must be 'upper' or 'lower'")
    if not 0 <= depth <= 14:
        raise ArgumentError("depth must be between 0 and 14")
    eps, p = params.eps, params.p
    delta = 1.05 * eps if delta is None else float(delta)
    if not delta > eps:
        raise ArgumentError("delta must exceed eps")
    norm, _ = bmo_witness(phi)
    if norm > eps * (1 + 1e-9):
        raise ArgumentError(f"function norm {norm} exceeds eps={eps}")
    big = BellmanParams(delta, p)

    def g_at(l, r):
        bp = moments(phi, l, r)
        return eval_global((bp.x1, bp.x2), big, kind)

    frozen = 0.0
    active = [(0.0, 1.0, g_at(0.0, 1.0))]
    if _constant_on(phi, 0.0, 1.0) is not None:
        frozen, active = active[0][2], []
    levels = [frozen + sum((r - l) * g for l, r, g in active)]
    for _ in range(depth):
        nxt = []
        for l, r, g in active:
            width = r - l
            ms = r - _ALPHA_ORDER * width
            ls = np.full_like(ms, l)
            rs = np.full_like(ms, r)
            f1a, f2a = interval_integrals(phi, ls, ms)
            f1b, f2b = interval_integrals(phi, ms, rs)
            wa, wb = ms - l, r - ms
            ok = segment_inside(f1a / wa, f2a / wa, f1b / wb, f2b / wb, delta, tol=1e-13)
            hits = np.flatnonzero(ok)
            if not len(hits):
                raise NumericError(f"no admissible split of ({l}, {r}) for delta={delta}")
            m = float(ms[hits[0]])
            for cl, cr in ((l, m), (m, r)):
                gc = g_at(cl, cr)
                if _constant_on(phi, cl, cr) is not None:
                    frozen += (cr - cl) * gc
                else:
                    nxt.append((cl, cr, gc))
        active = nxt
        levels.append(frozen + sum((r - l) * g for l, r, g in active))
    target = p_mean(phi, p)
    sign = 1.0 if which == "upper" else -1.0
    rep = Report(f"induction_{kind.value}_{which}", depth, seed=None,
                 details={"levels": levels, "p_mean": target, "delta": delta, "eps": eps, "p": p})
    worst = math.inf
    for n in range(depth):
        slack = sign * (levels[n] - levels[n + 1])
        worst = min(worst, slack)
        if slack < -mono_tol:
            rep.violations.append({"level": n + 1, "step": levels[n + 1] - levels[n]})
    terminal = sign * (levels[-1] - target)
    rep.details["terminal_gap"] = terminal
    if terminal < -terminal_tol:
        rep.violations.append({"what": "terminal", "gap": terminal})
    rep.worst_slack = min(worst, terminal)
    return rep


def random_step_function(rng: np.random.Generator, eps: float, n: int = 8, norm_range=(0.2, 0.9),
                         offset: float = 2.0, equal: bool = False) -> PiecewiseFn:
    """Random n-step function with BMO norm drawn uniformly from norm_range * eps."""
    while True:
        vals = rng.normal(size=n)
        if np.ptp(vals) > 1e-6:
            break
    if equal:
        breaks = np.linspace(0, 1, n + 1)
    else:
        inner = np.sort(rng.uniform(0.02, 0.98, n - 1))
        breaks = np.concatenate([[0.0], inner, [1.0]])
    raw = PiecewiseFn.steps(vals.tolist(), breaks.tolist())
    norm, _ = bmo_witness(raw)
    target = rng.uniform(*norm_range) * eps
    shift = rng.uniform(-offset, offset) * eps
    return PiecewiseFn.steps((shift + vals * (target / norm)).tolist(), breaks.tolist())


def random_piecewise(rng: np.random.Generator, norm_range=(0.05, 0.95), max_pieces: int = 5) -> PiecewiseFn:
    """Random mix of constants and logarithmic ramps scaled to a BMO norm in norm_range.

    Logarithmic singularities are only placed at 0 or 1: one next to a bounded
    piece at an interior point would leave BMO.
    """
    from .testfn import Constant, LogRamp

    n = int(rng.integers(2, max_pieces + 1))
    breaks = np.concatenate([[0.0], np.sort(rng.uniform(0.05, 0.95, n - 1)), [1.0]])
    segs = []
    for k, (lo, hi) in enumerate(zip(breaks[:-1], breaks[1:])):
        r = rng.random()
        span = float(hi - lo)
        base, scale = float(rng.normal()), float(rng.normal())
        if r < 0.4:
            segs.append((lo, hi, Constant(base)))
        elif r < 0.7 and k == 0:
            segs.append((lo, hi, LogRamp(base, scale, 0.0, span)))
        elif r < 0.7 and k == n - 1:
            segs.append((lo, hi, LogRamp(base, scale, 1.0, -span)))
        else:
            gap = float(rng.uniform(0.02, 1.0)) * span
            if rng.random() < 0.5:
                segs.append((lo, hi, LogRamp(base, scale, float(lo) - gap, span)))
            else:
                segs.append((lo, hi, LogRamp(base, scale, float(hi) + gap, -span)))
    raw = PiecewiseFn.from_segments(segs)
    norm, _ = bmo_witness(raw)
    if norm < 1e-9:
        return random_piecewise(rng, norm_range, max_pieces)
    c = rng.uniform(*norm_range) / norm

    def scale(s):
        if isinstance(s, Constant):
            return Constant(s.v * c)
        return LogRamp(s.base * c, s.scale * c, s.origin, s.width)

    return raw.map_shapes(scale)


# ---------------------------------------------------------------- oracle

def _standardize(w):
    w = np.sort(w, axis=-1)
    m = w.mean(axis=-1, keepdims=True)
    s = w.std(axis=-1, keepdims=True)
    good = s[..., 0] > 1e-12
    return (w - m) / np.where(s > 1e-12, s, 1.0), good


def _structured_starts(x1: float, x2: float, n: int) -> np.ndarray:
    """Two-level splits and three-level splits whose middle level is 0.

    Levels are solved from the two moment equations for every split of the n
    equal steps, so each row meets the moments exactly. Rows are returned in
    standardized form.
    """
    sd = math.sqrt(x2 - x1 * x1)
    rows = []
    for k in range(1, n):
        w = k / n
        rows.append(np.r_[np.full(k, -math.sqrt((1 - w) / w)), np.full(n - k, math.sqrt(w / (1 - w)))])
    for k1 in range(0, n):
        for k3 in range(0, n - k1):
            if k1 + k3 == 0:
                continue
            w1, w3 = k1 / n, k3 / n
            if k1 == 0:
                roots = [x2 / x1] if x1 > 0 and abs(w3 * (x2 / x1) ** 2 - x2) < 1e-12 else []
                pairs = [(0.0, b) for b in roots]
            elif k3 == 0:
                roots = [x2 / x1] if x1 < 0 and abs(w1 * (x2 / x1) ** 2 - x2) < 1e-12 else []
                pairs = [(a, 0.0) for a in roots]
            else:
                qa = w3 * w3 / w1 + w3
                qb = -2 * x1 * w3 / w1
                qc = x1 * x1 / w1 - x2
                disc = qb * qb - 4 * qa * qc
                if disc < 0:
                    continue
                pairs = []
                for b in ((-qb + math.sqrt(disc)) / (2 * qa), (-qb - math.sqrt(disc)) / (2 * qa)):
                    a = (x1 - w3 * b) / w1
                    if a <= 0 <= b:
                        pairs.append((a, b))
            for a, b in pairs:
                phi = np.r_[np.full(k1, a), np.zeros(n - k1 - k3), np.full(k3, b)]
                rows.append((phi - x1) / sd)
    if not rows:
        return np.empty((0, n))
    w, good = _standardize(np.array(rows))
    return w[good]


def brute_force_sup(x, params: BellmanParams, p: float, n_steps: int, which: str, budget: int = 100000,
                    seed: int = 0, batch: int = 32) -> float:
    """Best p-mean over monotone equal-width step functions in the BMO ball with Bellman point x.

    A step function is written x1 + sd * w with w sorted, of zero mean and
    unit variance, so the two moment constraints hold exactly after every
    move. The ball constraint becomes sup-oscillation(w) <= ((eps + 1e-8) / sd)^2.
    Search: (1+batch) evolution strategy with Gaussian, sparse, merging and
    zero-snapping moves, restarted from several feasible starts.
    """
    if which not in ("upper", "lower"):
        raise ArgumentError("which must be 'upper' or 'lower'")
    if not 1 <= n_steps <= 16:
        raise ArgumentError("n_steps must be between 1 and 16")
    if not contains(x, params):
        raise DomainError(f"point {tuple(x)} is outside the strip")
    x1, x2 = float(x[0]), float(x[1])
    var0 = x2 - x1 * x1
    if var0 <= 1e-14:
        return abs(x1) ** p
    if n_steps == 1:
        raise DomainError("a single step cannot have positive variance")
    sd = math.sqrt(var0)
    limit = ((params.eps + 1e-8) / sd) ** 2
    sign = 1.0 if which == "upper" else -1.0
    rng = np.random.default_rng(seed)
    n = n_steps
    zero_level = -x1 / sd

    def score(w):
        osc = step_oscillation_sup(w)[0]
        obj = np.mean(np.abs(x1 + sd * w) ** p, axis=-1)
        return np.where(osc <= limit, sign * obj, -np.inf)

    ramp, _ = _standardize(np.arange(n, dtype=float))
    evals = 0

    def feasible_start(raw):
        nonlocal evals
        lam = 1.0
        for _ in range(30):
            w, good = _standardize((1 - lam) * ramp + lam * raw)
            evals += 1
            if good and np.isfinite(score(w)):
                return w
            lam *= 0.5
        return ramp.copy()

    starts = [ramp.copy()]
    structured = _structured_starts(x1, x2, n)
    if len(structured):
        vals = score(structured)
        evals += len(structured)
        order = [k for k in np.argsort(-vals) if np.isfinite(vals[k])]
        starts += [structured[k] for k in order[:4]]
    n_starts = int(np.clip(budget // 4000, len(starts) + 1, 24))
    while len(starts) < n_starts:
        kind = rng.integers(3)
        if kind == 0:
            raw = rng.normal(size=n)
        else:
            levels = rng.normal(size=kind + 1)
            raw = levels[np.sort(rng.integers(0, kind + 1, n))]
        starts.append(feasible_start(raw))
    per_start = max((budget - evals) // len(starts), batch)
    best = -np.inf
    for w0 in starts:
        cur = w0
        cur_val = float(score(cur))
        spent = 0
        sigma = 0.3
        while spent < per_start and evals < budget:
            props = np.repeat(cur[None, :], batch, axis=0)
            mode = rng.integers(0, 4, batch)
            g = rng.normal(size=(batch, n)) * sigma * np.exp(rng.normal(size=(batch, 1)))
            sparse = rng.random((batch, n)) < 2.0 / n
            props += np.where(mode[:, None] == 0, g, 0.0)
            props += np.where((mode[:, None] == 1) & sparse, g, 0.0)
            idx = rng.integers(0, n - 1, batch)
            rows = np.flatnonzero(mode == 2)
            props[rows, idx[rows]] = props[rows, idx[rows] + 1]
            rows = np.flatnonzero(mode == 3)
            if len(rows):
                near = np.argmin(np.abs(props[rows] - zero_level), axis=-1)
                props[rows, near] = zero_level
            props, good = _standardize(props)
            vals = np.where(good, score(props), -np.inf)
            spent += batch
            evals += batch
            k = int(np.argmax(vals))
            if vals[k] > cur_val + 1e-15:
                cur, cur_val = props[k], float(vals[k])
                sigma = min(sigma * 1.5, 1.0)
            else:
                sigma = max(sigma * 0.85, 1e-12)
        best = max(best, cur_val)
    if not np.isfinite(best):
        raise NumericError("no feasible step function found")
    return sign * best


# ---------------------------------------------------------------- theorems

def _check(rep: Report, name: str, lhs: float, rhs: float, rel: float = 1e-9, ab: float = 1e-12):
    margin = rhs - lhs
    ok = lhs <= rhs + rel * abs(rhs) + ab
    rep.details.setdefault("checks", []).append({"name": name, "lhs": lhs, "rhs": rhs, "margin": margin, "ok": ok})
    rep.trials += 1
    rep.worst_slack = min(rep.worst_slack, margin)
    if not ok:
        rep.violations.append({"name": name, "lhs": lhs, "rhs": rhs})


def oscillation_lower(p: float, eps: float, s: float) -> float:
    """Sharp lower bound for the p-oscillation given oscillation s and norm eps."""
    if p <= 1:
        return 2 ** (p - 2) * eps ** (p - 2) * s
    if p <= 2:
        return 0.5 * p * gamma(p) * eps ** (p - 2) * s
    return s ** (p / 2)


def oscillation_upper(p: float, eps: float, s: float) -> float:
    if p <= 2:
        return s ** (p / 2)
    return 0.5 * p * gamma(p) * eps ** (p - 2) * s


def norm_constants(p: float) -> tuple[float, float]:
    """(c, C) with c ||phi|| <= ||phi||_p <= C ||phi||."""
    if not p > 0:
        raise ArgumentError("p must be positive")
    if p <= 1:
        return 2 ** (1 - 2 / p), 1.0
    if p <= 2:
        return (0.5 * p * gamma(p)) ** (1 / p), 1.0
    return 1.0, (0.5 * p * gamma(p)) ** (1 / p)


def jn_bounds(eps: float) -> tuple[float, float]:
    if not 0 <= eps < 1:
        raise ArgumentError("the exponential bound needs a norm below 1")
    return (1 - eps / 2) / (1 - eps), (1 - eps * eps / 2) / (1 - eps)


def _p_osc(phi: PiecewiseFn, p: float, c: float, d: float) -> tuple[float, float]:
    bp = moments(phi, c, d)
    s = max(bp.x2 - bp.x1 ** 2, 0.0)
    return s, p_mean(phi.shifted(bp.x1), p, c, d)


def check_theorems(phi: PiecewiseFn, p1: float, p2: float, n_grid: int = 6) -> Report:
    """Evaluate the sharp oscillation, norm-equivalence, ratio and exponential inequalities."""
    norm, (wc, wd) = bmo_witness(phi)
    if norm <= 0:
        raise ArgumentError("the function is constant")
    rep = Report("theorems", 0, details={"bmo_norm": norm, "witness": [wc, wd], "p1": p1, "p2": p2})
    for p in (p1, p2):
        s, op = _p_osc(phi, p, 0.0, 1.0)
        _check(rep, f"oscillation lower p={p}", oscillation_lower(p, norm, s), op)
        _check(rep, f"oscillation upper p={p}", op, oscillation_upper(p, norm, s))
        # p-norm estimated over breakpoints, a coarse grid and the witness interval
        ends = sorted(set(phi.breakpoints) | set(np.linspace(0, 1, n_grid).tolist()))
        intervals = [(c, d) for i, c in enumerate(ends) for d in ends[i + 1:]] + [(wc, wd)]
        best = 0.0
        for c, d in intervals:
            if not d > c:
                continue
            sj, opj = _p_osc(phi, p, c, d)
            best = max(best, opj)
            if oscillation_upper(p, norm, sj) < opj * (1 - 1e-9) - 1e-12:
                _check(rep, f"oscillation upper p={p} on ({c:.6g},{d:.6g})", opj, oscillation_upper(p, norm, sj), rel=1e-7)
        pnorm = best ** (1 / p)
        lo_c, hi_c = norm_constants(p)
        _check(rep, f"norm lower p={p}", lo_c * norm, pnorm, rel=1e-6)
        _check(rep, f"norm upper p={p}", pnorm, hi_c * norm, rel=1e-6)
    if 1 <= p1 <= 2 <= p2:
        _, o1 = _p_osc(phi, p1, 0.0, 1.0)
        _, o2 = _p_osc(phi, p2, 0.0, 1.0)
        ratio = p2 * gamma(p2) / (p1 * gamma(p1))
        _check(rep, "ratio lower", o1 ** (p2 / p1), o2)
        _check(rep, "ratio upper", o2, ratio * norm ** (p2 - p1) * o1)
        rep.details["ratio_constant"] = ratio
    if norm < 1:
        val = exp_abs_mean(phi)
        lo, hi = jn_bounds(norm)
        rep.details["exp_mean"] = val
        rep.details["exp_bounds"] = [lo, hi]
        _check(rep, "exponential upper", val, hi)
    return rep


# ---------------------------------------------------------------- foliation

def foliation_trace(params: BellmanParams, kind: CandidateKind, n_lines: int = 8):
    """Straight extremal trajectories of each block, both halves, as vertex lists."""
    if n_lines < 1:
        raise ArgumentError("need at least one line per block")
    eps = params.eps
    mu = gluing_mu(params) if kind is CandidateKind.P else None
    xi = mu * eps if mu else None
    reach = (xi + 3 * eps) if xi else 4 * eps
    fr = (np.arange(n_lines) + 0.5) / n_lines

    def up(t):
        return (t, t * t + eps * eps)

    def low(t):
        return (t, t * t)

    right = []
    if kind in (CandidateKind.M, CandidateKind.P):
        for f in fr:
            s = eps * f
            right.append([(-s, s * s), (s, s * s)])
    if kind is CandidateKind.M:
        for u in eps + (reach - eps) * fr:
            right.append([up(u - eps), low(u)])
    if kind is CandidateKind.N:
        for u in reach * np.concatenate([[0.0], fr]):
            right.append([low(u), up(u + eps)])
    if kind is CandidateKind.R:
        for u in 2 * eps * fr:
            right.append([(0.0, 0.0), low(u)])
        for u in 2 * eps + (reach - 2 * eps) * np.concatenate([[0.0], fr]):
            right.append([up(u - eps), low(u)])
        right.append([low(0.0), up(eps)])
    if kind is CandidateKind.P:
        for u in eps + (xi - eps) * np.concatenate([fr, [1.0]]):
            right.append([up(u - eps), low(u)])
        for u in xi + (reach - xi) * np.concatenate([[0.0], fr]):
            right.append([low(u), up(u + eps)])
    lines = []
    for line in right:
        lines.append([(float(a), float(b)) for a, b in line])
        mirrored = [(0.0 - float(a), float(b)) for a, b in line]
        if mirrored != lines[-1] and mirrored[::-1] != lines[-1]:
            lines.append(mirrored)
    return lines


def verify_suites(params: BellmanParams, which_suites=("concavity", "trajectories", "induction", "theorems"),
                  trials: int = 2000, seed: int = 0, depth: int = 10, delta: float | None = None) -> list[Report]:
    """Run the named suites for both candidates that are extremal at params.p."""
    p, eps = params.p, params.eps
    kinds = []
    for which in ("upper", "lower"):
        k = dispatch(p, which)
        if p == 2:
            continue
        kinds.append((k, which))
    reports = []
    rng = np.random.default_rng(seed)
    for suite in which_suites:
        if suite == "concavity":
            for k, _ in kinds:
                reports.append(midpoint_concavity(params, k, natural_sense(k, p), trials, seed))
                reports.append(gluing_jumps(params, k))
        elif suite == "trajectories":
            for k, _ in kinds:
                for _ in range(5):
                    for _ in range(100):
                        x1 = rng.uniform(-3 * eps, 3 * eps)
                        x2 = x1 * x1 + eps * eps * rng.uniform(0.05, 0.95)
                        mu = gluing_mu(params) if k is CandidateKind.P else None
                        if classify((x1, x2), params, k, mu).kind is not RegionKind.T:
                            break
                    reports.append(trajectory_linearity(params, k, (x1, x2)))
        elif suite == "induction":
            for k, which in kinds:
                for _ in range(5):
                    phi = random_step_function(rng, eps)
                    reports.append(induction_engine(phi, params, k, which, depth, delta))
        elif suite == "theorems":
            for _ in range(5):
                phi = random_step_function(rng, 1.0, norm_range=(0.2, 0.95))
                p1, p2 = (min(p, 2.0), max(p, 2.0))
                if p1 < 1:
                    p1 = 1.0
                reports.append(check_theorems(phi, p1, p2))
        else:
            raise ArgumentError(f"unknown suite {suite!r}")
    return reports
