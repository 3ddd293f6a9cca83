"""Applied inequalities: Kershaw, Wallis ratios, Gaussian integral, unit balls.

Each check returns :class:`BoundCheckRecord` objects holding the two bounds,
the value, the declared strictness of each side and the signed margins.
Comparisons that touch a sharp constant are made in extended precision with
a guard band; a record notes when the guard band decided a side.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import divided_diff as dd
from .cm_checker import geometric_grid
from .divided_diff import Regime, ShiftPair
from .precision import DOUBLE, Precision, extended, resolve, to_real
from .quadrature import integrate
from .special import DomainError, digamma, find_psi_root, ln_gamma, ln_gamma_ratio, polygamma

GUARD_BAND = 1e-20
DEFAULT_GRID = 64
INFINITY = math.inf  # sentinel for b = inf in gamma_psi_bounds_check
LIMIT_POINT = 1e6

_NAMED_PAIRS = {"theta1": ShiftPair(0.5, 1), "theta2": ShiftPair(1, 1.5)}


@dataclass
class BoundCheckRecord:
    claim_id: str
    parameter: dict
    lower: float
    value: object
    upper: float
    strictness: tuple  # ("strict" | "closed", "strict" | "closed") for (lower, upper)
    margin_lower: float
    margin_upper: float
    verdict: str
    guard_band_used: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self):
        d = asdict(self)
        if isinstance(self.value, Fraction):
            d["value"] = f"{self.value.numerator}/{self.value.denominator}"
        return d


def _side_ok(margin, strictness, guard):
    """Return (holds, guard_decided) for a margin that must be > 0 or >= 0."""
    if strictness == "strict":
        return margin > guard, False
    if margin >= 0:
        return True, False
    return margin >= -guard, True


def _record(claim_id, parameter, lower, value, upper, strictness,
            guard=0.0, margins=None, note=""):
    """Build a record; ``margins`` overrides value-lower / upper-value."""
    if margins is None:
        margins = (value - lower, upper - value)
    ml, mu = margins
    ok_l, g_l = _side_ok(ml, strictness[0], guard)
    ok_u, g_u = _side_ok(mu, strictness[1], guard)
    return BoundCheckRecord(
        claim_id=claim_id, parameter=parameter, lower=float(lower),
        value=value if isinstance(value, Fraction) else float(value),
        upper=float(upper), strictness=tuple(strictness),
        margin_lower=float(ml), margin_upper=float(mu),
        verdict="pass" if ok_l and ok_u else "fail",
        guard_band_used=g_l or g_u, note=note,
    )


# -- Wallis ratios -----------------------------------------------------------------

def double_factorial(n: int) -> int:
    """Exact n!!, with 0!! = (-1)!! = 1."""
    if n < -1:
        raise ValueError("double factorial needs n >= -1")
    out = 1
    for k in range(n, 1, -2):
        out *= k
    return out


def wallis_ratios(n_max: int):
    """Yield (n, (2n-1)!!/(2n)!!, (2n)!!/(2n+1)!!) as exact fractions."""
    odd = Fraction(1)  # (2n-1)!!/(2n)!!
    even = Fraction(1)  # (2n)!!/(2n+1)!!
    for n in range(1, n_max + 1):
        odd *= Fraction(2 * n - 1, 2 * n)
        even *= Fraction(2 * n, 2 * n + 1)
        yield n, odd, even


def wallis_bounds_check(n_max: int, digits: int = 30):
    """Sharp bounds for both Wallis double-factorial ratios, n = 1..n_max.

    With r = (2n-1)!!/(2n)!!, the first claim is 1/4 < θ1(n) <= 4/π - 1 where
    r^2 π (n + θ1(n)) = 1; with r = (2n)!!/(2n+1)!!, the second claim is
    3/4 < θ2(n) <= 9π/16 - 1 where 4 r^2 (n + θ2(n)) = π.  θ is recovered
    from the exact squared ratio; the closed sides hold with equality at n = 1.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    precision = extended(digits)
    ctx = precision.ctx
    pi = ctx.pi
    records = []
    lo1, hi1 = to_real(Fraction(1, 4), precision), 4 / pi - 1
    lo2, hi2 = to_real(Fraction(3, 4), precision), 9 * pi / 16 - 1
    for n, r1, r2 in wallis_ratios(n_max):
        sq1 = r1 * r1
        theta1 = 1 / (pi * to_real(sq1, precision)) - n
        records.append(_record(
            "wallis-odd-even", {"n": n}, 1 / ctx.sqrt(pi * (n + hi1)), r1,
            1 / ctx.sqrt(pi * (n + lo1)), ("closed", "strict"), GUARD_BAND,
            margins=(hi1 - theta1, theta1 - lo1),
            note=f"theta1={float(theta1):.15g}",
        ))
        sq2 = r2 * r2
        theta2 = pi / (4 * to_real(sq2, precision)) - n
        records.append(_record(
            "wallis-even-odd", {"n": n}, ctx.sqrt(pi) / (2 * ctx.sqrt(n + hi2)), r2,
            ctx.sqrt(pi) / (2 * ctx.sqrt(n + lo2)), ("closed", "strict"), GUARD_BAND,
            margins=(hi2 - theta2, theta2 - lo2),
            note=f"theta2={float(theta2):.15g}",
        ))
    return records


def theta_sequences(x, precision=None):
    """(θ1(x), θ2(x)) = (z_{1/2,1}(x), z_{1,3/2}(x)); θ1 needs x > -1/2."""
    precision = resolve(precision)
    xr = to_real(x, precision)
    theta1 = dd.z_eval(_NAMED_PAIRS["theta1"], xr, precision).z
    theta2 = dd.z_eval(_NAMED_PAIRS["theta2"], xr, precision).z
    return theta1, theta2


def wallis_integral(n: int, precision=None):
    """Integral of sin^n over [0, π/2] via the gamma-ratio closed form."""
    precision = resolve(precision)
    ctx = precision.ctx
    n_r = to_real(n, precision)
    lr = ln_gamma_ratio(n_r / 2, 0, to_real(Fraction(1, 2), precision), precision)
    return ctx.sqrt(ctx.pi) * ctx.exp(lr) / n_r


# -- Gaussian integral ----------------------------------------------------------

def gaussian_integral(n, abs_tol=1e-12, precision=None):
    """Integral of exp(-x^2) over [-sqrt(n), sqrt(n)], by symmetry as twice [0, sqrt(n)]."""
    precision = resolve(precision)
    ctx = precision.ctx
    root = ctx.sqrt(to_real(n, precision))
    value, err = integrate(lambda u: ctx.exp(-u * u), 0, root, precision,
                           abs_tol=abs_tol / 2)
    return 2 * value, 2 * err


def erf_bounds_check(n_max: int, precision=None):
    """sqrt(π)/sqrt(1 + (9π/16-1)/n) <= I(n) < sqrt(π)/sqrt(1 - 3/(4n)), n = 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    precision = resolve(precision)
    ctx = precision.ctx
    sqrt_pi = ctx.sqrt(ctx.pi)
    c_lo = 9 * ctx.pi / 16 - 1
    records = []
    for n in range(1, n_max + 1):
        value, err = gaussian_integral(n, precision=precision)
        lower = sqrt_pi / ctx.sqrt(1 + c_lo / n)
        upper = sqrt_pi / ctx.sqrt(1 - to_real(Fraction(3, 4 * n), precision))
        rec = _record("erf-sandwich", {"n": n}, lower, value, upper,
                      ("closed", "strict"), guard=err, note=f"quad_err={err:.3g}")
        records.append(rec)
    return records


# -- unit balls --------------------------------------------------------------------

def ball_volume(n: int, precision=None):
    """Ω_n = π^(n/2) / Γ(1 + n/2)."""
    precision = resolve(precision)
    ctx = precision.ctx
    half = to_real(n, precision) / 2
    return ctx.exp(half * ctx.log(ctx.pi) - ln_gamma(1 + half, precision))


def ball_ratio(n: int, precision=None):
    """Ω_{n-1}/Ω_n = Γ(1 + n/2) / (sqrt(π) Γ(1/2 + n/2))."""
    precision = resolve(precision)
    ctx = precision.ctx
    half = to_real(n, precision) / 2
    lr = ln_gamma_ratio(half, to_real(Fraction(1, 2), precision), 1, precision)
    return ctx.exp(lr) / ctx.sqrt(ctx.pi)


def ball_ratio_check(n_max: int, digits: int = 30):
    """sqrt((n+1/2)/(2π)) < Ω_{n-1}/Ω_n <= sqrt((n+π/2-1)/(2π)), n = 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    precision = extended(digits)
    ctx = precision.ctx
    two_pi = 2 * ctx.pi
    records = []
    for n in range(1, n_max + 1):
        value = ball_ratio(n, precision)
        lower = ctx.sqrt((n + to_real(0.5, precision)) / two_pi)
        upper = ctx.sqrt((n + ctx.pi / 2 - 1) / two_pi)
        records.append(_record("ball-ratio", {"n": n}, lower, value, upper,
                               ("strict", "closed"), GUARD_BAND))
    return records


# -- Kershaw --------------------------------------------------------------------

def kershaw_check(s_grid=None, x_grid=None, digits: int = 30):
    """Both forms of Kershaw's double inequality for 0 < s < 1, x >= 1.

    Ratio form: (x+s/2)^(1-s) < Γ(x+1)/Γ(x+s) < (x-1/2+sqrt(s+1/4))^(1-s),
    compared through logarithms.  Rearranged form: s/2 < z_{s,1}(x) <
    sqrt(s+1/4) - 1/2.
    """
    if s_grid is None:
        s_grid = [round(0.05 * i, 2) for i in range(1, 20)]
    if x_grid is None:
        x_grid = list(range(1, 51))
    precision = extended(digits)
    ctx = precision.ctx
    records = []
    for s_ in s_grid:
        if not 0 < s_ < 1:
            raise DomainError(f"Kershaw needs 0 < s < 1, got {s_}")
        s = to_real(s_, precision)
        lo_z, hi_z = s / 2, ctx.sqrt(s + to_real(0.25, precision)) - to_real(0.5, precision)
        for x_ in x_grid:
            if x_ < 1:
                raise DomainError(f"Kershaw needs x >= 1, got {x_}")
            x = to_real(x_, precision)
            log_ratio = ln_gamma_ratio(x, s, 1, precision)
            log_lo = (1 - s) * ctx.log(x + lo_z)
            log_hi = (1 - s) * ctx.log(x + hi_z)
            records.append(_record(
                "kershaw", {"s": s_, "x": x_}, ctx.exp(log_lo), ctx.exp(log_ratio),
                ctx.exp(log_hi), ("strict", "strict"),
                margins=(log_ratio - log_lo, log_hi - log_ratio),
                note="log-scale margins",
            ))
            z = dd.z_eval(ShiftPair(s_, 1), x, precision).z
            records.append(_record("kershaw-rearranged", {"s": s_, "x": x_},
                                   lo_z, z, hi_z, ("strict", "strict")))
    return records


# -- Γ versus ψ -------------------------------------------------------------------

def psi_energy(x, precision=None):
    """E(x) = e^ψ(x) (ψ(x) - 1) + 1, which is >= 0 and vanishes at x*."""
    precision = resolve(precision)
    ctx = precision.ctx
    psi = digamma(x, precision)
    return psi * ctx.exp(psi) - ctx.expm1(psi)


def gamma_psi_bounds_check(a, b, x_grid=None, precision=None, points=DEFAULT_GRID):
    """exp(α E(x)) <= Γ(x)/Γ(x*) <= exp(β E(x)) on (a, b), α = Q(b), β = Q(a).

    ``b = INFINITY`` uses α = 1.  The comparison is made on the log scale.
    A final record checks that Q is strictly decreasing on the grid.
    """
    precision = resolve(precision)
    if not 0 < a < b:
        raise DomainError(f"need 0 < a < b, got a={a}, b={b}")
    x_star = find_psi_root(precision)
    ln_g_star = ln_gamma(x_star, precision)
    beta = dd.q_ratio(a, precision)
    alpha = 1 if b == INFINITY else dd.q_ratio(b, precision)
    if x_grid is None:
        hi = 100.0 if b == INFINITY else float(b)
        x_grid = geometric_grid(float(a), hi, points + 2)[1:-1]
    tol = 64 * precision.eps
    records = []
    q_values = []
    for x_ in x_grid:
        x = to_real(x_, precision)
        e = psi_energy(x, precision)
        mid = ln_gamma(x, precision) - ln_g_star
        scale = max(abs(mid), 1)
        records.append(_record(
            "gamma-psi", {"a": a, "b": "inf" if b == INFINITY else b, "x": x_},
            alpha * e, mid, beta * e, ("closed", "closed"), guard=tol * scale,
            note="log-scale",
        ))
        q_values.append(dd.q_ratio(x, precision))
    steps = [float(q_values[i] - q_values[i + 1]) for i in range(len(q_values) - 1)]
    worst = min(steps) if steps else 0.0
    records.append(BoundCheckRecord(
        claim_id="q-decreasing", parameter={"a": a, "b": "inf" if b == INFINITY else b,
                                            "points": len(x_grid)},
        lower=0.0, value=worst, upper=math.inf, strictness=("strict", "strict"),
        margin_lower=worst, margin_upper=math.inf,
        verdict="pass" if worst > 0 else "fail", note="min Q(x_i) - Q(x_i+1)",
    ))
    return records


def q_decreasing_check(lo=1.0, hi=5.0, points=DEFAULT_GRID, precision=None):
    precision = resolve(precision)
    grid = np.linspace(lo, hi, points)
    q = [dd.q_ratio(float(x), precision) for x in grid]
    steps = [float(q[i] - q[i + 1]) for i in range(len(q) - 1)]
    return min(steps)


def f_monotonicity_check(pair, c, interval, points=24, precision=None):
    """f_{s,t} decreasing for |t-s| < 1 and increasing for |t-s| > 1."""
    pair = pair if isinstance(pair, ShiftPair) else ShiftPair(*pair)
    precision = resolve(precision)
    anchored = dd.AnchoredPair(pair, c)
    grid = geometric_grid(interval[0], interval[1], points, pair.alpha)
    f = [dd.g_f_eval(anchored, x, precision).f for x in grid]
    sign = pair.expected_sign
    steps = [float(sign * (f[i] - f[i + 1])) for i in range(len(f) - 1)]
    worst = min(steps)
    verdict = "indeterminate" if sign == 0 else ("pass" if worst > 0 else "fail")
    return BoundCheckRecord(
        claim_id="f-monotone", parameter={"s": pair.s, "t": pair.t, "c": c,
                                          "interval": list(interval)},
        lower=0.0, value=worst, upper=math.inf, strictness=("strict", "strict"),
        margin_lower=worst, margin_upper=math.inf, verdict=verdict,
        note="min over grid of expected_sign*(f(x_i)-f(x_i+1))",
    )


# -- auxiliary inequalities ----------------------------------------------------------

def auxiliary_inequality_checks(x_grid=None, pair_grid=None, samples=500, seed=0,
                                digits: int = 30):
    """Γ-ratio exponential bounds, the z-vs-divided-difference bound, and ψ' e^ψ < 1.

    Without explicit grids, ``samples`` random cases are drawn per family from
    a seeded generator.
    """
    precision = extended(digits)
    ctx = precision.ctx
    rng = np.random.default_rng(seed)
    records = []

    # exp((s-r)ψ(r)) < Γ(s)/Γ(r) < exp((s-r)ψ(s)) for s > r > 0
    if x_grid is None:
        r_vals = rng.uniform(0.05, 20.0, samples)
        s_vals = r_vals + rng.uniform(0.01, 10.0, samples)
        gamma_pairs = list(zip(s_vals.tolist(), r_vals.tolist()))
    else:
        gamma_pairs = [(x + 1.0, x) for x in x_grid if x > 0]
    for s_, r_ in gamma_pairs:
        s, r = to_real(s_, precision), to_real(r_, precision)
        mid = ln_gamma_ratio(0, r, s, precision)
        records.append(_record("gamma-ratio-exp", {"s": s_, "r": r_},
                               (s - r) * digamma(r, precision), mid,
                               (s - r) * digamma(s, precision), ("strict", "strict"),
                               note="log-scale"))

    # [Γ(x+t)/Γ(x+s)]^(1/(t-s)) < (t-s)/(ψ(x+t)-ψ(x+s)), reversed for |t-s| > 1
    if pair_grid is None:
        cases = []
        while len(cases) < samples:
            s_, t_ = rng.uniform(-0.5, 3.0, 2).tolist()
            pair = ShiftPair(s_, t_)
            if pair.regime in (Regime.CRITICAL, Regime.COINCIDENT):
                continue
            x_ = -pair.alpha + float(rng.uniform(0.05, 50.0))
            cases.append((pair, x_))
    else:
        grid = x_grid or [0.5, 1.0, 2.0, 5.0, 10.0, 50.0]
        cases = [(ShiftPair(*p), -min(p) + x) for p in pair_grid for x in grid]
    for pair, x_ in cases:
        if pair.regime in (Regime.CRITICAL, Regime.COINCIDENT):
            continue
        x = to_real(x_, precision)
        s, t = pair.ordered(precision)
        log_lhs = ln_gamma_ratio(x, s, t, precision) / (t - s)
        d0 = digamma(x + t, precision) - digamma(x + s, precision)
        log_rhs = ctx.log((t - s) / d0)
        sign = pair.expected_sign
        # sub regime: lhs < rhs; super regime: lhs > rhs
        margin = sign * (log_rhs - log_lhs)
        records.append(BoundCheckRecord(
            claim_id="z-divided-difference", parameter={"s": pair.s, "t": pair.t, "x": x_},
            lower=float(log_lhs), value=float(log_lhs), upper=float(log_rhs),
            strictness=("strict", "strict"), margin_lower=float(margin),
            margin_upper=float(margin), verdict="pass" if margin > 0 else "fail",
            note="log-scale; sign flips for |t-s| > 1",
        ))

    # ψ'(x) e^ψ(x) < 1 for x > 0
    xs = rng.uniform(0.0, 1.0, samples) if x_grid is None else None
    if xs is not None:
        # log-uniform over (1e-3, 1e4)
        x_vals = (10.0 ** (-3 + 7 * xs)).tolist()
    else:
        x_vals = [x for x in x_grid if x > 0]
    for x_ in x_vals:
        v = dd.phi(ShiftPair(0, 0), to_real(x_, precision), precision)
        records.append(_record("psi-prime-exp-psi", {"x": x_}, -math.inf, v, 1,
                               ("strict", "strict"), margins=(math.inf, 1 - v)))
    return records


# -- monotonicity and convexity of z ------------------------------------------------

def theta_monotonicity_check(which, interval=None, grid=DEFAULT_GRID, precision=None):
    """z decreasing and convex for |t-s| < 1, increasing and concave for |t-s| > 1.

    ``which`` is ``"theta1"``, ``"theta2"`` or a pair (s, t).  Also requires
    |z'(1e6)| < 1e-5.
    """
    precision = resolve(precision)
    if isinstance(which, str):
        pair = _NAMED_PAIRS[which]
        label = which
    else:
        pair = which if isinstance(which, ShiftPair) else ShiftPair(*which)
        label = f"z{pair}"
    if interval is None:
        interval = (-pair.alpha + 0.1, 50.0)
    sign = pair.expected_sign
    xs = geometric_grid(interval[0], interval[1], grid, pair.alpha)
    worst_slope = worst_curv = math.inf
    for x in xs:
        v = dd.z_eval(pair, x, precision)
        # sub: z1 <= 0, z2 >= 0 ; super: z1 >= 0, z2 <= 0
        worst_slope = min(worst_slope, float(-sign * v.z1))
        worst_curv = min(worst_curv, float(sign * v.z2))
    tail = float(dd.z_eval(pair, LIMIT_POINT, precision).z1)
    ok = sign != 0 and worst_slope >= 0 and worst_curv >= 0 and abs(tail) < 1e-5
    verdict = "indeterminate" if sign == 0 else ("pass" if ok else "fail")
    return BoundCheckRecord(
        claim_id="z-monotone-convex", parameter={"which": label, "s": pair.s, "t": pair.t,
                                                 "interval": list(interval), "grid": grid},
        lower=0.0, value=tail, upper=1e-5, strictness=("closed", "strict"),
        margin_lower=min(worst_slope, worst_curv), margin_upper=1e-5 - abs(tail),
        verdict=verdict, note="margin_lower = min(slope, curvature) margin; value = z'(1e6)",
    )
