"""Numerical certificates for complete-monotonicity sign patterns.

A certificate samples (-1)^k f^(k) on a geometric grid that clusters near
the left end of the domain, normalizes each value by max(1, |f^(k)|), and
records the worst signed margin per order.  Nothing here is a proof; a
certificate only says no violation larger than the rounding tolerance was
seen on the sampled points.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import divided_diff as dd
from .divided_diff import Regime, ShiftPair
from .precision import DOUBLE, Precision, extended, resolve, to_real

DEFAULT_K_MAX = 6
DEFAULT_GRID = 200
DECAY_POINT = 1e6
DECAY_TOL = 1e-5

_FD_WEIGHTS = {
    0: ((0, 1),),
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1), (0, -2), (1, 1)),
    3: ((-2, -0.5), (-1, 1), (1, -1), (2, 0.5)),
    4: ((-2, 1), (-1, -4), (0, 6), (1, -4), (2, 1)),
}


def sign_tolerance(precision: Precision) -> float:
    return 1e-20 if precision.extended else 1e-9


@dataclass
class CMCertificate:
    function_id: str
    pair: tuple
    interval: tuple
    grid_points: int
    k_max: int
    expected_sign: int
    worst_margin: list
    order_pass: list
    verdict: str
    kind: str = "certificate"
    precision: str = "double"
    worst_x: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self):
        return asdict(self)


def geometric_grid(lo, hi, n, alpha=0.0):
    """n points from lo to hi, geometric in the distance from -alpha."""
    lo_d, hi_d = lo + alpha, hi + alpha
    if not (0 < lo_d < hi_d):
        raise ValueError(f"interval ({lo}, {hi}) must lie inside (-alpha, inf)")
    if n == 1:
        return [float(lo)]
    ds = np.geomspace(lo_d, hi_d, n)
    return [float(d - alpha) for d in ds]


def _evaluator(target, pair, precision):
    if target == "theta":
        return lambda x, k: dd.theta_derivative(pair, x, k, precision)
    if target == "delta":
        return lambda x, k: dd.delta_derivative(pair, x, k, precision)
    raise ValueError(f"unknown target {target!r}; expected 'theta' or 'delta'")


def check_alternating_signs(target, pair, interval=None, k_max=DEFAULT_K_MAX,
                            grid_points=DEFAULT_GRID, precision=None) -> CMCertificate:
    """Certify expected_sign * (-1)^k f^(k) >= -eps * max(1, |f^(k)|) on a grid.

    ``target`` is ``"theta"`` or ``"delta"``.  The expected sign is +1 for
    |t-s| < 1 and -1 for |t-s| > 1; pairs within the critical band around
    |t-s| = 1 produce an ``indeterminate`` certificate.
    """
    pair = pair if isinstance(pair, ShiftPair) else ShiftPair(*pair)
    precision = resolve(precision)
    if interval is None:
        interval = (-pair.alpha + 0.1, 50.0)
    lo, hi = interval
    if not lo > -pair.alpha:
        raise dd.DomainError(f"interval {interval} leaves (-alpha, inf) for {pair}")
    dd._check_order(k_max)
    f = _evaluator(target, pair, precision)
    eps = sign_tolerance(precision)
    sign = pair.expected_sign or 1
    grid = geometric_grid(lo, hi, grid_points, pair.alpha)

    worst = [math.inf] * (k_max + 1)
    worst_x = [None] * (k_max + 1)
    for x in grid:
        xr = to_real(x, precision)
        for k in range(k_max + 1):
            val = f(xr, k)
            m = float(sign * (-1) ** k * val / max(1, abs(val)))
            if m < worst[k]:
                worst[k], worst_x[k] = m, x
    order_pass = [w >= -eps for w in worst]
    if pair.regime is Regime.CRITICAL:
        verdict = "indeterminate"
    else:
        verdict = "pass" if all(order_pass) else "fail"
    return CMCertificate(
        function_id=target, pair=(pair.s, pair.t), interval=(float(lo), float(hi)),
        grid_points=grid_points, k_max=k_max, expected_sign=pair.expected_sign,
        worst_margin=worst, order_pass=order_pass, verdict=verdict,
        precision=str(precision), worst_x=worst_x,
    )


@dataclass
class StepIdentityReport:
    pair: tuple
    samples: int
    lambda_residual: float
    theta_residual: float
    decay_values: list
    lambda_step_is_zero: bool
    tolerance: float
    passed: bool

    def to_dict(self):
        return asdict(self)


def check_step_identities(pair, sample_count=100, seed=0, x_span=30.0,
                          tolerance=1e-10, decay_orders=4, precision=None):
    """Check the two telescoping identities and the decay of theta^(k).

    Lambda residuals are absolute; theta residuals are relative to the
    larger side, except at |t-s| = 1 where both sides vanish identically and
    the residual is absolute.  Samples are x in (-alpha + 0.1, -alpha + x_span).
    """
    pair = pair if isinstance(pair, ShiftPair) else ShiftPair(*pair)
    precision = resolve(precision)
    if pair.coincident:
        raise ValueError(f"step identities need s != t, got {pair}")
    rng = np.random.default_rng(seed)
    xs = -pair.alpha + 0.1 + rng.random(sample_count) * (x_span - 0.1)
    s, t = pair.ordered(precision)
    h2 = (t - s) ** 2
    lam_res = theta_res = 0.0
    for xf in xs:
        x = to_real(float(xf), precision)
        lam = dd.lambda_fn(pair, x, precision)
        lam_next = dd.lambda_fn(pair, x + 1, precision)
        lam_res = max(lam_res, float(abs(lam - lam_next - dd.lambda_step(pair, x, precision))))
        lhs = dd.theta(pair, x, precision) - dd.theta(pair, x + 1, precision)
        rhs = lam * h2 / ((x + s) * (x + t))
        scale = 1 if pair.regime is Regime.CRITICAL else max(abs(lhs), abs(rhs))
        if scale > 0:
            theta_res = max(theta_res, float(abs(lhs - rhs) / scale))
    decay = [float(abs(dd.theta_derivative(pair, DECAY_POINT, k, precision)))
             for k in range(decay_orders + 1)]
    passed = lam_res < tolerance and theta_res < tolerance and all(v < DECAY_TOL for v in decay)
    return StepIdentityReport(
        pair=(pair.s, pair.t), samples=sample_count, lambda_residual=lam_res,
        theta_residual=theta_res, decay_values=decay,
        lambda_step_is_zero=dd.lambda_step(pair, 1, precision) == 0,
        tolerance=tolerance, passed=passed,
    )


def finite_difference_oracle(f, x, k, h, precision=None):
    """Central difference estimate of f^(k)(x), error O(h^2), for k <= 4.

    Nodes are formed in the working precision so ``x + j*h`` is not rounded
    to double before ``f`` sees it.
    """
    if k not in _FD_WEIGHTS:
        raise ValueError(f"finite differences support orders 0..4, got {k}")
    precision = resolve(precision)
    x = to_real(x, precision)
    h = to_real(h, precision)
    total = 0
    for j, w in _FD_WEIGHTS[k]:
        total += w * f(x + j * h)
    return total / h**k


def probe_phi_lcm_conjecture(pair, interval=None, k_max=3, grid_points=40,
                             digits=40) -> CMCertificate:
    """Look for sign violations of (-1)^k [ln F]^(k), k = 1..k_max.

    F is phi when |t-s| > 1 and 1/phi when |t-s| < 1.  Derivatives come from
    nested central differences of ln phi evaluated with ``digits`` digits; a
    violation is reported only when it exceeds the difference between step
    sizes h and 2h.  Order 1 is the proved monotonicity of phi.  The result
    is labelled ``conjecture-probe`` and is advisory.
    """
    pair = pair if isinstance(pair, ShiftPair) else ShiftPair(*pair)
    precision = extended(digits)
    if interval is None:
        interval = (-pair.alpha + 0.1, 50.0)
    lo, hi = interval
    orient = -1 if pair.regime is Regime.SUPER else 1  # ln(1/phi) = -ln phi
    if pair.regime is Regime.CRITICAL:
        orient = 0

    def F(y):
        return -orient * dd.log_phi(pair, y, precision) if orient else dd.log_phi(pair, y, precision)

    grid = geometric_grid(lo, hi, grid_points, pair.alpha)
    worst = [math.inf] * (k_max + 1)
    worst_x = [None] * (k_max + 1)
    worst[0] = 0.0  # ln F has no sign requirement
    for x in grid:
        step = 1e-3 * (x + pair.alpha)
        for k in range(1, k_max + 1):
            v1 = finite_difference_oracle(F, x, k, step, precision)
            v2 = finite_difference_oracle(F, x, k, 2 * step, precision)
            err = abs(v1 - v2)
            m = float(((-1) ** k * v1 + 3 * err) / max(abs(v1), 1e-300))
            if m < worst[k]:
                worst[k], worst_x[k] = m, x
    order_pass = [w >= 0 for w in worst]
    if orient == 0:
        verdict = "indeterminate"
    else:
        verdict = "pass" if all(order_pass) else "fail"
    return CMCertificate(
        function_id="log_phi", pair=(pair.s, pair.t), interval=(float(lo), float(hi)),
        grid_points=grid_points, k_max=k_max, expected_sign=pair.expected_sign,
        worst_margin=worst, order_pass=order_pass, verdict=verdict,
        kind="conjecture-probe", precision=str(precision), worst_x=worst_x,
    )
