"""Divided-difference functionals of the psi and polygamma functions.

For a shift pair (s, t) with alpha = min(s, t) every function here lives on
x > -alpha:

* ``z_eval``   z(x) = [Γ(x+t)/Γ(x+s)]^(1/(t-s)) - x, with z' and z''
* ``delta``    squared divided difference of ψ plus divided difference of ψ'
* ``theta``    (t-s)^2 times ``delta``; ``theta_derivative`` gives its k-th derivative
* ``lambda_fn`` the telescoping helper whose unit step is rational
* ``phi``      z' + 1, the product of the ψ divided difference and the Γ ratio
* ``g_f_eval`` the anchored integral g and the ratio f built from it
* ``q_ratio``  f for s = t = 0 anchored at the zero of ψ

All functions are symmetric in (s, t); the pair is always evaluated in
sorted order so the symmetry holds bit for bit.  When |t - s| is below
``DELTA_LIMIT`` the s = t limit formulas are used at the midpoint.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

from .precision import Precision, resolve, to_real
from .quadrature import integrate
from .special import (
    K_MAX_SUPPORTED,
    DomainError,
    UnsupportedOrderError,
    find_psi_root,
    ln_gamma_ratio,
    polygamma_orders,
)

DELTA_LIMIT = 1e-4
EPS_REGIME = 1e-8
TAYLOR_RADIUS = 1e-3


class Regime(str, enum.Enum):
    SUB = "sub"
    SUPER = "super"
    CRITICAL = "critical"
    COINCIDENT = "coincident"


@dataclass(frozen=True)
class ShiftPair:
    s: float
    t: float

    @property
    def alpha(self):
        return min(self.s, self.t)

    @property
    def gap(self):
        return abs(self.t - self.s)

    @cached_property
    def regime(self) -> Regime:
        return classify(self.s, self.t)

    @property
    def coincident(self) -> bool:
        return self.regime is Regime.COINCIDENT

    @property
    def expected_sign(self) -> int:
        """+1 when the sign claims hold as stated, -1 when reversed, 0 at |t-s| = 1."""
        return {Regime.SUPER: -1, Regime.CRITICAL: 0}.get(self.regime, 1)

    def ordered(self, precision: Precision):
        lo, hi = sorted((self.s, self.t))
        return to_real(lo, precision), to_real(hi, precision)

    def swapped(self) -> "ShiftPair":
        return ShiftPair(self.t, self.s)

    def __str__(self):
        return f"({self.s:g}, {self.t:g})"


def classify(s, t, delta_limit=DELTA_LIMIT, eps_regime=EPS_REGIME) -> Regime:
    gap = abs(t - s)
    if gap <= delta_limit:
        return Regime.COINCIDENT
    if abs(gap - 1) <= eps_regime:
        return Regime.CRITICAL
    return Regime.SUB if gap < 1 else Regime.SUPER


@dataclass(frozen=True)
class AnchoredPair:
    pair: ShiftPair
    c: float

    def __post_init__(self):
        if not self.c > -self.pair.alpha:
            raise DomainError(f"anchor c={self.c} must exceed -alpha={-self.pair.alpha}")


class ZValues(NamedTuple):
    z: object
    z1: object
    z2: object


class GFValues(NamedTuple):
    g: object
    g1: object
    f: object


def _as_pair(pair) -> ShiftPair:
    return pair if isinstance(pair, ShiftPair) else ShiftPair(*pair)


def _setup(pair, x, precision):
    pair = _as_pair(pair)
    precision = resolve(precision)
    x = to_real(x, precision)
    if not x > -pair.alpha:
        raise DomainError(f"x={x} must exceed -alpha={-pair.alpha} for pair {pair}")
    return pair, x, precision


def _differences(pair: ShiftPair, x, order: int, precision: Precision):
    """D_m = ψ^(m)(x+t) - ψ^(m)(x+s) for m = 0..order, and t - s (sorted)."""
    s, t = pair.ordered(precision)
    upper = polygamma_orders(order, x + t, precision)
    lower = polygamma_orders(order, x + s, precision)
    return [u - v for u, v in zip(upper, lower)], t - s


def _midpoint_orders(pair: ShiftPair, x, order: int, precision: Precision):
    s, t = pair.ordered(precision)
    return polygamma_orders(order, x + (s + t) / 2, precision)


def _check_order(k: int):
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    if k + 2 > K_MAX_SUPPORTED + 1:
        raise UnsupportedOrderError(
            f"derivative order {k} needs polygamma order above {K_MAX_SUPPORTED}"
        )


# -- z, delta, theta -----------------------------------------------------------

def z_eval(pair, x, precision=None) -> ZValues:
    """z(x), z'(x) and z''(x) = (z + x) * delta(x)."""
    pair, x, precision = _setup(pair, x, precision)
    ctx = precision.ctx
    if pair.coincident:
        psi, psi1, psi2 = _midpoint_orders(pair, x, 2, precision)
        base = ctx.exp(psi)
        return ZValues(base - x, base * psi1 - 1, base * (psi1 * psi1 + psi2))
    s, t = pair.ordered(precision)
    d, h = _differences(pair, x, 1, precision)
    base = ctx.exp(ln_gamma_ratio(x, s, t, precision) / h)
    q0 = d[0] / h
    return ZValues(base - x, base * q0 - 1, base * (q0 * q0 + d[1] / h))


def delta(pair, x, precision=None):
    pair, x, precision = _setup(pair, x, precision)
    if pair.coincident:
        _, psi1, psi2 = _midpoint_orders(pair, x, 2, precision)
        return psi1 * psi1 + psi2
    d, h = _differences(pair, x, 1, precision)
    q0 = d[0] / h
    return q0 * q0 + d[1] / h


def theta(pair, x, precision=None):
    pair, x, precision = _setup(pair, x, precision)
    if pair.coincident:
        s, t = pair.ordered(precision)
        return (t - s) ** 2 * delta(pair, x, precision)
    d, h = _differences(pair, x, 1, precision)
    return d[0] * d[0] + h * d[1]


def _leibniz(seq, k):
    return sum(math.comb(k, j) * seq[j] * seq[k - j] for j in range(k + 1))


def theta_derivative(pair, x, k: int, precision=None):
    """k-th derivative of theta by the Leibniz rule over polygamma differences."""
    _check_order(k)
    pair, x, precision = _setup(pair, x, precision)
    if pair.coincident:
        s, t = pair.ordered(precision)
        return (t - s) ** 2 * delta_derivative(pair, x, k, precision)
    d, h = _differences(pair, x, k + 1, precision)
    return _leibniz(d, k) + h * d[k + 1]


def delta_derivative(pair, x, k: int, precision=None):
    """k-th derivative of delta; theta^(k) / (t-s)^2 off the coincident band."""
    _check_order(k)
    pair, x, precision = _setup(pair, x, precision)
    if pair.coincident:
        psi = _midpoint_orders(pair, x, k + 2, precision)
        shifted = psi[1:]
        return _leibniz(shifted, k) + psi[k + 2]
    d, h = _differences(pair, x, k + 1, precision)
    q = [v / h for v in d]
    return _leibniz(q, k) + q[k + 1]


def lambda_fn(pair, x, precision=None):
    """Telescoping helper: theta(x) - theta(x+1) = lambda(x) (t-s)^2 / ((x+s)(x+t))."""
    pair, x, precision = _setup(pair, x, precision)
    s, t = pair.ordered(precision)
    rational = (2 * x + s + t) / ((x + s) * (x + t))
    if pair.coincident:
        m = x + (s + t) / 2
        dd = polygamma_orders(1, m + 1, precision)[1] + polygamma_orders(1, m, precision)[1]
        return dd - rational
    h = t - s
    upper = polygamma_orders(0, x + t + 1, precision)[0] + polygamma_orders(0, x + t, precision)[0]
    lower = polygamma_orders(0, x + s + 1, precision)[0] + polygamma_orders(0, x + s, precision)[0]
    return (upper - lower) / h - rational


def lambda_step(pair, x, precision=None):
    """Closed-form unit step (1 - (s-t)^2) / ((x+s)(x+s+1)(x+t)(x+t+1))."""
    pair, x, precision = _setup(pair, x, precision)
    s, t = pair.ordered(precision)
    return (1 - (t - s) ** 2) / ((x + s) * (x + s + 1) * (x + t) * (x + t + 1))


def phi(pair, x, precision=None):
    """Divided difference of ψ times the Γ ratio to the power 1/(t-s); equals z' + 1."""
    pair, x, precision = _setup(pair, x, precision)
    ctx = precision.ctx
    if pair.coincident:
        psi, psi1 = _midpoint_orders(pair, x, 1, precision)
        return psi1 * ctx.exp(psi)
    s, t = pair.ordered(precision)
    d, h = _differences(pair, x, 0, precision)
    return d[0] / h * ctx.exp(ln_gamma_ratio(x, s, t, precision) / h)


def log_phi(pair, x, precision=None):
    pair, x, precision = _setup(pair, x, precision)
    ctx = precision.ctx
    if pair.coincident:
        psi, psi1 = _midpoint_orders(pair, x, 1, precision)
        return ctx.log(psi1) + psi
    s, t = pair.ordered(precision)
    d, h = _differences(pair, x, 0, precision)
    return ctx.log(d[0] / h) + ln_gamma_ratio(x, s, t, precision) / h


# -- anchored functionals g, f, Q ------------------------------------------------

def _anchor_args(anchored, x, precision):
    if not isinstance(anchored, AnchoredPair):
        anchored = AnchoredPair(*anchored)
    pair, x, precision = _setup(anchored.pair, x, precision)
    return anchored, pair, x, to_real(anchored.c, precision), precision


def g_derivatives(anchored, x, precision=None):
    """g'(x), g''(x), g'''(x), g''''(x); g'' is the divided difference of ψ."""
    anchored, pair, x, c, precision = _anchor_args(anchored, x, precision)
    if pair.coincident:
        s, t = pair.ordered(precision)
        m = (s + t) / 2
        psi = _midpoint_orders(pair, x, 3, precision)
        psi_c = polygamma_orders(0, c + m, precision)[0]
        return psi[0] - psi_c, psi[1], psi[2], psi[3]
    s, t = pair.ordered(precision)
    d, h = _differences(pair, x, 2, precision)
    g1 = (ln_gamma_ratio(x, s, t, precision) - ln_gamma_ratio(c, s, t, precision)) / h
    return g1, d[0] / h, d[1] / h, d[2] / h


def _g_value(pair, x, c, precision):
    s, t = pair.ordered(precision)
    if x == c:
        return to_real(0, precision)
    if pair.coincident:
        m = (s + t) / 2
        # closed form: ln Γ(x+m) - ln Γ(c+m) - ψ(c+m)(x-c)
        psi_c = polygamma_orders(0, c + m, precision)[0]
        return ln_gamma_ratio(0, c + m, x + m, precision) - psi_c * (x - c)
    h = t - s
    anchor = ln_gamma_ratio(c, s, t, precision)

    def integrand(u):
        return ln_gamma_ratio(u, s, t, precision) - anchor

    tol = 1e-13 if not precision.extended else 10.0 ** (5 - precision.digits)
    value, _ = integrate(integrand, c, x, precision, abs_tol=tol, rel_tol=tol)
    return value / h


def _f_taylor(a, b, e, dx):
    # numerator g and denominator (g'-1)e^{g'}+1 expanded through dx^4, over dx^2
    num = a / 2 + b * dx / 6 + e * dx * dx / 24
    den = (a * a / 2 + (a * b / 2 + a**3 / 3) * dx
           + (b * b / 8 + a * e / 6 + a * a * b / 2 + a**4 / 8) * dx * dx)
    return num / den


def g_f_eval(anchored, x, precision=None) -> GFValues:
    """g(x), g'(x) and f(x) = g / ((g'-1) e^{g'} + 1), with f(c) = 1/g''(c)."""
    anchored, pair, x, c, precision = _anchor_args(anchored, x, precision)
    ctx = precision.ctx
    g = _g_value(pair, x, c, precision)
    g1 = g_derivatives(anchored, x, precision)[0]
    dx = x - c
    if abs(dx) < TAYLOR_RADIUS:
        _, a, b, e = g_derivatives(anchored, c, precision)
        return GFValues(g, g1, _f_taylor(a, b, e, dx))
    return GFValues(g, g1, g / (g1 * ctx.exp(g1) - ctx.expm1(g1)))


def h_value(anchored, x, precision=None):
    """h(x) = (g' - g g'' - 1) e^{g'} + 1; f' has the sign of g' h."""
    anchored, pair, x, c, precision = _anchor_args(anchored, x, precision)
    ctx = precision.ctx
    g = _g_value(pair, x, c, precision)
    g1, g2, _, _ = g_derivatives(anchored, x, precision)
    return (g1 - g * g2 - 1) * ctx.exp(g1) + 1


def h_derivative(anchored, x, form="corrected", precision=None):
    """h'(x) in one of two forms.

    ``corrected``: -g ([g'']^2 + g''') e^{g'}, which is what differentiating h
    gives.  ``as_printed``: -g (g'' + g''')^2 e^{g'}, the variant that appears
    in the published proof.  Both are exposed so they can be compared.
    """
    anchored, pair, x, c, precision = _anchor_args(anchored, x, precision)
    ctx = precision.ctx
    g = _g_value(pair, x, c, precision)
    g1, g2, g3, _ = g_derivatives(anchored, x, precision)
    if form == "corrected":
        factor = g2 * g2 + g3
    elif form == "as_printed":
        factor = (g2 + g3) ** 2
    else:
        raise ValueError(f"unknown form {form!r}")
    return -g * factor * ctx.exp(g1)


def q_ratio(x, precision=None):
    """Q(x) = [ln Γ(x) - ln Γ(x*)] / (e^ψ(x) (ψ(x) - 1) + 1), Q(x*) = 1/ψ'(x*)."""
    precision = resolve(precision)
    xr = to_real(x, precision)
    if not xr > 0:
        raise DomainError(f"x must be positive, got {x!r}")
    anchored = AnchoredPair(ShiftPair(0, 0), find_psi_root(precision))
    return g_f_eval(anchored, xr, precision).f
