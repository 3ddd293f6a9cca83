"""Log-gamma, digamma and polygamma functions on the positive real axis.

Every function shifts its argument upward with the unit-step recurrence
until the asymptotic (Stirling-type) series with exact Bernoulli
coefficients converges to working precision, then undoes the shift.
:func:`quadrature_oracle` evaluates the same functions from their Laplace
integral representations and shares no code with the series path.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .precision import FLOAT, Precision, resolve, to_real
from .quadrature import QuadratureError, integrate

__all__ = [
    "DomainError",
    "UnsupportedOrderError",
    "QuadratureError",
    "K_MAX_SUPPORTED",
    "bernoulli_numbers",
    "ln_gamma",
    "ln_gamma_ratio",
    "digamma",
    "polygamma",
    "polygamma_orders",
    "quadrature_oracle",
    "find_psi_root",
]

K_MAX_SUPPORTED = 16
_BERNOULLI_MAX = 60
_FACTORIAL_EXACT_MAX = 1000


class DomainError(ValueError):
    """Argument outside the positive half-line (or shifted domain)."""


class UnsupportedOrderError(ValueError):
    """Polygamma order above ``K_MAX_SUPPORTED``."""


@lru_cache(maxsize=None)
def bernoulli_numbers(m_max: int = _BERNOULLI_MAX) -> tuple[Fraction, ...]:
    """Exact B_0..B_m_max with the B_1 = -1/2 convention."""
    b = [Fraction(1)]
    for m in range(1, m_max + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * b[k]
        b.append(-acc / (m + 1))
    return tuple(b)


def _even_bernoulli():
    b = bernoulli_numbers()
    return [b[2 * k] for k in range(1, _BERNOULLI_MAX // 2 + 1)]


@lru_cache(maxsize=None)
def _lngamma_coeffs(precision: Precision):
    return tuple(
        to_real(b2k / (2 * k * (2 * k - 1)), precision)
        for k, b2k in enumerate(_even_bernoulli(), start=1)
    )


@lru_cache(maxsize=None)
def _polygamma_coeffs(n: int, precision: Precision):
    # ψ: B_2k / 2k ; ψ^(n): B_2k (2k+n-1)! / (2k)!
    out = []
    for k, b2k in enumerate(_even_bernoulli(), start=1):
        if n == 0:
            c = b2k / (2 * k)
        else:
            c = b2k * Fraction(math.factorial(2 * k + n - 1), math.factorial(2 * k))
        out.append(to_real(c, precision))
    return tuple(out)


@lru_cache(maxsize=None)
def _half_log_2pi(precision: Precision):
    ctx = precision.ctx
    return ctx.log(2 * ctx.pi) / 2


def _threshold(n: int, precision: Precision) -> float:
    return max(10.0 + n, n + 0.6 * precision.ctx.digits)


def _check_positive(x, name="x"):
    if not x > 0:
        raise DomainError(f"{name} must be positive, got {x!r}")


def _asymptotic_sum(coeffs, first, w, eps):
    """Sum c_k * first * w^(k-1), stopping at convergence or the smallest term."""
    total = 0
    p = first
    prev = math.inf
    for c in coeffs:
        term = c * p
        mag = abs(term)
        if mag >= prev:
            break
        total += term
        if mag <= eps * abs(total):
            break
        prev = mag
        p *= w
    return total


def polygamma_orders(n_max: int, x, precision=None):
    """Return ``[ψ(x), ψ'(x), ..., ψ^(n_max)(x)]`` from one shared shift."""
    precision = resolve(precision)
    if n_max < 0:
        raise ValueError("order must be non-negative")
    if n_max > K_MAX_SUPPORTED:
        raise UnsupportedOrderError(
            f"polygamma order {n_max} exceeds supported maximum {K_MAX_SUPPORTED}"
        )
    ctx = precision.ctx
    x = to_real(x, precision)
    _check_positive(x)
    eps = precision.eps / 8

    shift = max(0, math.ceil(_threshold(n_max, precision) - x))
    # power sums Σ_j (x+j)^-(p) for p = 1..n_max+1
    sums = [0] * (n_max + 2)
    for j in range(shift):
        inv = 1 / (x + j)
        pw = inv
        for p in range(1, n_max + 2):
            sums[p] += pw
            pw *= inv
    y = x + shift
    inv_y = 1 / y
    w = inv_y * inv_y

    out = []
    psi = ctx.log(y) - inv_y / 2 - _asymptotic_sum(
        _polygamma_coeffs(0, precision), w, w, eps
    )
    out.append(psi - sums[1])
    fact = 1  # (n-1)!
    inv_pow = 1  # y^-n
    for n in range(1, n_max + 1):
        inv_pow *= inv_y
        lead = fact * inv_pow + fact * n * inv_pow * inv_y / 2
        series = _asymptotic_sum(_polygamma_coeffs(n, precision), inv_pow * w, w, eps)
        val = lead + series
        if n % 2 == 0:
            val = -val
        # ψ^(n)(x) = ψ^(n)(x+m) - (-1)^n n! Σ (x+j)^-(n+1)
        rec = fact * n * sums[n + 1]
        out.append(val - rec if n % 2 == 0 else val + rec)
        fact *= n
    return out


def polygamma(n: int, x, precision=None):
    """ψ^(n)(x) for x > 0; ``n = 0`` gives the digamma function."""
    if n < 0:
        raise ValueError("order must be non-negative")
    return polygamma_orders(n, x, precision)[n]


def digamma(x, precision=None):
    return polygamma_orders(0, x, precision)[0]


def _stirling(y, precision):
    ctx = precision.ctx
    inv_y = 1 / y
    series = _asymptotic_sum(_lngamma_coeffs(precision), inv_y, inv_y * inv_y,
                             precision.eps / 8)
    return (y - 0.5) * ctx.log(y) - y + _half_log_2pi(precision) + series


def _is_small_integer(x) -> bool:
    try:
        return x == int(x) and 1 <= x <= _FACTORIAL_EXACT_MAX
    except (OverflowError, ValueError):
        return False


def ln_gamma(x, precision=None):
    """ln Γ(x) for x > 0."""
    precision = resolve(precision)
    ctx = precision.ctx
    x = to_real(x, precision)
    _check_positive(x)
    if _is_small_integer(x):
        return to_real(ctx.log(math.factorial(int(x) - 1)), precision)
    shift = max(0, math.ceil(_threshold(0, precision) - x))
    prod = 1
    for j in range(shift):
        prod *= x + j
    return _stirling(x + shift, precision) - ctx.log(prod)


def ln_gamma_ratio(x, s, t, precision=None):
    """ln Γ(x+t) - ln Γ(x+s), evaluated without forming either term.

    The difference is assembled from ``log1p`` pieces, so it keeps full
    relative accuracy even when x is large compared with |t - s|.
    """
    precision = resolve(precision)
    ctx = precision.ctx
    x, s, t = (to_real(v, precision) for v in (x, s, t))
    if t < s:
        return -ln_gamma_ratio(x, t, s, precision)
    a = x + s
    _check_positive(a, "x + min(s, t)")
    delta = t - s
    if delta == 0:
        return to_real(0, precision)
    shift = max(0, math.ceil(_threshold(0, precision) - a))
    corr = 0
    for j in range(shift):
        corr += ctx.log1p(delta / (a + j))
    A = a + shift
    B = A + delta
    inv_a, inv_b = 1 / A, 1 / B
    eps = precision.eps / 8
    coeffs = _lngamma_coeffs(precision)
    series = _asymptotic_sum(coeffs, inv_b, inv_b * inv_b, eps) - _asymptotic_sum(
        coeffs, inv_a, inv_a * inv_a, eps
    )
    main = delta * ctx.log(A) + (B - 0.5) * ctx.log1p(delta / A) - delta
    return main + series - corr


# -- integral-representation oracle ----------------------------------------

def _digamma_kernel(u, ctx):
    # 1/u - 1/(1 - e^-u), with its removable singularity at u = 0
    if u < 1e-4:
        u2 = u * u
        return -0.5 - u / 12 + u * u2 / 720 - u * u2 * u2 / 30240
    return 1 / u + 1 / ctx.expm1(-u)


def _tail_bound(n: int, x: float, U: float) -> float:
    """Upper bound of the integrand's mass on [U, inf)."""
    if n == 0:
        return math.exp(-x * U) / x
    xu = x * U
    term, acc = 1.0, 1.0
    for j in range(1, n + 1):
        term *= xu / j
        acc += term
    return math.factorial(n) * math.exp(-xu) * acc / x ** (n + 1) / -math.expm1(-U)


def quadrature_oracle(n: int, x, precision=None, abs_tol=None, rel_tol=None):
    """ψ^(n)(x) by quadrature of its Laplace-type integral representation.

    Meant as an independent test oracle.  The semi-infinite range is cut at
    a point U where an analytic tail bound falls below 1e-16 of the partial
    integral; the bound is added to the reported error budget.  The budget
    is ``abs_tol`` or ``rel_tol * |value|``, whichever is larger; in double
    mode the defaults are 1e-12 and 1e-13.
    """
    precision = resolve(precision)
    if n < 0:
        raise ValueError("order must be non-negative")
    ctx = precision.ctx
    xr = to_real(x, precision)
    _check_positive(xr)
    xf = float(xr)
    if abs_tol is None:
        abs_tol = 1e-12 if not precision.extended else 10.0 ** (-precision.digits + 5)
    if rel_tol is None:
        rel_tol = 1e-13 if not precision.extended else 10.0 ** (-precision.digits + 5)

    if n == 0:
        def integrand(u):
            return _digamma_kernel(u, ctx) * ctx.exp(-xr * u)
    else:
        def integrand(u):
            if u == 0:
                return 1.0 if n == 1 else 0.0
            return u**n / -ctx.expm1(-u) * ctx.exp(-xr * u)

    rel_target = precision.eps / 16
    U = (40.0 + 2 * n) / xf
    scale_guess = 0.5 / xf if n == 0 else math.factorial(n - 1) / xf**n
    while _tail_bound(n, xf, U) > rel_target * scale_guess:
        U *= 1.5
    peak = max(n, 1) / xf
    points = [p for p in (peak / 4, peak, 4 * peak, 16 * peak) if p < U]
    value, err = integrate(integrand, 0, U, precision, abs_tol=abs_tol,
                           points=points, rel_tol=rel_tol)
    err += _tail_bound(n, xf, U)
    if err > max(abs_tol, rel_tol * abs(float(value))):
        raise QuadratureError(
            f"oracle for order {n} at x={xf} reached error {err:.3g}",
            value=value, estimate=err,
        )
    if n == 0:
        return ctx.log(xr) + value
    return value if n % 2 == 1 else -value


# -- root of ψ ------------------------------------------------------------

def find_psi_root(precision=None):
    """The unique positive zero x* ≈ 1.4616 of the digamma function.

    Bisection on the analytic bracket (1, 2) down to width 1e-4, then
    Newton steps with ψ'.
    """
    precision = resolve(precision)
    return _psi_root(precision)


@lru_cache(maxsize=None)
def _psi_root(precision: Precision):
    lo, hi = to_real(1, precision), to_real(2, precision)
    while hi - lo > 1e-4:
        mid = (lo + hi) / 2
        if digamma(mid, precision) < 0:
            lo = mid
        else:
            hi = mid
    x = (lo + hi) / 2
    tol = 4 * precision.eps
    for _ in range(60):
        psi, psi1 = polygamma_orders(1, x, precision)
        step = psi / psi1
        x -= step
        if abs(step) <= tol * x:
            break
    # one last polish so the residual reflects the converged iterate
    psi, psi1 = polygamma_orders(1, x, precision)
    if precision.ctx is FLOAT and psi != 0:
        x -= psi / psi1
    return x
