"""Adaptive quadrature on finite intervals with an enforced error budget."""

from __future__ import annotations

import warnings

from scipy import integrate as _integrate

from .precision import DOUBLE, Precision, quad_lock, to_real


class QuadratureError(ArithmeticError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(self, message, value=None, estimate=None):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


def integrate(f, a, b, precision: Precision = DOUBLE, abs_tol=1e-13, points=(),
              rel_tol=0.0):
    """Integrate ``f`` over ``[a, b]`` and return ``(value, error_estimate)``.

    Double mode runs QUADPACK's adaptive Gauss-Kronrod scheme; extended mode
    runs mpmath's tanh-sinh rule in the working context.  ``points`` are
    interior breakpoints.  Raises :class:`QuadratureError` when the error
    estimate exceeds both ``abs_tol`` and ``rel_tol * |value|``.
    """
    if a == b:
        return to_real(0, precision), 0.0
    if not precision.extended:
        pts = sorted(float(p) for p in points if a < p < b) or None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", _integrate.IntegrationWarning)
            value, err = _integrate.quad(
                f, float(a), float(b), epsabs=abs_tol / 10, epsrel=1e-14,
                limit=400, points=pts,
            )
    else:
        ctx = precision.ctx
        lo, hi = (a, b) if a < b else (b, a)
        nodes = [to_real(lo, precision)]
        nodes += [to_real(p, precision) for p in sorted(points) if lo < p < hi]
        nodes.append(to_real(hi, precision))
        with quad_lock:
            value, err = ctx.quad(f, nodes, error=True)
        if a > b:
            value = -value
        err = float(err)
    if not err <= max(abs_tol, rel_tol * abs(float(value))):
        raise QuadratureError(
            f"quadrature on [{float(a)}, {float(b)}] reached error {err:.3g}"
            f" > {abs_tol:.3g}",
            value=value, estimate=err,
        )
    return value, err
