"""Working-precision selection.

Two modes exist: ``double`` evaluates with Python floats, ``extended:<d>``
evaluates with a private mpmath context carrying ``d`` significant digits.
Contexts are cached per digit count and never mutated after creation, so
values computed under a given :class:`Precision` are deterministic.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

ENV_VAR = "PSICM_PRECISION"
MIN_EXTENDED_DIGITS = 30
MAX_EXTENDED_DIGITS = 200


class PrecisionError(ValueError):
    """Raised for malformed or unsupported precision specifications."""


class FloatContext:
    """Minimal stand-in for an mpmath context backed by ``float``."""

    digits = 15
    eps = 2.0**-52
    pi = math.pi
    inf = math.inf

    @staticmethod
    def convert(x):
        if isinstance(x, Fraction):
            return x.numerator / x.denominator
        return float(x)

    mpf = convert

    log = staticmethod(math.log)
    log1p = staticmethod(math.log1p)
    exp = staticmethod(math.exp)
    expm1 = staticmethod(math.expm1)
    sqrt = staticmethod(math.sqrt)
    fabs = staticmethod(abs)

    @staticmethod
    def isfinite(x):
        return math.isfinite(x)


FLOAT = FloatContext()


@dataclass(frozen=True)
class Precision:
    mode: str = "double"
    digits: int = 15

    def __post_init__(self):
        if self.mode not in ("double", "extended"):
            raise PrecisionError(f"unknown precision mode {self.mode!r}")
        if self.mode == "extended" and not (
            MIN_EXTENDED_DIGITS <= self.digits <= MAX_EXTENDED_DIGITS
        ):
            raise PrecisionError(
                f"extended precision needs {MIN_EXTENDED_DIGITS}..{MAX_EXTENDED_DIGITS}"
                f" digits, got {self.digits}"
            )

    @classmethod
    def parse(cls, text: str) -> "Precision":
        text = text.strip().lower()
        if text in ("double", "fast"):
            return DOUBLE
        if text == "extended":
            return cls("extended", MIN_EXTENDED_DIGITS)
        if text.startswith("extended:"):
            try:
                digits = int(text.split(":", 1)[1])
            except ValueError:
                raise PrecisionError(f"bad digit count in {text!r}") from None
            return cls("extended", digits)
        raise PrecisionError(f"cannot parse precision {text!r}")

    @property
    def extended(self) -> bool:
        return self.mode == "extended"

    @property
    def ctx(self):
        if self.mode == "double":
            return FLOAT
        return _mp_context(self.digits)

    @property
    def eps(self):
        """Unit roundoff of the working arithmetic, as a float."""
        return 2.0**-52 if self.mode == "double" else 10.0 ** (1 - self.digits)

    def at_least(self, digits: int) -> "Precision":
        """This precision, or ``extended:digits`` if that is finer."""
        if self.extended and self.digits >= digits:
            return self
        return Precision("extended", digits)

    def __str__(self):
        return "double" if self.mode == "double" else f"extended:{self.digits}"


DOUBLE = Precision()


def extended(digits: int = MIN_EXTENDED_DIGITS) -> Precision:
    return Precision("extended", digits)


# mpmath's quad temporarily raises the working precision of its context, so
# extended-mode quadrature is serialized per process.
quad_lock = threading.Lock()


@lru_cache(maxsize=None)
def _mp_context(digits: int):
    ctx = mpmath.MPContext()
    ctx.dps = digits
    ctx.digits = digits
    return ctx


def default_precision() -> Precision:
    """Precision named by ``$PSICM_PRECISION``, falling back to double."""
    value = os.environ.get(ENV_VAR)
    if not value:
        return DOUBLE
    return Precision.parse(value)


def resolve(precision) -> Precision:
    if precision is None:
        return default_precision()
    if isinstance(precision, str):
        return Precision.parse(precision)
    return precision


def to_real(x, precision: Precision):
    """Convert ``x`` (int, float, str, Fraction or mpf) into the working type."""
    ctx = precision.ctx
    if isinstance(x, Fraction):
        if ctx is FLOAT:
            return float(x)
        return ctx.mpf(x.numerator) / x.denominator
    if ctx is FLOAT:
        return float(x)
    return ctx.convert(x)
