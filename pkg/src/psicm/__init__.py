"""Divided differences of the psi and polygamma functions, and numerical
verification of the monotonicity and inequality results built on them."""

__version__ = "0.1.0"

from .divided_diff import (  # noqa: E402
    AnchoredPair,
    Regime,
    ShiftPair,
    delta,
    g_f_eval,
    lambda_fn,
    phi,
    q_ratio,
    theta,
    theta_derivative,
    z_eval,
)
from .precision import DOUBLE, Precision, extended  # noqa: E402
from .special import (  # noqa: E402
    digamma,
    find_psi_root,
    ln_gamma,
    polygamma,
    quadrature_oracle,
)
