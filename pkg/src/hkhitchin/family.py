"""The circle of complex connections ``B_lambda = A + lambda Phi10 + lambda^-1 Phi10*``.

With ``r1``, ``r2`` the Hitchin residuals (see :mod:`hkhitchin.hitchin`), the
``dz ^ dzbar`` coefficient of the curvature of ``B_lambda`` has the exact
Laurent form::

    F(B_lambda) = r1 - lambda r2 + lambda^-1 r2*

because the ``dz ^ dzbar`` coefficient of ``d''_A Phi10`` is ``-r2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .hitchin import residuals
from .hk import omega
from .lattice import (Configuration, MatrixField, OneForm, TangentVector,
                      _check_same, comm, d, dbar, integrate_wedge)

UNIT_TOL = 1e-12


def _check_unit(lam) -> complex:
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > UNIT_TOL:
        raise ValueError(f"|lambda| must be 1, got {abs(lam)!r}")
    return lam


def roots_of_unity(K: int) -> List[complex]:
    return [cmath.exp(2j * math.pi * k / K) for k in range(K)]


@dataclass(frozen=True)
class ComplexConnection:
    """``b_z dz + b_zbar dzbar`` with no Hermiticity constraint."""

    b_z: MatrixField
    b_zbar: MatrixField

    def __post_init__(self):
        _check_same(self.b_z.grid, self.b_zbar.grid)

    def curvature(self) -> MatrixField:
        return d(self.b_zbar) - dbar(self.b_z) + comm(self.b_z, self.b_zbar)


def b_lambda(c: Configuration, lam) -> ComplexConnection:
    lam = _check_unit(lam)
    return ComplexConnection(c.a_z + lam * c.phi_z, c.a_zbar + (1 / lam) * c.phi_z.H)


def flatness(c: Configuration, lam) -> MatrixField:
    """``dz ^ dzbar`` coefficient of ``F(B_lambda)``."""
    return b_lambda(c, lam).curvature()


def laurent_prediction(c: Configuration, lam) -> MatrixField:
    """``r1 - lambda r2 + lambda^-1 r2*`` from independently computed residuals."""
    lam = _check_unit(lam)
    r = residuals(c)
    return r.r1 - lam * r.r2 + (1 / lam) * r.r2.H


@dataclass
class LambdaScanReport:
    lambda_values: List[complex]
    flatness_norms: List[float]
    decomposition_residuals: List[float]

    @property
    def K(self) -> int:
        return len(self.lambda_values)

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "lambdas": [[lam.real, lam.imag] for lam in self.lambda_values],
            "flatness_norms": list(self.flatness_norms),
            "decomposition_residuals": list(self.decomposition_residuals),
        }


def flatness_scan(c: Configuration, K: int = 16) -> LambdaScanReport:
    """L2 norm of ``F(B_lambda)`` at the ``K``-th roots of unity.

    Decomposition residuals are the max per-site Frobenius distance between
    the curvature and its Laurent prediction.
    """
    if K < 4:
        raise ValueError("K must be at least 4")
    r = residuals(c)
    lams, norms, dec = [], [], []
    for lam in roots_of_unity(K):
        F = flatness(c, lam)
        pred = r.r1 - lam * r.r2 + (1 / lam) * r.r2.H
        lams.append(lam)
        norms.append(F.l2_norm())
        dec.append((F - pred).max_norm())
    return LambdaScanReport(lams, norms, dec)


def laurent_coefficients(lams: Sequence[complex], values):
    """Solve ``v = c0 + c1 lambda + c_-1 lambda^-1`` from three samples.

    ``values`` is a sequence of three scalars or three arrays of a common
    shape; returns ``(c0, c1, c_m1)`` in the same form.
    """
    if len(lams) != 3 or len(values) != 3:
        raise ValueError("exactly three samples are needed")
    V = np.array([[1.0, lam, 1.0 / lam] for lam in lams], dtype=np.complex128)
    vals = [np.asarray(v, dtype=np.complex128) for v in values]
    shape = vals[0].shape
    rhs = np.stack([v.ravel() for v in vals])
    coef = np.linalg.solve(V, rhs)
    return tuple(coef[i].reshape(shape) if shape else complex(coef[i][0]) for i in range(3))


def laurent_eval(coeffs, lam):
    c0, c1, cm1 = coeffs
    return c0 + c1 * lam + cm1 / lam


# ----------------------------------------------------------------------------
# tangent-level curvature family


def tilde_lift(X: TangentVector, lam) -> OneForm:
    """``alpha10 + alpha01 + lambda gamma10 - lambda^-1 gamma01``."""
    lam = _check_unit(lam)
    return OneForm(-X.alpha_zbar.H + lam * X.gamma_z, X.alpha_zbar + (1 / lam) * X.gamma_z.H)


def tilde_lift_dlambda(X: TangentVector, lam) -> OneForm:
    """Derivative of :func:`tilde_lift` with respect to ``lambda``."""
    lam = complex(lam)
    return OneForm(X.gamma_z, (-1 / lam ** 2) * X.gamma_z.H)


def omega123(X: TangentVector, Y: TangentVector) -> Tuple[complex, complex, complex]:
    """``(omega1, omega2, omega3)``, each from its own integral."""
    _check_same(X.grid, Y.grid)
    w1 = complex(omega(X, Y))
    w2 = integrate_wedge(X.alpha01(), Y.gamma10()) + integrate_wedge(X.gamma10(), Y.alpha01())
    w3 = -(integrate_wedge(X.alpha10(), Y.gamma01()) + integrate_wedge(X.gamma01(), Y.alpha10()))
    return (w1, w2, w3)


def f_lambda(X: TangentVector, Y: TangentVector, lam) -> complex:
    """``(i / 2 pi) int Tr(alpha~ ^ beta~)`` from the lifted forms."""
    _check_same(X.grid, Y.grid)
    return 1j / (2 * math.pi) * integrate_wedge(tilde_lift(X, lam), tilde_lift(Y, lam))


def tau_curvature(X: TangentVector, Y: TangentVector) -> complex:
    """Curvature of ``L_i (x) L_-i``."""
    return f_lambda(X, Y, 1j) + f_lambda(X, Y, -1j)


def trivial_bundle_curvatures(X: TangentVector, Y: TangentVector) -> Tuple[complex, complex]:
    """Curvatures of ``L_i^2 (x) tau^-1`` and ``L_1^2 (x) tau^-1``."""
    tau = tau_curvature(X, Y)
    return (2 * f_lambda(X, Y, 1j) - tau, 2 * f_lambda(X, Y, 1.0) - tau)
