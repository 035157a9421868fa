"""Metric, complex structures and symplectic forms on the configuration space.

Every bilinear form here is evaluated from its own integral of traced wedge
products, so the compatibility relations between them (``Omega = g(., I.)``
and so on) are genuine identities to check rather than definitions.

For constant coefficients ``X = (a, c)``, ``Y = (b, d)`` on a surface of
area ``S`` the forms reduce to::

    g     = 4 S Re[tr(a b*) + tr(c d*)]
    Omega = 4 S Im[tr(a b*) + tr(c d*)]
    Q1    = 4 S Im[tr(a d) - tr(c b)]
    Q2    = 4 S Re[tr(c b) - tr(a d)]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .lattice import (Configuration, OneForm, TangentVector, _check_same,
                      integrate_2form, integrate_wedge, star1, tilde_star2)


def rel_err(a, b) -> float:
    """``|a - b| / max(|a|, |b|)``, zero when both vanish."""
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return float(abs(a - b) / scale)


def _pair(X: TangentVector, Y: TangentVector):
    _check_same(X.grid, Y.grid)


# ----------------------------------------------------------------------------
# metric


def metric_g_complex(X: TangentVector, Y: TangentVector) -> complex:
    """Metric before discarding the (spurious) imaginary part."""
    _pair(X, Y)
    t1 = integrate_wedge(X.alpha01(), Y.alpha01().H)
    t2 = integrate_wedge(X.gamma10(), Y.gamma10().H)
    return complex(2 * t1.imag - 2 * t2.imag)


def metric_g(X: TangentVector, Y: TangentVector) -> float:
    """``2 Im int Tr(alpha01 ^ beta01*) - 2 Im int Tr(gamma10 ^ delta10*)``."""
    return metric_g_complex(X, Y).real


def metric_hodge(X: TangentVector, Y: TangentVector) -> float:
    """Same metric written with the Hodge-type stars.

    ``-int Tr(alpha ^ *1 beta) - 2 Im int Tr(gamma10 ^ ~*2 delta10)``.
    """
    _pair(X, Y)
    t1 = integrate_wedge(X.alpha(), star1(Y.alpha()))
    t2 = integrate_wedge(X.gamma10(), tilde_star2(Y.gamma10()))
    return float((-t1).real - 2 * t2.imag)


def metric_alpha_hodge(X: TangentVector, Y: TangentVector) -> complex:
    """Connection part alone: ``-int Tr(alpha ^ *1 beta)``."""
    return -integrate_wedge(X.alpha(), star1(Y.alpha()))


def metric_alpha_im(X: TangentVector, Y: TangentVector) -> float:
    """Connection part alone: ``2 Im int Tr(alpha01 ^ beta01*)``."""
    return 2 * integrate_wedge(X.alpha01(), Y.alpha01().H).imag


def hitchin_g1(X: TangentVector) -> complex:
    """Hitchin's quadratic form ``2i int Tr(alpha01* ^ alpha01) + 2i int Tr(gamma10 ^ gamma10*)``."""
    a01 = X.alpha01()
    g10 = X.gamma10()
    return 2j * integrate_wedge(a01.H, a01) + 2j * integrate_wedge(g10, g10.H)


# ----------------------------------------------------------------------------
# complex structures


def apply_I(X: TangentVector) -> TangentVector:
    return TangentVector(1j * X.alpha_zbar, 1j * X.gamma_z)


def apply_J(X: TangentVector) -> TangentVector:
    # alpha01 -> -i gamma01, gamma10 -> i alpha10 with the extensions substituted
    return TangentVector(1j * X.gamma_z.H, -1j * X.alpha_zbar.H)


def apply_K(X: TangentVector) -> TangentVector:
    return TangentVector(-X.gamma_z.H, X.alpha_zbar.H)


# ----------------------------------------------------------------------------
# symplectic forms


def omega_complex(X: TangentVector, Y: TangentVector) -> complex:
    _pair(X, Y)
    return integrate_wedge(X.alpha(), Y.alpha()) - integrate_wedge(X.gamma(), Y.gamma())


def omega(X: TangentVector, Y: TangentVector) -> float:
    """``int Tr(alpha ^ beta) - int Tr(gamma ^ delta)``."""
    return omega_complex(X, Y).real


def _tilde(form_10: OneForm, form_01: OneForm) -> OneForm:
    return 1j * (form_10 - form_01)


def q1_complex(X: TangentVector, Y: TangentVector) -> complex:
    _pair(X, Y)
    return -(integrate_wedge(X.alpha(), Y.gamma()) + integrate_wedge(X.gamma(), Y.alpha()))


def q1(X: TangentVector, Y: TangentVector) -> float:
    """``-[int Tr(alpha ^ delta) + int Tr(gamma ^ beta)]``."""
    return q1_complex(X, Y).real


def q2_complex(X: TangentVector, Y: TangentVector) -> complex:
    _pair(X, Y)
    delta_t = _tilde(Y.gamma10(), Y.gamma01())
    gamma_t = _tilde(X.gamma10(), X.gamma01())
    return integrate_wedge(X.alpha(), delta_t) + integrate_wedge(gamma_t, Y.alpha())


def q2(X: TangentVector, Y: TangentVector) -> float:
    """``int Tr(alpha ^ delta~ + gamma~ ^ beta)`` with ``delta~ = i(delta10 - delta01)``."""
    return q2_complex(X, Y).real


def q_complex(X: TangentVector, Y: TangentVector) -> complex:
    """``2 Tr int (delta10 ^ alpha01 - gamma10 ^ beta01)``, evaluated on its own."""
    _pair(X, Y)
    return 2 * (integrate_wedge(Y.gamma10(), X.alpha01()) - integrate_wedge(X.gamma10(), Y.alpha01()))


# ----------------------------------------------------------------------------
# potentials


def theta1_complex(c: Configuration, X: TangentVector) -> complex:
    _check_same(c.grid, X.grid)
    return -integrate_wedge(c.higgs.form(), X.alpha())


def theta1(c: Configuration, X: TangentVector) -> float:
    """``-int Tr(Phi ^ alpha)``."""
    return theta1_complex(c, X).real


def theta2_complex(c: Configuration, X: TangentVector) -> complex:
    # i dz^dzbar Tr(phi_zbar alpha_z + phi_z alpha_zbar)
    _check_same(c.grid, X.grid)
    phi_zbar = c.higgs.phi_zbar
    alpha_z = -X.alpha_zbar.H
    integrand = (phi_zbar @ alpha_z + c.phi_z @ X.alpha_zbar).trace()
    return 1j * integrate_2form(integrand, c.grid)


def theta2(c: Configuration, X: TangentVector) -> float:
    """``int i (dz ^ dzbar) Tr(phi_zbar alpha_z + phi_z alpha_zbar)``.

    Equals ``i int Tr(Phi10 ^ alpha01 - Phi01 ^ alpha10)``; without the
    factor ``i`` that integral is purely imaginary.
    """
    return theta2_complex(c, X).real


_THETAS = {"theta1": theta1, "theta2": theta2, 1: theta1, 2: theta2}


@dataclass(frozen=True)
class DTheta:
    analytic: float
    finite_difference: float
    eps: float

    @property
    def discrepancy(self) -> float:
        return abs(self.analytic - self.finite_difference)


def dtheta(which, c: Configuration, X: TangentVector, Y: TangentVector, eps: float = None) -> DTheta:
    """Exterior derivative of a potential on constant vector fields.

    ``dtheta(X, Y) = D_X[theta(Y)] - D_Y[theta(X)]``. The analytic path uses
    linearity in the Higgs field; the finite-difference path uses central
    differences of step ``eps`` (default ``1e-4 (1 + max field norm)``).
    """
    theta = _THETAS[which]
    _check_same(c.grid, X.grid, Y.grid)

    def directional(V, W):
        # theta is linear in phi and independent of A
        moved = Configuration.from_fields(c.a_zbar, V.gamma_z)
        return theta(moved, W)

    analytic = directional(X, Y) - directional(Y, X)

    if eps is None:
        eps = 1e-4 * (1 + max(c.a_zbar.max_norm(), c.phi_z.max_norm()))

    def fd(V, W):
        return (theta(c.shifted(V, eps), W) - theta(c.shifted(V, -eps), W)) / (2 * eps)

    return DTheta(float(analytic), float(fd(X, Y) - fd(Y, X)), eps)


# ----------------------------------------------------------------------------
# dictionary and curvature values


def kw_forms(X: TangentVector, Y: TangentVector) -> Tuple[float, float, float]:
    """Physicists' ``(omega_I, omega_J, omega_K) = (-Omega, Q2, -Q1) / 2 pi``."""
    return (-omega(X, Y) / (2 * math.pi), q2(X, Y) / (2 * math.pi), -q1(X, Y) / (2 * math.pi))


def prequantum_curvatures(X: TangentVector, Y: TangentVector) -> Tuple[complex, complex, complex]:
    """``(i/pi) (Omega, Q1, Q2)`` evaluated on ``(X, Y)``."""
    s = 1j / math.pi
    return (s * omega(X, Y), s * q1(X, Y), s * q2(X, Y))


def identity4_sides(X: TangentVector, Y: TangentVector) -> Tuple[complex, complex]:
    """Both sides of ``int Tr(conj(alpha01) ^ conj(beta10)) = int Tr(alpha10 ^ beta01)``."""
    _pair(X, Y)
    lhs = integrate_wedge(X.alpha01().conj(), Y.alpha10().conj())
    rhs = integrate_wedge(X.alpha10(), Y.alpha01())
    return lhs, rhs


# ----------------------------------------------------------------------------
# report


@dataclass
class BilinearReport:
    g: float
    omega: float
    q1: float
    q2: float
    q_complex: complex
    omega123: Tuple[complex, complex, complex]
    identity_residuals: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "g": self.g,
            "omega": self.omega,
            "q1": self.q1,
            "q2": self.q2,
            "q_complex": [self.q_complex.real, self.q_complex.imag],
            "omega123": [[w.real, w.imag] for w in self.omega123],
            "identity_residuals": dict(self.identity_residuals),
        }


def bilinear_report(X: TangentVector, Y: TangentVector) -> BilinearReport:
    """Evaluate every form on ``(X, Y)`` together with their identity residuals."""
    from .family import omega123

    gc = metric_g_complex(X, Y)
    om = omega_complex(X, Y)
    a = q1_complex(X, Y)
    b = q2_complex(X, Y)
    q = q_complex(X, Y)
    w = omega123(X, Y)
    scale = max(abs(gc), abs(om), abs(a), abs(b), 1e-300)
    res = {
        "g_imag": abs(gc.imag) / scale,
        "omega_imag": abs(om.imag) / scale,
        "q1_imag": abs(a.imag) / scale,
        "q2_imag": abs(b.imag) / scale,
        "omega_vs_g_I": rel_err(om.real, metric_g(X, apply_I(Y))),
        "q1_vs_g_J": rel_err(a.real, metric_g(X, apply_J(Y))),
        "q2_vs_g_K": rel_err(b.real, metric_g(X, apply_K(Y))),
        "q_vs_q1_plus_iq2": rel_err(q, a.real + 1j * b.real),
        "omega3_vs_minus_conj_omega2": rel_err(w[2], -np.conj(w[1])),
        "g_vs_hodge": rel_err(gc.real, metric_hodge(X, Y)),
    }
    return BilinearReport(gc.real, om.real, a.real, b.real, q, w, res)
