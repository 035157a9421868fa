"""Self-duality residuals, the least-squares energy and its gradient flow.

Residual conventions:

* ``r1 = F_c + [phi_z, phi_z*]`` is the ``dz ^ dzbar`` coefficient of
  ``F(A) + [Phi10, Phi10*]``. It is Hermitian per site; the corresponding
  ``dx ^ dy`` coefficient ``-2i r1`` is anti-Hermitian.
* ``r2 = dbar(phi_z) + [a_zbar, phi_z]`` is the coefficient of
  ``d''_A Phi10`` on ``dzbar ^ dz``; on ``dz ^ dzbar`` it carries a minus sign.
  That sign only enters the Laurent expansion in :mod:`hkhitchin.family`.

Adjoints below are taken with respect to the real Euclidean product
``<U, V> = Re sum_sites tr(U* V)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
import scipy.fft

from .lattice import (Configuration, MatrixField, TangentVector, _check_same,
                      comm, curvature, d, dbar, pairwise_sum)

log = logging.getLogger(__name__)


DEFAULT_SIGMA = 0.0


class NonFiniteFieldError(ValueError):
    """Raised when a configuration contains NaN or Inf."""


class CGNotConvergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class Residuals:
    r1: MatrixField
    r2: MatrixField

    @property
    def norms(self) -> Tuple[float, float]:
        return (self.r1.l2_norm(), self.r2.l2_norm())


def residuals(c: Configuration) -> Residuals:
    a, phi = c.a_zbar, c.phi_z
    r1 = curvature(c.conn) + comm(phi, phi.H)
    r2 = dbar(phi) + comm(a, phi)
    return Residuals(r1, r2)


def energy(c: Configuration) -> float:
    r = residuals(c)
    return r.r1.l2_norm_sq() + r.r2.l2_norm_sq()


def linearized_residuals(c: Configuration, X: TangentVector) -> Tuple[MatrixField, MatrixField]:
    """Directional derivative of ``(r1, r2)`` at ``c`` along ``X``."""
    _check_same(c.grid, X.grid)
    a, a_z, phi = c.a_zbar, c.a_z, c.phi_z
    al, ga = X.alpha_zbar, X.gamma_z
    al_z = -al.H
    dr1 = (d(al) - dbar(al_z) + comm(al_z, a) + comm(a_z, al)
           + comm(ga, phi.H) + comm(phi, ga.H))
    dr2 = dbar(ga) + comm(al, phi) + comm(a, ga)
    return dr1, dr2


def linearized_adjoint(c: Configuration, R1: MatrixField, R2: MatrixField) -> TangentVector:
    """Euclidean adjoint of :func:`linearized_residuals` applied to ``(R1, R2)``."""
    a, phi = c.a_zbar, c.phi_z
    ga = (-dbar(R1) - d(R1).H - comm(a, R1.H) - comm(a, R1) + comm(R2, phi.H))
    gp = (comm(R1, phi) + comm(R1.H, phi) - d(R2) + comm(a.H, R2))
    return TangentVector(ga, gp)


def energy_gradient(c: Configuration) -> Tuple[MatrixField, MatrixField]:
    """Gradient of :func:`energy` in the real and imaginary parts of every entry.

    Returned as complex fields ``dE/dRe + i dE/dIm`` for ``(a_zbar, phi_z)``.
    """
    r = residuals(c)
    g = linearized_adjoint(c, r.r1, r.r2)
    w = 2 * c.grid.cell_area
    return g.alpha_zbar * w, g.gamma_z * w


def _real_dot(u: np.ndarray, v: np.ndarray) -> float:
    return float(pairwise_sum((np.conj(u) * v).real))


# ----------------------------------------------------------------------------
# gradient flow


@dataclass
class SolveRecord:
    iteration: int
    energy: float
    r1_norm: float
    r2_norm: float
    step: float

    def to_dict(self) -> dict:
        return {"iteration": self.iteration, "energy": self.energy,
                "r1_norm": self.r1_norm, "r2_norm": self.r2_norm, "step": self.step}


@dataclass
class SolveTrace:
    records: List[SolveRecord] = field(default_factory=list)
    status: str = "max_iters"

    @property
    def energies(self) -> List[float]:
        return [r.energy for r in self.records]

    @property
    def iterations(self) -> int:
        return self.records[-1].iteration if self.records else 0

    @property
    def final_energy(self) -> float:
        return self.records[-1].energy

    def jsonl_lines(self) -> List[dict]:
        return [r.to_dict() for r in self.records]


def sobolev_smooth(f: MatrixField, sigma: float) -> MatrixField:
    """Apply ``(1 - sigma Laplacian)^-1`` mode by mode."""
    if sigma == 0:
        return f
    kx, ky = f.grid.wavenumbers()
    mult = 1.0 / (1.0 + sigma * (kx ** 2 + ky ** 2))
    fh = scipy.fft.fft2(f.data, axes=(0, 1))
    return MatrixField(f.grid, scipy.fft.ifft2(fh * mult[:, :, None, None], axes=(0, 1)))


def solve(c0: Configuration, max_iters: int = 5000, tol: float = 1e-16,
          step0: float = 1e-3, armijo: float = 1e-4, grow: float = 2.0,
          sigma: float = None):
    """Minimize :func:`energy` by gradient descent with Armijo backtracking.

    Steps follow the L2 gradient (the raw gradient divided by the cell
    area), which makes ``step0`` independent of the grid size. Each trial
    step starts at ``grow`` times the last accepted one and is halved until
    the Armijo condition holds. Returns ``(configuration, trace)``; the
    trace status is ``converged``, ``max_iters`` or ``diverged``.
    """
    if not c0.is_finite():
        raise NonFiniteFieldError("initial configuration contains NaN or Inf")
    w = c0.grid.cell_area
    if sigma is None:
        sigma = DEFAULT_SIGMA * c0.grid.area
    c = c0
    trace = SolveTrace()

    def record(it, cfg, E, step):
        r = residuals(cfg)
        n1, n2 = r.norms
        trace.records.append(SolveRecord(it, E, n1, n2, step))

    E = energy(c)
    record(0, c, E, 0.0)
    if E <= tol:
        trace.status = "converged"
        return c, trace

    step = step0
    min_step = 1e-12 * step0
    for it in range(1, max_iters + 1):
        ga, gp = energy_gradient(c)
        pa, pp = sobolev_smooth(ga, sigma), sobolev_smooth(gp, sigma)
        direction = TangentVector(-pa / w, -pp / w)
        slope = -(_real_dot(ga.data, pa.data) + _real_dot(gp.data, pp.data)) / w
        while True:
            trial = c.shifted(direction, step)
            E_new = energy(trial)
            if np.isfinite(E_new) and E_new <= E + armijo * step * slope:
                break
            step *= 0.5
            if step < min_step:
                trace.status = "diverged"
                log.warning("line search failed at iteration %d (energy %.3e)", it, E)
                return c, trace
        c, E = trial, E_new
        record(it, c, E, step)
        if E <= tol:
            trace.status = "converged"
            return c, trace
        step *= grow
    trace.status = "max_iters"
    return c, trace


# ----------------------------------------------------------------------------
# gauge orbit


def _anti_hermitian_part(m: MatrixField) -> MatrixField:
    return 0.5 * (m - m.H)


def orbit_tangent(psi: MatrixField, c: Configuration, tol: float = 1e-12) -> TangentVector:
    """Infinitesimal gauge direction generated by anti-Hermitian ``psi``."""
    _check_same(psi.grid, c.grid)
    if not psi.is_anti_hermitian(tol * max(1.0, psi.max_norm())):
        raise ValueError("psi must be anti-Hermitian per site")
    return _orbit(psi, c)


def _orbit(psi: MatrixField, c: Configuration) -> TangentVector:
    return TangentVector(-(dbar(psi) + comm(c.a_zbar, psi)), comm(psi, c.phi_z))


def orbit_adjoint(X: TangentVector, c: Configuration) -> MatrixField:
    """Adjoint of :func:`orbit_tangent`, projected to anti-Hermitian fields."""
    A, C = X.alpha_zbar, X.gamma_z
    raw = d(A) - comm(c.a_zbar.H, A) + comm(C, c.phi_z.H)
    return _anti_hermitian_part(raw)


def _orbit_norm_bound(c: Configuration) -> float:
    kx, ky = c.grid.wavenumbers()
    kmax = float(np.sqrt(np.max(kx ** 2) + np.max(ky ** 2)))
    return 0.5 * kmax + 2 * (c.a_zbar.max_norm() + c.phi_z.max_norm())


@dataclass(frozen=True)
class Projection:
    result: TangentVector
    psi: MatrixField
    iterations: int
    relative_residual: float


def project_orthogonal(X: TangentVector, c: Configuration, rtol: float = 1e-10,
                       max_iter: int = None, full_output: bool = False):
    """Remove the gauge-orbit component of ``X`` in the metric ``g``.

    Solves the normal equations ``T* T psi = T* X`` over anti-Hermitian
    ``psi`` by unpreconditioned conjugate gradients and returns
    ``X - T psi``.
    """
    _check_same(X.grid, c.grid)
    grid = X.grid
    if max_iter is None:
        max_iter = int(10 * math.ceil(math.sqrt(grid.N * grid.N * grid.n * grid.n)))

    def normal(p: MatrixField) -> MatrixField:
        return orbit_adjoint(_orbit(p, c), c)

    b = orbit_adjoint(X, c)
    bnorm = math.sqrt(_real_dot(b.data, b.data))
    xnorm = math.sqrt(_real_dot(X.alpha_zbar.data, X.alpha_zbar.data)
                      + _real_dot(X.gamma_z.data, X.gamma_z.data))
    # rounding floor of T* X; inputs already orthogonal stop at once
    atol = 1e-13 * _orbit_norm_bound(c) * xnorm
    psi = MatrixField.zeros(grid)
    it = 0
    rel = 0.0
    if bnorm > 0:
        r = b
        p = r
        rr = _real_dot(r.data, r.data)
        while True:
            rel = math.sqrt(rr) / bnorm
            if rel <= rtol or math.sqrt(rr) <= atol:
                break
            if it >= max_iter:
                raise CGNotConvergedError(f"CG stalled at relative residual {rel:.3e} after {it} iterations")
            Ap = normal(p)
            alpha = rr / _real_dot(p.data, Ap.data)
            psi = psi + alpha * p
            r = r - alpha * Ap
            rr_new = _real_dot(r.data, r.data)
            p = r + (rr_new / rr) * p
            rr = rr_new
            it += 1
    out = X - _orbit(psi, c)
    if full_output:
        return Projection(out, psi, it, rel)
    return out


# ----------------------------------------------------------------------------
# fixtures


def normal_higgs_fixture(grid, matrix=None) -> Configuration:
    """Exact solution ``A = 0``, ``phi_z = m`` for a constant normal matrix ``m``.

    Defaults to ``diag(1, -1, 0, ...)``.
    """
    if matrix is None:
        matrix = np.zeros((grid.n, grid.n))
        matrix[0, 0] = 1.0
        if grid.n > 1:
            matrix[1, 1] = -1.0
    m = np.asarray(matrix, dtype=np.complex128)
    if np.max(np.abs(m @ m.conj().T - m.conj().T @ m)) > 1e-14:
        raise ValueError("matrix is not normal")
    return Configuration.from_fields(MatrixField.zeros(grid), MatrixField.constant(grid, m))


def perturbed_fixture(grid, seed: int, amplitude: float = 1e-2, cutoff: int = None) -> Configuration:
    """:func:`normal_higgs_fixture` plus band-limited noise of the given amplitude.

    The cutoff defaults to ``N/8`` so that no product of three fields reaches
    the Nyquist modes, where the zeroed spectral derivative leaves the
    energy only quartic.
    """
    from .lattice import random_field

    cutoff = max(1, grid.N // 8) if cutoff is None else cutoff
    base = normal_higgs_fixture(grid)
    da = random_field(seed, grid, cutoff, scale=amplitude, stream=10)
    dp = random_field(seed, grid, cutoff, scale=amplitude, stream=11)
    return Configuration.from_fields(base.a_zbar + da, base.phi_z + dp)
