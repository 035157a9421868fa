"""Matrix-valued fields on a flat periodic surface.

Conventions used everywhere in the package:

* sites are indexed ``(iy, ix)`` in row-major order, so a field's data has
  shape ``(N, N, n, n)``;
* a matrix 1-form is stored as its coefficient pair ``(xi_z, xi_zbar)``;
* a 2-form is stored as its ``dz ^ dzbar`` coefficient, and
  ``dz ^ dzbar = -2i dx ^ dy``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
import scipy.fft

SCHEMES = ("spectral", "central2")
FLAGS = ("general", "anti_hermitian", "unitary")


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``N`` sites per side carrying ``n x n`` matrices."""

    N: int
    Lx: float = 1.0
    Ly: float = 1.0
    n: int = 2
    deriv_scheme: str = "spectral"

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 4 or (self.N & (self.N - 1)):
            raise ValueError(f"N must be a power of two >= 4, got {self.N}")
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError("period lengths must be positive")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"matrix rank must be a positive integer, got {self.n}")
        if self.deriv_scheme not in SCHEMES:
            raise ValueError(f"unknown derivative scheme {self.deriv_scheme!r}")

    @property
    def hx(self) -> float:
        return self.Lx / self.N

    @property
    def hy(self) -> float:
        return self.Ly / self.N

    @property
    def cell_area(self) -> float:
        return self.hx * self.hy

    @property
    def area(self) -> float:
        return self.Lx * self.Ly

    @property
    def shape(self) -> tuple:
        return (self.N, self.N, self.n, self.n)

    def coords(self):
        """Return ``(x, y)`` site coordinate arrays of shape ``(N, N)``."""
        x = np.arange(self.N) * self.hx
        y = np.arange(self.N) * self.hy
        xx, yy = np.meshgrid(x, y, indexing="xy")
        return xx, yy

    def wavenumbers(self):
        """Angular wavenumbers ``(kx, ky)`` broadcastable over ``(iy, ix)``.

        The Nyquist entry is zeroed so that the spectral derivative stays a
        real, antisymmetric operator.
        """
        kx = 2 * np.pi * scipy.fft.fftfreq(self.N, d=self.hx)
        ky = 2 * np.pi * scipy.fft.fftfreq(self.N, d=self.hy)
        kx[self.N // 2] = 0.0
        ky[self.N // 2] = 0.0
        return kx[None, :], ky[:, None]

    def with_scheme(self, scheme: str) -> "Grid":
        return Grid(self.N, self.Lx, self.Ly, self.n, scheme)


def pairwise_sum(values) -> complex:
    """Sum over the row-major flattening with a fixed binary tree.

    The reduction order depends only on the array size, so results are
    bitwise reproducible regardless of threading.
    """
    x = np.ravel(np.asarray(values))
    if x.size == 0:
        return x.dtype.type(0)
    while x.size > 1:
        if x.size % 2:
            x = np.concatenate([x, np.zeros(1, dtype=x.dtype)])
        x = x[0::2] + x[1::2]
    return x[0]


def _check_same(*grids):
    first = grids[0]
    for g in grids[1:]:
        if g != first:
            raise ValueError(f"grid mismatch: {first} vs {g}")
    return first


class MatrixField:
    """A complex ``n x n`` matrix at every site of a :class:`Grid`.

    Instances are immutable: the underlying array is marked read-only.
    ``*`` is scalar multiplication, ``@`` the per-site matrix product.
    """

    __slots__ = ("grid", "data")
    __array_ufunc__ = None

    def __init__(self, grid: Grid, data):
        data = np.array(data, dtype=np.complex128)
        if data.shape != grid.shape:
            raise ValueError(f"data shape {data.shape} does not match grid {grid.shape}")
        data.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixField is immutable")

    @classmethod
    def zeros(cls, grid: Grid) -> "MatrixField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def constant(cls, grid: Grid, matrix) -> "MatrixField":
        matrix = np.asarray(matrix, dtype=np.complex128)
        return cls(grid, np.broadcast_to(matrix, grid.shape))

    @classmethod
    def identity(cls, grid: Grid) -> "MatrixField":
        return cls.constant(grid, np.eye(grid.n))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "MatrixField":
        """Build a field from ``func(x, y) -> array (N, N, n, n)``."""
        x, y = grid.coords()
        return cls(grid, func(x, y))

    # arithmetic
    def _other(self, other):
        if isinstance(other, MatrixField):
            _check_same(self.grid, other.grid)
            return other.data
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return MatrixField(self.grid, self.data + o)

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return MatrixField(self.grid, self.data - o)

    def __neg__(self):
        return MatrixField(self.grid, -self.data)

    def __mul__(self, scalar):
        if isinstance(scalar, MatrixField):
            raise TypeError("use @ for the per-site matrix product")
        if np.ndim(scalar) == 2:
            # scalar field of shape (N, N)
            return MatrixField(self.grid, self.data * np.asarray(scalar)[:, :, None, None])
        return MatrixField(self.grid, self.data * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return MatrixField(self.grid, self.data / scalar)

    def __matmul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return MatrixField(self.grid, self.data @ o)

    @property
    def H(self) -> "MatrixField":
        """Per-site conjugate transpose."""
        return MatrixField(self.grid, np.conj(np.swapaxes(self.data, -1, -2)))

    @property
    def T(self) -> "MatrixField":
        """Per-site transpose (no conjugation)."""
        return MatrixField(self.grid, np.swapaxes(self.data, -1, -2))

    def conj(self) -> "MatrixField":
        """Entrywise complex conjugate (no transpose)."""
        return MatrixField(self.grid, np.conj(self.data))

    def trace(self) -> np.ndarray:
        return np.trace(self.data, axis1=-2, axis2=-1)

    def site_norms(self) -> np.ndarray:
        """Per-site Frobenius norms, shape ``(N, N)``."""
        return np.sqrt(np.sum(np.abs(self.data) ** 2, axis=(-2, -1)))

    def max_norm(self) -> float:
        return float(np.max(self.site_norms()))

    def l2_norm_sq(self) -> float:
        """Squared L2 norm with the grid quadrature weight."""
        return float(self.grid.cell_area * pairwise_sum(np.sum(np.abs(self.data) ** 2, axis=(-2, -1))))

    def l2_norm(self) -> float:
        return float(np.sqrt(self.l2_norm_sq()))

    def is_anti_hermitian(self, tol: float = 1e-12) -> bool:
        return float(np.max((self + self.H).site_norms())) <= tol

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return float(np.max((self - self.H).site_norms())) <= tol

    def is_unitary(self, tol: float = 1e-12) -> bool:
        eye = MatrixField.identity(self.grid)
        return float(np.max((self.H @ self - eye).site_norms())) <= tol

    def __repr__(self):
        return f"MatrixField(N={self.grid.N}, n={self.grid.n}, max|.|={self.max_norm():.3g})"


def comm(a: MatrixField, b: MatrixField) -> MatrixField:
    """Per-site commutator ``[a, b]``."""
    return a @ b - b @ a


# ----------------------------------------------------------------------------
# derivatives


def _spectral(f: MatrixField, multiplier) -> MatrixField:
    fh = scipy.fft.fft2(f.data, axes=(0, 1))
    return MatrixField(f.grid, scipy.fft.ifft2(fh * multiplier[:, :, None, None], axes=(0, 1)))


def dx(f: MatrixField) -> MatrixField:
    grid = f.grid
    if grid.deriv_scheme == "spectral":
        kx, ky = grid.wavenumbers()
        return _spectral(f, np.broadcast_to(1j * kx, (grid.N, grid.N)))
    return MatrixField(grid, (np.roll(f.data, -1, axis=1) - np.roll(f.data, 1, axis=1)) / (2 * grid.hx))


def dy(f: MatrixField) -> MatrixField:
    grid = f.grid
    if grid.deriv_scheme == "spectral":
        kx, ky = grid.wavenumbers()
        return _spectral(f, np.broadcast_to(1j * ky, (grid.N, grid.N)))
    return MatrixField(grid, (np.roll(f.data, -1, axis=0) - np.roll(f.data, 1, axis=0)) / (2 * grid.hy))


def dbar(f: MatrixField) -> MatrixField:
    """Entrywise ``d/dzbar = (d/dx + i d/dy) / 2``."""
    grid = f.grid
    if grid.deriv_scheme == "spectral":
        kx, ky = grid.wavenumbers()
        return _spectral(f, 0.5 * (1j * kx - ky))
    return 0.5 * (dx(f) + 1j * dy(f))


def d(f: MatrixField) -> MatrixField:
    """Entrywise ``d/dz = (d/dx - i d/dy) / 2``."""
    grid = f.grid
    if grid.deriv_scheme == "spectral":
        kx, ky = grid.wavenumbers()
        return _spectral(f, 0.5 * (1j * kx + ky))
    return 0.5 * (dx(f) - 1j * dy(f))


# ----------------------------------------------------------------------------
# forms


@dataclass(frozen=True)
class OneForm:
    """Matrix 1-form ``z dz + zbar dzbar``."""

    z: MatrixField
    zbar: MatrixField

    def __post_init__(self):
        _check_same(self.z.grid, self.zbar.grid)

    @property
    def grid(self) -> Grid:
        return self.z.grid

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.z + other.z, self.zbar + other.zbar)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.z - other.z, self.zbar - other.zbar)

    def __neg__(self) -> "OneForm":
        return OneForm(-self.z, -self.zbar)

    def __mul__(self, scalar) -> "OneForm":
        return OneForm(self.z * scalar, self.zbar * scalar)

    __rmul__ = __mul__

    @property
    def H(self) -> "OneForm":
        """Conjugate transpose of the form: transposes matrices and swaps dz with dzbar."""
        return OneForm(self.zbar.H, self.z.H)

    def conj(self) -> "OneForm":
        """Entrywise complex conjugate of the form (dz and dzbar swap)."""
        return OneForm(self.zbar.conj(), self.z.conj())

    @classmethod
    def dz(cls, coeff: MatrixField) -> "OneForm":
        return cls(coeff, MatrixField.zeros(coeff.grid))

    @classmethod
    def dzbar(cls, coeff: MatrixField) -> "OneForm":
        return cls(MatrixField.zeros(coeff.grid), coeff)


def wedge_trace(p: OneForm, q: OneForm) -> np.ndarray:
    """``dz ^ dzbar`` coefficient of ``Tr(p ^ q)`` as a scalar field."""
    _check_same(p.grid, q.grid)
    return (p.z @ q.zbar - p.zbar @ q.z).trace()


def integrate_2form(c: Union[MatrixField, np.ndarray, complex], grid: Grid = None) -> complex:
    """Integrate ``c dz ^ dzbar`` over the torus.

    Matrix-valued input is traced first. A plain scalar needs ``grid``.
    """
    if isinstance(c, MatrixField):
        if grid is not None:
            _check_same(grid, c.grid)
        grid = c.grid
        values = c.trace()
    else:
        if grid is None:
            raise ValueError("grid is required for scalar input")
        values = np.broadcast_to(np.asarray(c, dtype=np.complex128), (grid.N, grid.N))
        if values.shape != (grid.N, grid.N):
            raise ValueError(f"scalar field shape {values.shape} does not match grid")
    return complex(-2j * grid.cell_area * pairwise_sum(values))


def integrate_wedge(p: OneForm, q: OneForm) -> complex:
    """``integral Tr(p ^ q)``."""
    return integrate_2form(wedge_trace(p, q), p.grid)


def star1(p: OneForm) -> OneForm:
    return OneForm(-1j * p.z, 1j * p.zbar)


def star2(p: OneForm) -> OneForm:
    return OneForm(-p.zbar.conj(), p.z.conj())


def tilde_star2(p: OneForm) -> OneForm:
    """``star2`` after an entrywise transpose; antilinear, sends ``c dz`` to ``c* dzbar``."""
    return OneForm(-p.zbar.H, p.z.H)


# ----------------------------------------------------------------------------
# configurations and tangent vectors


@dataclass(frozen=True)
class UnitaryConnection:
    """Unitary connection stored by its ``(0,1)`` coefficient; ``a_z = -a_zbar^*``."""

    a_zbar: MatrixField

    @property
    def a_z(self) -> MatrixField:
        return -self.a_zbar.H

    def form(self) -> OneForm:
        return OneForm(self.a_z, self.a_zbar)


@dataclass(frozen=True)
class HiggsField:
    """Higgs field ``phi_z dz``; its ``(0,1)`` extension has coefficient ``-phi_z^*``."""

    phi_z: MatrixField

    @property
    def phi_zbar(self) -> MatrixField:
        return -self.phi_z.H

    def form(self) -> OneForm:
        return OneForm(self.phi_z, self.phi_zbar)


@dataclass(frozen=True)
class Configuration:
    conn: UnitaryConnection
    higgs: HiggsField

    def __post_init__(self):
        _check_same(self.conn.a_zbar.grid, self.higgs.phi_z.grid)

    @classmethod
    def from_fields(cls, a_zbar: MatrixField, phi_z: MatrixField) -> "Configuration":
        return cls(UnitaryConnection(a_zbar), HiggsField(phi_z))

    @classmethod
    def zero(cls, grid: Grid) -> "Configuration":
        z = MatrixField.zeros(grid)
        return cls.from_fields(z, z)

    @property
    def grid(self) -> Grid:
        return self.conn.a_zbar.grid

    @property
    def a_zbar(self) -> MatrixField:
        return self.conn.a_zbar

    @property
    def a_z(self) -> MatrixField:
        return self.conn.a_z

    @property
    def phi_z(self) -> MatrixField:
        return self.higgs.phi_z

    def shifted(self, X: "TangentVector", t: float) -> "Configuration":
        """Affine move ``c + t X``."""
        return Configuration.from_fields(self.a_zbar + t * X.alpha_zbar, self.phi_z + t * X.gamma_z)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.a_zbar.data)) and np.all(np.isfinite(self.phi_z.data)))


@dataclass(frozen=True)
class TangentVector:
    """Tangent vector ``(alpha^{0,1}, gamma^{1,0})`` stored by its coefficients."""

    alpha_zbar: MatrixField
    gamma_z: MatrixField

    def __post_init__(self):
        _check_same(self.alpha_zbar.grid, self.gamma_z.grid)

    @classmethod
    def zero(cls, grid: Grid) -> "TangentVector":
        z = MatrixField.zeros(grid)
        return cls(z, z)

    @property
    def grid(self) -> Grid:
        return self.alpha_zbar.grid

    def __add__(self, other):
        return TangentVector(self.alpha_zbar + other.alpha_zbar, self.gamma_z + other.gamma_z)

    def __sub__(self, other):
        return TangentVector(self.alpha_zbar - other.alpha_zbar, self.gamma_z - other.gamma_z)

    def __neg__(self):
        return TangentVector(-self.alpha_zbar, -self.gamma_z)

    def __mul__(self, scalar):
        return TangentVector(self.alpha_zbar * scalar, self.gamma_z * scalar)

    __rmul__ = __mul__

    # extensions: alpha^{1,0} = -alpha^{0,1*}, gamma^{0,1} = -gamma^{1,0*}
    def alpha01(self) -> OneForm:
        return OneForm.dzbar(self.alpha_zbar)

    def alpha10(self) -> OneForm:
        return OneForm.dz(-self.alpha_zbar.H)

    def alpha(self) -> OneForm:
        return OneForm(-self.alpha_zbar.H, self.alpha_zbar)

    def gamma10(self) -> OneForm:
        return OneForm.dz(self.gamma_z)

    def gamma01(self) -> OneForm:
        return OneForm.dzbar(-self.gamma_z.H)

    def gamma(self) -> OneForm:
        return OneForm(self.gamma_z, -self.gamma_z.H)

    def max_norm(self) -> float:
        return max(self.alpha_zbar.max_norm(), self.gamma_z.max_norm())

    def max_diff(self, other: "TangentVector") -> float:
        return (self - other).max_norm()


@dataclass(frozen=True)
class GaugeTransform:
    """Unitary matrix at every site."""

    g: MatrixField
    tol: float = 1e-12

    def __post_init__(self):
        if not self.g.is_unitary(self.tol):
            raise ValueError("gauge transformation is not unitary per site")

    @property
    def inverse(self) -> MatrixField:
        return self.g.H


# ----------------------------------------------------------------------------
# curvature and gauge action


def curvature(A: UnitaryConnection) -> MatrixField:
    """``dz ^ dzbar`` coefficient of F(A): ``d_z a_zbar - d_zbar a_z + [a_z, a_zbar]``."""
    a_zbar = A.a_zbar
    a_z = A.a_z
    return d(a_zbar) - dbar(a_z) + comm(a_z, a_zbar)


def gauge_act(g: GaugeTransform, c: Configuration) -> Configuration:
    """Conjugate the operator ``dbar + a_zbar`` by ``g`` and rotate the Higgs field."""
    gm, gi = g.g, g.inverse
    _check_same(gm.grid, c.grid)
    a_new = gm @ c.a_zbar @ gi - dbar(gm) @ gi
    phi_new = gm @ c.phi_z @ gi
    return Configuration.from_fields(a_new, phi_new)


def gauge_act_connection(g: GaugeTransform, A: UnitaryConnection) -> UnitaryConnection:
    gm, gi = g.g, g.inverse
    return UnitaryConnection(gm @ A.a_zbar @ gi - dbar(gm) @ gi)


def gauge_act_tangent(g: GaugeTransform, X: TangentVector) -> TangentVector:
    gm, gi = g.g, g.inverse
    _check_same(gm.grid, X.grid)
    return TangentVector(gm @ X.alpha_zbar @ gi, gm @ X.gamma_z @ gi)


# ----------------------------------------------------------------------------
# random band-limited fields


def _band_mask(grid: Grid, cutoff: int) -> np.ndarray:
    m = scipy.fft.fftfreq(grid.N, d=1.0 / grid.N)
    mx, my = np.meshgrid(m, m, indexing="xy")
    return (mx ** 2 + my ** 2) <= cutoff ** 2


def expm_anti_hermitian(psi: MatrixField) -> MatrixField:
    """Per-site matrix exponential of an anti-Hermitian field."""
    h = 1j * psi.data
    h = 0.5 * (h + np.conj(np.swapaxes(h, -1, -2)))
    w, v = np.linalg.eigh(h)
    # psi = -i h  =>  exp(psi) = v exp(-i w) v^H
    ew = np.exp(-1j * w)
    out = (v * ew[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))
    return MatrixField(psi.grid, out)


def random_field(seed: int, grid: Grid, cutoff: int, flag: str = "general",
                 scale: float = 1.0, stream: int = 0) -> MatrixField:
    """Deterministic band-limited random field.

    Fourier coefficients of every matrix entry are independent complex
    Gaussians for integer wavevectors with ``|k| <= cutoff`` and zero above,
    normalized so each entry has variance ``scale**2``. ``stream`` selects an
    independent sequence for the same seed.
    """
    if flag not in FLAGS:
        raise ValueError(f"unknown flag {flag!r}")
    if cutoff < 0 or cutoff > grid.N // 4:
        raise ValueError(f"cutoff {cutoff} exceeds N/4 = {grid.N // 4}")
    rng = np.random.default_rng([int(seed), int(stream)])
    shape = grid.shape
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    mask = _band_mask(grid, cutoff)
    coeffs = coeffs * mask[:, :, None, None] * (scale / np.sqrt(2.0 * mask.sum()))
    data = scipy.fft.ifft2(coeffs, axes=(0, 1), norm="forward")
    f = MatrixField(grid, data)
    if flag == "general":
        return f
    psi = MatrixField(grid, 0.5 * (f.data - np.conj(np.swapaxes(f.data, -1, -2))))
    if flag == "anti_hermitian":
        return psi
    return expm_anti_hermitian(psi)


def random_tangent(seed: int, grid: Grid, cutoff: int = None, scale: float = 1.0) -> TangentVector:
    cutoff = grid.N // 4 if cutoff is None else cutoff
    return TangentVector(random_field(seed, grid, cutoff, scale=scale, stream=1),
                         random_field(seed, grid, cutoff, scale=scale, stream=2))


def random_configuration(seed: int, grid: Grid, cutoff: int = None, scale: float = 1.0) -> Configuration:
    cutoff = grid.N // 4 if cutoff is None else cutoff
    return Configuration.from_fields(random_field(seed, grid, cutoff, scale=scale, stream=3),
                                     random_field(seed, grid, cutoff, scale=scale, stream=4))


def random_gauge(seed: int, grid: Grid, cutoff: int = 1, scale: float = 0.3) -> GaugeTransform:
    """Smooth gauge transformation ``exp(psi)`` with ``psi`` band-limited.

    The defaults keep ``g a g^-1`` free of aliasing for fields cut off at
    ``N/8``, so covariance identities hold to round-off.
    """
    return GaugeTransform(random_field(seed, grid, cutoff, "unitary", scale=scale, stream=5))


def constant_unitary(seed: int, grid: Grid) -> GaugeTransform:
    """A random site-independent unitary transformation."""
    rng = np.random.default_rng([int(seed), 6])
    m = rng.standard_normal((grid.n, grid.n)) + 1j * rng.standard_normal((grid.n, grid.n))
    q, r = np.linalg.qr(m)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return GaugeTransform(MatrixField.constant(grid, q))
