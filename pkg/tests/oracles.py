"""Independent reference computations for the test suite.

Nothing here goes through the library's coefficient-pair bookkeeping.
Derivatives use a dense DFT matrix, 1-forms are rewritten in real
components ``xi = xi_x dx + xi_y dy`` and integrals are plain sums of
``dx ^ dy`` coefficients times the cell area.
"""

import numpy as np


def dft_derivative(data, L, axis):
    """Spectral derivative along ``axis`` (0 = y, 1 = x) by an explicit DFT matrix.

    The Nyquist mode is dropped, matching the real antisymmetric operator.
    """
    N = data.shape[axis]
    j = np.arange(N)
    F = np.exp(-2j * np.pi * np.outer(j, j) / N)
    k = 2 * np.pi * np.fft.fftfreq(N, d=L / N)
    k[N // 2] = 0.0
    D = np.linalg.inv(F) @ np.diag(1j * k) @ F
    return np.moveaxis(np.tensordot(D, np.moveaxis(data, axis, 0), axes=(1, 0)), 0, axis)


def dx(data, grid):
    return dft_derivative(data, grid.Lx, 1)


def dy(data, grid):
    return dft_derivative(data, grid.Ly, 0)


def dbar(data, grid):
    return 0.5 * (dx(data, grid) + 1j * dy(data, grid))


def d(data, grid):
    return 0.5 * (dx(data, grid) - 1j * dy(data, grid))


def H(m):
    return np.conj(np.swapaxes(m, -1, -2))


def comm(a, b):
    return a @ b - b @ a


def real_components(c_z, c_zbar):
    """``c_z dz + c_zbar dzbar`` as ``(c_x, c_y)``."""
    return c_z + c_zbar, 1j * (c_z - c_zbar)


def wedge_dxdy(p, q):
    """Per-site ``dx ^ dy`` coefficient of ``Tr(p ^ q)`` for real-component pairs."""
    px, py = p
    qx, qy = q
    return np.trace(px @ qy - py @ qx, axis1=-2, axis2=-1)


def integrate(values, grid):
    return complex(np.sum(values) * grid.cell_area)


def site_loop_trace_product(a, b):
    """``tr(a b)`` at every site by explicit loops, as a slow cross-check."""
    N = a.shape[0]
    out = np.empty((N, N), dtype=complex)
    for iy in range(N):
        for ix in range(N):
            out[iy, ix] = sum(a[iy, ix, r, s] * b[iy, ix, s, r]
                              for r in range(a.shape[2]) for s in range(a.shape[3]))
    return out


# ----------------------------------------------------------------------------
# tangent vectors as real forms


def alpha_form(a_zbar):
    return real_components(-H(a_zbar), a_zbar)


def gamma_form(g_z):
    return real_components(g_z, -H(g_z))


def gamma_tilde_form(g_z):
    # i (gamma10 - gamma01) = i g dz + i g* dzbar
    return real_components(1j * g_z, 1j * H(g_z))


def hodge(p):
    """Standard Hodge star on 1-forms: ``*dx = dy``, ``*dy = -dx``."""
    px, py = p
    return (-py, px)


def metric(X, Y, grid):
    """``-int Tr(alpha ^ *beta) + 4 int Re tr(gamma_z delta_z*) dx dy``."""
    A, B = alpha_form(X[0]), alpha_form(Y[0])
    conn = -wedge_dxdy(A, hodge(B))
    higgs = 4 * np.trace(X[1] @ H(Y[1]), axis1=-2, axis2=-1).real
    return integrate(conn + higgs, grid)


def omega(X, Y, grid):
    t = wedge_dxdy(alpha_form(X[0]), alpha_form(Y[0])) - wedge_dxdy(gamma_form(X[1]), gamma_form(Y[1]))
    return integrate(t, grid)


def q1(X, Y, grid):
    t = wedge_dxdy(alpha_form(X[0]), gamma_form(Y[1])) + wedge_dxdy(gamma_form(X[1]), alpha_form(Y[0]))
    return -integrate(t, grid)


def q2(X, Y, grid):
    t = (wedge_dxdy(alpha_form(X[0]), gamma_tilde_form(Y[1]))
         + wedge_dxdy(gamma_tilde_form(X[1]), alpha_form(Y[0])))
    return integrate(t, grid)


def constant_forms(a, c, b, dd, area):
    """Closed forms for constant ``X = (a, c)``, ``Y = (b, dd)``, derived by hand."""
    tr = np.trace
    g = 4 * area * (tr(a @ H(b)) + tr(c @ H(dd))).real
    om = 4 * area * (tr(a @ H(b)) + tr(c @ H(dd))).imag
    q1_ = 4 * area * (tr(a @ dd) - tr(c @ b)).imag
    q2_ = 4 * area * (tr(c @ b) - tr(a @ dd)).real
    return g, om, q1_, q2_


# ----------------------------------------------------------------------------
# complex structures from the component action on forms


def apply_I(X):
    return (1j * X[0], 1j * X[1])


def apply_J(X):
    # alpha01 -> -i gamma01 and gamma10 -> i alpha10, with the extensions
    gamma01 = -H(X[1])
    alpha10 = -H(X[0])
    return (-1j * gamma01, 1j * alpha10)


# ----------------------------------------------------------------------------
# Hitchin residuals and the curvature of B_lambda


def residuals(a_zbar, phi, grid):
    a_z = -H(a_zbar)
    r1 = d(a_zbar, grid) - dbar(a_z, grid) + comm(a_z, a_zbar) + comm(phi, H(phi))
    r2 = dbar(phi, grid) + comm(a_zbar, phi)
    return r1, r2


def energy(a_zbar, phi, grid):
    r1, r2 = residuals(a_zbar, phi, grid)
    return float((np.sum(np.abs(r1) ** 2) + np.sum(np.abs(r2) ** 2)) * grid.cell_area)


def b_lambda_curvature_dxdy(a_zbar, phi, lam, grid):
    """``dx ^ dy`` coefficient of ``dB + B ^ B`` for ``B = B_x dx + B_y dy``."""
    b_z = -H(a_zbar) + lam * phi
    b_zbar = a_zbar + H(phi) / lam
    Bx, By = real_components(b_z, b_zbar)
    return dx(By, grid) - dy(Bx, grid) + comm(Bx, By)


def fd_gradient(func, x, eps=1e-6):
    """Central finite-difference gradient of a real function of a complex array."""
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for i in range(flat.size):
        for unit in (1.0, 1j):
            xp = flat.copy()
            xm = flat.copy()
            xp[i] += eps * unit
            xm[i] -= eps * unit
            val = (func(xp.reshape(x.shape)) - func(xm.reshape(x.shape))) / (2 * eps)
            gflat[i] += val * unit
    return g
