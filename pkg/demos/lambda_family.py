"""The curvature family F_lambda and its values at lambda = +-1, +-i."""
import numpy as np

from hkhitchin import family, hk
from hkhitchin.lattice import Grid, random_tangent

grid = Grid(16)
X = random_tangent(11, grid)
Y = random_tangent(12, grid)

w1, w2, w3 = family.omega123(X, Y)
print("omega1, omega2, omega3:", w1, w2, w3)

lams = family.roots_of_unity(16)
direct = np.array([family.f_lambda(X, Y, lam) for lam in lams])
laurent = np.array([1j / (2 * np.pi) * (w1 + lam * w2 + w3 / lam) for lam in lams])
print("max |F_lambda - Laurent form| over 16 roots:", np.max(np.abs(direct - laurent)))

# three samples determine everything
coeffs = family.laurent_coefficients(lams[:3], direct[:3])
print("fit from 3 samples, worst prediction error:",
      max(abs(family.laurent_eval(coeffs, lam) - v) for lam, v in zip(lams, direct)))

om, q1, q2 = hk.omega(X, Y), hk.q1(X, Y), hk.q2(X, Y)
k = 1j / (2 * np.pi)
print("F(i)  vs k(Omega - i Q1):", family.f_lambda(X, Y, 1j), k * (om - 1j * q1))
print("F(1)  vs k(Omega - i Q2):", family.f_lambda(X, Y, 1), k * (om - 1j * q2))
print("tau vs (i/pi) Omega:", family.tau_curvature(X, Y), 1j / np.pi * om)
t1, t2 = family.trivial_bundle_curvatures(X, Y)
print("trivial bundles vs Q1/pi, Q2/pi:", t1, q1 / np.pi, t2, q2 / np.pi)
