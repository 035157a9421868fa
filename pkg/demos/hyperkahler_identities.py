"""Three complex structures and three symplectic forms on random tangent vectors."""
import numpy as np

from hkhitchin import hk
from hkhitchin.lattice import Grid, random_tangent

grid = Grid(16)
X = random_tangent(1, grid)
Y = random_tangent(2, grid)

# --- quaternion relations hold slot by slot ---
I, J, K = hk.apply_I, hk.apply_J, hk.apply_K
print("I(J(X)) - K(X):", I(J(X)).max_diff(K(X)))
print("J(J(X)) + X:   ", J(J(X)).max_diff(-X))

# --- each form is evaluated from its own integral ---
print("g      =", hk.metric_g(X, Y))
print("Omega  =", hk.omega(X, Y), " g(X, IY) =", hk.metric_g(X, I(Y)))
print("Q1     =", hk.q1(X, Y), " g(X, JY) =", hk.metric_g(X, J(Y)))
print("Q2     =", hk.q2(X, Y), " g(X, KY) =", hk.metric_g(X, K(Y)))
print("Q      =", hk.q_complex(X, Y))

# --- the metric written three ways ---
print("Hodge form:", hk.metric_hodge(X, Y))
print("g(X,X) vs Hitchin's quadratic form:", hk.metric_g(X, X), hk.hitchin_g1(X).real)

# --- Q1 and Q2 are exact ---
from hkhitchin.lattice import random_configuration

c = random_configuration(3, grid, 2)
for which, q in ((1, hk.q1), (2, hk.q2)):
    dt = hk.dtheta(which, c, X, Y)
    print(f"d theta{which}: analytic {dt.analytic:.12f}  fd {dt.finite_difference:.12f}  Q{which} {q(X, Y):.12f}")

report = hk.bilinear_report(X, Y)
print("worst identity residual:", max(report.identity_residuals.values()))
print("omega3 + conj(omega2):", abs(report.omega123[2] + np.conj(report.omega123[1])))
