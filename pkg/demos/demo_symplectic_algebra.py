"""The loop-space algebra on its own: Darboux relations for the residue
pairing, the polarisation into polynomial and tail halves, and the
universal relations extracted from the z^{-k} coefficients.

Run:  python demos/demo_symplectic_algebra.py
"""

from fractions import Fraction

from gwlab import (
    LoopSeries,
    TPolynomial,
    Truncation,
    default_truncation,
    make_target,
    universal_relation,
)

p2 = make_target("P2")
trunc = Truncation(0, 0, -5, 4)

print("Darboux pairs: Omega(phi_alpha z^k, phi^gamma (-z)^{-1-l}) = -delta delta")
a = LoopSeries.basis(p2, trunc, 1, 2)
for gamma in range(3):
    for l in range(3):
        vec = p2.dual_basis_vector(gamma)
        sign = Fraction(-1) ** (l + 1)
        b = LoopSeries(
            p2, trunc, {(-1 - l, rho, (0,), 0): sign * c for rho, c in enumerate(vec) if c}
        )
        val = a.omega(b).coefficient((0,), 0)
        print(f"  Omega(A_1^2, B^{gamma}_{l}) = {val}")

print()
print("Polarisation of a mixed element:")
f = LoopSeries(
    p2,
    trunc,
    {(2, 0, (0,), 0): Fraction(3), (0, 1, (0,), 0): Fraction(1, 2), (-2, 2, (0,), 0): Fraction(-1)},
)
plus, minus = f.split_plus_minus()
print("  plus half: ", sorted(plus.terms))
print("  minus half:", sorted(minus.terms))

print()
print("Universal relations on the line: every grade of the k-th relation")
print("vanishes, coefficient by coefficient.")
p1 = make_target("P1")
tr = default_truncation(p1, 2, 2, 1)
t = TPolynomial.random(p1, 1, seed=5)
for k in (2, 3, 4):
    for alpha in range(2):
        rel = universal_relation(t, k, alpha, tr)
        print(f"  k={k}, alpha={alpha}: vanishes = {rel.is_zero()}")
