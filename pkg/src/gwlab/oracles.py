"""Standalone reference evaluators used to cross-check the main engine.

Everything here is deliberately independent of the reduction system in
``correlators``: the point-target evaluator only knows the string
equation and the three-point base case, the plane-curve counts come
from the classical associativity recursion, and the fixed-locus
enumerator is a naive filter over all splittings.  These are the ground
truths the test suite and the ``engine-oracles`` verification suite
compare against.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .targets import NovikovDegree, TargetSpace, beta_splits


@lru_cache(maxsize=None)
def point_psi_integral(powers: tuple[int, ...]) -> Fraction:
    """Integral of psi_1^{k_1} ... psi_n^{k_n} over the n-pointed genus-zero
    moduli of curves, by repeated use of the string equation alone.

    Base case: the three-pointed space is a point, so the integral is 1
    when every exponent vanishes.  Otherwise remove a zero-exponent
    point and lower each remaining exponent in turn; terms that would
    need psi^{-1} vanish.
    """
    ks = tuple(sorted(powers))
    n = len(ks)
    if n < 3:
        raise ValueError("needs at least three marked points")
    if n == 3:
        return Fraction(1) if ks == (0, 0, 0) else Fraction(0)
    if ks[0] != 0:
        # No removable point; the dimension constraint cannot hold.
        return Fraction(0)
    rest = ks[1:]
    total = Fraction(0)
    for j, k in enumerate(rest):
        if k >= 1:
            lowered = rest[:j] + (k - 1,) + rest[j + 1:]
            total += point_psi_integral(lowered)
    return total


def point_psi_closed_form(powers: tuple[int, ...]) -> Fraction:
    """(n-3)!/prod(k_i!) when the exponents sum to n-3, else 0."""
    n = len(powers)
    if sum(powers) != n - 3:
        return Fraction(0)
    denom = 1
    for k in powers:
        denom *= factorial(k)
    return Fraction(factorial(n - 3), denom)


@lru_cache(maxsize=None)
def rational_plane_curves(d: int) -> Fraction:
    """Number of rational plane curves of degree d through 3d-1 points.

    The classical recursion obtained from associativity of the quantum
    product, seeded by the single line through two points:

        N_d = sum_{d1+d2=d} N_{d1} N_{d2} d1^2 d2
              (d2 C(3d-4, 3d1-2) - d1 C(3d-4, 3d1-1)).
    """
    if d < 1:
        raise ValueError("degree must be positive")
    if d == 1:
        return Fraction(1)
    total = Fraction(0)
    for d1 in range(1, d):
        d2 = d - d1
        total += (
            rational_plane_curves(d1)
            * rational_plane_curves(d2)
            * d1 ** 2
            * d2
            * (d2 * comb(3 * d - 4, 3 * d1 - 2) - d1 * comb(3 * d - 4, 3 * d1 - 1))
        )
    return total


def brute_force_splittings(
    target: TargetSpace, beta: NovikovDegree, n: int
) -> list[tuple[str, NovikovDegree, NovikovDegree, int, int]]:
    """Classify every splitting of (beta, n) across the two fixed ends.

    A splitting assigns a degree and a set of markings to the zero end
    and to the infinity end.  The zero end carries a stable map with an
    extra node point, so it exists on its own iff its degree is nonzero
    or it has at least two markings plus the node; the infinity end is a
    fibre-class piece that exists iff it carries something at all.  The
    five degenerate kinds cover the failures.  Returns (kind, beta0,
    beta_inf, n0, n_inf) tuples in a deterministic order.
    """
    records = []
    for beta0, beta_inf in beta_splits(beta):
        for n0 in range(n + 1):
            n_inf = n - n0
            zero_end_alone = (not any(beta0)) and n0 <= 1
            inf_end_empty = (not any(beta_inf)) and n_inf == 0
            if zero_end_alone and inf_end_empty:
                kind = "case1" if (n0, n_inf) == (0, 0) else "case2"
            elif (not any(beta0)) and n0 == 0:
                kind = "case3"
            elif (not any(beta0)) and n0 == 1:
                if (not any(beta_inf)) and n_inf == 0:
                    continue  # infinity end empty: covered by case2 above
                kind = "case4"
            elif inf_end_empty:
                kind = "case5"
            else:
                kind = "generic"
            records.append((kind, beta0, beta_inf, n0, n_inf))
    records.sort()
    return records


def projective_one_point_descendants(r: int, d: int) -> dict[tuple[int, int], Fraction]:
    """One-point descendant invariants of P^r in degree d > 0.

    Expands 1/prod_{m=1..d} (H + m z)^{r+1} modulo H^{r+1} and reads the
    invariants off the small J-function:

        [z^{-2-k}] = sum_alpha <phi_alpha psi^k>_{0,1,d} phi^alpha.

    Returns a map (basis index of phi_alpha = H^alpha, psi power) ->
    value.  Used purely as a cross-check oracle for the engine.
    """
    if d <= 0:
        raise ValueError("degree must be positive")
    # Coefficients of the H-expansion of the product, as a vector mod H^{r+1}.
    poly = [Fraction(0)] * (r + 1)
    poly[0] = Fraction(1)
    z_power = 0
    for m in range(1, d + 1):
        for _ in range(r + 1):
            # Divide by (H + m z) = m z (1 + H/(m z)): geometric expansion.
            z_power += 1
            expanded = [Fraction(0)] * (r + 1)
            for i in range(r + 1):
                acc = Fraction(0)
                for j in range(i + 1):
                    acc += poly[j] * (Fraction(-1, m)) ** (i - j)
                expanded[i] = acc / m
            poly = expanded
    out: dict[tuple[int, int], Fraction] = {}
    for i, coeff in enumerate(poly):
        if not coeff:
            continue
        # By homogeneity the H^i coefficient sits at z^{-z_power - i};
        # match against z^{-2-k} and identify H^i with the dual basis
        # class of H^{r-i}.
        k = z_power + i - 2
        if k >= 0:
            out[(r - i, k)] = coeff
    return out
