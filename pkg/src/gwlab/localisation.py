"""Fixed-locus splittings of the one-relative-point graph space and the
evaluation of their contributions.

A torus-fixed configuration splits the source curve into a piece over
the zero end, a bridge mapped onto a fibre, and a piece over the
infinity end.  Besides the generic shape there are five degenerate
kinds, reflecting which end fails to carry a stable space of its own.
Summing every weighted contribution reproduces the transform of the
cone point under the solution operator, coefficient by coefficient;
``check_main_identity`` verifies this against the independently built
right-hand side.

Marking sets are never materialised: contributions depend only on how
many markings sit on each end, because all non-relative insertions
carry the identical class t(psi).  The binomial choice factor combined
with 1/n! is exactly the product of the per-end 1/n_i! weights, an
identity asserted symbolically by ``check_splitting_weights``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable

from .checks import CheckReport, _fraction_record, _timed, _trunc_params
from .cone import TPolynomial, _expansions, cone_point, s_apply
from .correlators import CorrelatorEngine, get_engine
from .series import LoopSeries, SeriesAccumulator, Truncation
from .targets import (
    NovikovDegree,
    TargetSpace,
    beta_add,
    beta_splits,
    beta_zero,
    iter_betas,
)

KINDS = ("generic", "case1", "case2", "case3", "case4", "case5")


@dataclass(frozen=True)
class SplittingRecord:
    kind: str
    beta0: NovikovDegree
    beta_inf: NovikovDegree
    n0: int
    n_inf: int

    @property
    def beta(self) -> NovikovDegree:
        return beta_add(self.beta0, self.beta_inf)

    @property
    def n(self) -> int:
        return self.n0 + self.n_inf


def enumerate_splittings(target: TargetSpace, beta: NovikovDegree, n: int) -> list[SplittingRecord]:
    """Complete, duplicate-free list of fixed-locus records for (beta, n).

    The five degenerate kinds are keyed off which end fails to exist by
    itself: the zero end needs nonzero degree or two markings beside the
    node, the infinity end only needs to be nonempty.  Kinds are mutually
    exclusive and exclusive of the generic shape by construction.
    """
    records = []
    for beta0, beta_inf in beta_splits(beta):
        d0 = any(beta0)
        d_inf = any(beta_inf)
        for n0 in range(n + 1):
            n_inf = n - n0
            zero_end_alone = (not d0) and n0 <= 1
            inf_end_empty = (not d_inf) and n_inf == 0
            if zero_end_alone and inf_end_empty:
                kind = "case1" if (n0, n_inf) == (0, 0) else "case2"
            elif (not d0) and n0 == 0:
                kind = "case3"
            elif (not d0) and n0 == 1:
                kind = "case4"
            elif inf_end_empty:
                kind = "case5"
            else:
                kind = "generic"
            records.append(SplittingRecord(kind, beta0, beta_inf, n0, n_inf))
    records.sort(key=lambda r: (r.kind, r.beta0, r.n0))
    return records


def contribution(
    rec: SplittingRecord,
    t: TPolynomial,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
) -> LoopSeries:
    """The weighted fixed-locus contribution, including its Novikov weight
    Q^beta and the combinatorial weight eps^n / (n0! n_inf!).

    The bridge factor -z of the localised class cancels against the
    bridge deformation in the normal bundle, leaving one kernel per
    surviving end:

      case1    -z * 1
      case2    t(z)
      case3    <(-z*1/(z - psi)), t.., phi_gamma> phi^gamma
      case4    <(t(z)/(z - psi)), t.., phi_gamma> phi^gamma, the end
               marking frozen at the pure weight z
      case5    <t.., phi_gamma/(-z - psi)> phi^gamma
      generic  <t.., phi_a/(-z - psi)> <phi^a/(z - psi), t.., phi_gamma> phi^gamma
    """
    engine = engine or get_engine(t.target)
    target = t.target
    acc = SeriesAccumulator(target, trunc)
    beta = rec.beta
    n = rec.n
    b00 = beta_zero(target.class_rank)

    if rec.kind == "case1":
        acc.add(1, 0, b00, 0, Fraction(-1))
    elif rec.kind == "case2":
        for j, a, c in t.monomials():
            acc.add(j, a, b00, 1, c)
    elif rec.kind == "case3":
        for weight, monos in _expansions(t, n):
            block = engine.flow_block(beta, 0, monos)
            for z_exp, vec in block.items():
                # -z times the unit kernel: shift the exponent, flip the sign.
                acc.add_vector(z_exp + 1, vec, beta, n, -weight)
    elif rec.kind == "case4":
        for weight, monos in _expansions(t, rec.n_inf):
            for j, a, c in t.monomials():
                block = engine.flow_block(beta, a, monos)
                for z_exp, vec in block.items():
                    acc.add_vector(z_exp + j, vec, beta, n, weight * c)
    elif rec.kind == "case5":
        for weight, monos in _expansions(t, n):
            block = engine.fibre_block(beta, monos, -1)
            for z_exp, vec in block.items():
                acc.add_vector(z_exp, vec, beta, n, weight)
    else:
        pinv = target.pairing_inverse
        for w0, monos0 in _expansions(t, rec.n0):
            kernels = {}
            for a in range(target.rank):
                zmap = engine.correlator_with_kernel(rec.beta0, monos0, a, -1)
                if zmap:
                    kernels[a] = zmap
            if not kernels:
                continue
            for w1, monos1 in _expansions(t, rec.n_inf):
                for a, zmap in kernels.items():
                    for nu, w_dual in enumerate(pinv[a]):
                        if not w_dual:
                            continue
                        block = engine.flow_block(rec.beta_inf, nu, monos1)
                        for z0, v0 in zmap.items():
                            for z1, vec in block.items():
                                acc.add_vector(
                                    z0 + z1, vec, beta, n, w0 * w1 * v0 * w_dual
                                )
    return acc.series()


def localisation_sum(
    t: TPolynomial,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
) -> LoopSeries:
    """Sum of all weighted contributions over (beta, n) within truncation."""
    engine = engine or get_engine(t.target)
    acc = SeriesAccumulator(t.target, trunc)
    for beta in iter_betas(t.target.class_rank, trunc.novikov_order):
        for n in range(trunc.epsilon_order + 1):
            for rec in enumerate_splittings(t.target, beta, n):
                acc.add_series(contribution(rec, t, trunc, engine))
    return acc.series()


@_timed
def check_main_identity(
    t: TPolynomial,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
    seed: int | None = None,
) -> CheckReport:
    """localisation_sum(t) equals the solution operator applied to the cone
    point, exactly at every retained (z, basis, novikov, eps) grade."""
    engine = engine or get_engine(t.target)
    left = localisation_sum(t, trunc, engine)
    right = s_apply(t, cone_point(t, trunc, engine), trunc, engine)
    failures = []
    for key in sorted(set(left.terms) | set(right.terms)):
        lv = left.terms.get(key, Fraction(0))
        rv = right.terms.get(key, Fraction(0))
        if lv != rv:
            z, a, b, e = key
            failures.append(
                {
                    "z_exp": z,
                    "basis": a,
                    "novikov": list(b),
                    "eps": e,
                    "fixed_locus_sum": _fraction_record(lv),
                    "cone_transform": _fraction_record(rv),
                }
            )
    return CheckReport(
        name="localisation",
        passed=not failures,
        params={"target": t.target.name, **_trunc_params(trunc), "T": t.degree},
        failures=failures,
        seed=seed,
    )


def check_splitting_weights(records: Iterable[SplittingRecord]) -> list[SplittingRecord]:
    """Assert the weight regrouping identity on generic records:

        (n choose n_inf) / n! == 1 / (n0! n_inf!)

    Returns the records that violate it (always empty; kept as an
    explicit runtime assertion for the verification suite).
    """
    bad = []
    for rec in records:
        if rec.kind != "generic":
            continue
        lhs = Fraction(comb(rec.n, rec.n_inf), factorial(rec.n))
        rhs = Fraction(1, factorial(rec.n0) * factorial(rec.n_inf))
        if lhs != rhs:
            bad.append(rec)
    return bad
