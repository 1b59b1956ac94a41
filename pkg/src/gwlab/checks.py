"""Verification suites over the builders: Darboux relations, hidden
polynomiality, the inverse identity, universal relations, the residue
vanishing and tangent-space membership.

Every check is an exact statement about rational coefficients; a report
either passes or carries the complete list of offending grades.  Seeds
are recorded so failures reproduce.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .cone import (
    TPolynomial,
    cone_point,
    double_bracket,
    s_adjoint_corr_apply,
    s_apply,
    tangent_vector,
)
from .correlators import CorrelatorEngine, get_engine
from .matrices import compose, flip_z, s_adjoint_matrix, s_matrix
from .series import LoopSeries, ScalarSeries, Truncation
from .targets import TargetSpace, beta_zero, iter_betas


@dataclass
class CheckReport:
    name: str
    passed: bool
    params: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    seed: int | None = None
    notes: str = ""
    elapsed: float = 0.0

    def as_dict(self, with_timing: bool = True) -> dict:
        out = {
            "check": self.name,
            "passed": self.passed,
            "params": self.params,
            "failures": self.failures,
            "seed": self.seed,
            "notes": self.notes,
        }
        if with_timing:
            out["elapsed_s"] = round(self.elapsed, 6)
        return out


def _timed(fn):
    def wrapper(*args, **kwargs):
        started = time.perf_counter()
        report = fn(*args, **kwargs)
        report.elapsed = time.perf_counter() - started
        return report
    return wrapper


def _fraction_record(val: Fraction) -> dict:
    return {"num": val.numerator, "den": val.denominator}


def _trunc_params(trunc: Truncation) -> dict:
    return {
        "D": trunc.novikov_order,
        "E": trunc.epsilon_order,
        "z_min": trunc.z_min,
        "z_max": trunc.z_max,
    }


# ---------------------------------------------------------------------------
# Darboux relations for the symplectic form.


def _basis_a(target, trunc, alpha, k) -> LoopSeries:
    return LoopSeries.basis(target, trunc, alpha, k)


def _basis_b(target, trunc, gamma, l) -> LoopSeries:
    """phi^gamma (-z)^{-1-l} as a series: sign (-1)^{1+l} at z^{-1-l}."""
    vec = target.dual_basis_vector(gamma)
    sign = Fraction(-1) ** (l + 1)
    b0 = beta_zero(target.class_rank)
    terms = {(-1 - l, rho, b0, 0): sign * c for rho, c in enumerate(vec) if c}
    return LoopSeries(target, trunc, terms)


@_timed
def check_darboux(target: TargetSpace, k_max: int = 6) -> CheckReport:
    """Omega(A, A) = Omega(B, B) = 0 and Omega(A_alpha^k, B^gamma_l) =
    -delta_alpha^gamma delta^k_l, over the whole window."""
    trunc = Truncation(0, 0, -(k_max + 2), k_max + 1)
    failures = []
    rank = target.rank
    avs = {(a, k): _basis_a(target, trunc, a, k) for a in range(rank) for k in range(k_max + 1)}
    bvs = {(g, l): _basis_b(target, trunc, g, l) for g in range(rank) for l in range(k_max + 1)}
    for (a, k), av in avs.items():
        for (a2, k2), av2 in avs.items():
            if not av.omega(av2).is_zero():
                failures.append({"pair": ["A", a, k, "A", a2, k2]})
        for (g, l), bv in bvs.items():
            got = av.omega(bv).coefficient(beta_zero(target.class_rank), 0)
            want = Fraction(-1) if (a == g and k == l) else Fraction(0)
            if got != want:
                failures.append({"pair": ["A", a, k, "B", g, l], "got": _fraction_record(got)})
    for (g, l), bv in bvs.items():
        for (g2, l2), bv2 in bvs.items():
            if not bv.omega(bv2).is_zero():
                failures.append({"pair": ["B", g, l, "B", g2, l2]})
    return CheckReport(
        name="darboux",
        passed=not failures,
        params={"target": target.name, "k_max": k_max},
        failures=failures,
    )


# ---------------------------------------------------------------------------
# Hidden polynomiality of the transformed cone.


@_timed
def check_polynomiality(
    t: TPolynomial,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
    seed: int | None = None,
) -> CheckReport:
    """Applying the solution operator to the cone point lands in z*H_plus:
    every coefficient of z^{<=0} must vanish exactly."""
    engine = engine or get_engine(t.target)
    value = s_apply(t, cone_point(t, trunc, engine), trunc, engine)
    ok, offenders = value.is_z_polynomial(strict=True)
    failures = [
        {
            "z_exp": z,
            "basis": a,
            "novikov": list(b),
            "eps": e,
            **_fraction_record(value.coefficient(z, a, b, e)),
        }
        for (z, a, b, e) in offenders
    ]
    return CheckReport(
        name="polynomiality",
        passed=ok,
        params={"target": t.target.name, **_trunc_params(trunc), "T": t.degree},
        failures=failures,
        seed=seed,
    )


@_timed
def check_inverse(
    t: TPolynomial,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
    seed: int | None = None,
) -> CheckReport:
    """The adjoint at -z composes with the operator to the identity at
    every retained grade."""
    engine = engine or get_engine(t.target)
    s = s_matrix(t, trunc, engine)
    s_adj = s_adjoint_matrix(t, trunc, engine)
    product = compose(s, s_adj, flip_second=True, trunc=trunc)
    ok, offenders = product.is_identity()
    failures = [
        {
            "z_exp": z,
            "row": r,
            "col": c,
            "novikov": list(b),
            "eps": e,
            **_fraction_record(product.coefficient(z, r, c, b, e)),
        }
        for (z, r, c, b, e) in offenders
    ]
    return CheckReport(
        name="inverse",
        passed=ok,
        params={"target": t.target.name, **_trunc_params(trunc), "T": t.degree},
        failures=failures,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Universal relations from the z^{-k} coefficients.


def universal_relation(
    t: TPolynomial,
    k: int,
    alpha: int,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
) -> ScalarSeries:
    """The combination that the hidden polynomiality forces to vanish:

        <<psi^{k-1} q(psi), phi_alpha>>_{0,2}
        + (-1)^k <<phi_alpha psi^{k-1}>>_{0,1}
        + sum_{r=0}^{k-2} (-1)^{1+r} <<phi_mu psi^r>>_{0,1}
                                     <<phi^mu psi^{k-2-r}, phi_alpha>>_{0,2}

    with q(psi) = t(psi) - psi*1 substituted term by term (the t part at
    eps order one, the shift at order zero).
    """
    engine = engine or get_engine(t.target)
    target = t.target
    pinv = target.pairing_inverse
    total = ScalarSeries(trunc, {})
    # Slot psi^{k-1} q(psi): monomials of t raise the psi power by their
    # z-power; the -z*1 summand contributes -1 psi^k at eps order zero.
    for j, a, c in t.monomials():
        bracket = double_bracket(t, ((a, k - 1 + j), (alpha, 0)), trunc, engine, extra_eps=1)
        total = total.add(bracket.scale(c))
    total = total.add(
        double_bracket(t, ((0, k), (alpha, 0)), trunc, engine, extra_eps=0).scale(-1)
    )
    # The series' own z^{-k} coefficient.
    total = total.add(
        double_bracket(t, ((alpha, k - 1),), trunc, engine).scale(Fraction(-1) ** k)
    )
    # Cross terms between the fibre of the cone and the kernel expansion.
    for r in range(k - 1):
        sign = Fraction(-1) ** (1 + r)
        for mu in range(target.rank):
            one_pt = double_bracket(t, ((mu, r),), trunc, engine)
            if one_pt.is_zero():
                continue
            two_pt = ScalarSeries(trunc, {})
            for nu, w in enumerate(pinv[mu]):
                if w:
                    two_pt = two_pt.add(
                        double_bracket(t, ((nu, k - 2 - r), (alpha, 0)), trunc, engine).scale(w)
                    )
            total = total.add(one_pt.mul(two_pt).scale(sign))
    return total


@_timed
def check_universal_relations(
    t: TPolynomial,
    k_max: int,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
    seed: int | None = None,
) -> CheckReport:
    if k_max < 2:
        raise ValueError("relations start at k = 2")
    engine = engine or get_engine(t.target)
    failures = []
    for k in range(2, k_max + 1):
        for alpha in range(t.target.rank):
            rel = universal_relation(t, k, alpha, trunc, engine)
            for (beta, eps), val in sorted(rel.terms.items()):
                failures.append(
                    {
                        "k": k,
                        "alpha": alpha,
                        "novikov": list(beta),
                        "eps": eps,
                        **_fraction_record(val),
                    }
                )
    return CheckReport(
        name="universal",
        passed=not failures,
        params={"target": t.target.name, "k_max": k_max, **_trunc_params(trunc), "T": t.degree},
        failures=failures,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Residue vanishing: the cone is Lagrangian.


@_timed
def check_lagrangian(
    t: TPolynomial,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
    j_max: int = 1,
    seed: int | None = None,
) -> CheckReport:
    """Res_{z=0} (S*(z) r(-z), S*(-z) u(z)) dz = 0 for basis monomials r, u
    in H_plus with z-powers up to j_max, per retained grade.

    Both arguments are tangent vectors, images of the substitution
    extension of the adjoint at -z; the z-flip inside the symplectic
    form is what turns the first one into S*(z) r(-z).  The correlator
    slot keeps r(psi) either way, since psi is not the flipped variable.
    """
    engine = engine or get_engine(t.target)
    target = t.target
    failures = []
    mono = {
        (a, j): LoopSeries.basis(target, trunc, a, j)
        for a in range(target.rank)
        for j in range(j_max + 1)
    }
    images = {
        key: s_adjoint_corr_apply(t, r, -1, trunc, engine) for key, r in mono.items()
    }
    for key_r, left in images.items():
        for key_u, right in images.items():
            residue = left.omega(right)
            for (beta, eps), val in sorted(residue.terms.items()):
                failures.append(
                    {
                        "r": list(key_r),
                        "u": list(key_u),
                        "novikov": list(beta),
                        "eps": eps,
                        **_fraction_record(val),
                    }
                )
    return CheckReport(
        name="lagrangian",
        passed=not failures,
        params={"target": target.name, "j_max": j_max, **_trunc_params(trunc), "T": t.degree},
        failures=failures,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Tangent membership and the empirical span check.


def _solve_membership(columns: list[dict], targets: list[dict]) -> tuple[int, list[bool]]:
    """Exact rank of the column span and membership of each target vector.

    Vectors are sparse maps key -> Fraction over an arbitrary index set.
    Returns (rank, in_span flags) via fraction-exact elimination.
    """
    keys = sorted({k for col in columns for k in col} | {k for v in targets for k in v})
    index = {k: i for i, k in enumerate(keys)}
    rows = len(keys)
    mat = [[Fraction(0)] * len(columns) for _ in range(rows)]
    for c, col in enumerate(columns):
        for k, val in col.items():
            mat[index[k]][c] = val
    aug = [[Fraction(0)] * len(targets) for _ in range(rows)]
    for ti, vec in enumerate(targets):
        for k, val in vec.items():
            aug[index[k]][ti] = val
    r = 0
    for c in range(len(columns)):
        piv = next((i for i in range(r, rows) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        r += 1
    # After elimination rows r.. of the column matrix are zero, so a target
    # lies in the span iff its residual vanishes there.
    in_span = [
        all(not aug[i][ti] for i in range(r, rows)) for ti in range(len(targets))
    ]
    return r, in_span


@_timed
def check_cone_in_tangent(
    t: TPolynomial,
    trunc: Truncation,
    engine: CorrelatorEngine | None = None,
    seed: int | None = None,
) -> CheckReport:
    """Two-part check that the cone point lies in z times its own tangent
    space.

    Part one is the operator criterion: applying the solution operator
    to the cone point must land in z*H_plus (shared with the
    polynomiality check, as the two statements are equivalent through
    the inverse identity).  Part two is empirical: each tangent vector
    must lie, at truncation, in the span of the z-linear images of the
    flipped adjoint matrix on monomials of H_plus, with scalars drawn
    from truncated Novikov/eps monomials.  Exact ranks are reported.
    """
    engine = engine or get_engine(t.target)
    target = t.target
    f = cone_point(t, trunc, engine)
    sf = s_apply(t, f, trunc, engine)
    poly_ok, offenders = sf.is_z_polynomial(strict=True)
    failures = [
        {"part": "operator", "key": [z, a, list(b), e]} for (z, a, b, e) in offenders
    ]

    s_adj_flipped = flip_z(s_adjoint_matrix(t, trunc, engine))
    j_max = max(t.degree, 1)
    wide = Truncation(
        trunc.novikov_order,
        trunc.epsilon_order,
        trunc.z_min + s_adj_flipped.trunc.z_min,
        trunc.z_max + s_adj_flipped.trunc.z_max,
    )
    columns = []
    for rho in range(target.rank):
        for j in range(j_max + 1):
            base = s_adj_flipped.apply_linear(LoopSeries.basis(target, wide, rho, j), wide)
            # Scalars of the truncated ground ring enter as monomial
            # multiplier copies of each image.
            for beta in iter_betas(target.class_rank, trunc.novikov_order):
                for eps in range(trunc.epsilon_order + 1):
                    shifted = {}
                    for (z, a, b, e), val in base.terms.items():
                        nb = tuple(x + y for x, y in zip(b, beta))
                        if wide.admits_grade(nb, e + eps):
                            shifted[(z, a, nb, e + eps)] = val
                    if shifted:
                        columns.append(shifted)
    targets_vecs = []
    labels = []
    for alpha in range(target.rank):
        for k in range(max(t.degree, 0) + 1):
            tv = tangent_vector(t, alpha, k, trunc, engine)
            targets_vecs.append(dict(tv.terms))
            labels.append((alpha, k))
    rank, in_span = _solve_membership(columns, targets_vecs)
    for label, ok in zip(labels, in_span):
        if not ok:
            failures.append({"part": "span", "tangent": list(label)})
    return CheckReport(
        name="tangent",
        passed=poly_ok and all(in_span),
        params={"target": target.name, **_trunc_params(trunc), "T": t.degree},
        failures=failures,
        seed=seed,
        notes=f"span rank {rank} over {len(columns)} spanning vectors; "
        f"membership is an empirical truncated statement",
    )
