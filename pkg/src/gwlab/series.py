"""Sparse exact algebra of truncated loop-space elements.

Elements of the symplectic loop space are finite Laurent polynomials in
z with cohomology coefficients, further graded by Novikov degree and by
a bookkeeping order ``eps`` that counts t-insertions.  Every identity
checked downstream is homogeneous in both gradings, so truncating at a
Novikov order D and an eps order E is exact order-by-order: retained
coefficients are the true ones, never approximations.

The z-window is different in kind: coefficients outside ``[z_min, z_max]``
are never dropped silently.  An operation that would produce one raises
``TruncationOverflowError``, because the polynomiality verdicts computed
on top of this module must not be artifacts of discarded terms.

Series values are immutable once built; all operations are pure
functions and safe for concurrent use without synchronisation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .targets import CohVector, NovikovDegree, TargetSpace, beta_add, beta_total

# A term key: (z exponent, basis index, novikov degree, eps order).
TermKey = tuple[int, int, NovikovDegree, int]


class MismatchError(ValueError):
    """Operands disagree on target or truncation."""


class TruncationOverflowError(ValueError):
    """A produced z-exponent falls outside the configured window."""

    def __init__(self, z_exp: int, z_min: int, z_max: int):
        self.z_exp = z_exp
        self.z_min = z_min
        self.z_max = z_max
        super().__init__(
            f"z^{z_exp} escapes the window [{z_min}, {z_max}]; "
            f"rerun with z_min <= {min(z_exp, z_min)} and z_max >= {max(z_exp, z_max)}"
        )


@dataclass(frozen=True)
class Truncation:
    """Evaluation bounds: Novikov order D, eps order E and the z-window."""

    novikov_order: int
    epsilon_order: int
    z_min: int
    z_max: int

    def __post_init__(self):
        if self.novikov_order < 0 or self.epsilon_order < 0:
            raise ValueError("truncation orders must be non-negative")
        if not (self.z_min <= 0 < self.z_max):
            raise ValueError("window must satisfy z_min <= 0 < z_max")

    def admits_grade(self, beta: NovikovDegree, eps: int) -> bool:
        return beta_total(beta) <= self.novikov_order and eps <= self.epsilon_order

    def check_window(self, z_exp: int) -> None:
        if z_exp < self.z_min or z_exp > self.z_max:
            raise TruncationOverflowError(z_exp, self.z_min, self.z_max)


class ScalarSeries:
    """Truncated scalar series in the Novikov and eps gradings."""

    __slots__ = ("trunc", "terms")

    def __init__(self, trunc: Truncation, terms: dict | None = None):
        self.trunc = trunc
        clean: dict[tuple[NovikovDegree, int], Fraction] = {}
        for key, val in (terms or {}).items():
            v = Fraction(val)
            if v and trunc.admits_grade(*key):
                clean[key] = v
        self.terms = clean

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ScalarSeries)
            and self.trunc == other.trunc
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"ScalarSeries({len(self.terms)} terms)"

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, beta: NovikovDegree, eps: int) -> Fraction:
        return self.terms.get((beta, eps), Fraction(0))

    def add(self, other: "ScalarSeries") -> "ScalarSeries":
        if self.trunc != other.trunc:
            raise MismatchError("scalar series truncations differ")
        out = dict(self.terms)
        for key, val in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + val
        return ScalarSeries(self.trunc, out)

    def scale(self, c) -> "ScalarSeries":
        c = Fraction(c)
        return ScalarSeries(self.trunc, {k: c * v for k, v in self.terms.items()})

    def mul(self, other: "ScalarSeries") -> "ScalarSeries":
        """Graded product; grades beyond the truncation are dropped exactly."""
        if self.trunc != other.trunc:
            raise MismatchError("scalar series truncations differ")
        out: dict[tuple[NovikovDegree, int], Fraction] = {}
        for (b1, e1), v1 in self.terms.items():
            for (b2, e2), v2 in other.terms.items():
                key = (beta_add(b1, b2), e1 + e2)
                if self.trunc.admits_grade(*key):
                    out[key] = out.get(key, Fraction(0)) + v1 * v2
        return ScalarSeries(self.trunc, out)


class LoopSeries:
    """Truncated element of the loop space over a fixed target."""

    __slots__ = ("target", "trunc", "terms")

    def __init__(self, target: TargetSpace, trunc: Truncation, terms: dict | None = None):
        self.target = target
        self.trunc = trunc
        clean: dict[TermKey, Fraction] = {}
        for (z, alpha, beta, eps), val in (terms or {}).items():
            v = Fraction(val)
            if not v:
                continue
            trunc.check_window(z)
            if not trunc.admits_grade(beta, eps):
                raise MismatchError(
                    f"term at novikov {beta}, eps {eps} exceeds truncation "
                    f"({trunc.novikov_order}, {trunc.epsilon_order})"
                )
            clean[(z, alpha, beta, eps)] = v
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, target: TargetSpace, trunc: Truncation) -> "LoopSeries":
        return cls(target, trunc, {})

    @classmethod
    def basis(cls, target: TargetSpace, trunc: Truncation, alpha: int, z_exp: int = 0) -> "LoopSeries":
        """phi_alpha z^k with trivial Novikov and eps grading."""
        rank = target.class_rank
        return cls(target, trunc, {(z_exp, alpha, (0,) * rank, 0): Fraction(1)})

    # -- basic structure ----------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LoopSeries)
            and self.target == other.target
            and self.trunc == other.trunc
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        return f"LoopSeries({self.target.name}, {len(self.terms)} terms)"

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, z_exp: int, alpha: int, beta: NovikovDegree, eps: int) -> Fraction:
        return self.terms.get((z_exp, alpha, beta, eps), Fraction(0))

    def _check_compatible(self, other: "LoopSeries") -> None:
        if self.target != other.target:
            raise MismatchError("series live over different targets")
        if self.trunc != other.trunc:
            raise MismatchError("series truncations differ")

    def add(self, other: "LoopSeries") -> "LoopSeries":
        self._check_compatible(other)
        out = dict(self.terms)
        for key, val in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + val
        return LoopSeries(self.target, self.trunc, out)

    def scale(self, c) -> "LoopSeries":
        c = Fraction(c)
        return LoopSeries(self.target, self.trunc, {k: c * v for k, v in self.terms.items()})

    def __add__(self, other):
        return self.add(other)

    def __sub__(self, other):
        return self.add(other.scale(-1))

    def substitute_minus_z(self) -> "LoopSeries":
        """f(z) -> f(-z): sign (-1)^k on the z^k coefficient."""
        out = {}
        for (z, alpha, beta, eps), val in self.terms.items():
            out[(z, alpha, beta, eps)] = val if z % 2 == 0 else -val
        return LoopSeries(self.target, self.trunc, out)

    # -- pairing, residue, polarisation -------------------------------------

    def pair_extend(self, other: "LoopSeries") -> dict[tuple[int, NovikovDegree, int], Fraction]:
        """Poincare pairing extended bilinearly; a scalar series in (z, Q, eps).

        All z-exponents of the product are kept (nothing to drop: the
        result is not re-windowed), while Novikov and eps grades beyond
        the truncation are discarded exactly as in every graded product.
        """
        self._check_compatible(other)
        pairing = self.target.pairing
        out: dict[tuple[int, NovikovDegree, int], Fraction] = {}
        for (z1, a1, b1, e1), v1 in self.terms.items():
            row = pairing[a1]
            for (z2, a2, b2, e2), v2 in other.terms.items():
                p = row[a2]
                if not p:
                    continue
                beta = beta_add(b1, b2)
                eps = e1 + e2
                if not self.trunc.admits_grade(beta, eps):
                    continue
                key = (z1 + z2, beta, eps)
                out[key] = out.get(key, Fraction(0)) + v1 * v2 * p
        return {k: v for k, v in out.items() if v}

    def omega(self, other: "LoopSeries") -> ScalarSeries:
        """Symplectic form: the z^{-1} coefficient of (f(-z), g(z))."""
        flipped = self.substitute_minus_z()
        paired = flipped.pair_extend(other)
        out = {}
        for (z, beta, eps), val in paired.items():
            if z == -1:
                out[(beta, eps)] = val
        return ScalarSeries(self.trunc, out)

    def split_plus_minus(self) -> tuple["LoopSeries", "LoopSeries"]:
        """Polarisation: (z-exponents >= 0, z-exponents < 0); sum is f."""
        plus, minus = {}, {}
        for key, val in self.terms.items():
            (plus if key[0] >= 0 else minus)[key] = val
        return (
            LoopSeries(self.target, self.trunc, plus),
            LoopSeries(self.target, self.trunc, minus),
        )

    def is_z_polynomial(self, strict: bool = False) -> tuple[bool, list[TermKey]]:
        """Whether every retained coefficient at z^{<=0} (strict) or z^{<0} vanishes.

        ``strict=True`` tests membership in z*H_plus, ``strict=False``
        in H_plus.  Returns the full sorted list of offending keys.
        """
        cut = 0 if strict else -1
        offenders = sorted(k for k in self.terms if k[0] <= cut)
        return (not offenders, offenders)

    # -- serialization ------------------------------------------------------

    def to_records(self) -> list[dict]:
        records = []
        for (z, alpha, beta, eps) in sorted(self.terms):
            val = self.terms[(z, alpha, beta, eps)]
            records.append(
                {
                    "z_exp": z,
                    "basis": alpha,
                    "novikov": list(beta),
                    "eps": eps,
                    "num": val.numerator,
                    "den": val.denominator,
                }
            )
        return records

    @classmethod
    def from_records(cls, target: TargetSpace, trunc: Truncation, records) -> "LoopSeries":
        terms = {}
        for rec in records:
            key = (int(rec["z_exp"]), int(rec["basis"]), tuple(int(d) for d in rec["novikov"]), int(rec["eps"]))
            terms[key] = Fraction(int(rec["num"]), int(rec["den"]))
        return cls(target, trunc, terms)

    def to_json(self) -> str:
        return json.dumps(self.to_records(), sort_keys=True)

    @classmethod
    def from_json(cls, target: TargetSpace, trunc: Truncation, text: str) -> "LoopSeries":
        return cls.from_records(target, trunc, json.loads(text))


class SeriesAccumulator:
    """Mutable builder used by the generating-function assemblers.

    Novikov/eps grades beyond the truncation are dropped (the graded
    truncation is exact), while an out-of-window z-exponent raises.
    """

    __slots__ = ("target", "trunc", "_terms")

    def __init__(self, target: TargetSpace, trunc: Truncation):
        self.target = target
        self.trunc = trunc
        self._terms: dict[TermKey, Fraction] = {}

    def add(self, z_exp: int, alpha: int, beta: NovikovDegree, eps: int, value: Fraction) -> None:
        if not value:
            return
        if not self.trunc.admits_grade(beta, eps):
            return
        self.trunc.check_window(z_exp)
        key = (z_exp, alpha, beta, eps)
        self._terms[key] = self._terms.get(key, Fraction(0)) + value

    def add_vector(self, z_exp: int, vec: CohVector, beta: NovikovDegree, eps: int, scale: Fraction) -> None:
        for alpha, comp in enumerate(vec):
            if comp:
                self.add(z_exp, alpha, beta, eps, comp * scale)

    def add_series(self, series: LoopSeries) -> None:
        for (z, alpha, beta, eps), val in series.terms.items():
            self.add(z, alpha, beta, eps, val)

    def series(self) -> LoopSeries:
        return LoopSeries(self.target, self.trunc, self._terms)
