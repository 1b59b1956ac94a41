"""The cone point over a coordinate q = t - z*1, and the hidden
polynomiality of its transform under the solution operator.

The cone point carries arbitrarily negative z powers, and so does the
operator; applied to the cone they cancel exactly, leaving an element
of z * H_plus.  With a constant t everything except -z cancels.

Run:  python demos/demo_cone_and_polynomiality.py
"""

from gwlab import (
    TPolynomial,
    cone_point,
    default_truncation,
    make_target,
    s_apply,
)

p1 = make_target("P1")
trunc = default_truncation(p1, 2, 2, 1)
t = TPolynomial.random(p1, 1, seed=42)
print("t coefficients:", t.coeffs)

f = cone_point(t, trunc)
plus, minus = f.split_plus_minus()
print()
print(f"cone point: {len(f.terms)} terms, z-exponents "
      f"{min(z for z, *_ in f.terms)}..{max(z for z, *_ in f.terms)}")
print("negative part sample (z, basis, degree, eps) -> value:")
for key in sorted(minus.terms)[:6]:
    print("  ", key, "->", minus.terms[key])

sl = s_apply(t, f, trunc)
ok, offenders = sl.is_z_polynomial(strict=True)
print()
print(f"transformed cone point: {len(sl.terms)} terms, "
      f"lies in z*H_plus: {ok} (offenders: {offenders})")
print("surviving terms:")
for key in sorted(sl.terms):
    print("  ", key, "->", sl.terms[key])

print()
print("With a constant t the transform collapses to -z exactly:")
t0 = TPolynomial.random(p1, 0, seed=1)
sl0 = s_apply(t0, cone_point(t0, trunc), trunc)
print("  ", dict(sl0.terms))
