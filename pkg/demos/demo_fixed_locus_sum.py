"""Enumerating the torus fixed loci of the one-relative-point graph
space and assembling their contributions.

Each splitting record assigns degree and markings to the two ends of
the bridge; five degenerate kinds cover the configurations where an end
fails to exist on its own.  Summing the weighted contributions lands
exactly on the transformed cone point.

Run:  python demos/demo_fixed_locus_sum.py
"""

from gwlab import (
    TPolynomial,
    cone_point,
    contribution,
    default_truncation,
    enumerate_splittings,
    localisation_sum,
    make_target,
    s_apply,
)

p2 = make_target("P2")
trunc = default_truncation(p2, 1, 2, 1)
t = TPolynomial.random(p2, 1, seed=3)

print("splitting records for (degree, markings) on the plane:")
for beta in ((0,), (1,)):
    for n in range(3):
        records = enumerate_splittings(p2, beta, n)
        kinds = ", ".join(
            f"{r.kind}[{r.beta0[0]},{r.n0}|{r.beta_inf[0]},{r.n_inf}]" for r in records
        )
        print(f"  beta={beta[0]}, n={n}: {kinds}")

rec = enumerate_splittings(p2, (1,), 1)[0]
print()
print(f"one contribution, kind {rec.kind}:")
for key, val in sorted(contribution(rec, t, trunc).terms.items()):
    print("  ", key, "->", val)

print()
left = localisation_sum(t, trunc)
right = s_apply(t, cone_point(t, trunc), trunc)
print(f"fixed-locus sum has {len(left.terms)} terms;")
print(f"matches the transformed cone point exactly: {left == right}")
