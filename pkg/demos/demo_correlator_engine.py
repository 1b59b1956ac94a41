"""Tour of the correlator engine: classical integrals on the space of
pointed rational curves, curve counts on the plane, and descendant
values that the reduction system grounds without any closed form.

Run:  python demos/demo_correlator_engine.py
"""

from gwlab import get_engine, make_target
from gwlab.oracles import projective_one_point_descendants

point = get_engine(make_target("point"))
print("Integrals of psi powers against rational pointed curves")
print("  <1,1,1>              =", point.correlator((), [(0, 0)] * 3))
print("  <psi,1,1,1>          =", point.correlator((), [(0, 1)] + [(0, 0)] * 3))
print("  <psi^2,1,1,1,1>      =", point.correlator((), [(0, 2)] + [(0, 0)] * 4))
print("  <psi,psi,1,1,1>      =", point.correlator((), [(0, 1), (0, 1)] + [(0, 0)] * 3))

print()
print("Rational plane curves of degree d through 3d-1 general points")
p2 = get_engine(make_target("P2"))
for d in range(1, 6):
    nd = p2.correlator((d,), [(2, 0)] * (3 * d - 1))
    print(f"  d={d}:  N_d = {nd}")

print()
print("One-point descendants of the line, cross-checked against the")
print("hypergeometric expansion of the small J-function:")
p1 = get_engine(make_target("P1"))
for d in (1, 2, 3):
    for (alpha, k), want in sorted(projective_one_point_descendants(1, d).items()):
        got = p1.correlator((d,), [(alpha, k)])
        cls = "1" if alpha == 0 else "H"
        print(f"  <{cls} psi^{k}>_d={d} = {got}   (oracle {want})")
        assert got == want

print()
print("Two-point descendants of the plane, produced by the divisor")
print("inversion that grounds short correlators:")
for a, k, b, l in ((2, 0, 2, 0), (2, 1, 1, 0), (1, 2, 1, 0), (0, 2, 2, 0)):
    val = p2.correlator((1,), [(a, k), (b, l)])
    print(f"  <H^{a} psi^{k}, H^{b} psi^{l}>_d=1 = {val}")
