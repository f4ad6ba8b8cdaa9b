"""Finite ribbon Hopf algebras: group algebras and Drinfeld doubles.

The group algebra has trivial braiding; the double of a nonabelian group
does not, which is what makes it a useful test bed.
"""

from qlgft.finite_hopf import Group, build_drinfeld_double, build_group_algebra, verify_ribbon_axioms

for H in (build_group_algebra(Group.symmetric(3)), build_drinfeld_double(Group.cyclic(2)),
          build_drinfeld_double(Group.symmetric(3))):
    report = verify_ribbon_axioms(H)
    passed = sum(ok for _, ok, _ in report.results)
    print(f"{H.name:8s} dim={H.dim:3d} R has {len(H.R):3d} terms, charm = {H.format(H.charm)}, "
          f"axioms {passed}/{len(report.results)}")

D = build_drinfeld_double(Group.symmetric(3))
print("theta^-1 in D(S3):", D.format(D.theta_inv))
