"""Gauge symmetry: cilium turns, switches and pushes change connections
only up to gauge, so observables cannot tell the difference."""

from qlgft import connection as cx
from qlgft.finite_hopf import Group, build_drinfeld_double, build_group_algebra
from qlgft.lattice import Lattice

D = build_drinfeld_double(Group.cyclic(2))
lat = Lattice.build({"u": ("a", "-b", "c"), "w": ("-c", "b", "-a")})
cycles = cx.toggle_switch_cycles(lat, "u")
states = list(cx.ConnectionState.all_basis(lat, D))
trivial = sum(all(cx.gauge_equivalent(cx.evaluate_multitangle(cx.cycle_multitangle(lat, "u", w), x), x) for x in states)
              for w in cycles)
print(f"{len(cycles)} toggle/switch cycles at u, {trivial} act trivially up to gauge on all {len(states)} basis connections")

H = build_group_algebra(Group.symmetric(3))
push_lat = Lattice.build({"u": ("-e1", "-e2", "e0"), "v0": ("-e0", "e1", "e2")})
moved = sum(not cx.evaluate_multitangle(cx.push(push_lat, "e0"), x).same_as(x)
            for x in cx.ConnectionState.all_basis(push_lat, H))
print(f"push along e0 changes {moved} of {H.dim ** 3} basis connections;",
      f"visible to observables: {len(cx.push_invisibility_defects(push_lat, 'e0', H))} times")
