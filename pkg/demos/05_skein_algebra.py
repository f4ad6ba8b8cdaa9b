"""Wilson loops multiply like curves in the skein module.

Resolving crossings with weights -t, -t^-1 and circles with -(t^2 + t^-2)
reproduces the Wilson evaluation up to the sign (-1)^(components).
"""

import random
from pathlib import Path

from qlgft.lattice import parse_lattice
from qlgft.scalars import eval_at_one
from qlgft.skein import skein_product, skein_reduce, zeta_compare
from qlgft.uqsl2 import E, K
from qlgft.wilson import compile_qtangle, eval_wilson, parse_tangle, random_qtangle, stack_product, star_value

DATA = Path(__file__).parent / "data"
disk = parse_lattice((DATA / "disk.lat").read_text())
trefoil = parse_tangle((DATA / "trefoil.tangle").read_text(), disk)
print("trefoil in a disk:", skein_reduce(trefoil, disk).format())

torus = parse_lattice((DATA / "punctured_torus.lat").read_text())
a = skein_reduce(parse_tangle((DATA / "torus_a.tangle").read_text(), torus), torus)
b = skein_reduce(parse_tangle((DATA / "torus_b.tangle").read_text(), torus), torus)
print("a * b =", skein_product(a, b).format())
print("b * a =", skein_product(b, a).format())

rng = random.Random(0)
for _ in range(3):
    L = random_qtangle(torus, rng, 3, 3, components=2)
    conn = {e: K ** rng.randint(-2, 2) + E for e in torus.oriented_edges()}
    print(zeta_compare(L, conn, torus))

# Stacking two loops is the star product of their observables; the
# commutator vanishes at t = 1.
L, Lp = random_qtangle(torus, rng, 3, 1), random_qtangle(torus, rng, 3, 1)
conn = {e: K ** rng.randint(-2, 2) for e in torus.oriented_edges()}
ab = eval_wilson(compile_qtangle(torus, stack_product(torus, L, Lp)), conn)
ba = eval_wilson(compile_qtangle(torus, stack_product(torus, Lp, L)), conn)
print("W(L*L') =", ab, "| star product =", star_value(torus, L, Lp, conn))
print("commutator at t = 1:", eval_at_one(ab - ba))
