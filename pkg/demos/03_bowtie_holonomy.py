"""Holonomy of a self-crossing loop, symbolically and numerically.

The loop passes twice through one band and crosses itself twice at the
four-valent vertex. Its holonomy word collapses to a short canonical form.
"""

import random
from pathlib import Path

from qlgft.finite_hopf import Group, build_group_algebra
from qlgft.lattice import parse_lattice
from qlgft.uqsl2 import E, K
from qlgft.wilson import canonical_word, compile_qtangle, eval_wilson, parse_tangle

DATA = Path(__file__).parent / "data"
lat = parse_lattice((DATA / "bowtie.lat").read_text())
loop = parse_tangle((DATA / "bowtie.tangle").read_text(), lat)
prog = compile_qtangle(lat, loop)

print("traversal word :", prog.word("L"))
word, blocks = canonical_word(prog)
print("canonical word :", word)
for k, v in sorted(blocks.items()):
    print(f"  {k} = {v}")

print("trivial connection, fundamental rep :", eval_wilson(prog, {}))
print("x_e = K + E on every edge           :", eval_wilson(prog, {e: K + E for e in lat.oriented_edges()}))

# Over k[S3] every crossing is trivial and the loop sees g_X^2 g_Y.
G = Group.symmetric(3)
H = build_group_algebra(G)
rng = random.Random(1)
for _ in range(4):
    g = {e: rng.randrange(G.order) for e in lat.oriented_edges()}
    value = eval_wilson(prog, {e: {i: 1} for e, i in g.items()}, H)
    print("k[S3]", {e: G.names[i] for e, i in sorted(g.items())}, "->", value)
print("k[S3] identity connection ->", eval_wilson(prog, {e: {0: 1} for e in lat.oriented_edges()}, H), "(= |S3|)")
