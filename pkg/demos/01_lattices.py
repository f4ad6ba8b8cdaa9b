"""Ciliated lattices, their surfaces, and elementary diagrams.

Run: python demos/01_lattices.py
"""

from pathlib import Path

from qlgft.lattice import compose_multitangle, envelope_stats, parse_lattice, stump, triad

DATA = Path(__file__).parent / "data"

for name in ("disk", "annulus", "punctured_torus", "bowtie"):
    lat = parse_lattice((DATA / f"{name}.lat").read_text())
    st = envelope_stats(lat)
    print(f"{name:16s} vertices={len(lat.vertices)} edges={len(lat.oriented_edges())} "
          f"boundary={st.boundary_count} chi={st.euler_characteristic} genus={st.genus}")

# Doubling the annulus edge and deleting one copy gives back an annulus with a renamed edge.
annulus = parse_lattice((DATA / "annulus.lat").read_text())
chain = compose_multitangle(annulus, [triad("e"), stump("e'")])
for step, lat in zip(chain.steps, chain.lattices[1:]):
    print(f"after {step}: {' | '.join(f'{v}: {list(hs)}' for v, hs in lat.vertices)}")
