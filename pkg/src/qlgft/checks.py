"""Verification suites returning structured, deterministic reports.

Every suite takes an explicit seed; no suite reads global random state.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import connection as cx
from .finite_hopf import FiniteHopfBackend, Group, build_drinfeld_double, build_group_algebra, verify_ribbon_axioms
from .lattice import Lattice, envelope_stats, neg, paper_example_lattice
from .moves import MOVES, move_invariance_check
from .scalars import LaurentPoly, eval_at_one
from .skein import kink_factor, zeta_compare
from .uqsl2 import FUND, E, F, K, quantum_ch_residual, trace
from .wilson import QTangle, canonical_word, compile_qtangle, eval_wilson, random_qtangle, stack_product, star_value

__all__ = [
    "Check",
    "Report",
    "SURFACES",
    "backend",
    "group",
    "axioms_report",
    "moves_report",
    "coalgebra_report",
    "cycles_report",
    "full_turn_report",
    "push_report",
    "ch_report",
    "zeta_report",
    "star_report",
    "constants_report",
    "bowtie_report",
    "bowtie_tangle",
    "BOWTIE_WORD",
    "random_k_connection",
    "random_uq_connection",
    "small_lattices",
]


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")

    def as_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class Report:
    title: str
    checks: List[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(ok), detail))

    def text(self) -> str:
        lines = [f"# {self.title}"] + [c.line() for c in self.checks]
        lines.append(f"# {'all passed' if self.ok else 'FAILED'} ({sum(c.ok for c in self.checks)}/{len(self.checks)})")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {"title": self.title, "ok": self.ok, "checks": [c.as_dict() for c in self.checks]}


SURFACES: Dict[str, Lattice] = {
    "disk": Lattice.build({"u": ["a"], "w": ["-a"]}),
    "annulus": Lattice.build({"v": ["-e", "e"]}),
    "punctured-torus": Lattice.build({"v": ["a", "b", "-a", "-b"]}),
}


def group(spec: str) -> Group:
    """``Z<n>``, ``S<n>`` or ``trivial``."""
    s = spec.strip()
    if s.lower() == "trivial":
        return Group.trivial()
    if s[:1] in "ZC" and s[1:].isdigit():
        return Group.cyclic(int(s[1:]))
    if s[:1] == "S" and s[1:].isdigit():
        return Group.symmetric(int(s[1:]))
    raise ValueError(f"unknown group {spec!r}; use Z<n>, S<n> or a table file")


def backend(kind: str, G: Group) -> FiniteHopfBackend:
    if kind == "group":
        return build_group_algebra(G)
    if kind == "double":
        return build_drinfeld_double(G)
    raise ValueError(f"no finite backend named {kind!r}")


def axioms_report(H: FiniteHopfBackend) -> Report:
    rep = Report(f"ribbon axioms for {H.name}")
    for name, passed, witness in verify_ribbon_axioms(H).results:
        rep.add(name, passed, "" if passed else witness)
    return rep


def moves_report(H: FiniteHopfBackend, samples: Optional[int] = None, seed: int = 0,
                 moves: Optional[Sequence[str]] = None) -> Report:
    rep = Report(f"move invariance over {H.name}" + (f" ({samples} samples per case)" if samples else " (all basis connections)"))
    for m in moves or MOVES:
        r = move_invariance_check(m, H, samples=samples, seed=seed)
        detail = f"{r.cases} cases, {r.evaluations} evaluations"
        if r.failures:
            detail += f"; first mismatch {r.failures[0]}"
        rep.add(m, r.ok, detail)
    return rep


def small_lattices(max_edges: int = 3, max_vertices: int = 2) -> List[Tuple[str, Lattice]]:
    """Every connected lattice up to the bounds, one per cilial/orientation pattern up to relabelling."""
    out: List[Tuple[str, Lattice]] = []
    seen = set()
    for n_v in range(1, max_vertices + 1):
        for n_e in range(1, max_edges + 1):
            halves = [f"e{i}" for i in range(1, n_e + 1)] + [f"-e{i}" for i in range(1, n_e + 1)]
            for assign in itertools.product(range(n_v), repeat=len(halves)):
                if len(set(assign)) != n_v or assign[0] != 0:
                    continue
                groups: List[List[str]] = [[] for _ in range(n_v)]
                for h, v in zip(halves, assign):
                    groups[v].append(h)
                for orders in itertools.product(*[list(itertools.permutations(g)) for g in groups]):
                    verts = [(f"v{i + 1}", o) for i, o in enumerate(orders)]
                    try:
                        lat = Lattice.build(verts)
                    except ValueError:
                        continue
                    if envelope_stats(lat).components != 1:
                        continue
                    key = _shape_key(lat)
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append((f"{n_v}v{n_e}e#{len(out)}", lat))
    return out


def _shape_key(lat: Lattice):
    """Relabelling-invariant key: minimum over edge renamings, flips and vertex orders."""
    edges = sorted({h.lstrip("-") for h in lat.half_edges()})
    best = None
    for perm in itertools.permutations(range(len(edges))):
        for flips in itertools.product((False, True), repeat=len(edges)):
            ren = {}
            for i, e in enumerate(edges):
                j = perm[i]
                a, b = (f"e{j}", f"-e{j}") if not flips[i] else (f"-e{j}", f"e{j}")
                ren[e], ren["-" + e] = a, b
            verts = sorted(tuple(ren[h] for h in hs) for _, hs in lat.vertices)
            key = tuple(verts)
            if best is None or key < best:
                best = key
    return best


def coalgebra_report(H: FiniteHopfBackend, lattices: Optional[Sequence[Tuple[str, Lattice]]] = None) -> Report:
    lattices = lattices if lattices is not None else small_lattices()
    rep = Report(f"coalgebra laws of the connection coproduct over {H.name}")
    for name, lat in lattices:
        defects = []
        for x in cx.ConnectionState.all_basis(lat, H):
            d = cx.coassociativity_defect(lat, x) or cx.counit_defect(lat, x)
            if d:
                defects.append(f"{x.format()}: {d}")
                break
        shape = " ".join(f"{v}({','.join(hs)})" for v, hs in lat.vertices)
        rep.add(f"{name} {shape}", not defects, defects[0] if defects else "")
    return rep


def cycles_report(H: FiniteHopfBackend, lat: Optional[Lattice] = None, v: Optional[str] = None) -> Report:
    lat = lat or Lattice.build({"u": ("a", "-b", "c"), "w": ("-c", "b", "-a")})
    v = v or lat.vertex_names()[0]
    rep = Report(f"toggle/switch cycles at {v} over {H.name}")
    xs = list(cx.ConnectionState.all_basis(lat, H))
    for word in cx.toggle_switch_cycles(lat, v):
        mt = cx.cycle_multitangle(lat, v, word)
        bad = next((x for x in xs if not cx.gauge_equivalent(cx.evaluate_multitangle(mt, x), x)), None)
        label = " ".join(f"T{'+' if a > 0 else '-'}" if k == "T" else f"S({a})" for k, a in word)
        rep.add(label, bad is None, f"not gauge equivalent at {bad.format()}" if bad else "")
    return rep


def full_turn_report(H: FiniteHopfBackend, valence: int = 3) -> Report:
    """Toggling ``|v|`` times at a vertex whose edges all start there acts by ``Delta^(|v|-1)(theta^-1)``."""
    names = [f"e{i}" for i in range(1, valence + 1)]
    lat = Lattice.build({"u": tuple(names), "w": tuple(neg(e) for e in reversed(names))})
    one = cx.ConnectionState.simple(lat, H, {})
    got = cx.evaluate_multitangle(cx.toggle_power(lat, "u"), one).reorder(names)
    want = {k: c for k, c in H.coproduct_power(H.theta_inv, valence).items() if c}
    rep = Report(f"full cilium turn over {H.name}")
    rep.add(f"tau^{valence}(1) = Delta^{valence - 1}(theta^-1)", got.data == want)
    return rep


def push_report(H: FiniteHopfBackend) -> Report:
    lat = Lattice.build({"u": ("-e1", "-e2", "e0"), "v0": ("-e0", "e1", "e2")})
    rep = Report(f"push invisibility along e0 over {H.name}")
    bad = cx.push_invisibility_defects(lat, "e0", H)
    rep.add("observables cannot see the push", not bad, f"{len(bad)} defects, first {bad[0]}" if bad else "")
    moved = sum(not cx.evaluate_multitangle(cx.push(lat, "e0"), x).same_as(x) for x in cx.ConnectionState.all_basis(lat, H))
    rep.add("push moves some connections", moved > 0 or H.dim == 1, f"{moved} basis connections change")
    return rep


def _rand_laurent(rng: random.Random, span: int = 3) -> LaurentPoly:
    return LaurentPoly({rng.randint(-span, span): rng.randint(-3, 3) for _ in range(rng.randint(1, 3))})


def _rand_matrix(rng: random.Random) -> np.ndarray:
    M = np.empty((2, 2), dtype=object)
    for i in range(2):
        for j in range(2):
            M[i, j] = _rand_laurent(rng)
    return M


def _rand_sl2(rng: random.Random) -> np.ndarray:
    while True:
        a = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        if a:
            break
    b = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    c = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
    return np.array([[a, b], [c, (1 + b * c) / a]], dtype=object)


def ch_report(samples: int = 100, seed: int = 0) -> Report:
    rng = random.Random(seed)
    rep = Report(f"quantum Cayley-Hamilton on {samples} random pairs (seed {seed})")
    bad = []
    for i in range(samples):
        Z, W = _rand_matrix(rng), _rand_matrix(rng)
        r = quantum_ch_residual(Z, W)
        if not r.is_zero():
            bad.append(f"pair {i}: residual {r}")
    rep.add("t tr(ZW) + t^-1 tr(S(Z)W) = sum tr(s Z) tr(t W)", not bad, bad[0] if bad else f"{samples} pairs")
    bad = []
    for i in range(samples):
        A, B = _rand_sl2(rng), _rand_sl2(rng)
        Ainv = np.array([[A[1, 1], -A[0, 1]], [-A[1, 0], A[0, 0]]], dtype=object)
        lhs = np.trace(A.dot(B)) + np.trace(Ainv.dot(B))
        if lhs != np.trace(A) * np.trace(B):
            bad.append(f"pair {i}")
    rep.add("t = 1: tr(AB) + tr(A^-1 B) = tr(A) tr(B) on SL2(Q)", not bad, bad[0] if bad else f"{samples} pairs")
    bad = []
    for i in range(samples):
        Z, W = _rand_matrix(rng), _rand_matrix(rng)
        Z1 = np.vectorize(eval_at_one, otypes=[object])(Z)
        W1 = np.vectorize(eval_at_one, otypes=[object])(W)
        adj = np.array([[Z1[1, 1], -Z1[0, 1]], [-Z1[1, 0], Z1[0, 0]]], dtype=object)
        if np.trace(Z1.dot(W1)) + np.trace(adj.dot(W1)) != np.trace(Z1) * np.trace(W1):
            bad.append(f"pair {i}")
    rep.add("t = 1 specialisation of random Laurent pairs", not bad, bad[0] if bad else f"{samples} pairs")
    return rep


def random_k_connection(lat: Lattice, rng: random.Random, span: int = 2) -> Dict[str, object]:
    """Every oriented edge gets a random power of ``K``."""
    return {e: K ** rng.randint(-span, span) for e in lat.oriented_edges()}


def random_uq_connection(lat: Lattice, rng: random.Random, span: int = 2) -> Dict[str, object]:
    """Edges carry ``K^a + c E K^b + d F`` with small random integers."""
    out = {}
    for e in lat.oriented_edges():
        x = K ** rng.randint(-span, span)
        c, d = rng.randint(-2, 2), rng.randint(-2, 2)
        out[e] = x + c * E * K ** rng.randint(-span, span) + d * F
    return out


def zeta_report(surfaces: Sequence[str] = ("annulus", "punctured-torus"), samples: int = 20, seed: int = 0,
                connections: int = 5, max_crossings: int = 3) -> Report:
    rng = random.Random(seed)
    rep = Report(f"skein reduction vs Wilson evaluation, {samples} diagrams, {connections} connections each (seed {seed})")
    for i in range(samples):
        name = surfaces[i % len(surfaces)]
        lat = SURFACES[name]
        L = random_qtangle(lat, rng, max_len=3, max_crossings=max_crossings, components=rng.choice([1, 1, 2]))
        fails = []
        for _ in range(connections):
            conn = random_uq_connection(lat, rng)
            r = zeta_compare(L, conn, lat)
            if not r.ok:
                fails.append(str(r))
        words = "; ".join(" ".join(h if j is None else f"{h}.{j}" for h, j in c.word) for c in L.components)
        braids = ",".join(f"{v}:{list(w)}" for v, w in L.braids) or "no crossings"
        rep.add(f"{name} #{i} [{words}] {braids}", not fails, fails[0] if fails else "")
    return rep


def star_report(surfaces: Sequence[str] = ("annulus", "punctured-torus"), samples: int = 20, seed: int = 0,
                connections: int = 5, H: Optional[FiniteHopfBackend] = None) -> Tuple[Report, Report]:
    """Stacking vs the star product, and the classical limit of the commutator."""
    rng = random.Random(seed)
    H = H or build_group_algebra(Group.symmetric(3))
    star = Report(f"W_L * W_L' = W_(L*L') over U_q(sl2) and {H.name}, {samples} pairs (seed {seed})")
    classical = Report(f"commutators vanish at t = 1, {samples} pairs (seed {seed})")
    for i in range(samples):
        name = surfaces[i % len(surfaces)]
        lat = SURFACES[name]
        L = random_qtangle(lat, rng, 3, 2)
        Lp = random_qtangle(lat, rng, 3, 2)
        p = compile_qtangle(lat, stack_product(lat, L, Lp))
        pr = compile_qtangle(lat, stack_product(lat, Lp, L))
        fails, comm = [], []
        for _ in range(connections):
            conn = random_k_connection(lat, rng)
            a, b = eval_wilson(p, conn), star_value(lat, L, Lp, conn)
            if a != b:
                fails.append(f"quantum {a} vs {b}")
            c = eval_at_one(a - eval_wilson(pr, conn))
            if c != 0:
                comm.append(f"commutator at t=1 is {c}")
            x = {e: {rng.randrange(H.dim): 1} for e in lat.oriented_edges()}
            fa, fb = eval_wilson(p, x, H), star_value(lat, L, Lp, x, H)
            if fa != fb:
                fails.append(f"{H.name} {fa} vs {fb}")
        label = f"{name} #{i}"
        star.add(label, not fails, fails[0] if fails else "")
        classical.add(label, not comm, comm[0] if comm else "")
    return star, classical


BOWTIE_WORD = "t1 X' k t2 X'' k s2 s1 Y"


def bowtie_tangle() -> Tuple[Lattice, QTangle]:
    """The figure-eight loop through the four-valent vertex ``c``, crossing itself twice there."""
    lat = paper_example_lattice()
    return lat, QTangle.loop("e4.1 -e5.2 e6.1 e4.2 -e5.1 e6.2 e1 e2 e3", {"c": [2, -4]})


def bowtie_report(samples: int = 200, seed: int = 0, G: Optional[Group] = None) -> Report:
    lat, L = bowtie_tangle()
    prog = compile_qtangle(lat, L)
    word, blocks = canonical_word(prog)
    rep = Report("bowtie holonomy")
    rep.add("canonical word", word == BOWTIE_WORD, f"{word}  with " + ", ".join(f"{k} = {v}" for k, v in sorted(blocks.items())))
    G = G or Group.symmetric(3)
    H = build_group_algebra(G)
    rng = random.Random(seed)
    bad = None
    for _ in range(samples):
        g = {e: rng.randrange(G.order) for e in lat.oriented_edges()}
        gx = G.mul(G.mul(g["e4"], G.inv(g["e5"])), g["e6"])
        gy = G.mul(G.mul(g["e1"], g["e2"]), g["e3"])
        hol = G.mul(G.mul(gx, gx), gy)
        want = G.order if hol == G.identity else 0
        got = eval_wilson(prog, {e: {i: 1} for e, i in g.items()}, H)
        if got != want:
            bad = f"{g}: {got} != {want}"
            break
    rep.add(f"k[{G.name}] value = regular character of g_X^2 g_Y", bad is None, bad or f"{samples} grouplike connections")
    return rep


def constants_report() -> Report:
    rep = Report("fundamental constants")
    disk = SURFACES["disk"]
    dim = LaurentPoly({2: 1, -2: 1})
    unknot = eval_wilson(compile_qtangle(disk, QTangle.loop("a -a")), {})
    rep.add("unknot = t^2 + t^-2", unknot == dim, str(unknot))
    kinked = eval_wilson(compile_qtangle(disk, QTangle.loop("a -a", {"w": [-1]})), {})
    rep.add("writhe +1 kink = t^3 (t^2 + t^-2)", kinked == dim * LaurentPoly.monomial(3), str(kinked))
    rep.add("quantum trace of k = t^2 + t^-2", LaurentPoly.coerce(trace(FUND.k)) == dim)
    rep.add("theta_f = t^-3", FUND.theta == LaurentPoly.monomial(-3), str(FUND.theta))
    kf = kink_factor()
    rep.add("skein kink factor = theta_f^-1", kf * FUND.theta == LaurentPoly.const(1), str(kf))
    return rep
