"""Finite-dimensional ribbon Hopf algebras given by structure constants.

Elements are sparse dicts ``{basis index: coefficient}``; elements of a tensor
power are dicts keyed by index tuples. Coefficients are ``int`` or
``Fraction``. Two constructions are provided: the group algebra ``k[G]``
(cocommutative, trivial R-matrix) and the Drinfeld double ``D(G)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "NotAGroup",
    "Group",
    "FiniteHopfBackend",
    "build_group_algebra",
    "build_drinfeld_double",
    "charm_element",
    "verify_ribbon_axioms",
    "AxiomReport",
    "parse_group_table",
    "rational_characters",
]

Elem = Dict[int, object]
Tensor = Dict[Tuple[int, ...], object]


class NotAGroup(ValueError):
    pass


# ---------------------------------------------------------------------------
# sparse linear algebra on dict elements


def _add_into(acc: dict, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def clean(x: dict) -> dict:
    return {k: v for k, v in x.items() if v}


def add(*xs: dict) -> dict:
    acc: dict = {}
    for x in xs:
        for k, c in x.items():
            _add_into(acc, k, c)
    return acc


def scale(x: dict, c) -> dict:
    if not c:
        return {}
    return {k: v * c for k, v in x.items()}


def sub(x: dict, y: dict) -> dict:
    return add(x, scale(y, -1))


def _as_frac(c):
    return c if isinstance(c, (int, Fraction)) else Fraction(c)


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class Group:
    names: Tuple[str, ...]
    table: Tuple[Tuple[int, ...], ...]
    name: str = "G"

    def __post_init__(self):
        n = len(self.names)
        if n == 0:
            raise NotAGroup("empty group")
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise NotAGroup("table is not square")
        for row in self.table:
            for x in row:
                if not 0 <= x < n:
                    raise NotAGroup("table entry outside the element set")
        ids = [e for e in range(n) if all(self.table[e][g] == g and self.table[g][e] == g for g in range(n))]
        if not ids:
            raise NotAGroup("no identity element")
        t = self.table
        for a in range(n):
            for b in range(n):
                ab = t[a][b]
                for c in range(n):
                    if t[ab][c] != t[a][t[b][c]]:
                        raise NotAGroup(f"not associative at ({self.names[a]}, {self.names[b]}, {self.names[c]})")
        e = ids[0]
        for a in range(n):
            if e not in t[a]:
                raise NotAGroup(f"{self.names[a]} has no inverse")
        object.__setattr__(self, "_e", e)
        object.__setattr__(self, "_inv", tuple(t[a].index(e) for a in range(n)))

    @property
    def order(self) -> int:
        return len(self.names)

    @property
    def identity(self) -> int:
        return self._e

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def index(self, name: str) -> int:
        return self.names.index(name)

    def conjugacy_classes(self) -> List[Tuple[int, ...]]:
        seen, out = set(), []
        for a in range(self.order):
            if a in seen:
                continue
            cls = sorted({self.mul(self.mul(g, a), self.inv(g)) for g in range(self.order)})
            seen.update(cls)
            out.append(tuple(cls))
        return out

    def is_abelian(self) -> bool:
        return all(self.table[a][b] == self.table[b][a] for a in range(self.order) for b in range(self.order))

    @classmethod
    def from_elements(cls, elements: Sequence, op: Callable, names: Sequence[str] | None = None, name: str = "G") -> "Group":
        elements = list(elements)
        idx = {x: i for i, x in enumerate(elements)}
        table = tuple(tuple(idx[op(a, b)] for b in elements) for a in elements)
        return cls(tuple(names or [str(x) for x in elements]), table, name)

    @classmethod
    def cyclic(cls, n: int) -> "Group":
        return cls.from_elements(range(n), lambda a, b: (a + b) % n, [f"g{i}" for i in range(n)], f"Z{n}")

    @classmethod
    def symmetric(cls, n: int) -> "Group":
        perms = sorted(itertools.permutations(range(n)))
        # (a*b)(i) = a(b(i))
        op = lambda a, b: tuple(a[b[i]] for i in range(n))
        names = ["".join(str(p[i] + 1) for i in range(n)) for p in perms]
        return cls.from_elements(perms, op, names, f"S{n}")

    @classmethod
    def trivial(cls) -> "Group":
        return cls(("e",), ((0,),), "1")


def parse_group_table(text: str) -> Group:
    """``group <name>`` header, optional ``elements ...`` line, then Cayley rows.

    Without an ``elements`` line the first row fixes the element order (so the
    identity must be listed first).
    """
    from .lattice import ParseError

    name, elements, rows = None, None, []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "group":
            if len(toks) != 2:
                raise ParseError("expected 'group <name>'", ln)
            name = toks[1]
        elif toks[0] == "elements":
            elements = toks[1:]
        else:
            rows.append((ln, toks))
    if name is None:
        raise ParseError("missing 'group <name>' header", 1)
    if not rows:
        raise ParseError("empty Cayley table", 1)
    if elements is None:
        elements = rows[0][1]
    idx = {x: i for i, x in enumerate(elements)}
    table = []
    for ln, toks in rows:
        if len(toks) != len(elements):
            raise ParseError(f"row has {len(toks)} entries, expected {len(elements)}", ln)
        try:
            table.append(tuple(idx[x] for x in toks))
        except KeyError as exc:
            raise ParseError(f"unknown element {exc.args[0]!r}", ln) from None
    return Group(tuple(elements), tuple(table), name)


# ---------------------------------------------------------------------------
# backends


@dataclass
class FiniteHopfBackend:
    """Ribbon Hopf algebra on a finite basis with sparse structure tensors."""

    name: str
    labels: Tuple[str, ...]
    mult: List[List[Elem]]
    cop: List[Tensor]
    anti: List[Elem]
    counit: List[object]
    unit: Elem
    R: Tensor
    theta: Elem
    group: Optional[Group] = None
    kind: str = "custom"
    _charm: Optional[Elem] = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    # --- algebra -----------------------------------------------------------
    def mul(self, x: Elem, y: Elem) -> Elem:
        acc: Elem = {}
        for i, a in x.items():
            row = self.mult[i]
            for j, b in y.items():
                for k, c in row[j].items():
                    _add_into(acc, k, a * b * c)
        return acc

    def mul_many(self, *xs: Elem) -> Elem:
        out = self.unit
        for x in xs:
            out = self.mul(out, x)
        return out

    def basis(self, i: int) -> Elem:
        return {i: 1}

    def S(self, x: Elem) -> Elem:
        acc: Elem = {}
        for i, a in x.items():
            for k, c in self.anti[i].items():
                _add_into(acc, k, a * c)
        return acc

    def eps(self, x: Elem):
        return sum((a * self.counit[i] for i, a in x.items()), 0)

    def Delta(self, x: Elem) -> Tensor:
        acc: Tensor = {}
        for i, a in x.items():
            for k, c in self.cop[i].items():
                _add_into(acc, k, a * c)
        return acc

    def coproduct_power(self, x: Elem, m: int) -> Tensor:
        """``Delta^(m-1)(x)`` as a tensor with ``m`` legs (``m = 0`` gives the counit)."""
        if m == 0:
            e = self.eps(x)
            return {(): e} if e else {}
        cur: Tensor = {(i,): a for i, a in x.items()}
        for _ in range(m - 1):
            nxt: Tensor = {}
            for key, a in cur.items():
                for (j, k), c in self.cop[key[-1]].items():
                    _add_into(nxt, key[:-1] + (j, k), a * c)
            cur = nxt
        return cur

    def inverse(self, x: Elem) -> Elem:
        key = ("inv", tuple(sorted(x.items())))
        if key in self._cache:
            return self._cache[key]
        n = self.dim
        # solve x * y = 1 exactly
        cols = [self.mul(x, {j: 1}) for j in range(n)]
        A = [[Fraction(cols[j].get(i, 0)) for j in range(n)] + [Fraction(self.unit.get(i, 0))] for i in range(n)]
        sol = _solve(A, n)
        if sol is None:
            raise ZeroDivisionError("element is not invertible")
        y = clean({j: _simplify(v) for j, v in enumerate(sol)})
        self._cache[key] = y
        return y

    # --- ribbon data --------------------------------------------------------
    @property
    def R_inv(self) -> Tensor:
        if "Rinv" not in self._cache:
            acc: Tensor = {}
            for (i, j), c in self.R.items():
                for k, d in self.anti[i].items():
                    _add_into(acc, (k, j), c * d)
            self._cache["Rinv"] = acc
        return self._cache["Rinv"]

    @property
    def charm(self) -> Elem:
        return charm_element(self)

    @property
    def charm_inv(self) -> Elem:
        return self.S(self.charm)

    @property
    def theta_inv(self) -> Elem:
        return self.inverse(self.theta)

    def regular_trace(self, x: Elem):
        """Trace of left multiplication by ``x``."""
        tr = 0
        for i, a in x.items():
            row = self.mult[i]
            for j in range(self.dim):
                tr += a * row[j].get(j, 0)
        return tr

    def with_antipode(self, anti: List[Elem]) -> "FiniteHopfBackend":
        return FiniteHopfBackend(self.name + "*", self.labels, self.mult, self.cop, anti, self.counit, self.unit, self.R, self.theta, self.group, self.kind)

    def element(self, text: str) -> Elem:
        """Parse ``label`` or ``2*label + label`` style combinations."""
        acc: Elem = {}
        for term in text.replace("-", "+-").split("+"):
            term = term.strip()
            if not term:
                continue
            sign = 1
            if term.startswith("-"):
                sign, term = -1, term[1:].strip()
            if "*" in term:
                c, lab = term.split("*", 1)
                c = Fraction(c.strip())
            else:
                c, lab = 1, term
            lab = lab.strip()
            if lab not in self.labels:
                raise ValueError(f"unknown basis label {lab!r} for {self.name}")
            _add_into(acc, self.labels.index(lab), sign * c)
        return acc

    def format(self, x: Elem) -> str:
        if not x:
            return "0"
        parts = []
        for i in sorted(x):
            c = x[i]
            parts.append(self.labels[i] if c == 1 else f"{c}*{self.labels[i]}")
        return " + ".join(parts)


def _simplify(v: Fraction):
    return int(v) if v.denominator == 1 else v


def _solve(A, n):
    """Gauss-Jordan on an augmented n x (n+1) Fraction matrix."""
    A = [row[:] for row in A]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [v / p for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


def build_group_algebra(G: Group | Sequence[Sequence[int]]) -> FiniteHopfBackend:
    if not isinstance(G, Group):
        rows = [tuple(r) for r in G]
        G = Group(tuple(f"g{i}" for i in range(len(rows))), tuple(rows))
    n = G.order
    mult = [[{G.mul(a, b): 1} for b in range(n)] for a in range(n)]
    cop = [{(a, a): 1} for a in range(n)]
    anti = [{G.inv(a): 1} for a in range(n)]
    e = G.identity
    R = {(e, e): 1}
    return FiniteHopfBackend(f"k[{G.name}]", G.names, mult, cop, anti, [1] * n, {e: 1}, R, {e: 1}, G, "group")


def build_drinfeld_double(G: Group | Sequence[Sequence[int]]) -> FiniteHopfBackend:
    """``D(G)`` on the basis ``delta_g * h``, index ``g * |G| + h``.

    The R-matrix convention is selected from the two standard ones by running
    the axiom checker; the ribbon element is the Drinfeld element ``u``
    (central here since ``S**2 = id``), which makes the charm trivial.
    """
    if not isinstance(G, Group):
        rows = [tuple(r) for r in G]
        G = Group(tuple(f"g{i}" for i in range(len(rows))), tuple(rows))
    n = G.order
    idx = lambda g, h: g * n + h
    labels = tuple(f"d{G.names[g]}.{G.names[h]}" for g in range(n) for h in range(n))
    mult = []
    for g in range(n):
        for x in range(n):
            row = []
            for b in range(n):
                for y in range(n):
                    if g == G.mul(G.mul(x, b), G.inv(x)):
                        row.append({idx(g, G.mul(x, y)): 1})
                    else:
                        row.append({})
            mult.append(row)
    cop = []
    for g in range(n):
        for x in range(n):
            t = {}
            for g1 in range(n):
                g2 = G.mul(G.inv(g1), g)
                t[(idx(g1, x), idx(g2, x))] = 1
            cop.append(t)
    anti = []
    for g in range(n):
        for x in range(n):
            xi = G.inv(x)
            anti.append({idx(G.mul(G.mul(xi, G.inv(g)), x), xi): 1})
    e = G.identity
    counit = [1 if g == e else 0 for g in range(n) for x in range(n)]
    unit = {idx(g, e): 1 for g in range(n)}
    candidates = [
        {(idx(g, e), idx(b, g)): 1 for g in range(n) for b in range(n)},  # sum delta_g (x) g
        {(idx(b, g), idx(g, e)): 1 for g in range(n) for b in range(n)},  # sum g (x) delta_g
    ]
    last = None
    for R in candidates:
        H = FiniteHopfBackend(f"D({G.name})", labels, mult, cop, anti, counit, unit, R, unit, G, "double")
        u = drinfeld_element(H)
        H.theta = u
        H._cache.clear()
        H._charm = None
        report = verify_ribbon_axioms(H)
        if report.ok:
            return H
        last = report
    raise AssertionError(f"no R convention satisfies the ribbon axioms for D({G.name}): {last.failures()}")


def drinfeld_element(H: FiniteHopfBackend) -> Elem:
    """``u = sum_i S(t_i) s_i``."""
    acc: Elem = {}
    for (i, j), c in H.R.items():
        for k, a in H.mul(H.S({j: 1}), {i: 1}).items():
            _add_into(acc, k, c * a)
    return acc


def charm_element(H: FiniteHopfBackend) -> Elem:
    """``k = theta^-1 S(t) s``; cached on the backend."""
    if H._charm is None:
        H._charm = H.mul(H.inverse(H.theta), drinfeld_element(H))
    return H._charm


# ---------------------------------------------------------------------------
# axiom verification


@dataclass
class AxiomReport:
    results: List[Tuple[str, bool, str]]

    @property
    def ok(self) -> bool:
        return all(p for _, p, _ in self.results)

    def failures(self) -> List[Tuple[str, str]]:
        return [(n, w) for n, p, w in self.results if not p]

    def __str__(self):
        return "\n".join(f"{'PASS' if p else 'FAIL'} {n}" + (f"  witness: {w}" if not p else "") for n, p, w in self.results)


def _tmul(H: FiniteHopfBackend, X: Tensor, Y: Tensor) -> Tensor:
    acc: Tensor = {}
    for ki, a in X.items():
        for kj, b in Y.items():
            parts = [H.mult[i][j] for i, j in zip(ki, kj)]
            for combo in itertools.product(*(p.items() for p in parts)):
                key = tuple(k for k, _ in combo)
                c = a * b
                for _, v in combo:
                    c *= v
                _add_into(acc, key, c)
    return acc


def _embed(T: Tensor, slots: Sequence[int], arity: int, unit: Elem) -> Tensor:
    """Place a tensor's legs at ``slots`` of an ``arity``-fold tensor, unit elsewhere."""
    acc: Tensor = {}
    others = [i for i in range(arity) if i not in slots]
    for key, c in T.items():
        for ucombo in itertools.product(unit.items(), repeat=len(others)):
            full = [None] * arity
            coef = c
            for s, k in zip(slots, key):
                full[s] = k
            for s, (k, v) in zip(others, ucombo):
                full[s] = k
                coef *= v
            _add_into(acc, tuple(full), coef)
    return acc


def verify_ribbon_axioms(H: FiniteHopfBackend) -> AxiomReport:
    n = H.dim
    B = range(n)
    res: List[Tuple[str, bool, str]] = []
    lab = H.labels

    def check(name, pairs):
        for witness, lhs, rhs in pairs:
            if clean(lhs) != clean(rhs):
                res.append((name, False, witness))
                return
        res.append((name, True, ""))

    def gen_assoc():
        for a in B:
            for b in B:
                ab = H.mult[a][b]
                for c in B:
                    yield f"{lab[a]},{lab[b]},{lab[c]}", H.mul(ab, {c: 1}), H.mul({a: 1}, H.mult[b][c])

    check("associativity", gen_assoc())
    check("unit", ((lab[a], H.mul(H.unit, {a: 1}), {a: 1}) for a in B))
    check("unit (right)", ((lab[a], H.mul({a: 1}, H.unit), {a: 1}) for a in B))

    def gen_coassoc():
        for a in B:
            D = H.cop[a]
            left, right = {}, {}
            for (i, j), c in D.items():
                for (k, l), d in H.cop[i].items():
                    _add_into(left, (k, l, j), c * d)
                for (k, l), d in H.cop[j].items():
                    _add_into(right, (i, k, l), c * d)
            yield lab[a], left, right

    check("coassociativity", gen_coassoc())

    def gen_counit():
        for a in B:
            l, r = {}, {}
            for (i, j), c in H.cop[a].items():
                _add_into(l, j, c * H.counit[i])
                _add_into(r, i, c * H.counit[j])
            yield lab[a], l, {a: 1}
            yield lab[a], r, {a: 1}

    check("counit", gen_counit())

    def gen_delta_hom():
        for a in B:
            for b in B:
                yield f"{lab[a]},{lab[b]}", H.Delta(H.mult[a][b]), _tmul(H, H.cop[a], H.cop[b])

    check("Delta is an algebra map", gen_delta_hom())
    check("epsilon is an algebra map", ((f"{lab[a]},{lab[b]}", {0: H.eps(H.mult[a][b])}, {0: H.counit[a] * H.counit[b]}) for a in B for b in B))
    uu = {(i, j): c * d for i, c in H.unit.items() for j, d in H.unit.items()}
    check("Delta(1) = 1 (x) 1", [("1", H.Delta(H.unit), uu)])

    def gen_antipode():
        for a in B:
            l, r = {}, {}
            for (i, j), c in H.cop[a].items():
                for k, v in H.mul(H.S({i: 1}), {j: 1}).items():
                    _add_into(l, k, c * v)
                for k, v in H.mul({i: 1}, H.S({j: 1})).items():
                    _add_into(r, k, c * v)
            target = scale(H.unit, H.counit[a])
            yield lab[a], l, target
            yield lab[a], r, target

    check("antipode", gen_antipode())

    R = H.R
    U = H.unit
    R12, R13, R23 = _embed(R, (0, 1), 3, U), _embed(R, (0, 2), 3, U), _embed(R, (1, 2), 3, U)
    check("QYBE", [("R12R13R23", _tmul(H, _tmul(H, R12, R13), R23), _tmul(H, _tmul(H, R23, R13), R12))])

    def gen_intertwine():
        for a in B:
            D = H.cop[a]
            Dop = {(j, i): c for (i, j), c in D.items()}
            yield lab[a], _tmul(H, R, D), _tmul(H, Dop, R)

    check("R Delta = Delta^op R", gen_intertwine())
    DR = {}
    for (i, j), c in R.items():
        for (k, l), d in H.cop[i].items():
            _add_into(DR, (k, l, j), c * d)
    check("(Delta (x) 1) R = R13 R23", [("R", DR, _tmul(H, R13, R23))])
    RD = {}
    for (i, j), c in R.items():
        for (k, l), d in H.cop[j].items():
            _add_into(RD, (i, k, l), c * d)
    check("(1 (x) Delta) R = R13 R12", [("R", RD, _tmul(H, R13, R12))])

    eR1, eR2 = {}, {}
    for (i, j), c in R.items():
        _add_into(eR1, j, c * H.counit[i])
        _add_into(eR2, i, c * H.counit[j])
    check("(eps (x) 1) R = 1 = (1 (x) eps) R", [("R", eR1, U), ("R", eR2, U)])
    SSR = {}
    for (i, j), c in R.items():
        for k, a in H.anti[i].items():
            for l, b in H.anti[j].items():
                _add_into(SSR, (k, l), c * a * b)
    check("(S (x) S) R = R", [("R", SSR, R)])

    th = H.theta
    try:
        thi = H.inverse(th)
        res.append(("theta invertible", True, ""))
    except ZeroDivisionError:
        res.append(("theta invertible", False, "theta"))
        return AxiomReport(res)
    check("theta central", ((lab[a], H.mul(th, {a: 1}), H.mul({a: 1}, th)) for a in B))
    R21R = _tmul(H, {(j, i): c for (i, j), c in R.items()}, R)
    thth = {(i, j): a * b for i, a in thi.items() for j, b in thi.items()}
    check("Delta(theta^-1) = (theta^-1 (x) theta^-1) R21 R", [("theta", H.Delta(thi), _tmul(H, thth, R21R))])
    check("S(theta) = theta", [("theta", H.S(th), th)])

    k = charm_element(H)
    try:
        ki = H.inverse(k)
    except ZeroDivisionError:
        res.append(("charm invertible", False, "k"))
        return AxiomReport(res)
    check("charm grouplike", [("k", H.Delta(k), {(i, j): a * b for i, a in k.items() for j, b in k.items()})])
    check("S^2-conjugation", ((lab[a], H.S(H.S({a: 1})), H.mul_many(k, {a: 1}, ki)) for a in B))
    tS2s = {}
    for (i, j), c in R.items():
        for kk, v in H.mul({j: 1}, H.S(H.S({i: 1}))).items():
            _add_into(tS2s, kk, c * v)
    check("k^-1 = S(k) = theta t S^2(s)", [("S(k)", H.S(k), ki), ("theta t S2(s)", H.mul(th, tS2s), ki)])
    check("eps(k) = 1", [("k", {0: H.eps(k)}, {0: 1})])
    return AxiomReport(res)


# ---------------------------------------------------------------------------
# characters


def rational_characters(G: Group) -> List[Dict[int, int]]:
    """Irreducible characters of ``G`` with rational values, as element -> value.

    Computed numerically from the class algebra (Burnside) and then rounded;
    characters whose values are not integers are omitted.
    """
    classes = G.conjugacy_classes()
    r = len(classes)
    cls_of = {}
    for ci, c in enumerate(classes):
        for g in c:
            cls_of[g] = ci
    # class multiplication constants: C_i C_j = sum_k a_ijk C_k
    M = np.zeros((r, r, r))
    for i, ci in enumerate(classes):
        for j, cj in enumerate(classes):
            counts = np.zeros(r)
            for a in ci:
                for b in cj:
                    counts[cls_of[G.mul(a, b)]] += 1
            M[i, j] = counts / np.array([len(c) for c in classes])
    rng = np.random.default_rng(12345)
    w = rng.standard_normal(r)
    A = np.tensordot(w, M, axes=(0, 0))  # sum_i w_i M_i acting as (j, k)
    vals, vecs = np.linalg.eig(A)
    out = []
    order = G.order
    for col in range(r):
        v = vecs[:, col]
        # v is proportional to the central character omega_k(C_j) = |C_j| chi(g_j) / chi(1)
        om = v / v[classes.index(tuple([G.identity]))]
        sizes = np.array([len(c) for c in classes])
        chi_over_deg = om / sizes
        s = np.sum(sizes * np.abs(chi_over_deg) ** 2)
        deg = np.sqrt(order / s)
        chi = deg * chi_over_deg
        if np.max(np.abs(chi.imag)) > 1e-8:
            continue
        rounded = np.rint(chi.real)
        if np.max(np.abs(chi.real - rounded)) > 1e-8:
            continue
        out.append({g: int(rounded[cls_of[g]]) for g in range(order)})
    out.sort(key=lambda ch: (ch[G.identity], tuple(-ch[g] for g in range(order))))
    return out
