"""Exact scalars: Laurent polynomials in ``t``, rational functions and h-series.

All arithmetic is over :class:`fractions.Fraction`; nothing here touches floats.
The quantum parameter is ``q = t**2`` and the formal deformation parameter
enters through ``t = exp(h/4)``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Dict, Iterable, Mapping, Tuple

__all__ = [
    "LaurentPoly",
    "RationalFn",
    "HSeries",
    "T",
    "ONE",
    "ZERO",
    "ring_arith",
    "eval_at_one",
    "h_expand",
    "parse_laurent",
]


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, Rational):
        return Fraction(c)
    raise TypeError(f"not an exact rational coefficient: {c!r}")


class LaurentPoly:
    """Element of Q[t, t^-1], stored as a sparse exponent -> coefficient map."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean: Dict[int, Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = _frac(c)
                if c:
                    clean[int(e)] = clean.get(int(e), Fraction(0)) + c
            clean = {e: c for e, c in clean.items() if c}
        self._terms: Tuple[Tuple[int, Fraction], ...] = tuple(sorted(clean.items()))
        self._hash = None

    # construction helpers
    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def monomial(cls, exp: int, c=1) -> "LaurentPoly":
        return cls({exp: c})

    @classmethod
    def coerce(cls, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, Rational):
            return cls({0: other})
        raise TypeError(f"cannot coerce {other!r} to LaurentPoly")

    # inspection
    @property
    def terms(self) -> Tuple[Tuple[int, Fraction], ...]:
        return self._terms

    def coeffs(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def min_exp(self) -> int:
        return self._terms[0][0]

    def max_exp(self) -> int:
        return self._terms[-1][0]

    def constant(self):
        """The coefficient if this is a constant, else ``None``."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1 and self._terms[0][0] == 0:
            return self._terms[0][1]
        return None

    # arithmetic
    def __add__(self, other):
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for e, c in other._terms:
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms})

    def __sub__(self, other):
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Rational):
            return LaurentPoly({e: c * other for e, c in self._terms})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        acc: Dict[int, Fraction] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ZeroDivisionError("only monomials are units in Q[t, 1/t]")
            (e, c), = self._terms
            return LaurentPoly({e * n: Fraction(1) / c ** (-n)})
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``t**k``."""
        return LaurentPoly({e + k: c for e, c in self._terms})

    def substitute_power(self, k: int) -> "LaurentPoly":
        """Replace ``t`` by ``t**k``."""
        return LaurentPoly({e * k: c for e, c in self._terms})

    def bar(self) -> "LaurentPoly":
        """The involution t -> 1/t."""
        return self.substitute_power(-1)

    # comparisons
    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        if isinstance(other, Rational):
            return self._terms == LaurentPoly.const(other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __call__(self, value):
        return sum((c * value ** e for e, c in self._terms), Fraction(0))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms:
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                mono = "t" if e == 1 else f"t^{e}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"LaurentPoly({str(self)!r})"


ZERO = LaurentPoly()
ONE = LaurentPoly.const(1)
T = LaurentPoly.monomial(1)


_TERM_RE = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\d+(?:/\d+)?)\s*(?P<star>\*)?\s*)?
        (?P<var>t(?:\s*\^\s*(?P<exp>-?\d+))?)?\s*""",
    re.VERBOSE,
)


def parse_laurent(text: str) -> LaurentPoly:
    """Parse the canonical rendering, e.g. ``-1/2*t^-2 + 3 + t^4``."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial")
    pos = 0
    acc: Dict[int, Fraction] = {}
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial at column {pos + 1}: {text!r}")
        if not first and m.group("sign") is None:
            raise ValueError(f"missing operator at column {pos + 1}: {text!r}")
        coef, var = m.group("coef"), m.group("var")
        if coef is None and var is None:
            raise ValueError(f"dangling sign at column {pos + 1}: {text!r}")
        if m.group("star") and var is None:
            raise ValueError(f"'*' without variable at column {pos + 1}: {text!r}")
        c = Fraction(coef) if coef else Fraction(1)
        if m.group("sign") == "-":
            c = -c
        e = 0
        if var is not None:
            e = int(m.group("exp")) if m.group("exp") is not None else 1
        acc[e] = acc.get(e, 0) + c
        pos = m.end()
        first = False
    return LaurentPoly(acc)


def ring_arith(a: LaurentPoly, b: LaurentPoly | None, op: str) -> LaurentPoly:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown op {op!r}")


def eval_at_one(p) -> Fraction:
    """Classical limit: substitute ``t = 1``."""
    if isinstance(p, RationalFn):
        den = eval_at_one(p.den)
        if den == 0:
            raise ZeroDivisionError("denominator vanishes at t = 1")
        return eval_at_one(p.num) / den
    p = LaurentPoly.coerce(p)
    return sum((c for _, c in p.terms), Fraction(0))


# ---------------------------------------------------------------------------
# polynomial helpers for RationalFn normalisation (ordinary polys, low->high)


def _trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _to_poly(lp: LaurentPoly):
    """Split ``lp = t**shift * poly`` with ``poly(0) != 0``."""
    if lp.is_zero():
        return 0, []
    lo, hi = lp.min_exp(), lp.max_exp()
    coeffs = [Fraction(0)] * (hi - lo + 1)
    for e, c in lp.terms:
        coeffs[e - lo] = c
    return lo, coeffs


def _from_poly(coeffs, shift=0) -> LaurentPoly:
    return LaurentPoly({i + shift: c for i, c in enumerate(coeffs) if c})


def _divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        k = len(a) - len(b)
        f = a[-1] / lead
        q[k] = f
        for i, c in enumerate(b):
            a[i + k] -= f * c
        _trim(a)
    return _trim(q), a


def _gcd(a, b):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if not a:
        return [Fraction(1)]
    lead = a[-1]
    return [c / lead for c in a]


class RationalFn:
    """Quotient of Laurent polynomials in lowest terms.

    The stored denominator is an ordinary polynomial with nonzero constant
    term and leading coefficient 1; powers of ``t`` live in the numerator.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = LaurentPoly.coerce(num)
        den = ONE if den is None else LaurentPoly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = ZERO, ONE
            return
        ns, npoly = _to_poly(num)
        ds, dpoly = _to_poly(den)
        g = _gcd(npoly, dpoly)
        if len(g) > 1:
            npoly, _ = _divmod(npoly, g)
            dpoly, _ = _divmod(dpoly, g)
        lead = dpoly[-1]
        npoly = [c / lead for c in npoly]
        dpoly = [c / lead for c in dpoly]
        self.num = _from_poly(npoly, ns - ds)
        self.den = _from_poly(dpoly)

    @classmethod
    def coerce(cls, x) -> "RationalFn":
        return x if isinstance(x, RationalFn) else cls(x)

    def is_laurent(self) -> bool:
        return self.den == ONE

    def as_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return self.num

    def __add__(self, other):
        try:
            o = RationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RationalFn(self.num + o.num, self.den)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RationalFn.coerce(other))

    def __rsub__(self, other):
        return RationalFn.coerce(other) - self

    def __mul__(self, other):
        try:
            o = RationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFn":
        return RationalFn(self.den, self.num)

    def __truediv__(self, other):
        return self * RationalFn.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RationalFn.coerce(other) * self.inverse()

    def bar(self) -> "RationalFn":
        return RationalFn(self.num.bar(), self.den.bar())

    def substitute_power(self, k: int) -> "RationalFn":
        return RationalFn(self.num.substitute_power(k), self.den.substitute_power(k))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        try:
            o = RationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den == ONE:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = lambda self: f"RationalFn({str(self)!r})"


class HSeries:
    """Truncated power series in ``h`` with rational coefficients."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int):
        if order < 0:
            raise ValueError("truncation order must be >= 0")
        c = [Fraction(x) for x in coeffs][: order + 1]
        c += [Fraction(0)] * (order + 1 - len(c))
        self.coeffs = tuple(c)
        self.order = order

    def __add__(self, other):
        n = min(self.order, other.order)
        return HSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], n)

    def __mul__(self, other):
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            for j in range(n + 1 - i):
                out[i + j] += self.coeffs[i] * other.coeffs[j]
        return HSeries(out, n)

    def __eq__(self, other):
        if not isinstance(other, HSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.order))

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(str(c) if i == 0 else f"{c}*h^{i}")
        return (" + ".join(parts) or "0") + f" + O(h^{self.order + 1})"

    __repr__ = __str__


def h_expand(p, order: int) -> HSeries:
    """Substitute ``t = exp(h/4)`` and truncate after ``h**order``."""
    if order < 0:
        raise ValueError("order must be >= 0")
    p = LaurentPoly.coerce(p)
    out = [Fraction(0)] * (order + 1)
    for e, c in p.terms:
        # exp(e*h/4) = sum_n (e/4)^n h^n / n!
        for n in range(order + 1):
            out[n] += c * Fraction(e, 4) ** n / factorial(n)
    return HSeries(out, order)
