"""Exact lattice gauge theory over ribbon Hopf algebras."""

from .finite_hopf import FiniteHopfBackend, Group, build_drinfeld_double, build_group_algebra, verify_ribbon_axioms
from .lattice import Lattice, envelope_stats, parse_lattice
from .scalars import LaurentPoly, RationalFn, eval_at_one, parse_laurent
from .skein import SkeinElement, skein_product, skein_reduce, zeta, zeta_compare
from .uqsl2 import FUND, E, F, K, UqElement, parse_uq, quantum_ch_residual
from .wilson import QTangle, canonical_word, compile_qtangle, eval_wilson, holonomy, parse_tangle, star_value

__all__ = [
    "FiniteHopfBackend",
    "Group",
    "build_drinfeld_double",
    "build_group_algebra",
    "verify_ribbon_axioms",
    "Lattice",
    "envelope_stats",
    "parse_lattice",
    "LaurentPoly",
    "RationalFn",
    "eval_at_one",
    "parse_laurent",
    "SkeinElement",
    "skein_product",
    "skein_reduce",
    "zeta",
    "zeta_compare",
    "FUND",
    "E",
    "F",
    "K",
    "UqElement",
    "parse_uq",
    "quantum_ch_residual",
    "QTangle",
    "canonical_word",
    "compile_qtangle",
    "eval_wilson",
    "holonomy",
    "parse_tangle",
    "star_value",
]
