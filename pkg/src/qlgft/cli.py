"""Command-line front end: ``qlgft <command> [flags]``.

Exit status is 0 when every executed check passes, 1 when a check fails and
2 on unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import checks as C
from .finite_hopf import FiniteHopfBackend, parse_group_table
from .lattice import Lattice, LatticeError, ParseError, envelope_stats, format_lattice, parse_lattice
from .skein import skein_product, skein_reduce
from .uqsl2 import parse_uq
from .wilson import ColorMismatch, MalformedTangle, QTangle, canonical_word, compile_qtangle, eval_wilson, holonomy, parse_tangle

__all__ = ["main", "run", "build_parser", "parse_connection"]

VERIFY = ("axioms", "moves", "coalgebra", "cycles", "push", "ch", "zeta", "star", "constants", "bowtie", "all")


class InputError(Exception):
    pass


@dataclass
class Output:
    command: str
    seed: int
    lines: List[str] = field(default_factory=list)
    reports: List[C.Report] = field(default_factory=list)
    values: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    def text(self) -> str:
        out = [f"# qlgft {self.command} seed={self.seed}"] + self.lines
        out += [r.text() for r in self.reports]
        return "\n".join(out) + "\n"

    def json(self) -> str:
        doc = {"command": self.command, "seed": self.seed, "ok": self.ok, "values": self.values,
               "reports": [r.as_dict() for r in self.reports]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def put(self, key: str, value) -> None:
        self.values[key] = str(value)
        self.lines.append(f"{key}: {value}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lattice", type=Path, help="lattice file (vertex lines, optional orient line)")
    common.add_argument("--tangle", type=Path, action="append", default=[], help="tangle file; give twice for a product")
    common.add_argument("--connection", type=Path, help="connection file of 'edge <name> = <expr>' lines")
    common.add_argument("--group", default="S3", help="Z<n>, S<n>, trivial, or a group table file (default S3)")
    common.add_argument("--backend", choices=("group", "double", "uqsl2"), default=None,
                        help="algebra: k[G], D(G) or U_q(sl2)")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--samples", type=int, default=None, help="sample count for randomized suites")
    common.add_argument("--connections", type=int, default=5, help="connections per sampled diagram (default 5)")
    common.add_argument("--order", type=int, default=None, help="seed a random contraction / resolution order")
    common.add_argument("--surface", choices=sorted(C.SURFACES), action="append", default=None,
                        help="surface for the zeta and star suites (repeatable)")
    common.add_argument("--json", action="store_true", help="emit a JSON report")

    p = argparse.ArgumentParser(prog="qlgft", description="Exact quantum lattice gauge theory computations.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a lattice (and tangles on it)")
    sub.add_parser("envelope", parents=[common], help="boundary count, Euler characteristic and genus")
    sub.add_parser("wilson", parents=[common], help="evaluate the Wilson observable of a tangle")
    sub.add_parser("holonomy", parents=[common], help="symbolic holonomy word and its value")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=VERIFY)
    s = sub.add_parser("skein", parents=[common], help="skein module reduction and products")
    s.add_argument("action", choices=("reduce", "product"))
    return p


def _read(path: Optional[Path], what: str) -> str:
    if path is None:
        raise InputError(f"--{what} is required for this command")
    try:
        return path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from None


def _lattice(args) -> Lattice:
    return parse_lattice(_read(args.lattice, "lattice"))


def _tangles(args, lat: Lattice, need: int = 1) -> List[QTangle]:
    if len(args.tangle) < need:
        raise InputError(f"need {need} --tangle file(s)")
    return [parse_tangle(_read(p, "tangle"), lat) for p in args.tangle]


def _group(spec: str):
    path = Path(spec)
    if path.is_file():
        return parse_group_table(path.read_text())
    return C.group(spec)


def _finite(args, default: str = "double") -> FiniteHopfBackend:
    kind = args.backend or default
    if kind == "uqsl2":
        raise InputError("this suite needs a finite backend (group or double)")
    return C.backend(kind, _group(args.group))


def parse_connection(text: str, lat: Lattice, H: Optional[FiniteHopfBackend] = None) -> Dict[str, object]:
    """``edge <name> = <expr>`` lines; unlisted edges carry the unit."""
    conn: Dict[str, object] = {}
    edges = set(lat.oriented_edges())
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, expr = line.partition("=")
        toks = head.split()
        if not sep or len(toks) != 2 or toks[0] != "edge":
            raise ParseError("expected 'edge <name> = <expression>'", ln)
        name = toks[1]
        if name not in edges:
            raise ParseError(f"{name!r} is not an oriented edge of the lattice", ln, line.index(name) + 1)
        if name in conn:
            raise ParseError(f"edge {name} assigned twice", ln)
        try:
            conn[name] = H.element(expr.strip()) if H is not None else parse_uq(expr.strip())
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(str(exc), ln, line.index("=") + 2) from None
    return conn


def _mode(args):
    """``"uq"`` or the finite backend named by the flags."""
    if (args.backend or "uqsl2") == "uqsl2":
        return "uq"
    return C.backend(args.backend, _group(args.group))


def _connection(args, lat: Lattice, mode) -> Dict[str, object]:
    if args.connection is None:
        return {}
    return parse_connection(_read(args.connection, "connection"), lat, None if mode == "uq" else mode)


def _fmt(M) -> str:
    return "[" + "; ".join(", ".join(str(c) for c in row) for row in M.tolist()) + "]"


def _cmd_validate(args, out: Output) -> None:
    lat = _lattice(args)
    out.put("vertices", len(lat.vertices))
    out.put("edges", len(lat.oriented_edges()))
    out.put("orientation", " ".join(lat.oriented_edges()))
    rep = C.Report("inputs")
    rep.add("lattice", True, format_lattice(lat).replace("\n", "; "))
    for path, L in zip(args.tangle, _tangles(args, lat, 0)):
        prog = compile_qtangle(lat, L)
        rep.add(f"tangle {path.name}", True, f"{len(L.components)} component(s), {len(prog.crossings)} crossing(s)")
    out.reports.append(rep)


def _cmd_envelope(args, out: Output) -> None:
    st = envelope_stats(_lattice(args))
    out.put("boundary components", st.boundary_count)
    out.put("euler characteristic", st.euler_characteristic)
    out.put("genus", st.genus)
    out.put("connected components", st.components)


def _cmd_wilson(args, out: Output) -> None:
    lat = _lattice(args)
    (L,) = _tangles(args, lat)[:1]
    mode = _mode(args)
    prog = compile_qtangle(lat, L)
    out.put("value", eval_wilson(prog, _connection(args, lat, mode), mode, order=args.order))


def _cmd_holonomy(args, out: Output) -> None:
    lat = _lattice(args)
    (L,) = _tangles(args, lat)[:1]
    mode = _mode(args)
    prog = compile_qtangle(lat, L)
    conn = _connection(args, lat, mode)
    for c in prog.components:
        out.put(f"word {c.name}", prog.word(c.name))
        word, blocks = canonical_word(prog, c.name)
        out.put(f"canonical {c.name}", word)
        for k, v in sorted(blocks.items()):
            out.put(f"  {k}", v)
    hol = holonomy(prog, conn, mode)
    if isinstance(mode, FiniteHopfBackend):
        terms = [f"{c}*" + " (x) ".join(mode.labels[i] for i in key) for key, c in sorted(hol.items())]
        out.put("holonomy", " + ".join(terms) or "0")
    elif hol.ndim == 2:
        out.put("holonomy", _fmt(hol))
    else:
        out.put("holonomy", f"tensor with {hol.ndim} fundamental indices (one in/out pair per component)")
    if all(c.closed for c in L.components):
        out.put("value", eval_wilson(prog, conn, mode, order=args.order))


def _surfaces(args) -> Tuple[str, ...]:
    return tuple(args.surface or ("annulus", "punctured-torus"))


def _cmd_verify(args, out: Output) -> None:
    suite, seed, n = args.suite, args.seed, args.samples
    reps = out.reports
    if suite in ("axioms", "all"):
        reps.append(C.axioms_report(_finite(args)))
    if suite in ("moves", "all"):
        reps.append(C.moves_report(_finite(args), samples=n, seed=seed))
    if suite in ("coalgebra", "all"):
        reps.append(C.coalgebra_report(_finite(args)))
    if suite in ("cycles", "all"):
        reps.append(C.cycles_report(_finite(args)))
        reps.append(C.full_turn_report(_finite(args)))
    if suite in ("push", "all"):
        reps.append(C.push_report(_finite(args, "group")))
    if suite in ("ch", "all"):
        reps.append(C.ch_report(n or 100, seed))
    if suite in ("zeta", "all"):
        reps.append(C.zeta_report(_surfaces(args), n or 20, seed, args.connections))
    if suite in ("star", "all"):
        reps.extend(C.star_report(_surfaces(args), n or 20, seed, args.connections, _finite(args, "group")))
    if suite in ("constants", "all"):
        reps.append(C.constants_report())
    if suite in ("bowtie", "all"):
        reps.append(C.bowtie_report(n or 200, seed))


def _cmd_skein(args, out: Output) -> None:
    lat = _lattice(args)
    if args.action == "reduce":
        for path, L in zip(args.tangle, _tangles(args, lat)):
            out.put(f"reduced {path.name}", skein_reduce(L, lat, order=args.order).format())
    else:
        a, b = (skein_reduce(L, lat, order=args.order) for L in _tangles(args, lat, 2)[:2])
        out.put("product", skein_product(a, b).format())


COMMANDS = {
    "validate": _cmd_validate,
    "envelope": _cmd_envelope,
    "wilson": _cmd_wilson,
    "holonomy": _cmd_holonomy,
    "verify": _cmd_verify,
    "skein": _cmd_skein,
}


def run(argv: Sequence[str]) -> Tuple[str, int]:
    """Run one command; returns the report text and the exit status."""
    args = build_parser().parse_args(list(argv))
    label = " ".join(x for x in (args.command, getattr(args, "suite", None), getattr(args, "action", None)) if x)
    out = Output(label, args.seed)
    try:
        COMMANDS[args.command](args, out)
    except (InputError, ParseError, LatticeError, MalformedTangle, ColorMismatch, ValueError) as exc:
        msg = f"error: {exc}"
        return (json.dumps({"command": label, "error": str(exc), "ok": False}, sort_keys=True) + "\n" if args.json
                else f"# qlgft {label} seed={args.seed}\n{msg}\n"), 2
    return (out.json() if args.json else out.text()), 0 if out.ok else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    text, status = run(sys.argv[1:] if argv is None else argv)
    (sys.stdout if status != 2 else sys.stderr).write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
