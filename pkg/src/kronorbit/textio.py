"""Structured-text file dialects for set and operator definitions.

Both formats are line oriented: `#` starts a comment, blank lines are
skipped, and every statement is `keyword args...`.  Parse errors carry the
1-based line number.

Set files::

    dim 2
    degree 5                      # optional declared degree
    poly -0.25 0 0 ; 1 2 0 ; 1 0 2    # terms "coeff e1 .. eb", ';' separated
    clause 0 <=                   # pairs "poly_index relation", conjunction

Operator files::

    dim 1
    L 256
    lambda 10.0
    cutoff 1
    decay 2.718281828 1.0        # C1 c1 (optional; fitted when absent)
    offset 0 0.0                 # k re [im], k >= 0; a_{-k} = conj(a_k)
    offset 1 1.0
    harmonic 1 1.0               # m1 .. mb re [im]; conjugate implied
    theta 0.0
    alpha 0.6180339887498949
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional, Tuple

from .dynamics import OperatorSpec, make_operator_spec
from .semialgebraic import Polynomial, SemiAlgebraicSet, SignCondition

__all__ = ["ParseError", "parse_set_text", "parse_set_file", "parse_operator_text", "parse_operator_file"]


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        yield lineno, parts[0].lower(), parts[1:]


def _floats(args, lineno, what):
    try:
        return [float(a) for a in args]
    except ValueError as exc:
        raise ParseError(lineno, f"bad number in {what}: {exc}") from None


def parse_set_text(text: str) -> SemiAlgebraicSet:
    dim: Optional[int] = None
    declared: Optional[int] = None
    polys: List[Polynomial] = []
    clauses: List[Tuple[SignCondition, ...]] = []
    for lineno, key, args in _statements(text):
        if key == "dim":
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError(lineno, "dim takes one positive integer")
            dim = int(args[0])
            if dim < 1:
                raise ParseError(lineno, "dim must be >= 1")
        elif key == "degree":
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError(lineno, "degree takes one positive integer")
            declared = int(args[0])
        elif key == "poly":
            if dim is None:
                raise ParseError(lineno, "dim must come before poly")
            terms = []
            for chunk in " ".join(args).split(";"):
                fields = chunk.split()
                if len(fields) != dim + 1:
                    raise ParseError(
                        lineno, f"each term needs a coefficient and {dim} exponents"
                    )
                coeff = _floats(fields[:1], lineno, "poly")[0]
                try:
                    exps = tuple(int(f) for f in fields[1:])
                except ValueError:
                    raise ParseError(lineno, "exponents must be integers") from None
                terms.append((coeff, exps))
            try:
                polys.append(Polynomial(tuple(terms)))
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
        elif key == "clause":
            if len(args) == 0 or len(args) % 2 != 0:
                raise ParseError(lineno, "clause takes pairs 'poly_index relation'")
            conds = []
            for i in range(0, len(args), 2):
                if not args[i].isdigit():
                    raise ParseError(lineno, f"bad polynomial index {args[i]!r}")
                idx = int(args[i])
                rel = args[i + 1]
                if rel == "==":
                    pass
                elif rel not in (">=", "<="):
                    raise ParseError(lineno, f"relation must be >=, <= or ==, got {rel!r}")
                if idx >= len(polys):
                    raise ParseError(lineno, f"clause references undefined polynomial {idx}")
                conds.append(SignCondition(idx, rel))
            clauses.append(tuple(conds))
        else:
            raise ParseError(lineno, f"unknown keyword {key!r} in set file")
    if dim is None:
        raise ParseError(1, "set file must declare dim")
    return SemiAlgebraicSet(tuple(polys), tuple(clauses), declared_degree=declared)


def parse_set_file(path) -> SemiAlgebraicSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_set_text(fh.read())


def parse_operator_text(text: str) -> OperatorSpec:
    dim: Optional[int] = None
    L: Optional[int] = None
    coupling: Optional[float] = None
    cutoff: Optional[int] = None
    decay: Optional[Tuple[float, float]] = None
    offsets: Dict[int, complex] = {}
    harmonics: Dict[tuple, complex] = {}
    theta = None
    alpha = None
    for lineno, key, args in _statements(text):
        if key == "dim":
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError(lineno, "dim takes one positive integer")
            dim = int(args[0])
        elif key == "l":
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError(lineno, "L takes one positive integer")
            L = int(args[0])
        elif key == "lambda":
            coupling = _floats(args, lineno, "lambda")[0]
        elif key == "cutoff":
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError(lineno, "cutoff takes one nonnegative integer")
            cutoff = int(args[0])
        elif key == "decay":
            vals = _floats(args, lineno, "decay")
            if len(vals) != 2:
                raise ParseError(lineno, "decay takes C1 and c1")
            decay = (vals[0], vals[1])
        elif key == "offset":
            if len(args) not in (2, 3):
                raise ParseError(lineno, "offset takes k re [im]")
            try:
                k = int(args[0])
            except ValueError:
                raise ParseError(lineno, "offset index must be an integer") from None
            if k < 0:
                raise ParseError(lineno, "give offsets k >= 0; negatives are implied")
            vals = _floats(args[1:], lineno, "offset")
            if k in offsets:
                raise ParseError(lineno, f"duplicate offset {k}")
            offsets[k] = complex(vals[0], vals[1] if len(vals) > 1 else 0.0)
        elif key == "harmonic":
            if dim is None:
                raise ParseError(lineno, "dim must come before harmonic")
            if len(args) not in (dim + 1, dim + 2):
                raise ParseError(lineno, f"harmonic takes {dim} integers then re [im]")
            try:
                m = tuple(int(a) for a in args[:dim])
            except ValueError:
                raise ParseError(lineno, "harmonic frequencies must be integers") from None
            vals = _floats(args[dim:], lineno, "harmonic")
            if m in harmonics:
                raise ParseError(lineno, f"duplicate harmonic {m}")
            harmonics[m] = complex(vals[0], vals[1] if len(vals) > 1 else 0.0)
        elif key == "theta":
            theta = _floats(args, lineno, "theta")
        elif key == "alpha":
            alpha = _floats(args, lineno, "alpha")
        else:
            raise ParseError(lineno, f"unknown keyword {key!r} in operator file")
    for name, val in (("dim", dim), ("L", L), ("lambda", coupling),
                      ("theta", theta), ("alpha", alpha)):
        if val is None:
            raise ParseError(1, f"operator file must declare {name}")
    if len(theta) != dim or len(alpha) != dim:
        raise ParseError(1, "theta and alpha must have `dim` coordinates")
    kwargs = {}
    if decay is not None:
        kwargs["decay_C1"] = decay[0]
        kwargs["decay_c1"] = decay[1]
    if cutoff is not None:
        kwargs["cutoff"] = cutoff
    try:
        return make_operator_spec(
            offsets=offsets,
            coupling=coupling,
            harmonics=harmonics,
            theta=tuple(theta),
            alpha=tuple(alpha),
            L=L,
            **kwargs,
        )
    except ValueError as exc:
        raise ParseError(1, str(exc)) from None


def parse_operator_file(path) -> OperatorSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_operator_text(fh.read())
