"""Text formats: .tm (t-module), .bd (biderivation), .hom (morphism).

All three are small YAML documents whose leaves are strings in the
ratfunc or skewpoly grammars.  A t-module file looks like::

    p: 3
    d: 2
    n: 3
    M0: theta*I + N
    N:
      - ["0", "0"]
      - ["T", "0"]
    M1:
      - ["T", "1"]
      - ["0", "2*T + 1"]
    ...

``M0`` may instead be a full matrix.  Serialization always uses the
shorthand and is canonical, so parse followed by dump is a normal form.
Errors are :class:`ParseError` with the file name and line.
"""

import json
from pathlib import Path

import yaml

from .algebra import ParseError, RatFunc, get_field, is_prime, parse_ratfunc
from .extcalc import BiderState
from .skew import SkewMatrix, SkewPoly, identity_matrix, mat_add, parse_skewpoly
from .tmodule import Morphism, TModule

__all__ = [
    "parse_tmodule",
    "load_tmodule",
    "dump_tmodule",
    "parse_bider",
    "load_bider",
    "dump_bider",
    "parse_morphism",
    "load_morphism",
    "dump_morphism",
    "matrix_to_json",
    "lmatrix_to_json",
    "tmodule_to_json",
    "machine_dump",
]

_SHORTHAND = ("theta*I + N", "theta*I")


def _compose(text, source):
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ParseError(f"malformed document: {getattr(exc, 'problem', exc)}",
                         line=line, source=source) from None
    if not isinstance(node, yaml.MappingNode):
        raise ParseError("expected a mapping at the top level", line=1, source=source)
    out = {}
    for k, v in node.value:
        out[k.value] = v
    return out


def _line(node):
    return node.start_mark.line + 1


def _scalar(node, source, what):
    if not isinstance(node, yaml.ScalarNode):
        raise ParseError(f"{what} must be a single value", line=_line(node), source=source)
    return node.value


def _int(fields, key, source, required=True):
    node = fields.get(key)
    if node is None:
        if required:
            raise ParseError(f"missing field {key!r}", source=source)
        return None
    text = _scalar(node, source, key)
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"{key} must be an integer, got {text!r}",
                         line=_line(node), source=source) from None


def _entries(node, source, what, parse, rows=None, cols=None):
    """Parse a list-of-lists node with ``parse`` on every leaf."""
    if not isinstance(node, yaml.SequenceNode):
        raise ParseError(f"{what} must be a list of rows", line=_line(node), source=source)
    out = []
    for row in node.value:
        if not isinstance(row, yaml.SequenceNode):
            raise ParseError(f"{what}: each row must be a list", line=_line(row), source=source)
        vals = []
        for leaf in row.value:
            text = _scalar(leaf, source, what)
            try:
                vals.append(parse(text))
            except ParseError as exc:
                raise ParseError(f"{what}: {exc}", line=_line(leaf), source=source) from None
        out.append(tuple(vals))
    if rows is not None and len(out) != rows:
        raise ParseError(f"{what} has {len(out)} rows, expected {rows}",
                         line=_line(node), source=source)
    for r, row in zip(out, node.value):
        if cols is not None and len(r) != cols:
            raise ParseError(f"{what} row has {len(r)} entries, expected {cols}",
                             line=_line(row), source=source)
    return tuple(out)


def _field(fields, source):
    p = _int(fields, "p", source)
    if not is_prime(p):
        raise ParseError(f"p = {p} is not prime", line=_line(fields["p"]), source=source)
    return p


def parse_tmodule(text, source="<string>"):
    fields = _compose(text, source)
    p = _field(fields, source)
    d = _int(fields, "d", source)
    n = _int(fields, "n", source)
    if d < 1 or n < 0:
        raise ParseError("need d >= 1 and n >= 0", source=source)
    F = get_field(p)
    rf = lambda s: parse_ratfunc(s, p)  # noqa: E731
    m0 = fields.get("M0")
    if m0 is None:
        raise ParseError("missing field 'M0'", source=source)
    if isinstance(m0, yaml.ScalarNode):
        form = " ".join(m0.value.split())
        if form not in _SHORTHAND:
            raise ParseError(f"M0 must be a matrix or one of {_SHORTHAND}",
                             line=_line(m0), source=source)
        M0 = identity_matrix(d, p, F.theta)
        if form == "theta*I + N":
            if "N" not in fields:
                raise ParseError("M0 uses N but no N is given", line=_line(m0), source=source)
            M0 = mat_add(M0, _entries(fields["N"], source, "N", rf, d, d))
    else:
        M0 = _entries(m0, source, "M0", rf, d, d)
    coeffs = [M0]
    for i in range(1, n + 1):
        key = f"M{i}"
        if key not in fields:
            raise ParseError(f"missing field {key!r}", source=source)
        coeffs.append(_entries(fields[key], source, key, rf, d, d))
    extra = set(fields) - {"p", "d", "n", "N"} - {f"M{i}" for i in range(n + 1)}
    if extra:
        key = sorted(extra)[0]
        raise ParseError(f"unknown field {key!r}", line=_line(fields[key]), source=source)
    phi = TModule(coeffs)
    if phi.degree != n:
        raise ParseError(f"declared n = {n} but M{n} is zero", source=source)
    return phi


def load_tmodule(path):
    path = Path(path)
    return parse_tmodule(path.read_text(), source=str(path))


def _q(x):
    return json.dumps(str(x))


def _emit_matrix(lines, key, M):
    lines.append(f"{key}:")
    for row in M:
        lines.append("  - [" + ", ".join(_q(x) for x in row) + "]")


def dump_tmodule(phi):
    lines = [f"p: {phi.p}", f"d: {phi.dim}", f"n: {phi.degree}"]
    N = phi.nilpotent_part
    if all(x.is_zero() for row in N for x in row):
        lines.append("M0: theta*I")
    else:
        lines.append("M0: theta*I + N")
        _emit_matrix(lines, "N", N)
    for i in range(1, phi.degree + 1):
        _emit_matrix(lines, f"M{i}", phi.coeffs[i])
    return "\n".join(lines) + "\n"


# -- biderivations -----------------------------------------------------------

def parse_bider(text, source="<string>"):
    """A .bd file: ``p``, width ``D`` and ``entries``, a list of D skew polynomials."""
    fields = _compose(text, source)
    p = _field(fields, source)
    D = _int(fields, "D", source)
    node = fields.get("entries")
    if node is None:
        raise ParseError("missing field 'entries'", source=source)
    if not isinstance(node, yaml.SequenceNode):
        raise ParseError("entries must be a list", line=_line(node), source=source)
    row = []
    for leaf in node.value:
        text_ = _scalar(leaf, source, "entries")
        try:
            row.append(parse_skewpoly(text_, p))
        except ParseError as exc:
            raise ParseError(f"entries: {exc}", line=_line(leaf), source=source) from None
    if len(row) != D:
        raise ParseError(f"{len(row)} entries, expected D = {D}", line=_line(node), source=source)
    return BiderState.from_row(row, p)


def load_bider(path):
    path = Path(path)
    return parse_bider(path.read_text(), source=str(path))


def dump_bider(state):
    row = state.to_row()
    return (f"p: {state.p}\nD: {state.width}\nentries: ["
            + ", ".join(_q(x) for x in row) + "]\n")


# -- morphisms ---------------------------------------------------------------

def parse_morphism(text, source="<string>", base=None):
    """A .hom file: ``source`` and ``target`` .tm paths and the skew ``matrix``.

    Paths are relative to ``base`` (the directory of the .hom file).
    """
    fields = _compose(text, source)
    base = Path(base) if base is not None else Path(".")
    mods = {}
    for key in ("source", "target"):
        node = fields.get(key)
        if node is None:
            raise ParseError(f"missing field {key!r}", source=source)
        mods[key] = load_tmodule(base / _scalar(node, source, key))
    phi, psi = mods["source"], mods["target"]
    if phi.p != psi.p:
        raise ParseError("source and target have different characteristic", source=source)
    node = fields.get("matrix")
    if node is None:
        raise ParseError("missing field 'matrix'", source=source)
    M = _entries(node, source, "matrix", lambda s: parse_skewpoly(s, phi.p),
                 psi.dim, phi.dim)
    try:
        return Morphism(phi, psi, SkewMatrix(M, phi.p))
    except ValueError as exc:
        raise ParseError(str(exc), line=_line(node), source=source) from None


def load_morphism(path):
    path = Path(path)
    return parse_morphism(path.read_text(), source=str(path), base=path.parent)


def dump_morphism(f, source_path, target_path):
    lines = [f"source: {_q(source_path)}", f"target: {_q(target_path)}"]
    _emit_matrix(lines, "matrix", f.matrix.entries)
    return "\n".join(lines) + "\n"


# -- machine-readable output --------------------------------------------------

def matrix_to_json(M):
    """SkewMatrix -> list of rows of skewpoly strings."""
    return [[str(e) for e in row] for row in M.entries]


def lmatrix_to_json(M):
    return [[str(x) for x in row] for row in M]


def tmodule_to_json(phi):
    return {
        "p": phi.p,
        "d": phi.dim,
        "n": phi.degree,
        "coefficients": [lmatrix_to_json(M) for M in phi.coeffs],
    }


def machine_dump(doc):
    def default(o):
        if isinstance(o, (RatFunc, SkewPoly)):
            return str(o)
        if isinstance(o, SkewMatrix):
            return matrix_to_json(o)
        if isinstance(o, TModule):
            return tmodule_to_json(o)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return json.dumps(doc, indent=2, default=default)
