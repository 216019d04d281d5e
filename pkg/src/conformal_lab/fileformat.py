"""Sectioned text format for algebras, modules and endomorphism maps.

::

    [algebra]
    name = virasoro
    rank = 1
    basis = L

    [alpha]                 # optional, identity when absent
    L -> 1                  # coefficients of alpha(L) on each basis element

    [bracket]               # omitted pairs are zero
    L L -> d + 2*x0

    [module NAME]
    rank = 1
    basis = v
    [beta NAME]
    v -> 1
    [action NAME]
    L v -> d + x0

    [endo]                  # optional map; same layout as [alpha]
    extension = linear      # or antilinear
    level = 0
    L -> d + 2*x0
    [endo witness]          # optional D' (quasiderivations, generalized derivations)
    [endo witness2]         # optional D'' (generalized derivations)

Basis elements may be referenced by name or by 0-based index.  Comments start
with ``#``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import ConformalModule, HomConformalAlgebra, identity_matrix, zero_vec
from .derivations import ConformalMap, ExtensionRule
from .errors import DefinitionSyntaxError, RankError, UndeclaredBasis
from .expr import parse_poly
from .polyring import DEFPARAM, PARTIAL, MultiPoly, is_slot, slot_index

_HEADER = re.compile(r"^\[\s*([a-z]+)(?:\s+([A-Za-z_][\w^-]*))?\s*\]$")
_IDENT = re.compile(r"^[A-Za-z_][\w']*$")


@dataclass
class EndoSpec:
    map: ConformalMap
    witness: ConformalMap | None = None
    witness2: ConformalMap | None = None

    @property
    def witnesses(self) -> tuple:
        return tuple(w for w in (self.witness, self.witness2) if w is not None)


@dataclass
class DefinitionFile:
    algebra: HomConformalAlgebra
    modules: dict = field(default_factory=dict)
    endo: EndoSpec | None = None


@dataclass
class _Line:
    no: int
    text: str  # comment stripped, right-stripped
    indent: int  # column offset of text[0] in the raw line


def _lines(text: str) -> list[_Line]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.lstrip()
        if stripped:
            out.append(_Line(no, stripped, len(body) - len(stripped)))
    return out


def _err(line: _Line, col: int, msg: str, expected=()) -> DefinitionSyntaxError:
    return DefinitionSyntaxError(msg, line.no, line.indent + col + 1, expected=expected, text=line.text)


def _split_sections(lines: list[_Line]):
    sections: list[tuple[str, str | None, _Line, list[_Line]]] = []
    for ln in lines:
        if ln.text.startswith("["):
            m = _HEADER.match(ln.text)
            if not m:
                raise _err(ln, 0, f"malformed section header {ln.text!r}", ("'[name]'",))
            sections.append((m.group(1), m.group(2), ln, []))
        else:
            if not sections:
                raise _err(ln, 0, "content before the first section header", ("'[algebra]'",))
            sections[-1][3].append(ln)
    return sections


def _key_values(body: list[_Line], allowed: Sequence[str]) -> tuple[dict, list[_Line]]:
    kv: dict = {}
    rest = []
    for ln in body:
        if "=" in ln.text and "->" not in ln.text:
            key, _, value = ln.text.partition("=")
            key = key.strip()
            if key not in allowed:
                raise _err(ln, 0, f"unknown key {key!r}", tuple(allowed))
            kv[key] = (value.strip(), ln)
        else:
            rest.append(ln)
    return kv, rest


def _int_value(kv, key, default=None):
    if key not in kv:
        if default is None:
            raise DefinitionSyntaxError(f"missing '{key} = ...'", 1, 1, expected=(key,))
        return default
    value, ln = kv[key]
    if not re.fullmatch(r"\d+", value):
        raise _err(ln, ln.text.index("=") + 1, f"{key} must be a nonnegative integer", ("integer",))
    return int(value)


def _resolve(token: str, names: Sequence[str], ln: _Line, col: int, what: str) -> int:
    if re.fullmatch(r"\d+", token):
        i = int(token)
        if i >= len(names):
            raise RankError(f"line {ln.no}: {what} index {i} out of range for rank {len(names)}")
        return i
    if token in names:
        return names.index(token)
    raise UndeclaredBasis(f"line {ln.no}, column {ln.indent + col + 1}: undeclared {what} {token!r}")


def _expr_list(ln: _Line, start: int, count: int) -> tuple:
    """Parse ``count`` comma-separated expressions starting at column ``start``."""
    text = ln.text
    pieces = []
    pos = start
    for chunk in text[start:].split(","):
        pieces.append((chunk, pos))
        pos += len(chunk) + 1
    if len(pieces) != count:
        raise _err(ln, start, f"expected {count} comma-separated coefficients, got {len(pieces)}")
    out = []
    for chunk, col in pieces:
        lead = len(chunk) - len(chunk.lstrip())
        if not chunk.strip():
            raise _err(ln, col + lead, "empty coefficient", ("expression",))
        out.append(parse_poly(chunk.strip(), ln.no, ln.indent + col + lead + 1))
    return tuple(out)


def _check_vars(p: MultiPoly, allowed_slots: int, ln: _Line, allow_t: bool = False) -> None:
    for v in p.variables():
        if v == PARTIAL:
            continue
        if v == DEFPARAM and allow_t:
            continue
        if is_slot(v) and slot_index(v) < allowed_slots:
            continue
        raise _err(ln, 0, f"variable not allowed here in {ln.text!r}")


def _arrow(ln: _Line) -> tuple[list[str], int]:
    if "->" not in ln.text:
        raise _err(ln, len(ln.text), "missing '->'", ("'->'",))
    lhs, _, _ = ln.text.partition("->")
    return lhs.split(), len(lhs) + 2


def _parse_matrix(body, names, targets, slots, what) -> tuple:
    rows: list = [None] * len(names)
    for ln in body:
        toks, start = _arrow(ln)
        if len(toks) != 1:
            raise _err(ln, 0, f"expected one {what} name before '->'", (what,))
        i = _resolve(toks[0], names, ln, 0, what)
        vec = _expr_list(ln, start, len(targets))
        for p in vec:
            _check_vars(p, slots, ln)
        rows[i] = vec
    return rows


def _parse_pairs(body, left, right, out_rank, table, what) -> None:
    for ln in body:
        toks, start = _arrow(ln)
        if len(toks) != 2:
            raise _err(ln, 0, "expected two basis names before '->'", ("name name",))
        i = _resolve(toks[0], left, ln, 0, what)
        j = _resolve(toks[1], right, ln, ln.text.index(toks[1], len(toks[0])), what)
        vec = _expr_list(ln, start, out_rank)
        for p in vec:
            _check_vars(p, 1, ln)
        table[i][j] = vec


def _names(kv, key, rank) -> tuple:
    if key not in kv:
        return tuple()
    value, ln = kv[key]
    names = tuple(value.replace(",", " ").split())
    for n in names:
        if not _IDENT.match(n) or re.fullmatch(r"\d+", n):
            raise _err(ln, ln.text.index(n), f"invalid basis name {n!r}", ("identifier",))
    if len(names) != rank:
        raise RankError(f"line {ln.no}: {len(names)} basis names for rank {rank}")
    if len(set(names)) != len(names):
        raise _err(ln, 0, "duplicate basis names")
    return names


def parse_definition(text: str) -> DefinitionFile:
    sections = _split_sections(_lines(text))
    alg = [s for s in sections if s[0] == "algebra"]
    if len(alg) != 1:
        raise DefinitionSyntaxError("exactly one [algebra] section is required", 1, 1, expected=("[algebra]",))
    kv, rest = _key_values(alg[0][3], ("name", "rank", "basis"))
    if rest:
        raise _err(rest[0], 0, "unexpected line in [algebra]", ("key = value",))
    r = _int_value(kv, "rank")
    names = _names(kv, "basis", r) or tuple(f"e{i + 1}" for i in range(r))
    name = kv.get("name", ("", None))[0]

    alpha = list(identity_matrix(r))
    table = [[zero_vec(r) for _ in range(r)] for _ in range(r)]
    module_meta: dict = {}
    module_beta: dict = {}
    module_act: dict = {}
    endo_meta = None
    endo_rows: dict = {}
    seen = set()
    for kind, label, head, body in sections:
        key = (kind, label)
        if key in seen:
            raise _err(head, 0, f"duplicate section [{kind}{' ' + label if label else ''}]")
        seen.add(key)
        if kind == "algebra":
            continue
        if kind == "alpha":
            rows = _parse_matrix(body, names, names, 0, "basis element")
            alpha = [row if row is not None else alpha[i] for i, row in enumerate(rows)]
        elif kind == "bracket":
            _parse_pairs(body, names, names, r, table, "basis element")
        elif kind == "module":
            if not label:
                raise _err(head, 0, "module section needs a name", ("[module NAME]",))
            mkv, mrest = _key_values(body, ("rank", "basis"))
            if mrest:
                raise _err(mrest[0], 0, "unexpected line in module section", ("key = value",))
            m = _int_value(mkv, "rank")
            module_meta[label] = (m, _names(mkv, "basis", m) or tuple(f"v{i + 1}" for i in range(m)), head)
        elif kind == "beta":
            module_beta[label] = (head, body)
        elif kind == "action":
            module_act[label] = (head, body)
        elif kind == "endo":
            if label is None:
                ekv, erest = _key_values(body, ("extension", "level"))
                endo_meta = ekv
                endo_rows[None] = erest
            elif label in ("witness", "witness2"):
                endo_rows[label] = body
            else:
                raise _err(head, 0, f"unknown endo section {label!r}", ("[endo]", "[endo witness]", "[endo witness2]"))
        else:
            raise _err(head, 1, f"unknown section [{kind}]", ("algebra", "alpha", "bracket", "module", "beta", "action", "endo"))

    A = HomConformalAlgebra(r, tuple(tuple(row) for row in table), tuple(tuple(a) for a in alpha), names, name=name)

    modules = {}
    for label in list(module_beta) + list(module_act):
        if label not in module_meta:
            head = (module_beta.get(label) or module_act.get(label))[0]
            raise _err(head, 0, f"section refers to undeclared module {label!r}")
    for label, (m, mnames, head) in module_meta.items():
        beta = list(identity_matrix(m))
        if label in module_beta:
            rows = _parse_matrix(module_beta[label][1], mnames, mnames, 0, "module basis element")
            beta = [row if row is not None else beta[i] for i, row in enumerate(rows)]
        act = [[zero_vec(m) for _ in range(m)] for _ in range(r)]
        if label in module_act:
            for ln in module_act[label][1]:
                toks, start = _arrow(ln)
                if len(toks) != 2:
                    raise _err(ln, 0, "expected algebra and module basis names before '->'")
                i = _resolve(toks[0], names, ln, 0, "basis element")
                j = _resolve(toks[1], mnames, ln, ln.text.index(toks[1], len(toks[0])), "module basis element")
                vec = _expr_list(ln, start, m)
                for p in vec:
                    _check_vars(p, 1, ln)
                act[i][j] = vec
        modules[label] = ConformalModule(m, r, tuple(tuple(row) for row in act), tuple(tuple(b) for b in beta), mnames, name=label)

    endo = None
    if endo_meta is not None:
        ext = endo_meta.get("extension", ("linear", None))[0]
        if ext not in ("linear", "antilinear"):
            ln = endo_meta["extension"][1]
            raise _err(ln, ln.text.index("=") + 1, f"unknown extension {ext!r}", ("linear", "antilinear"))
        rule = ExtensionRule(ext)
        level = _int_value(endo_meta, "level", 0)

        def build(body):
            rows = _parse_matrix(body, names, names, 1, "basis element")
            return ConformalMap(tuple(row if row is not None else zero_vec(r) for row in rows), level=level, rule=rule)

        main = build(endo_rows[None])
        extra = [build(endo_rows[w]) if w in endo_rows else None for w in ("witness", "witness2")]
        endo = EndoSpec(main, *extra)
    return DefinitionFile(A, modules, endo)


def parse_endo(text: str, A: HomConformalAlgebra) -> EndoSpec:
    """Parse a file holding only [endo] sections against an existing algebra."""
    header = f"[algebra]\nrank = {A.rank}\nbasis = {' '.join(A.names)}\n"
    try:
        defn = parse_definition(header + text)
    except DefinitionSyntaxError as exc:
        # report positions relative to the endo text
        exc.lineno -= 3
        raise
    if defn.endo is None:
        raise DefinitionSyntaxError("no [endo] section found", 1, 1, expected=("[endo]",))
    return defn.endo


# ---------------------------------------------------------------------------
# printing


def _row(vec) -> str:
    return ", ".join(str(p) for p in vec)


def format_algebra(A: HomConformalAlgebra) -> list[str]:
    out = ["[algebra]"]
    if A.name:
        out.append(f"name = {A.name}")
    out += [f"rank = {A.rank}", f"basis = {' '.join(A.names)}", "", "[alpha]"]
    out += [f"{A.names[i]} -> {_row(A.alpha[i])}" for i in range(A.rank)]
    out += ["", "[bracket]"]
    for i in range(A.rank):
        for j in range(A.rank):
            v = A.table[i][j]
            if any(not p.is_zero() for p in v):
                out.append(f"{A.names[i]} {A.names[j]} -> {_row(v)}")
    return out


def format_module(label: str, M: ConformalModule, A: HomConformalAlgebra) -> list[str]:
    out = ["", f"[module {label}]", f"rank = {M.rank}", f"basis = {' '.join(M.names)}", "", f"[beta {label}]"]
    out += [f"{M.names[k]} -> {_row(M.beta[k])}" for k in range(M.rank)]
    out += ["", f"[action {label}]"]
    for i in range(A.rank):
        for k in range(M.rank):
            v = M.act[i][k]
            if any(not p.is_zero() for p in v):
                out.append(f"{A.names[i]} {M.names[k]} -> {_row(v)}")
    return out


def format_endo(spec: EndoSpec, A: HomConformalAlgebra) -> list[str]:
    m = spec.map
    out = ["", "[endo]", f"extension = {m.rule.value}", f"level = {m.level}"]
    out += [f"{A.names[i]} -> {_row(m.images[i])}" for i in range(A.rank)]
    for label, w in (("witness", spec.witness), ("witness2", spec.witness2)):
        if w is not None:
            out += ["", f"[endo {label}]"]
            out += [f"{A.names[i]} -> {_row(w.images[i])}" for i in range(A.rank)]
    return out


def print_definition(defn: DefinitionFile) -> str:
    lines = format_algebra(defn.algebra)
    for label, M in defn.modules.items():
        lines += format_module(label, M, defn.algebra)
    if defn.endo is not None:
        lines += format_endo(defn.endo, defn.algebra)
    return "\n".join(lines) + "\n"


def definitions_equal(a: DefinitionFile, b: DefinitionFile) -> bool:
    A, B = a.algebra, b.algebra
    if (A.rank, A.names, A.name, A.table, A.alpha) != (B.rank, B.names, B.name, B.table, B.alpha):
        return False
    if set(a.modules) != set(b.modules):
        return False
    for k in a.modules:
        m, n = a.modules[k], b.modules[k]
        if (m.rank, m.names, m.act, m.beta) != (n.rank, n.names, n.act, n.beta):
            return False
    if (a.endo is None) != (b.endo is None):
        return False
    if a.endo is not None:
        return (a.endo.map, a.endo.witness, a.endo.witness2) == (b.endo.map, b.endo.witness, b.endo.witness2)
    return True
