"""The textual parameter format and the JSON output schema.

A document is a ``group`` header followed by ``rho`` and ``block`` statements::

    # comments run to the end of the line
    group SOeven N=24
    rho r dim=1 orth
    block r a=3 b=3
    block r a=5 b=3 zeta=-

``zeta`` only matters when a = b and defaults to +; on a != b it is ignored
with a warning.  Whitespace, including line breaks, only separates tokens.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass
from typing import Sequence

from .params import (ArthurParameter, BlockOrder, GroupKind, JordanBlock, Kind, RhoLabel, SelfDuality, ValidationError,
                     block_from_ab, block_to_ab)

SCHEMA_VERSION = "1"

_TOKEN = re.compile(r"(?P<space>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<int>-?\d+)|(?P<word>[A-Za-z_][A-Za-z0-9_*']*)"
                    r"|(?P<punct>[=+-])|(?P<bad>.)")


class DslError(ValidationError):
    def __init__(self, message: str, line: int, column: int, invariant: str = "syntax") -> None:
        super().__init__(f"line {line}, column {column}: {message}", invariant)
        self.line = line
        self.column = column


class DslWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    for match in _TOKEN.finditer(text):
        kind = match.lastgroup
        column = match.start() - line_start + 1
        if kind == "bad":
            raise DslError(f"unexpected character {match.group()!r}", line, column)
        if kind not in ("space", "comment"):
            tokens.append(Token(kind, match.group(), line, column))
        newlines = match.group().count("\n")
        if newlines:
            line += newlines
            line_start = match.start() + match.group().rindex("\n") + 1
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.pos = 0
        end_line = text.count("\n") + 1
        self.end = Token("end", "", end_line, len(text) - (text.rfind("\n") + 1) + 1)

    def peek(self) -> Token:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else self.end

    def take(self, kind: str | None = None, text: str | None = None, what: str = "") -> Token:
        tok = self.peek()
        if (kind and tok.kind != kind) or (text and tok.text != text):
            shown = repr(tok.text) if tok.kind != "end" else "end of input"
            raise DslError(f"expected {what or text or kind}, found {shown}", tok.line, tok.column)
        self.pos += 1
        return tok

    def keyed_int(self, key: str) -> tuple[int, Token]:
        self.take("word", key, f"'{key}='")
        self.take("punct", "=", f"'=' after {key}")
        tok = self.take("int", what=f"an integer for {key}")
        return int(tok.text), tok


def parse_parameter(text: str) -> ArthurParameter:
    parser = _Parser(text)
    head = parser.take("word", "group", "'group' header")
    kind_tok = parser.take("word", what="a group kind (Sp, SOodd, SOeven)")
    try:
        kind = Kind(kind_tok.text)
    except ValueError:
        raise DslError(f"unknown group kind {kind_tok.text!r}; use Sp, SOodd or SOeven",
                       kind_tok.line, kind_tok.column) from None
    N, n_tok = parser.keyed_int("N")
    if N < 1:
        raise DslError("N must be positive", n_tok.line, n_tok.column, "N>0")
    try:
        group = GroupKind(kind, N)
    except ValidationError as exc:
        raise DslError(str(exc), head.line, head.column, exc.invariant) from None

    rhos: dict[str, RhoLabel] = {}
    blocks: list[JordanBlock] = []
    while parser.peek().kind != "end":
        tok = parser.take("word", what="'rho' or 'block'")
        if tok.text == "rho":
            name_tok = parser.take("word", what="a rho name")
            if name_tok.text in rhos:
                raise DslError(f"rho {name_tok.text} is declared twice", name_tok.line, name_tok.column, "rho unique")
            dim, dim_tok = parser.keyed_int("dim")
            if dim < 1:
                raise DslError("dim must be positive", dim_tok.line, dim_tok.column, "dim>0")
            type_tok = parser.take("word", what="orth, symp or nsd")
            try:
                duality = SelfDuality(type_tok.text)
            except ValueError:
                raise DslError(f"unknown rho type {type_tok.text!r}; use orth, symp or nsd",
                               type_tok.line, type_tok.column) from None
            rhos[name_tok.text] = RhoLabel(name_tok.text, dim, duality)
        elif tok.text == "block":
            name_tok = parser.take("word", what="a rho name")
            if name_tok.text not in rhos:
                raise DslError(f"rho {name_tok.text} is used before it is declared",
                               name_tok.line, name_tok.column, "rho declared")
            a, a_tok = parser.keyed_int("a")
            b, b_tok = parser.keyed_int("b")
            for value, at, key in ((a, a_tok, "a"), (b, b_tok, "b")):
                if value < 1:
                    raise DslError(f"{key} must be at least 1", at.line, at.column, f"{key}>=1")
            tie = None
            if parser.peek().text == "zeta":
                parser.take("word", "zeta")
                parser.take("punct", "=", "'=' after zeta")
                sign_tok = parser.take("punct", what="'+' or '-'")
                if sign_tok.text not in "+-":
                    raise DslError("zeta must be + or -", sign_tok.line, sign_tok.column)
                if a == b:
                    tie = 1 if sign_tok.text == "+" else -1
                else:
                    warnings.warn(f"line {sign_tok.line}: zeta is ignored when a != b", DslWarning, stacklevel=2)
            blocks.append(block_from_ab(rhos[name_tok.text], a, b, tie))
        else:
            raise DslError(f"expected 'rho' or 'block', found {tok.text!r}", tok.line, tok.column)
    try:
        return ArthurParameter.from_blocks(group, blocks)
    except ValidationError as exc:
        raise DslError(f"{exc} (invariant: {exc.invariant})", head.line, head.column, exc.invariant) from None


def format_parameter(param: ArthurParameter) -> str:
    """The document that parses back to ``param``."""
    lines = [f"group {param.group.kind.value} N={param.group.N}"]
    seen = []
    for blk in param.blocks + param.np_blocks:
        if blk.rho not in seen:
            seen.append(blk.rho)
    for rho in seen:
        lines.append(f"rho {rho.name} dim={rho.dim} {rho.self_dual_type.value}")
    for blk in param.blocks + param.np_blocks:
        a, b = block_to_ab(blk)
        line = f"block {blk.rho.name} a={a} b={b}"
        if a == b:
            line += f" zeta={'+' if blk.zeta > 0 else '-'}"
        lines.append(line)
    return "\n".join(lines) + "\n"


# JSON

def _sign(value: int) -> str:
    return "+" if value > 0 else "-"


def _block_json(blk: JordanBlock) -> dict:
    a, b = block_to_ab(blk)
    return {"rho": blk.rho.name, "a": a, "b": b, "A": str(blk.A), "B": str(blk.B), "zeta": blk.zeta}


def parameter_json(param: ArthurParameter, order: BlockOrder | None = None) -> dict:
    out = {
        "text": format_parameter(param),
        "group": param.group.kind.value,
        "N": param.group.N,
        "blocks": [_block_json(b) for b in param.blocks],
        "np_blocks": [_block_json(b) for b in param.np_blocks],
    }
    if order is not None:
        out["order"] = {name: list(seq) for name, seq in order}
    return out


def element_json(element, include_phi: bool = True) -> dict:
    index = element.index if element.source_index is None else element.source_index
    entry: dict = {"index": {"l": list(index.l), "eta": list(index.eta)}}
    if element.classes:
        entry["index"]["classes"] = {name: k for name, k in element.classes}
        if len(element.classes) == 1:
            entry["index"]["class"] = element.classes[0][1]
        entry["target"] = [_block_json(b) for b in element.target.blocks]
    if include_phi:
        entry["phi"] = [{"rho": p.rho.name, "twist": str(p.twist), "dim": p.dim, "mult": p.multiplicity}
                        for p in element.phi.pieces]
        entry["epsilon"] = [{"rho": name, "dim": dim, "sign": sign} for (name, dim), sign in element.phi.epsilon]
    return entry


def serialize_result(param: ArthurParameter, elements: Sequence, order: BlockOrder | None = None,
                     include_phi: bool = True) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "parameter": parameter_json(param, order),
        "packet": [element_json(el, include_phi) for el in elements],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def index_text(element) -> str:
    index = element.index if element.source_index is None else element.source_index
    return str(index)


def class_text(element) -> str:
    return ",".join(f"{name}:{k}" for name, k in element.classes) or "-"


def phi_text(element) -> str:
    return " + ".join(str(p) for p in element.phi.pieces)


def epsilon_text(element) -> str:
    return " ".join(f"{name}{dim}:{_sign(sign)}" for (name, dim), sign in element.phi.epsilon) or "-"


def table(rows: Sequence[Sequence[str]], header: Sequence[str]) -> str:
    widths = [max(len(str(r[i])) for r in [header, *rows]) for i in range(len(header))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip() for row in [header, *rows]]
    return "\n".join(lines) + "\n"
