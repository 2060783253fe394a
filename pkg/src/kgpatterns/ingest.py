"""N-Triples parsing and the reversible triples -> multigraph conversion.

The conversion departs from the plain RDF graph view in three ways, each of
which keeps unrelated entities from becoming neighbours:

* objects of type triples become labels on the subject's vertex;
* every literal-object triple gets its own fresh literal vertex;
* every occurrence of ``rdf:nil`` gets its own fresh vertex.

A :class:`ConversionMap` keeps what is needed to turn the graph back into the
original triples and to render patterns as SPARQL.
"""

from __future__ import annotations

import enum
import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import NamedTuple, Union

from .graph import LabeledMultigraph

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = RDF + "type"
RDF_NIL = RDF + "nil"
RDF_LANGSTRING = RDF + "langString"
XSD_STRING = XSD + "string"

NIL_SYMBOL = "rdf:nil"


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def n3(self) -> str:
        return f"<{_escape_iri(self.value)}>"


@dataclass(frozen=True, order=True)
class BNode:
    id: str

    def n3(self) -> str:
        return f"_:{self.id}"


@dataclass(frozen=True, order=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    lang: str | None = None

    def __post_init__(self):
        if self.lang is not None and self.datatype != RDF_LANGSTRING:
            object.__setattr__(self, "datatype", RDF_LANGSTRING)

    def n3(self) -> str:
        quoted = '"' + _escape_string(self.lexical) + '"'
        if self.lang is not None:
            return f"{quoted}@{self.lang}"
        if self.datatype == XSD_STRING:
            return quoted
        return f"{quoted}^^<{_escape_iri(self.datatype)}>"


Term = Union[IRI, BNode, Literal]


class Triple(NamedTuple):
    subject: Union[IRI, BNode]
    predicate: IRI
    object: Term

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


class NTriplesParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConversionError(ValueError):
    """The graph and the conversion map do not fit together."""


# parsing ------------------------------------------------------------------------

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_IRI_RE = re.compile(r"<([^<>\"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>")
_BNODE_RE = re.compile(r"_:[A-Za-z0-9_À-￿]([A-Za-z0-9_\-.·À-￿]*[A-Za-z0-9_\-·À-￿])?")
_LANG_RE = re.compile(r"@[a-zA-Z]+(-[a-zA-Z0-9]+)*")
_UCHAR_RE = re.compile(r"\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}")
_WS = " \t"


def _unescape_uchar(body: str) -> str:
    return _UCHAR_RE.sub(lambda m: chr(int(m.group(0)[2:], 16)), body)


class _LineScanner:
    def __init__(self, text: str, lineno: int):
        self.s = text
        self.i = 0
        self.lineno = lineno

    def error(self, msg: str):
        raise NTriplesParseError(msg, self.lineno)

    def skip_ws(self):
        while self.i < len(self.s) and self.s[self.i] in _WS:
            self.i += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.i >= len(self.s) or self.s[self.i] == "#"

    def iri(self) -> IRI:
        m = _IRI_RE.match(self.s, self.i)
        if not m:
            self.error(f"expected IRI at column {self.i + 1}")
        self.i = m.end()
        return IRI(_unescape_uchar(m.group(0)[1:-1]))

    def bnode(self) -> BNode:
        m = _BNODE_RE.match(self.s, self.i)
        if not m:
            self.error(f"malformed blank node at column {self.i + 1}")
        self.i = m.end()
        return BNode(m.group(0)[2:])

    def literal(self) -> Literal:
        assert self.s[self.i] == '"'
        j = self.i + 1
        buf = []
        while True:
            if j >= len(self.s):
                self.error("unterminated string literal")
            c = self.s[j]
            if c == '"':
                break
            if c == "\\":
                if j + 1 >= len(self.s):
                    self.error("dangling escape")
                e = self.s[j + 1]
                if e in _ECHAR:
                    buf.append(_ECHAR[e])
                    j += 2
                elif e in "uU":
                    width = 4 if e == "u" else 8
                    hexpart = self.s[j + 2 : j + 2 + width]
                    if len(hexpart) != width or not re.fullmatch(r"[0-9A-Fa-f]+", hexpart):
                        self.error("malformed unicode escape")
                    buf.append(chr(int(hexpart, 16)))
                    j += 2 + width
                else:
                    self.error(f"unknown escape \\{e}")
                continue
            if c in "\n\r":
                self.error("raw newline in string literal")
            buf.append(c)
            j += 1
        self.i = j + 1
        lexical = "".join(buf)
        if self.s.startswith("^^", self.i):
            self.i += 2
            return Literal(lexical, self.iri().value)
        m = _LANG_RE.match(self.s, self.i)
        if m:
            self.i = m.end()
            return Literal(lexical, RDF_LANGSTRING, m.group(0)[1:])
        return Literal(lexical)

    def term(self, allowed: str) -> Term:
        self.skip_ws()
        if self.i >= len(self.s):
            self.error("unexpected end of line")
        c = self.s[self.i]
        if c == "<" and "i" in allowed:
            return self.iri()
        if c == "_" and "b" in allowed:
            return self.bnode()
        if c == '"' and "l" in allowed:
            return self.literal()
        self.error(f"unexpected {c!r} at column {self.i + 1}")


def parse_ntriples(data: bytes | str | Iterable[str]) -> list[Triple]:
    """Parse N-Triples text into triples, in file order.

    Accepts bytes (UTF-8), a string, or an iterable of lines.  Comments and
    blank lines are skipped.  Duplicates are kept here; :func:`kg_to_graph`
    works on the set.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = data.splitlines() if isinstance(data, str) else data
    triples = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r\n")
        sc = _LineScanner(line, lineno)
        if sc.at_end():
            continue
        s = sc.term("ib")
        p = sc.term("i")
        o = sc.term("ibl")
        sc.skip_ws()
        if sc.i >= len(line) or line[sc.i] != ".":
            sc.error("expected '.' at end of triple")
        sc.i += 1
        if not sc.at_end():
            sc.error("trailing content after '.'")
        triples.append(Triple(s, p, o))
    return triples


def _escape_string(s: str) -> str:
    return (
        s.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
    )


def _escape_iri(s: str) -> str:
    out = []
    for c in s:
        if c in '<>"{}|^`\\' or ord(c) <= 0x20:
            out.append(f"\\u{ord(c):04X}" if ord(c) <= 0xFFFF else f"\\U{ord(c):08X}")
        else:
            out.append(c)
    return "".join(out)


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    """Canonical N-Triples: one triple per line, lines sorted."""
    lines = sorted(t.n3() for t in triples)
    return "".join(line + "\n" for line in lines)


def parse_term(text: str) -> Term:
    """Parse a single N-Triples term such as ``<x>``, ``_:b`` or ``"1"^^<int>``."""
    sc = _LineScanner(text, 0)
    t = sc.term("ibl")
    if not sc.at_end():
        sc.error("trailing content after term")
    return t


# conversion ---------------------------------------------------------------------


class LiteralMode(enum.Enum):
    FULL = "full"
    DATATYPE_ONLY = "datatype-only"


class LabelKind(enum.Enum):
    CLASS = "CLASS"
    DATATYPE_VALUE = "DATATYPE_VALUE"
    NIL = "NIL"
    PLAIN = "PLAIN"


@dataclass(frozen=True)
class ConversionOptions:
    type_predicates: frozenset[str] = frozenset({RDF_TYPE})
    literal_mode: LiteralMode = LiteralMode.FULL

    def __post_init__(self):
        if not self.type_predicates:
            raise ValueError("type_predicates must not be empty")
        object.__setattr__(self, "type_predicates", frozenset(self.type_predicates))


@dataclass(frozen=True)
class LabelInfo:
    """Provenance of one label symbol.

    ``iri`` is the predicate for PLAIN labels and the class term (N-Triples
    form) for CLASS labels; ``predicate`` is the type predicate a CLASS label
    came from.
    """

    kind: LabelKind
    iri: str | None = None
    predicate: str | None = None
    datatype: str | None = None
    value: str | None = None
    lang: str | None = None


@dataclass
class ConversionMap:
    labels: dict[str, LabelInfo] = field(default_factory=dict)
    vertices: dict[int, Term] = field(default_factory=dict)

    def kind_of(self, symbol: str) -> LabelKind:
        try:
            return self.labels[symbol].kind
        except KeyError:
            raise ConversionError(f"label {symbol!r} has no recorded provenance") from None

    def to_json(self) -> dict:
        labels = []
        for symbol in sorted(self.labels):
            info = self.labels[symbol]
            entry = {"symbol": symbol, "kind": info.kind.value}
            for key in ("iri", "predicate", "datatype", "value", "lang"):
                val = getattr(info, key)
                if val is not None:
                    entry[key] = val
            labels.append(entry)
        vertices = [{"id": v, "term": self.vertices[v].n3()} for v in sorted(self.vertices)]
        return {"labels": labels, "vertices": vertices}

    @classmethod
    def from_json(cls, obj: dict) -> "ConversionMap":
        m = cls()
        for entry in obj["labels"]:
            m.labels[entry["symbol"]] = LabelInfo(
                LabelKind(entry["kind"]),
                **{k: entry.get(k) for k in ("iri", "predicate", "datatype", "value", "lang")},
            )
        for entry in obj["vertices"]:
            m.vertices[int(entry["id"])] = parse_term(entry["term"])
        return m


def _class_symbol(predicate: str, obj: Term) -> str:
    if predicate == RDF_TYPE:
        return f"a {obj.n3()}"
    return f"<{_escape_iri(predicate)}> {obj.n3()}"


def _literal_symbol(lit: Literal, mode: LiteralMode) -> tuple[str, LabelInfo]:
    if mode is LiteralMode.FULL:
        info = LabelInfo(LabelKind.DATATYPE_VALUE, datatype=lit.datatype, value=lit.lexical, lang=lit.lang)
        return lit.n3(), info
    info = LabelInfo(LabelKind.DATATYPE_VALUE, datatype=lit.datatype)
    return f"^^<{_escape_iri(lit.datatype)}>", info


def _sort_key(t: Triple) -> str:
    return t.n3()


def kg_to_graph(
    triples: Iterable[Triple], opts: ConversionOptions | None = None
) -> tuple[LabeledMultigraph, ConversionMap]:
    """Convert a triple set into a labeled multigraph plus its inverse map.

    Vertex ids are assigned in order of first appearance in the sorted
    triple set, so the result does not depend on input order.
    """
    opts = opts or ConversionOptions()
    g = LabeledMultigraph()
    cmap = ConversionMap()
    ids: dict[Term, int] = {}

    def fresh(term: Term) -> int:
        v = len(cmap.vertices)
        cmap.vertices[v] = term
        g.add_vertex(v)
        return v

    def node(term: Term) -> int:
        if term == IRI(RDF_NIL):
            v = fresh(term)
            g.add_vertex_label(v, NIL_SYMBOL)
            cmap.labels[NIL_SYMBOL] = LabelInfo(LabelKind.NIL, iri=RDF_NIL)
            return v
        if term not in ids:
            ids[term] = fresh(term)
        return ids[term]

    def register(symbol: str, info: LabelInfo):
        known = cmap.labels.get(symbol)
        if known is not None and known.kind is not info.kind:
            raise ConversionError(f"label {symbol!r} would carry two provenance kinds")
        cmap.labels[symbol] = info

    for t in sorted(set(triples), key=_sort_key):
        s = node(t.subject)
        p = t.predicate.value
        o = t.object
        if p in opts.type_predicates and not isinstance(o, Literal):
            symbol = _class_symbol(p, o)
            register(symbol, LabelInfo(LabelKind.CLASS, iri=o.n3(), predicate=p))
            g.add_vertex_label(s, symbol)
            continue
        if isinstance(o, Literal):
            target = fresh(o)
            symbol, info = _literal_symbol(o, opts.literal_mode)
            register(symbol, info)
            g.add_vertex_label(target, symbol)
        else:
            target = node(o)
        edge_symbol = f"<{_escape_iri(p)}>"
        register(edge_symbol, LabelInfo(LabelKind.PLAIN, iri=p))
        g.add_edge(s, target, edge_symbol)
    return g, cmap


def graph_to_kg(g: LabeledMultigraph, m: ConversionMap) -> set[Triple]:
    """Invert :func:`kg_to_graph` (FULL literal mode)."""
    out: set[Triple] = set()

    def term(v: int) -> Term:
        try:
            return m.vertices[v]
        except KeyError:
            raise ConversionError(f"vertex {v} has no recorded RDF term") from None

    for v, symbol in g.vertex_labels:
        kind = m.kind_of(symbol)
        if kind is LabelKind.CLASS:
            info = m.labels[symbol]
            out.add(Triple(term(v), IRI(info.predicate), parse_term(info.iri)))
        elif kind is LabelKind.PLAIN:
            raise ConversionError(f"edge label {symbol!r} used as a vertex label")
    for u, v, symbol in g.edges:
        if m.kind_of(symbol) is not LabelKind.PLAIN:
            raise ConversionError(f"label {symbol!r} used on an edge is not a predicate")
        out.add(Triple(term(u), IRI(m.labels[symbol].iri), term(v)))
    return out


def read_ntriples(path) -> list[Triple]:
    with open(path, "rb") as fh:
        return parse_ntriples(fh.read())
