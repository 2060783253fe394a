"""Code tables: the pattern rows that make up the model, and their lengths."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, replace

from .graph import LabeledMultigraph, PatternGraph
from .mdl import log_binomial, log_uniform, universal_int


@dataclass
class LabelStats:
    """Occurrence counts of every label symbol in the data graph.

    Vertex-label and edge occurrences of a symbol are pooled into one count.
    """

    counts: dict[str, int]

    @classmethod
    def from_graph(cls, d: LabeledMultigraph) -> "LabelStats":
        counts: Counter[str] = Counter(label for _, label in d.vertex_labels)
        counts.update(label for _, _, label in d.edges)
        return cls(dict(counts))

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def n_symbols(self) -> int:
        return len(self.counts)

    def symbol_length(self, label: str) -> float:
        count = self.counts.get(label, 0)
        if count == 0:
            raise KeyError(f"label {label!r} does not occur in the data")
        return -math.log2(count / self.total)


SINGLETON_VERTEX = "vertex"
SINGLETON_EDGE = "edge"
SINGLETON_LOOP = "loop"
_SINGLETON_RANK = {SINGLETON_VERTEX: 0, SINGLETON_EDGE: 1, SINGLETON_LOOP: 2}


def singleton_kind(p: PatternGraph) -> str | None:
    """Which kind of singleton ``p`` is, or None for a compound pattern."""
    if p.n_vertices == 1 and len(p.vertex_labels) == 1 and not p.edges:
        return SINGLETON_VERTEX
    if p.n_vertices == 2 and not p.vertex_labels and len(p.edges) == 1:
        return SINGLETON_EDGE
    if p.n_vertices == 1 and not p.vertex_labels and len(p.edges) == 1:
        return SINGLETON_LOOP
    return None


@dataclass
class CodeTableRow:
    pattern: PatternGraph
    ports: tuple[int, ...] = ()
    usage: int = 0
    is_singleton: bool = False
    name: str | None = None

    def __post_init__(self):
        self.ports = tuple(sorted(self.ports))
        if not set(self.ports) <= self.pattern.vertices:
            raise ValueError("ports must be pattern vertices")

    @property
    def code(self) -> str:
        return self.pattern.canonical_code()

    @property
    def label_count(self) -> int:
        return self.pattern.label_count

    @property
    def symbol(self) -> str | None:
        """The single label of a singleton row."""
        if not self.is_singleton:
            return None
        labels = [label for _, label in self.pattern.vertex_labels]
        labels += [label for _, _, label in self.pattern.edges]
        return labels[0]

    @property
    def singleton_kind(self) -> str | None:
        return singleton_kind(self.pattern) if self.is_singleton else None

    def display_name(self) -> str:
        if self.name:
            return self.name
        if self.is_singleton:
            return f"[{self.singleton_kind}] {self.symbol}"
        return self.code


def _order_key(row: CodeTableRow):
    if row.is_singleton:
        return (1, _SINGLETON_RANK[row.singleton_kind], row.symbol, 0, "")
    return (0, -row.label_count, "", -row.usage, row.code)


class CodeTable:
    """An ordered collection of rows; iteration follows cover order.

    Cover order puts compound patterns first (more labels first, then higher
    previous usage, then canonical code) and singletons last (vertex, edge,
    loop; alphabetical within each kind).
    """

    def __init__(self, rows: Iterable[CodeTableRow] = ()):
        self._rows: list[CodeTableRow] = []
        self._codes: set[str] = set()
        for row in rows:
            self._append(row)
        self._sort()

    def _append(self, row: CodeTableRow):
        if not row.is_singleton and row.code in self._codes:
            raise ValueError("code table already has a row isomorphic to this pattern")
        self._rows.append(row)
        self._codes.add(row.code)

    def _sort(self):
        self._rows.sort(key=_order_key)

    @property
    def rows(self) -> list[CodeTableRow]:
        return list(self._rows)

    def __iter__(self):
        return iter(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __getitem__(self, i: int) -> CodeTableRow:
        return self._rows[i]

    def __contains__(self, pattern: PatternGraph) -> bool:
        return pattern.canonical_code() in self._codes

    def has_code(self, code: str) -> bool:
        return code in self._codes

    @property
    def compound_rows(self) -> list[CodeTableRow]:
        return [r for r in self._rows if not r.is_singleton]

    @property
    def singleton_rows(self) -> list[CodeTableRow]:
        return [r for r in self._rows if r.is_singleton]

    def copy(self) -> "CodeTable":
        return CodeTable(replace(r) for r in self._rows)

    def with_pattern(self, pattern: PatternGraph, name: str | None = None) -> "CodeTable":
        """New table with one more compound row; this table is left untouched."""
        ct = self.copy()
        ct._append(CodeTableRow(pattern, name=name))
        ct._sort()
        return ct

    def without(self, codes: Iterable[str]) -> "CodeTable":
        drop = set(codes)
        return CodeTable(replace(r) for r in self._rows if r.is_singleton or r.code not in drop)

    def update_usage(self, usages: Mapping[int, int], ports: Mapping[int, tuple[int, ...]]):
        """Store cover results (keyed by position in cover order) and re-sort."""
        for i, row in enumerate(self._rows):
            row.usage = usages.get(i, 0)
            row.ports = tuple(sorted(ports.get(i, ())))
        self._sort()

    def to_json(self, stats: LabelStats | None = None) -> dict:
        out = []
        for i, row in enumerate(self._rows):
            entry = {
                "index": i,
                "name": row.name,
                "code": row.code,
                "is_singleton": row.is_singleton,
                "pattern": row.pattern.to_json(),
                "ports": list(row.ports),
                "usage": row.usage,
                "label_count": row.label_count,
            }
            if stats is not None:
                structure = pattern_structure_length(row.pattern, stats)
                ports = ports_length(row.pattern, row.ports)
                entry["bits"] = {"structure": structure, "ports": ports, "total": structure + ports}
            out.append(entry)
        return {"rows": out}

    @classmethod
    def from_json(cls, obj: Mapping) -> "CodeTable":
        rows = []
        for entry in obj["rows"]:
            rows.append(
                CodeTableRow(
                    PatternGraph.from_json(entry["pattern"]),
                    ports=tuple(entry.get("ports", ())),
                    usage=entry.get("usage", 0),
                    is_singleton=entry.get("is_singleton", False),
                    name=entry.get("name"),
                )
            )
        return cls(rows)


def build_ct0(d: LabeledMultigraph) -> CodeTable:
    """Singleton-only table: one row per vertex-label symbol and per edge-label symbol.

    Edge labels that occur on self-loops also get a one-vertex loop row, since
    a two-vertex edge pattern cannot embed injectively onto a loop.
    """
    if not d.alphabet:
        raise ValueError("empty data graph: nothing to mine")
    rows = []
    for label in sorted(d.vertex_label_symbols):
        rows.append(CodeTableRow(PatternGraph([1], [(1, label)]), ports=(1,), is_singleton=True))
    loops = set()
    for u, v, label in d.edges:
        if u == v:
            loops.add(label)
    for label in sorted(d.edge_label_symbols):
        rows.append(CodeTableRow(PatternGraph([1, 2], [], [(1, 2, label)]), ports=(1, 2), is_singleton=True))
    for label in sorted(loops):
        rows.append(CodeTableRow(PatternGraph([1], [], [(1, 1, label)]), ports=(1,), is_singleton=True))
    return CodeTable(rows)


def pattern_structure_length(p: PatternGraph, stats: LabelStats) -> float:
    """Bits for the vertex count and the labels of a pattern."""
    n = p.n_vertices
    bits = universal_int(n) + log_uniform(stats.n_symbols)
    vertex_occ = Counter(label for _, label in p.vertex_labels)
    edge_occ = Counter(label for _, _, label in p.edges)
    for occ, slots in ((vertex_occ, n), (edge_occ, n * n)):
        for label, k in occ.items():
            bits += stats.symbol_length(label) + universal_int(k) + log_binomial(slots, k)
    return bits


def ports_length(p: PatternGraph, ports: Iterable[int]) -> float:
    """Bits for how many of the pattern's vertices are ports, and which ones."""
    n = p.n_vertices
    k = len(set(ports))
    return log_uniform(n + 1) + log_binomial(n, k)


def row_length(row: CodeTableRow, stats: LabelStats, ports: Iterable[int] | None = None) -> float:
    return pattern_structure_length(row.pattern, stats) + ports_length(
        row.pattern, row.ports if ports is None else ports
    )


def ct_length(
    ct: CodeTable,
    stats: LabelStats,
    ports: Mapping[int, Iterable[int]] | None = None,
) -> float:
    """Model length: sum of row lengths over all rows, singletons included.

    ``ports`` (keyed by cover-order position) overrides the ports stored in
    the rows, which is how a fresh cover's ports are priced without first
    writing them into the table.
    """
    total = 0.0
    for i, row in enumerate(ct):
        total += row_length(row, stats, None if ports is None else ports.get(i, ()))
    return total


__all__ = [
    "LabelStats",
    "CodeTableRow",
    "CodeTable",
    "build_ct0",
    "singleton_kind",
    "pattern_structure_length",
    "ports_length",
    "row_length",
    "ct_length",
]
