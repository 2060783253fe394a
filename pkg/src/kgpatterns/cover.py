"""Encoding a data graph with a code table.

The cover walks the rows in cover order and greedily keeps every embedding
that does not reuse an already described data edge.  By default a vertex
label may not be described twice either; ``label_overlap=True`` relaxes that
and only forbids edge overlaps.  Singleton rows absorb whatever is left.

Data vertices touched by two or more kept embeddings become port vertices of
the rewritten graph.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field

from .codetable import (
    SINGLETON_EDGE,
    SINGLETON_LOOP,
    SINGLETON_VERTEX,
    CodeTable,
    LabelStats,
    ct_length,
)
from .graph import LabeledMultigraph, OccurrenceStream, PatternGraph
from .mdl import prequential, universal_int

#: Embeddings kept per pattern by :class:`OccurrenceCache`.
DEFAULT_CACHE_LIMIT = 20_000


@dataclass
class RewrittenGraph:
    """Embedding vertices, port vertices and port-labeled edges.

    ``embeddings[k] = (row, image)`` where ``row`` is a cover-order position
    in the code table and ``image[i - 1]`` is the data vertex of pattern
    vertex ``i``.  Edges are ``(k, data_vertex, pattern_vertex)``.
    """

    n_data_vertices: int
    row_codes: list[str]
    embeddings: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    port_vertices: list[int] = field(default_factory=list)
    edges: list[tuple[int, int, int]] = field(default_factory=list)
    ports: dict[int, tuple[int, ...]] = field(default_factory=dict)
    usage: dict[int, int] = field(default_factory=dict)

    def embeddings_of(self, row: int) -> list[tuple[int, ...]]:
        return [img for r, img in self.embeddings if r == row]

    def to_json(self, ct: CodeTable | None = None) -> dict:
        names = None if ct is None else [r.display_name() for r in ct]
        return {
            "n_data_vertices": self.n_data_vertices,
            "embedding_vertices": [
                {"id": k, "row": r, "row_name": None if names is None else names[r], "image": list(img)}
                for k, (r, img) in enumerate(self.embeddings)
            ],
            "port_vertices": list(self.port_vertices),
            "edges": [{"embedding": k, "port_vertex": v, "port": pi} for k, v, pi in self.edges],
        }


@dataclass
class CoverState:
    covered_vertex_labels: set = field(default_factory=set)
    covered_edges: set = field(default_factory=set)
    selected: dict[int, list[tuple[int, ...]]] = field(default_factory=dict)
    elapsed: dict[int, float] = field(default_factory=dict)
    truncated: dict[int, bool] = field(default_factory=dict)

    @property
    def any_truncated(self) -> bool:
        return any(self.truncated.values())


class OccurrenceCache:
    """Remembers the full embedding list of patterns whose search finished.

    Occurrences depend only on the data graph, so a list found once can be
    filtered by every later cover instead of re-running the matcher.  Patterns
    whose enumeration hit the size limit or the row timeout are remembered
    as uncacheable and go through the live, pruned matcher every time.
    """

    def __init__(self, d: LabeledMultigraph, limit: int = DEFAULT_CACHE_LIMIT):
        self.d = d
        self.limit = limit
        self._lists: dict[str, tuple[tuple[int, ...], ...] | None] = {}

    def get(self, p: PatternGraph, deadline: float | None):
        """Cached embedding tuple for ``p``, or None when it is not cacheable."""
        code = p.canonical_code()
        if code in self._lists:
            return self._lists[code]
        stream = OccurrenceStream(p, self.d, max_count=self.limit + 1, deadline=deadline)
        found = tuple(stream)
        self._lists[code] = found if stream.complete and len(found) <= self.limit else None
        return self._lists[code]

    def __len__(self):
        return sum(1 for v in self._lists.values() if v is not None)


def compute_cover(
    d: LabeledMultigraph,
    ct: CodeTable,
    row_timeout: float | None = None,
    label_overlap: bool = False,
    cache: OccurrenceCache | None = None,
) -> tuple[RewrittenGraph, CoverState]:
    """Cover ``d`` with the rows of ``ct`` and build the rewritten graph.

    ``row_timeout`` (seconds, None for no limit) bounds the time spent
    enumerating embeddings of each compound row.
    """
    state = CoverState()
    covered_e = state.covered_edges
    covered_l = state.covered_vertex_labels
    idx = d.index()
    rows = list(ct)

    for i, row in enumerate(rows):
        if row.is_singleton:
            continue
        p = row.pattern
        p_edges = sorted(p.edges)
        p_vlabels = sorted(p.vertex_labels)
        start = time.monotonic()
        deadline = None if row_timeout is None else start + row_timeout
        chosen = state.selected.setdefault(i, [])
        truncated = False

        def take(emb):
            for u, v, label in p_edges:
                covered_e.add((emb[u - 1], emb[v - 1], label))
            for v, label in p_vlabels:
                covered_l.add((emb[v - 1], label))
            chosen.append(emb)

        cached = cache.get(p, deadline) if cache is not None else None
        if cached is not None:
            for emb in cached:
                if any((emb[u - 1], emb[v - 1], label) in covered_e for u, v, label in p_edges):
                    continue
                if label_overlap:
                    if not p_edges and all((emb[v - 1], label) in covered_l for v, label in p_vlabels):
                        continue
                elif any((emb[v - 1], label) in covered_l for v, label in p_vlabels):
                    continue
                take(emb)
        else:
            deadline = None if row_timeout is None else time.monotonic() + row_timeout
            stream = OccurrenceStream(
                p,
                d,
                deadline=deadline,
                blocked_edges=covered_e,
                blocked_vertex_labels=None if label_overlap else covered_l,
            )
            for emb in stream:
                if label_overlap and not p_edges:
                    if all((emb[v - 1], label) in covered_l for v, label in p_vlabels):
                        continue
                take(emb)
            truncated = not stream.complete
        state.elapsed[i] = time.monotonic() - start
        state.truncated[i] = truncated

    # singleton pass: whatever is still undescribed
    for i, row in enumerate(rows):
        if not row.is_singleton:
            continue
        chosen = state.selected.setdefault(i, [])
        kind = row.singleton_kind
        label = row.symbol
        if kind == SINGLETON_VERTEX:
            for v in idx.label_vertices.get(label, ()):
                if (v, label) not in covered_l:
                    covered_l.add((v, label))
                    chosen.append((v,))
        elif kind == SINGLETON_EDGE:
            for u, v in idx.edges_by_label.get(label, ()):
                if u != v and (u, v, label) not in covered_e:
                    covered_e.add((u, v, label))
                    chosen.append((u, v))
        elif kind == SINGLETON_LOOP:
            for u, v in idx.edges_by_label.get(label, ()):
                if u == v and (u, v, label) not in covered_e:
                    covered_e.add((u, v, label))
                    chosen.append((u,))
        state.elapsed[i] = 0.0
        state.truncated[i] = False

    if len(covered_e) != len(d.edges) or len(covered_l) != len(d.vertex_labels):
        missing = (len(d.edges) - len(covered_e)) + (len(d.vertex_labels) - len(covered_l))
        raise ValueError(f"code table leaves {missing} data labels undescribed")

    rg = _rewrite(d, rows, state)
    return rg, state


def _rewrite(d: LabeledMultigraph, rows, state: CoverState) -> RewrittenGraph:
    rg = RewrittenGraph(len(d), [r.code for r in rows])
    multiplicity: Counter[int] = Counter()
    for i in range(len(rows)):
        for emb in state.selected.get(i, ()):
            rg.embeddings.append((i, emb))
            multiplicity.update(set(emb))
    port_set = {v for v, c in multiplicity.items() if c >= 2}
    rg.port_vertices = sorted(port_set)
    ports: dict[int, set[int]] = {}
    for k, (i, emb) in enumerate(rg.embeddings):
        for pi, v in enumerate(emb, start=1):
            if v in port_set:
                rg.edges.append((k, v, pi))
                ports.setdefault(i, set()).add(pi)
    rg.ports = {i: tuple(sorted(ps)) for i, ps in ports.items()}
    rg.usage = {i: len(embs) for i, embs in state.selected.items() if embs}
    return rg


def rewritten_length_terms(rg: RewrittenGraph, ct: CodeTable, d: LabeledMultigraph) -> dict[str, float]:
    """The six parts of the encoded-data length, in bits."""
    codes = [r.code for r in ct]
    if codes != rg.row_codes:
        raise ValueError("rewritten graph was not built against this code table")
    if rg.n_data_vertices != len(d):
        raise ValueError("rewritten graph was not built against this data graph")

    usage = [rg.usage.get(i, 0) for i in range(len(codes))]
    sources = 0.0
    port_labels = 0.0
    per_row_pi: dict[int, Counter] = {}
    destinations: Counter[int] = Counter()
    for k, v, pi in rg.edges:
        per_row_pi.setdefault(rg.embeddings[k][0], Counter())[pi] += 1
        destinations[v] += 1
    for i, n_emb in enumerate(usage):
        n_ports = len(rg.ports.get(i, ()))
        sources += n_emb * math.log2(n_ports + 1)
        if i in per_row_pi:
            port_labels += prequential(n_ports, per_row_pi[i])
    return {
        "embedding_count": float(universal_int(len(rg.embeddings))),
        "port_count": math.log2(len(d) + 1),
        "embedding_labels": prequential(len(codes), usage),
        "edge_sources": sources,
        "edge_labels": port_labels,
        "edge_destinations": prequential(len(rg.port_vertices), destinations) if destinations else 0.0,
    }


def rewritten_length(rg: RewrittenGraph, ct: CodeTable, d: LabeledMultigraph) -> float:
    return sum(rewritten_length_terms(rg, ct, d).values())


def total_length(
    d: LabeledMultigraph,
    ct: CodeTable,
    row_timeout: float | None = None,
    label_overlap: bool = False,
    cache: OccurrenceCache | None = None,
    stats: LabelStats | None = None,
) -> tuple[float, RewrittenGraph]:
    """Model length plus encoded-data length, using the ports of a fresh cover."""
    stats = stats or LabelStats.from_graph(d)
    rg, _ = compute_cover(d, ct, row_timeout=row_timeout, label_overlap=label_overlap, cache=cache)
    return ct_length(ct, stats, rg.ports) + rewritten_length(rg, ct, d), rg
