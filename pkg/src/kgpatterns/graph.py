"""Labeled directed multigraphs, patterns, and occurrence enumeration.

A graph is a vertex set plus two sets of labels: vertex labels ``(v, l)`` and
labeled edges ``(u, v, l)``.  Several edges may join the same ordered pair of
vertices as long as their labels differ, self-loops are allowed, and a vertex
carries any number of labels.

Occurrences follow isomorphism semantics: the vertex map is injective.
"""

from __future__ import annotations

import json
import time
from collections.abc import Iterable, Iterator, Mapping

Edge = tuple[int, int, str]
VertexLabel = tuple[int, str]


class LabeledMultigraph:
    """Mutable multigraph with the adjacency indexes the matcher needs.

    Treat an instance as immutable once it is handed to a matcher or a cover;
    the indexes are not rebuilt behind the caller's back.
    """

    def __init__(
        self,
        vertices: Iterable[int] = (),
        vertex_labels: Iterable[VertexLabel] = (),
        edges: Iterable[Edge] = (),
    ):
        self._labels: dict[int, set[str]] = {}
        self._out: dict[int, dict[str, set[int]]] = {}
        self._in: dict[int, dict[str, set[int]]] = {}
        self.vertex_labels: set[VertexLabel] = set()
        self.edges: set[Edge] = set()
        self._index = None
        for v in vertices:
            self.add_vertex(v)
        for v, label in vertex_labels:
            self.add_vertex_label(v, label)
        for u, v, label in edges:
            self.add_edge(u, v, label)

    # construction -------------------------------------------------------

    def add_vertex(self, v: int) -> None:
        if v not in self._labels:
            self._labels[v] = set()
            self._out[v] = {}
            self._in[v] = {}
            self._index = None

    def add_vertex_label(self, v: int, label: str) -> None:
        self.add_vertex(v)
        if (v, label) not in self.vertex_labels:
            self._labels[v].add(label)
            self.vertex_labels.add((v, label))
            self._index = None

    def add_edge(self, u: int, v: int, label: str) -> None:
        self.add_vertex(u)
        self.add_vertex(v)
        if (u, v, label) not in self.edges:
            self._out[u].setdefault(label, set()).add(v)
            self._in[v].setdefault(label, set()).add(u)
            self.edges.add((u, v, label))
            self._index = None

    # queries ------------------------------------------------------------

    @property
    def vertices(self) -> set[int]:
        return set(self._labels)

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, v) -> bool:
        return v in self._labels

    def labels_of(self, v: int) -> frozenset[str]:
        return frozenset(self._labels[v])

    def out_edges(self, v: int) -> Iterator[Edge]:
        for label, targets in self._out[v].items():
            for t in targets:
                yield (v, t, label)

    def in_edges(self, v: int) -> Iterator[Edge]:
        for label, sources in self._in[v].items():
            for s in sources:
                yield (s, v, label)

    def degree(self, v: int) -> int:
        return sum(len(t) for t in self._out[v].values()) + sum(
            len(s) for s in self._in[v].values()
        )

    @property
    def vertex_label_symbols(self) -> set[str]:
        return {label for _, label in self.vertex_labels}

    @property
    def edge_label_symbols(self) -> set[str]:
        return {label for _, _, label in self.edges}

    @property
    def alphabet(self) -> set[str]:
        return self.vertex_label_symbols | self.edge_label_symbols

    @property
    def n_labels(self) -> int:
        """Total number of label occurrences: vertex labels plus edges."""
        return len(self.vertex_labels) + len(self.edges)

    def copy(self) -> "LabeledMultigraph":
        return LabeledMultigraph(self._labels, self.vertex_labels, self.edges)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledMultigraph):
            return NotImplemented
        return (
            set(self._labels) == set(other._labels)
            and self.vertex_labels == other.vertex_labels
            and self.edges == other.edges
        )

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(|V|={len(self._labels)}, "
            f"|V_L|={len(self.vertex_labels)}, |E_L|={len(self.edges)})"
        )

    def to_dot(self, name: str = "G") -> str:
        """Debug dump in a DOT-like text format."""
        lines = [f"digraph {name} {{"]
        for v in sorted(self._labels):
            labels = ", ".join(sorted(self._labels[v]))
            lines.append(f'  {v} [label="{v}: {labels}"];')
        for u, v, label in sorted(self.edges):
            lines.append(f'  {u} -> {v} [label="{label}"];')
        lines.append("}")
        return "\n".join(lines)

    def index(self) -> "_DataIndex":
        if self._index is None:
            self._index = _DataIndex(self)
        return self._index


class _DataIndex:
    """Frozen, sorted view of a data graph used by the matcher."""

    def __init__(self, g: LabeledMultigraph):
        self.labels = {v: frozenset(ls) for v, ls in g._labels.items()}
        self.out = {
            v: {label: tuple(sorted(ts)) for label, ts in adj.items()}
            for v, adj in g._out.items()
        }
        self.inc = {
            v: {label: tuple(sorted(ss)) for label, ss in adj.items()}
            for v, adj in g._in.items()
        }
        self.out_deg = {v: sum(map(len, adj.values())) for v, adj in self.out.items()}
        self.in_deg = {v: sum(map(len, adj.values())) for v, adj in self.inc.items()}
        self.edges = g.edges
        self.all_vertices = tuple(sorted(g._labels))
        by_label: dict[str, list[int]] = {}
        for v, label in g.vertex_labels:
            by_label.setdefault(label, []).append(v)
        self.label_vertices = {k: tuple(sorted(vs)) for k, vs in by_label.items()}
        sources: dict[str, set[int]] = {}
        targets: dict[str, set[int]] = {}
        for u, v, label in g.edges:
            sources.setdefault(label, set()).add(u)
            targets.setdefault(label, set()).add(v)
        self.edge_sources = {k: tuple(sorted(vs)) for k, vs in sources.items()}
        self.edge_targets = {k: tuple(sorted(vs)) for k, vs in targets.items()}
        by_edge_label: dict[str, list[tuple[int, int]]] = {}
        for u, v, label in g.edges:
            by_edge_label.setdefault(label, []).append((u, v))
        self.edges_by_label = {k: tuple(sorted(es)) for k, es in by_edge_label.items()}


class PatternGraph(LabeledMultigraph):
    """A pattern: a connected graph on vertices ``1..n`` with at least one label."""

    def __init__(self, vertices=(), vertex_labels=(), edges=()):
        super().__init__(vertices, vertex_labels, edges)
        n = len(self._labels)
        if set(self._labels) != set(range(1, n + 1)):
            raise ValueError("pattern vertices must be exactly 1..n")
        if n and not self.vertex_labels and not self.edges:
            raise ValueError("a pattern needs at least one label")
        self._code: str | None = None
        self._order: tuple[int, ...] | None = None

    @classmethod
    def from_graph(cls, g: LabeledMultigraph) -> "PatternGraph":
        """Renumber an arbitrary graph's vertices to 1..n (sorted order)."""
        ids = {v: i for i, v in enumerate(sorted(g.vertices), start=1)}
        return cls(
            ids.values(),
            ((ids[v], label) for v, label in g.vertex_labels),
            ((ids[u], ids[v], label) for u, v, label in g.edges),
        )

    def add_vertex(self, v):
        super().add_vertex(v)
        self._code = None

    def add_vertex_label(self, v, label):
        super().add_vertex_label(v, label)
        self._code = None

    def add_edge(self, u, v, label):
        super().add_edge(u, v, label)
        self._code = None

    @property
    def n_vertices(self) -> int:
        return len(self._labels)

    @property
    def label_count(self) -> int:
        """Number of labels (vertex labels + edges) in the structure."""
        return len(self.vertex_labels) + len(self.edges)

    def is_connected(self) -> bool:
        if not self._labels:
            return True
        start = min(self._labels)
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for nbrs in (self._out[v], self._in[v]):
                for ws in nbrs.values():
                    for w in ws:
                        if w not in seen:
                            seen.add(w)
                            stack.append(w)
        return len(seen) == len(self._labels)

    def canonical_code(self) -> str:
        if self._code is None:
            self._code, self._order = _canonical_form(self)
        return self._code

    def canonical_order(self) -> tuple[int, ...]:
        """Vertex ids listed in canonical position order."""
        self.canonical_code()
        return self._order

    def canonical(self) -> tuple["PatternGraph", dict[int, int]]:
        """Isomorphic copy renumbered in canonical order, plus old -> new ids."""
        order = self.canonical_order()
        ren = {old: new for new, old in enumerate(order, start=1)}
        p = PatternGraph(
            range(1, len(order) + 1),
            ((ren[v], label) for v, label in self.vertex_labels),
            ((ren[u], ren[v], label) for u, v, label in self.edges),
        )
        p._code = self._code
        p._order = tuple(range(1, len(order) + 1))
        return p, ren

    def to_json(self) -> dict:
        return {
            "vertices": sorted(self._labels),
            "vertex_labels": [[v, label] for v, label in sorted(self.vertex_labels)],
            "edges": [[u, v, label] for u, v, label in sorted(self.edges)],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "PatternGraph":
        return cls(
            obj["vertices"],
            ((v, label) for v, label in obj["vertex_labels"]),
            ((u, v, label) for u, v, label in obj["edges"]),
        )


# occurrences -----------------------------------------------------------------


def is_occurrence(p: LabeledMultigraph, d: LabeledMultigraph, mapping: Mapping[int, int]) -> bool:
    """Check that ``mapping`` is an injective, label- and edge-preserving map."""
    if set(mapping) != p.vertices:
        return False
    images = list(mapping.values())
    if len(set(images)) != len(images):
        return False
    if any(x not in d for x in images):
        return False
    for v, label in p.vertex_labels:
        if (mapping[v], label) not in d.vertex_labels:
            return False
    for u, v, label in p.edges:
        if (mapping[u], mapping[v], label) not in d.edges:
            return False
    return True


class _Plan:
    """Matching order and per-step constraints for one (pattern, data) pair."""

    def __init__(self, p: PatternGraph, idx: _DataIndex):
        vertices = sorted(p.vertices)
        out_deg = {v: sum(len(t) for t in p._out[v].values()) for v in vertices}
        in_deg = {v: sum(len(s) for s in p._in[v].values()) for v in vertices}

        def pool(v):
            # smallest data vertex set that must contain the image of v
            best = None
            for label in p._labels[v]:
                cand = idx.label_vertices.get(label, ())
                if best is None or len(cand) < len(best):
                    best = cand
            for label, ts in p._out[v].items():
                cand = idx.edge_sources.get(label, ())
                if best is None or len(cand) < len(best):
                    best = cand
            for label, ss in p._in[v].items():
                cand = idx.edge_targets.get(label, ())
                if best is None or len(cand) < len(best):
                    best = cand
            return idx.all_vertices if best is None else best

        pools = {v: pool(v) for v in vertices}
        start = min(vertices, key=lambda v: (len(pools[v]), -(out_deg[v] + in_deg[v]), v))
        order = [start]
        placed = {start}
        while len(order) < len(vertices):
            best_key = None
            best_v = None
            for v in vertices:
                if v in placed:
                    continue
                links = sum(
                    len([w for w in ws if w in placed]) for ws in p._out[v].values()
                ) + sum(len([w for w in ws if w in placed]) for ws in p._in[v].values())
                if not links:
                    continue
                key = (-links, len(pools[v]), v)
                if best_key is None or key < best_key:
                    best_key, best_v = key, v
            if best_v is None:
                # disconnected pattern: start a new component
                best_v = min(
                    (v for v in vertices if v not in placed), key=lambda v: (len(pools[v]), v)
                )
            order.append(best_v)
            placed.add(best_v)

        pos = {v: i for i, v in enumerate(order)}
        self.order = order
        self.steps = []
        for i, v in enumerate(order):
            # back-constraints: edges to already placed vertices
            outs = []  # (earlier position, label): edge v -> earlier
            ins = []  # (earlier position, label): edge earlier -> v
            loops = []
            for label, ts in p._out[v].items():
                for t in ts:
                    if t == v:
                        loops.append(label)
                    elif pos[t] < i:
                        outs.append((pos[t], label))
            for label, ss in p._in[v].items():
                for s in ss:
                    if s != v and pos[s] < i:
                        ins.append((pos[s], label))
            self.steps.append(
                (
                    v,
                    frozenset(p._labels[v]),
                    tuple(sorted(outs)),
                    tuple(sorted(ins)),
                    tuple(sorted(loops)),
                    out_deg[v],
                    in_deg[v],
                    pools[v],
                )
            )


class OccurrenceStream:
    """Lazy stream of embeddings of a pattern in a data graph.

    Iterating yields embeddings as tuples ``t`` with ``t[i - 1]`` the data
    vertex of pattern vertex ``i``.  After the stream is exhausted
    ``complete`` tells whether the whole search space was explored; it is
    False when ``max_count`` or ``deadline`` cut the search short.

    ``blocked_edges`` and ``blocked_vertex_labels`` are *live* sets: the
    search never extends through a data edge (or vertex label) currently in
    them, and they may grow while the stream is being consumed.
    """

    def __init__(
        self,
        p: PatternGraph,
        d: LabeledMultigraph,
        max_count: int | None = None,
        deadline: float | None = None,
        blocked_edges: set | None = None,
        blocked_vertex_labels: set | None = None,
    ):
        self.p = p
        self.d = d
        self.max_count = max_count
        self.deadline = deadline
        self.blocked_edges = blocked_edges
        self.blocked_vertex_labels = blocked_vertex_labels
        self.complete: bool | None = None
        self.count = 0
        self._iter = self._run()

    def __iter__(self):
        return self

    def __next__(self) -> tuple[int, ...]:
        return next(self._iter)

    def _run(self):
        p, d = self.p, self.d
        n = p.n_vertices
        if n == 0:
            self.complete = True
            return
        idx = d.index()
        plan = _Plan(p, idx)
        steps = plan.steps
        order = plan.order
        edges = idx.edges
        labels = idx.labels
        out_adj, in_adj = idx.out, idx.inc
        out_deg, in_deg = idx.out_deg, idx.in_deg
        blocked_e = self.blocked_edges
        blocked_l = self.blocked_vertex_labels
        deadline = self.deadline
        max_count = self.max_count
        image = [0] * n  # by step position
        used = set()
        result = [0] * n  # by pattern vertex id - 1
        ticks = 0
        clock = time.monotonic
        truncated = False

        def fits(i, c):
            v, vlabels, outs, ins, loops, odeg, ideg, _ = steps[i]
            if c in used:
                return False
            if out_deg[c] < odeg or in_deg[c] < ideg:
                return False
            if not vlabels <= labels[c]:
                return False
            if blocked_l is not None:
                for label in vlabels:
                    if (c, label) in blocked_l:
                        return False
            for j, label in outs:
                e = (c, image[j], label)
                if e not in edges or (blocked_e is not None and e in blocked_e):
                    return False
            for j, label in ins:
                e = (image[j], c, label)
                if e not in edges or (blocked_e is not None and e in blocked_e):
                    return False
            for label in loops:
                e = (c, c, label)
                if e not in edges or (blocked_e is not None and e in blocked_e):
                    return False
            return True

        def candidates(i):
            _, _, outs, ins, _, _, _, pool = steps[i]
            if i == 0:
                return pool
            best = None
            for j, label in outs:  # v -> image[j]: v is a source of image[j]
                cand = in_adj[image[j]].get(label, ())
                if best is None or len(cand) < len(best):
                    best = cand
            for j, label in ins:
                cand = out_adj[image[j]].get(label, ())
                if best is None or len(cand) < len(best):
                    best = cand
            return pool if best is None else best

        def still_free(emb):
            # the live blocked sets may have grown since the prefix was checked
            if blocked_e is not None:
                for u, v, label in p.edges:
                    if (emb[u - 1], emb[v - 1], label) in blocked_e:
                        return False
            if blocked_l is not None:
                for v, label in p.vertex_labels:
                    if (emb[v - 1], label) in blocked_l:
                        return False
            return True

        # explicit stack of candidate iterators keeps deadlines cheap to check
        stack = [iter(candidates(0))]
        while stack:
            i = len(stack) - 1
            advanced = False
            for c in stack[i]:
                ticks += 1
                if deadline is not None and (ticks & 63) == 0 and clock() >= deadline:
                    truncated = True
                    break
                if not fits(i, c):
                    continue
                image[i] = c
                if i + 1 == n:
                    for k in range(n):
                        result[order[k] - 1] = image[k]
                    emb = tuple(result)
                    if not still_free(emb):
                        continue
                    self.count += 1
                    yield emb
                    if max_count is not None and self.count >= max_count:
                        truncated = True
                        break
                    continue
                used.add(c)
                stack.append(iter(candidates(i + 1)))
                advanced = True
                break
            if truncated:
                break
            if not advanced:
                stack.pop()
                if stack:
                    used.discard(image[len(stack) - 1])
        self.complete = not truncated


def enumerate_occurrences(
    p: PatternGraph,
    d: LabeledMultigraph,
    max_count: int | None = None,
    deadline: float | None = None,
) -> OccurrenceStream:
    """Stream the embeddings of ``p`` in ``d`` in a deterministic order.

    ``deadline`` is an absolute ``time.monotonic()`` value.
    """
    return OccurrenceStream(p, d, max_count=max_count, deadline=deadline)


# canonical codes ---------------------------------------------------------------


def _refine(p: LabeledMultigraph, colors: dict[int, int]) -> dict[int, int]:
    """Colour refinement until stable; colours are ranks of canonical signatures."""
    n_classes = len(set(colors.values()))
    while True:
        sigs = {}
        for v in colors:
            outs = sorted((label, colors[w]) for label, ws in p._out[v].items() for w in ws)
            ins = sorted((label, colors[w]) for label, ws in p._in[v].items() for w in ws)
            sigs[v] = (colors[v], tuple(outs), tuple(ins))
        ranks = {s: r for r, s in enumerate(sorted(set(sigs.values())))}
        new = {v: ranks[sigs[v]] for v in colors}
        if len(ranks) == n_classes:
            return new
        colors = new
        n_classes = len(ranks)


def _twins(p: LabeledMultigraph, u: int, w: int) -> bool:
    """True when swapping u and w (fixing everything else) is an automorphism."""
    if p._labels[u] != p._labels[w]:
        return False

    def nbhd(v, other):
        outs = set()
        ins = set()
        for label, ts in p._out[v].items():
            for t in ts:
                outs.add((label, "self" if t == v else ("other" if t == other else t)))
        for label, ss in p._in[v].items():
            for s in ss:
                ins.add((label, "self" if s == v else ("other" if s == other else s)))
        return outs, ins

    return nbhd(u, w) == nbhd(w, u)


def _canonical_form(p: LabeledMultigraph) -> tuple[str, tuple[int, ...]]:
    vertices = sorted(p.vertices)
    if not vertices:
        return json.dumps([0, [], []]), ()

    def initial_key(v):
        outs = sum(len(t) for t in p._out[v].values())
        ins = sum(len(s) for s in p._in[v].values())
        return (-len(p._labels[v]), tuple(sorted(p._labels[v])), -outs, -ins)

    keys = {v: initial_key(v) for v in vertices}
    ranks = {k: r for r, k in enumerate(sorted(set(keys.values())))}
    colors = _refine(p, {v: ranks[keys[v]] for v in vertices})

    best: list = [None, None]

    def leaf(colors):
        order = sorted(colors, key=colors.__getitem__)
        pos = {v: i for i, v in enumerate(order)}
        code = (
            len(order),
            tuple(tuple(sorted(p._labels[v])) for v in order),
            tuple(sorted((pos[u], pos[v], label) for u, v, label in p.edges)),
        )
        if best[0] is None or code < best[0]:
            best[0] = code
            best[1] = tuple(order)

    def search(colors):
        cells: dict[int, list[int]] = {}
        for v, c in colors.items():
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = c
                break
        if target is None:
            leaf(colors)
            return
        cell = sorted(cells[target])
        reps = []
        for v in cell:
            if not any(_twins(p, v, r) for r in reps):
                reps.append(v)
        for v in reps:
            split = {w: (2 * c if (w == v or c != target) else 2 * c + 1) for w, c in colors.items()}
            # re-rank to consecutive integers, keeping order
            order = {c: r for r, c in enumerate(sorted(set(split.values())))}
            search(_refine(p, {w: order[c] for w, c in split.items()}))

    search(colors)
    n, vlabels, edges = best[0]
    code = json.dumps([n, [list(ls) for ls in vlabels], [list(e) for e in edges]], ensure_ascii=False, separators=(",", ":"))
    return code, best[1]


def canonical_code(p: PatternGraph) -> str:
    """String equal for two patterns iff they are label-preserving isomorphic."""
    return p.canonical_code()


# merging ---------------------------------------------------------------------


def merge_patterns_with_maps(
    p1: PatternGraph, p2: PatternGraph, correspondence: Mapping[int, int]
) -> tuple[PatternGraph, dict[int, int], dict[int, int]]:
    """Fuse two patterns along ``correspondence`` (p1 vertex -> p2 vertex).

    Returns the canonical merged pattern and the maps sending p1 and p2
    vertices to merged-pattern vertices.
    """
    if not correspondence:
        raise ValueError("merge needs a non-empty correspondence")
    for a, b in correspondence.items():
        if a not in p1 or b not in p2:
            raise ValueError(f"correspondence pair {a}->{b} is not between pattern vertices")
    if len(set(correspondence.values())) != len(correspondence):
        raise ValueError("correspondence fuses two distinct vertices of the same pattern")

    n1 = p1.n_vertices
    map1 = {v: v for v in p1.vertices}
    map2 = {}
    nxt = n1 + 1
    inverse = {b: a for a, b in correspondence.items()}
    for v in sorted(p2.vertices):
        if v in inverse:
            map2[v] = inverse[v]
        else:
            map2[v] = nxt
            nxt += 1
    merged = PatternGraph(
        range(1, nxt),
        list(p1.vertex_labels) + [(map2[v], label) for v, label in p2.vertex_labels],
        list(p1.edges) + [(map2[u], map2[v], label) for u, v, label in p2.edges],
    )
    canon, ren = merged.canonical()
    return (
        canon,
        {v: ren[w] for v, w in map1.items()},
        {v: ren[w] for v, w in map2.items()},
    )


def merge_patterns(p1: PatternGraph, p2: PatternGraph, correspondence: Mapping[int, int]) -> PatternGraph:
    """Union of two patterns with corresponding vertices fused, canonically numbered."""
    return merge_patterns_with_maps(p1, p2, correspondence)[0]


def automorphisms(p: PatternGraph) -> list[tuple[int, ...]]:
    """All automorphisms of a (small) pattern as embeddings into itself."""
    return list(enumerate_occurrences(p, p))


__all__ = [
    "Edge",
    "VertexLabel",
    "LabeledMultigraph",
    "PatternGraph",
    "OccurrenceStream",
    "is_occurrence",
    "enumerate_occurrences",
    "canonical_code",
    "merge_patterns",
    "merge_patterns_with_maps",
    "automorphisms",
]
