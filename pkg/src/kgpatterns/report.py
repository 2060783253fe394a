"""Metrics, SPARQL export of patterns, and atomic report writers."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

from .codetable import CodeTable
from .cover import RewrittenGraph
from .graph import LabeledMultigraph, PatternGraph
from .ingest import (
    RDF_NIL,
    ConversionError,
    ConversionMap,
    LabelKind,
    Literal,
)

TRACE_HEADER = ("iteration", "elapsed_s", "L_bits", "L_percent", "n_rows", "candidate_rank_accepted")


@dataclass
class Metrics:
    n_patterns: int
    pct_labels_ge2: float
    pct_labels_ge10: float
    compression_ratio: float
    baseline_bits: float
    final_bits: float
    elapsed: float = 0.0
    dl_trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = asdict(self)
        out["dl_trace"] = [list(row) for row in self.dl_trace]
        return out


def described_labels(rg: RewrittenGraph, ct: CodeTable, min_labels: int) -> set:
    """Data labels described by embeddings of rows with at least ``min_labels`` labels."""
    rows = list(ct)
    out = set()
    for r, img in rg.embeddings:
        p = rows[r].pattern
        if p.label_count < min_labels:
            continue
        for v, label in p.vertex_labels:
            out.add((img[v - 1], label))
        for u, v, label in p.edges:
            out.add((img[u - 1], img[v - 1], label))
    return out


def compute_metrics(
    rg: RewrittenGraph,
    ct: CodeTable,
    d: LabeledMultigraph,
    baseline_bits: float,
    final_bits: float,
    elapsed: float = 0.0,
    dl_trace=(),
) -> Metrics:
    total = len(d.vertex_labels) + len(d.edges)
    ge2 = len(described_labels(rg, ct, 2)) / total if total else 0.0
    ge10 = len(described_labels(rg, ct, 10)) / total if total else 0.0
    return Metrics(
        n_patterns=len(ct.compound_rows),
        pct_labels_ge2=ge2,
        pct_labels_ge10=ge10,
        compression_ratio=final_bits / baseline_bits,
        baseline_bits=baseline_bits,
        final_bits=final_bits,
        elapsed=elapsed,
        dl_trace=list(dl_trace),
    )


# SPARQL ------------------------------------------------------------------------


def _literal_term(info) -> str:
    return Literal(info.value, info.datatype, info.lang).n3()


def pattern_to_sparql(
    p: PatternGraph,
    ports,
    m: ConversionMap,
    strict_filter: bool = True,
) -> str:
    """A SELECT query whose solutions include every occurrence of ``p``.

    Ports are the selected variables (all vertices when there are none).
    A non-port vertex carrying a literal value or ``rdf:nil`` becomes a
    constant; a port vertex keeps its variable and gets a FILTER instead.
    With ``strict_filter``, variables with identical label sets are required
    to be distinct, which keeps the solutions close to injective matches.
    """
    ports = set(ports)
    selected = sorted(ports) if ports else sorted(p.vertices)
    kinds = {}
    for symbol in p.alphabet:
        kinds[symbol] = m.kind_of(symbol)

    terms: dict[int, str] = {v: f"?x{v}" for v in p.vertices}
    filters: list[str] = []
    class_labels: dict[int, list[str]] = {v: [] for v in p.vertices}
    constant: set[int] = set()
    for v in sorted(p.vertices):
        for symbol in sorted(p.labels_of(v)):
            kind = kinds[symbol]
            info = m.labels[symbol]
            if kind is LabelKind.CLASS:
                # class symbols are already "a <C>" or "<p> <C>"
                class_labels[v].append(symbol)
            elif kind is LabelKind.PLAIN:
                raise ConversionError(f"predicate label {symbol!r} used as a vertex label")
            else:
                if kind is LabelKind.NIL:
                    value = f"<{RDF_NIL}>"
                elif info.value is None:
                    filters.append(f"FILTER(datatype(?x{v}) = <{info.datatype}>)")
                    continue
                else:
                    value = _literal_term(info)
                if v in ports or v in constant:
                    filters.append(f"FILTER(sameTerm(?x{v}, {value}))")
                else:
                    terms[v] = value
                    constant.add(v)

    blocks = []
    mentioned = set()
    for v in sorted(p.vertices):
        parts = list(class_labels[v])
        for _, w, symbol in sorted(p.out_edges(v), key=lambda e: (e[2], e[1])):
            if kinds[symbol] is not LabelKind.PLAIN:
                raise ConversionError(f"label {symbol!r} used on an edge is not a predicate")
            parts.append(f"{symbol} {terms[w]}")
            mentioned.add(w)
        if parts:
            blocks.append(f"{terms[v]} " + " ; ".join(parts) + " .")
            mentioned.add(v)
    for v in sorted(p.vertices - mentioned):
        # a vertex only known by its value: anchor it to some triple
        blocks.append(f"?s{v} ?p{v} {terms[v]} .")

    if strict_filter:
        variables = [v for v in sorted(p.vertices) if v not in constant and not _is_value_vertex(p, v, kinds)]
        for i, a in enumerate(variables):
            for b in variables[i + 1 :]:
                if p.labels_of(a) == p.labels_of(b):
                    filters.append(f"FILTER(!sameTerm(?x{a}, ?x{b}))")

    head = "SELECT " + " ".join(f"?x{v}" for v in selected)
    body = " ".join(blocks + filters)
    return f"{head} WHERE {{ {body} }}"


def _is_value_vertex(p: PatternGraph, v: int, kinds) -> bool:
    # literal and nil vertices are per-triple copies; equal terms are expected
    return any(kinds[s] in (LabelKind.DATATYPE_VALUE, LabelKind.NIL) for s in p.labels_of(v))


# writers -----------------------------------------------------------------------


def write_text_atomic(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path, obj) -> None:
    write_text_atomic(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def write_csv_atomic(path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    write_text_atomic(path, buf.getvalue())


def load_schema(name: str) -> dict:
    """One of the published JSON schemas, e.g. ``load_schema("metrics")``."""
    text = resources.files(__package__).joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


SCHEMA_NAMES = ("ct", "rewritten", "metrics", "conversion", "snapshot")


__all__ = [
    "Metrics",
    "TRACE_HEADER",
    "compute_metrics",
    "described_labels",
    "pattern_to_sparql",
    "write_text_atomic",
    "write_json_atomic",
    "write_csv_atomic",
    "load_schema",
    "SCHEMA_NAMES",
]
