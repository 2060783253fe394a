"""Mining compressing graph patterns from RDF knowledge graphs.

A knowledge graph is turned into a labeled directed multigraph; a greedy,
anytime search then looks for the set of patterns (a code table) that gives
the shortest two-part description of the graph.
"""

from .codetable import CodeTable, CodeTableRow, LabelStats, build_ct0, ct_length
from .cover import OccurrenceCache, RewrittenGraph, compute_cover, rewritten_length, total_length
from .graph import LabeledMultigraph, PatternGraph, canonical_code, enumerate_occurrences, is_occurrence
from .ingest import ConversionOptions, LiteralMode, graph_to_kg, kg_to_graph, parse_ntriples
from .mdl import log_binomial, prequential, universal_int
from .report import compute_metrics, pattern_to_sparql
from .search import MiningResult, SearchConfig, mine

__version__ = "0.1.0"

__all__ = [
    "CodeTable",
    "CodeTableRow",
    "LabelStats",
    "build_ct0",
    "ct_length",
    "OccurrenceCache",
    "RewrittenGraph",
    "compute_cover",
    "rewritten_length",
    "total_length",
    "LabeledMultigraph",
    "PatternGraph",
    "canonical_code",
    "enumerate_occurrences",
    "is_occurrence",
    "ConversionOptions",
    "LiteralMode",
    "graph_to_kg",
    "kg_to_graph",
    "parse_ntriples",
    "log_binomial",
    "prequential",
    "universal_int",
    "compute_metrics",
    "pattern_to_sparql",
    "MiningResult",
    "SearchConfig",
    "mine",
]
