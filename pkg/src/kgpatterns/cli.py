"""Command-line front end: ``kgpatterns convert|mine|export-sparql|stats``."""

from __future__ import annotations

import argparse
import json
import re
import signal
import sys
from pathlib import Path

from .codetable import CodeTable, LabelStats, build_ct0, ct_length
from .cover import compute_cover, rewritten_length_terms, total_length
from .graph import LabeledMultigraph
from .ingest import (
    RDF_TYPE,
    ConversionError,
    ConversionMap,
    ConversionOptions,
    LiteralMode,
    NTriplesParseError,
    kg_to_graph,
    read_ntriples,
)
from .report import (
    TRACE_HEADER,
    compute_metrics,
    pattern_to_sparql,
    write_csv_atomic,
    write_json_atomic,
    write_text_atomic,
)
from .search import SearchConfig, mine

_DURATION_RE = re.compile(r"^\s*(\d+(?:\.\d*)?|\.\d+)\s*(ms|s|m|h)\s*$")
_UNITS = {"ms": 1e-3, "s": 1.0, "m": 60.0, "h": 3600.0}


def parse_duration(text: str) -> float | None:
    """``"500ms"`` -> 0.5; ``"inf"`` or ``"none"`` -> None (unbounded)."""
    if text.strip().lower() in ("inf", "none", "unlimited"):
        return None
    m = _DURATION_RE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad duration {text!r}; use a number with ms, s, m or h")
    value = float(m.group(1)) * _UNITS[m.group(2)]
    if value <= 0:
        raise argparse.ArgumentTypeError(f"duration must be positive: {text!r}")
    return value


class InputError(Exception):
    """Bad input data: reported with exit status 1."""


def graph_to_json(g: LabeledMultigraph) -> dict:
    return {
        "vertices": sorted(g.vertices),
        "vertex_labels": [[v, label] for v, label in sorted(g.vertex_labels)],
        "edges": [[u, v, label] for u, v, label in sorted(g.edges)],
    }


def _options(args) -> ConversionOptions:
    preds = frozenset(args.type_predicate) if args.type_predicate else frozenset({RDF_TYPE})
    return ConversionOptions(type_predicates=preds, literal_mode=LiteralMode(args.literal_mode))


def _load(args) -> tuple[LabeledMultigraph, ConversionMap, int]:
    try:
        triples = read_ntriples(args.input)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror or exc}") from None
    except NTriplesParseError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    try:
        g, m = kg_to_graph(triples, _options(args))
    except ConversionError as exc:
        raise InputError(str(exc)) from None
    if not g.alphabet:
        raise InputError(f"{args.input}: empty data graph: nothing to mine")
    return g, m, len(set(triples))


def _read_ct(path) -> CodeTable:
    try:
        obj = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read code table {path}: {exc}") from None
    if "ct" in obj:  # a snapshot
        obj = obj["ct"]
    try:
        return CodeTable.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a code table ({exc})") from None


def _export_patterns(ct: CodeTable, m: ConversionMap, out_dir: Path, strict: bool) -> list[Path]:
    written = []
    for i, row in enumerate(ct):
        if row.is_singleton:
            continue
        query = pattern_to_sparql(row.pattern, row.ports, m, strict_filter=strict)
        path = out_dir / f"row{i:03d}.rq"
        write_text_atomic(path, query + "\n")
        written.append(path)
    return written


def _snapshot_json(ct, stats, bits, baseline, elapsed, args) -> dict:
    return {
        "elapsed_s": elapsed,
        "L_bits": bits,
        "L_percent": 100.0 * bits / baseline,
        "baseline_bits": baseline,
        "settings": {
            "row_cover_timeout_s": args.row_cover_timeout,
            "literal_mode": args.literal_mode,
            "type_predicates": sorted(args.type_predicate or [RDF_TYPE]),
            "label_overlap": args.allow_label_overlap,
        },
        "ct": ct.to_json(stats),
    }


# subcommands -------------------------------------------------------------------


def cmd_convert(args) -> int:
    g, m, n = _load(args)
    out = Path(args.output)
    write_json_atomic(out / "graph.json", graph_to_json(g))
    write_json_atomic(out / "conversion.json", m.to_json())
    print(f"{n} triples -> {len(g)} vertices, {len(g.vertex_labels)} vertex labels, {len(g.edges)} edges")
    return 0


def cmd_mine(args) -> int:
    interrupted = False

    def on_signal(signum, frame):
        nonlocal interrupted
        interrupted = True

    # installed first so that an early interrupt still ends with a full report
    previous = {sig: signal.signal(sig, on_signal) for sig in (signal.SIGINT, signal.SIGTERM)}
    try:
        return _mine(args, lambda: interrupted)
    finally:
        for sig, handler in previous.items():
            signal.signal(sig, handler)


def _mine(args, should_stop) -> int:
    g, m, n = _load(args)
    out = Path(args.output)
    stats = LabelStats.from_graph(g)
    cfg = SearchConfig(
        row_cover_timeout=args.row_cover_timeout,
        max_time=args.max_time,
        snapshot_interval=args.snapshot_interval,
        label_overlap=args.allow_label_overlap,
    )
    write_json_atomic(out / "conversion.json", m.to_json())

    # the singleton-only cover has no timeouts, so this equals the search's own baseline
    baseline, _ = total_length(g, build_ct0(g), stats=stats)

    def on_snapshot(ct, bits, elapsed):
        write_json_atomic(out / "snapshot.json", _snapshot_json(ct, stats, bits, baseline, elapsed, args))

    result = mine(g, cfg, on_snapshot=on_snapshot, should_stop=should_stop)
    ct, rg = result.ct, result.rg
    terms = rewritten_length_terms(rg, ct, g)
    model_bits = ct_length(ct, stats, rg.ports)
    trace_rows = [
        (e.iteration, round(e.elapsed_s, 6), e.bits, e.percent, e.n_rows, "" if e.accepted_rank is None else e.accepted_rank)
        for e in result.trace
    ]
    metrics = compute_metrics(rg, ct, g, result.baseline_bits, result.bits, result.elapsed, trace_rows)
    report = metrics.to_json()
    report.update(
        {
            "n_triples": n,
            "n_vertices": len(g),
            "n_labels": len(g.vertex_labels) + len(g.edges),
            "stop_reason": result.stop_reason,
            "evaluations": result.evaluations,
            "length_terms": {"model": model_bits, **terms},
        }
    )
    write_json_atomic(out / "ct.json", ct.to_json(stats))
    write_json_atomic(out / "rewritten.json", {**rg.to_json(ct), "length_terms": terms})
    write_json_atomic(out / "metrics.json", report)
    write_csv_atomic(out / "trace.csv", TRACE_HEADER, trace_rows)
    write_json_atomic(
        out / "snapshot.json",
        _snapshot_json(ct, stats, result.bits, result.baseline_bits, result.elapsed, args),
    )
    _export_patterns(ct, m, out / "patterns", args.strict_isomorphism_filter)
    print(
        f"L% = {100 * metrics.compression_ratio:.2f}  patterns = {metrics.n_patterns}  "
        f"stop = {result.stop_reason}  elapsed = {result.elapsed:.1f}s  -> {out}"
    )
    return 0


def cmd_export_sparql(args) -> int:
    ct = _read_ct(args.ct)
    try:
        m = ConversionMap.from_json(json.loads(Path(args.conversion).read_text("utf-8")))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise InputError(f"cannot read conversion map {args.conversion}: {exc}") from None
    try:
        written = _export_patterns(ct, m, Path(args.output), args.strict_isomorphism_filter)
    except ConversionError as exc:
        raise InputError(str(exc)) from None
    print(f"{len(written)} queries -> {args.output}")
    return 0


def cmd_stats(args) -> int:
    g, _, n = _load(args)
    ct = _read_ct(args.ct)
    stats = LabelStats.from_graph(g)
    baseline, _ = total_length(g, build_ct0(g), args.row_cover_timeout, stats=stats)
    try:
        rg, state = compute_cover(g, ct, args.row_cover_timeout, label_overlap=args.allow_label_overlap)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    final = ct_length(ct, stats, rg.ports) + sum(rewritten_length_terms(rg, ct, g).values())
    metrics = compute_metrics(rg, ct, g, baseline, final)
    report = metrics.to_json()
    del report["dl_trace"]
    report["n_triples"] = n
    report["truncated_rows"] = sum(state.truncated.values())
    print(json.dumps(report, indent=2))
    return 0


# parser ------------------------------------------------------------------------


def _add_conversion_flags(p):
    p.add_argument("--input", required=True, help="N-Triples file")
    p.add_argument(
        "--type-predicate",
        action="append",
        metavar="IRI",
        help="predicate whose objects become vertex labels (repeatable; default rdf:type)",
    )
    p.add_argument("--literal-mode", choices=[x.value for x in LiteralMode], default=LiteralMode.FULL.value,
                   help="keep literal values, or only their datatypes (default full)")  # fmt: skip


def _add_cover_flags(p):
    p.add_argument("--row-cover-timeout", type=parse_duration, default=0.5, metavar="DUR",
                   help="time limit per code-table row during a cover (default 500ms; 'inf' for none)")  # fmt: skip
    p.add_argument("--allow-label-overlap", action="store_true",
                   help="let several embeddings describe the same vertex label")  # fmt: skip


def _add_filter_flag(p):
    p.add_argument("--strict-isomorphism-filter", action=argparse.BooleanOptionalAction, default=True,
                   help="emit distinctness FILTERs for variables with identical labels")  # fmt: skip


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgpatterns", description="Mine compressing graph patterns from RDF data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert N-Triples to graph JSON plus its conversion map")
    _add_conversion_flags(p)
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("mine", help="run the pattern search")
    _add_conversion_flags(p)
    _add_cover_flags(p)
    p.add_argument("--max-time", type=parse_duration, default=None, metavar="DUR",
                   help="overall search budget (default: run until no candidate helps)")  # fmt: skip
    p.add_argument("--snapshot-interval", type=parse_duration, default=None, metavar="DUR",
                   help="how often to rewrite snapshot.json while searching")  # fmt: skip
    p.add_argument("--output", required=True, help="output directory")
    _add_filter_flag(p)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("export-sparql", help="write one SPARQL query per pattern row")
    p.add_argument("--ct", required=True, help="ct.json or snapshot.json")
    p.add_argument("--conversion", required=True, help="conversion.json")
    p.add_argument("--output", required=True, help="output directory")
    _add_filter_flag(p)
    p.set_defaults(func=cmd_export_sparql)

    p = sub.add_parser("stats", help="metrics of a code table on a data set")
    _add_conversion_flags(p)
    _add_cover_flags(p)
    p.add_argument("--ct", required=True, help="ct.json or snapshot.json")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
