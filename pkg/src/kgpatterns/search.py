"""Anytime greedy search for a compressing code table.

Each iteration covers the data with the incumbent table, turns every pair of
embeddings that meet at a port into a candidate pattern (the two patterns
fused along all their shared vertices), ranks the candidates, and accepts
the first one whose addition shortens the total description length.  The
search stops when no candidate helps, or when a budget runs out, and always
returns the best table found so far.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from dataclasses import dataclass, field

from .codetable import CodeTable, LabelStats, build_ct0, singleton_kind
from .cover import OccurrenceCache, RewrittenGraph, total_length
from .graph import LabeledMultigraph, PatternGraph, merge_patterns_with_maps

#: Minimum gain, in bits, for a candidate to count as an improvement.
IMPROVEMENT_EPS = 1e-9


@dataclass
class Candidate:
    pattern: PatternGraph
    parents: tuple[int, int]
    witness: tuple[int, int, tuple[tuple[int, int], ...]]
    count: int = 0

    @property
    def code(self) -> str:
        return self.pattern.canonical_code()

    @property
    def score(self) -> int:
        return self.count * self.pattern.label_count


@dataclass
class SearchConfig:
    """Search settings; every duration is in seconds and None means unbounded.

    ``max_evaluations`` caps the number of candidate tables evaluated, which
    gives a budget that does not depend on the clock.
    """

    row_cover_timeout: float | None = 0.5
    max_time: float | None = None
    snapshot_interval: float | None = None
    max_evaluations: int | None = None
    label_overlap: bool = False
    random_seed: int | None = None  # kept for config files; the search is deterministic

    def __post_init__(self):
        if self.row_cover_timeout is not None and self.row_cover_timeout <= 0:
            raise ValueError("row_cover_timeout must be positive")
        if self.max_time is not None and self.max_time < 0:
            raise ValueError("max_time must be non-negative")


@dataclass
class TraceEntry:
    iteration: int
    elapsed_s: float
    bits: float
    percent: float
    n_rows: int
    accepted_rank: int | None
    evaluations: int
    row_codes: tuple[str, ...] = ()


@dataclass
class MiningResult:
    ct: CodeTable
    rg: RewrittenGraph
    bits: float
    baseline_bits: float
    trace: list[TraceEntry] = field(default_factory=list)
    elapsed: float = 0.0
    evaluations: int = 0
    stop_reason: str = "converged"

    @property
    def compression_ratio(self) -> float:
        return self.bits / self.baseline_bits


def generate_candidates(rg: RewrittenGraph, ct: CodeTable) -> list[Candidate]:
    """One candidate per distinct merged pattern, with its pair count."""
    rows = list(ct)
    incident: dict[int, list[int]] = {}
    for k, v, _ in rg.edges:
        incident.setdefault(v, []).append(k)
    # shared[(k1, k2)] = shared data vertices of embeddings k1 < k2
    shared: dict[tuple[int, int], list[int]] = {}
    for v in rg.port_vertices:
        ks = incident.get(v, ())
        for a in range(len(ks)):
            for b in range(a + 1, len(ks)):
                shared.setdefault((ks[a], ks[b]), []).append(v)

    merged_cache: dict[tuple, PatternGraph | None] = {}
    found: dict[str, Candidate] = {}
    for (k1, k2), vs in shared.items():
        r1, img1 = rg.embeddings[k1]
        r2, img2 = rg.embeddings[k2]
        pos1 = {x: i for i, x in enumerate(img1, start=1)}
        pos2 = {x: i for i, x in enumerate(img2, start=1)}
        corr = tuple(sorted((pos1[v], pos2[v]) for v in vs))
        key = (r1, r2, corr)
        if key not in merged_cache:
            p, _, _ = merge_patterns_with_maps(rows[r1].pattern, rows[r2].pattern, dict(corr))
            if ct.has_code(p.canonical_code()) or singleton_kind(p) is not None:
                p = None
            merged_cache[key] = p
        p = merged_cache[key]
        if p is None:
            continue
        cand = found.get(p.canonical_code())
        if cand is None:
            cand = found[p.canonical_code()] = Candidate(p, (r1, r2), (k1, k2, corr))
        cand.count += 1
    return list(found.values())


def rank_candidates(cands) -> list[Candidate]:
    """Highest score first; equal scores in canonical-code order."""
    return sorted(cands, key=lambda c: (-c.score, c.code))


def mine(
    d: LabeledMultigraph,
    cfg: SearchConfig | None = None,
    on_snapshot: Callable[[CodeTable, float, float], None] | None = None,
    should_stop: Callable[[], bool] | None = None,
) -> MiningResult:
    """Run the search from the singleton-only table.

    ``on_snapshot(ct, bits, elapsed)`` is called at most every
    ``cfg.snapshot_interval`` seconds with the incumbent, and once at the end.
    ``should_stop()`` is polled between evaluations; returning True ends the
    search with the incumbent.
    """
    cfg = cfg or SearchConfig()
    start = time.monotonic()
    deadline = None if cfg.max_time is None else start + cfg.max_time
    stats = LabelStats.from_graph(d)
    cache = OccurrenceCache(d)

    def evaluate(ct):
        return total_length(
            d, ct, row_timeout=cfg.row_cover_timeout, label_overlap=cfg.label_overlap, cache=cache, stats=stats
        )

    ct = build_ct0(d)
    bits, rg = evaluate(ct)
    ct.update_usage(rg.usage, rg.ports)
    baseline = bits
    result = MiningResult(ct, rg, bits, baseline)
    result.trace.append(TraceEntry(0, 0.0, bits, 100.0, len(ct), None, 0, tuple(r.code for r in ct)))
    last_snapshot = start

    def out_of_budget():
        if should_stop is not None and should_stop():
            return "interrupted"
        if deadline is not None and time.monotonic() >= deadline:
            return "max_time"
        if cfg.max_evaluations is not None and result.evaluations >= cfg.max_evaluations:
            return "max_evaluations"
        return None

    def maybe_snapshot():
        nonlocal last_snapshot
        if on_snapshot is None or cfg.snapshot_interval is None:
            return
        now = time.monotonic()
        if now - last_snapshot >= cfg.snapshot_interval:
            last_snapshot = now
            on_snapshot(result.ct, result.bits, now - start)

    iteration = 0
    stop = None
    while stop is None:
        iteration += 1
        accepted = None
        for rank, cand in enumerate(rank_candidates(generate_candidates(result.rg, result.ct))):
            stop = out_of_budget()
            if stop:
                break
            maybe_snapshot()
            trial = result.ct.with_pattern(cand.pattern)
            trial_bits, trial_rg = evaluate(trial)
            result.evaluations += 1
            if trial_bits >= result.bits - IMPROVEMENT_EPS:
                continue
            settled = _settle(trial, trial_rg, evaluate)
            if settled is not None and settled[1] < result.bits - IMPROVEMENT_EPS:
                accepted = (rank, *settled)
                break
        if accepted is None:
            break
        rank, result.ct, result.bits, result.rg = accepted
        result.trace.append(
            TraceEntry(
                iteration,
                time.monotonic() - start,
                result.bits,
                100.0 * result.bits / baseline,
                len(result.ct),
                rank,
                result.evaluations,
                tuple(r.code for r in result.ct),
            )
        )
    result.stop_reason = stop or "converged"
    result.elapsed = time.monotonic() - start
    if on_snapshot is not None:
        on_snapshot(result.ct, result.bits, result.elapsed)
    return result


def _settle(ct: CodeTable, rg: RewrittenGraph, evaluate):
    """Store a cover's usages, drop unused compound rows, and re-cover.

    Usages feed the row order, so the table is covered again after they are
    written back; the length returned is that of the table as it will be used.
    """
    ct.update_usage(rg.usage, rg.ports)
    unused = [r.code for r in ct.compound_rows if r.usage == 0]
    if unused:
        ct = ct.without(unused)
    for _ in range(3):
        order = [r.code for r in ct]
        bits, rg = evaluate(ct)
        ct.update_usage(rg.usage, rg.ports)
        if [r.code for r in ct] == order:
            return ct, bits, rg
    return None


__all__ = [
    "Candidate",
    "SearchConfig",
    "TraceEntry",
    "MiningResult",
    "generate_candidates",
    "rank_candidates",
    "mine",
]
