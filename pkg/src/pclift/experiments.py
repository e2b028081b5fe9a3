"""Seeded, reproducible comparison experiments between graphs and their
lifts, plus statistical spot checks of certified graph orderings.

Each sample index owns an independent random stream, so results are
bit-identical for a fixed configuration no matter how samples are
scheduled or parallelized.
"""

from __future__ import annotations

import csv
import json
import multiprocessing
import os
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import BudgetError, GraphError
from .graphs import LabeledDigraph, is_path_complete
from .lifts import bwd_comp_lift, transitive_comp_lift
from .lmi import MatrixSet, rho_upper
from .numerics import RngStream, sample_stable_invertible_pair
from .simulation import find_simulation, simulates_comp_lift


@dataclass(frozen=True, eq=False)
class GraphPair:
    """A named (base graph, comparison graph) pair."""

    name: str
    base: LabeledDigraph
    other: LabeledDigraph
    base_ref: str = "base"
    other_ref: str = "other"


@dataclass(frozen=True)
class ExperimentConfig:
    pairs: tuple
    n: int = 3
    samples: int = 1000
    seed: int = 0
    tol: float = 1e-4
    strict_margin: float = 1e-3
    workers: int = 1
    generator_id: str = "philox"

    def __post_init__(self):
        if self.samples < 1:
            raise GraphError("need at least one sample")
        if not self.strict_margin > 2 * self.tol:
            raise GraphError("strict margin must exceed twice the solver tolerance")
        if self.n < 1:
            raise GraphError("state dimension must be at least 1")


@dataclass(frozen=True)
class SampleRecord:
    index: int
    rejections: int
    r_values: tuple  # aligned with the distinct-graph column names
    error: Optional[str] = None


@dataclass(frozen=True)
class PairStats:
    name: str
    base_ref: str
    other_ref: str
    counted: int
    improved: int
    improved_fraction: float
    mean_gap_when_improved: float


@dataclass(frozen=True)
class ExperimentStats:
    columns: tuple  # distinct graph column names, deterministic order
    records: tuple  # SampleRecord per sample index
    pairs: tuple  # PairStats per configured pair
    strict_margin: float
    excluded: int
    excluded_fraction: float
    healthy: bool

    def to_json(self) -> str:
        doc = {
            "columns": list(self.columns),
            "pairs": [asdict(p) for p in self.pairs],
            "excluded": self.excluded,
            "excluded_fraction": self.excluded_fraction,
            "healthy": self.healthy,
            "samples": len(self.records),
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["index", "seed_stream", "rejections"]
                + [f"r:{c}" for c in self.columns]
                + ["gap:" + p.name for p in self.pairs]
                + ["improved:" + p.name for p in self.pairs]
                + ["error"]
            )
            for rec in self.records:
                gaps, improved = _gaps_for_record(self, rec)
                writer.writerow(
                    [rec.index, rec.index, rec.rejections]
                    + [("" if v is None else repr(v)) for v in rec.r_values]
                    + [("" if g is None else repr(g)) for g in gaps]
                    + [("" if i is None else int(i)) for i in improved]
                    + [rec.error or ""]
                )


_WORKER_STATE: dict = {}


def _distinct_graphs(pairs) -> tuple:
    """[(column name, graph)], one column per distinct reference name; a
    reference name must always denote the same graph."""
    out: list = []
    by_ref: dict = {}
    for p in pairs:
        for ref, g in ((p.base_ref, p.base), (p.other_ref, p.other)):
            if ref in by_ref:
                if by_ref[ref] != g:
                    raise GraphError(f"reference name {ref!r} used for two different graphs")
                continue
            by_ref[ref] = g
            out.append((ref, g))
    return tuple(out)


def _eval_sample(args):
    index, cfg_key = args
    cfg, graphs = _WORKER_STATE[cfg_key]
    return _eval_sample_direct(index, cfg, graphs)


def _eval_sample_direct(index: int, cfg: ExperimentConfig, graphs) -> SampleRecord:
    stream = RngStream(cfg.seed, index, cfg.generator_id)
    try:
        pair = sample_stable_invertible_pair(cfg.n, stream)
    except BudgetError as exc:
        return SampleRecord(index, -1, tuple(None for _ in graphs), error=str(exc))
    alphabet = graphs[0][1].alphabet
    mats = MatrixSet(alphabet, tuple((pair.a1, pair.a2)[i % 2] for i in range(len(alphabet))))
    values = []
    error = None
    cache: dict = {}
    for _, g in graphs:
        if g in cache:
            values.append(cache[g])
            continue
        try:
            value = rho_upper(g, mats, tol=cfg.tol, warn_not_path_complete=False).r_upper
        except BudgetError as exc:  # pragma: no cover - solver budgets are soft
            value = None
            error = str(exc)
        cache[g] = value
        values.append(value)
    return SampleRecord(index, pair.rejections, tuple(values), error=error)


def _gaps_for_record(stats: ExperimentStats, rec: SampleRecord):
    gaps, improved = [], []
    col = {name: i for i, name in enumerate(stats.columns)}
    for p in stats.pairs:
        if rec.error is not None:
            gaps.append(None)
            improved.append(None)
            continue
        gap = rec.r_values[col[p.base_ref]] - rec.r_values[col[p.other_ref]]
        gaps.append(gap)
        improved.append(gap > stats.strict_margin)
    return gaps, improved


def run_comparison(config: ExperimentConfig) -> ExperimentStats:
    """Sample systems, bound each graph of each pair, and aggregate how often
    and by how much the comparison graph strictly improves on the base."""
    for p in config.pairs:
        for g in (p.base, p.other):
            if not is_path_complete(g):
                raise GraphError(f"graph {p.name!r} side is not path-complete")
    graphs = _distinct_graphs(config.pairs)
    records = _run_samples(config, graphs)

    col = {name: i for i, name in enumerate(n for n, _ in graphs)}
    pair_stats = []
    excluded = sum(1 for r in records if r.error is not None)
    for p in config.pairs:
        counted = 0
        improved = 0
        gap_sum = 0.0
        for rec in records:
            if rec.error is not None:
                continue
            rb = rec.r_values[col[p.base_ref]]
            ro = rec.r_values[col[p.other_ref]]
            counted += 1
            gap = rb - ro
            if gap > config.strict_margin:
                improved += 1
                gap_sum += gap
        pair_stats.append(
            PairStats(
                name=f"{p.base_ref} vs {p.other_ref}",
                base_ref=p.base_ref,
                other_ref=p.other_ref,
                counted=counted,
                improved=improved,
                improved_fraction=(improved / counted) if counted else 0.0,
                mean_gap_when_improved=(gap_sum / improved) if improved else 0.0,
            )
        )
    frac = excluded / len(records)
    return ExperimentStats(
        columns=tuple(n for n, _ in graphs),
        records=tuple(records),
        pairs=tuple(pair_stats),
        strict_margin=config.strict_margin,
        excluded=excluded,
        excluded_fraction=frac,
        healthy=frac < 0.02,
    )


def _run_samples(config: ExperimentConfig, graphs) -> list:
    indices = list(range(config.samples))
    workers = config.workers if config.workers > 0 else (os.cpu_count() or 1)
    if workers <= 1 or config.samples < 4:
        records = [_eval_sample_direct(i, config, graphs) for i in indices]
    else:
        key = "cfg"
        with multiprocessing.Pool(
            processes=workers,
            initializer=_init_worker,
            initargs=(key, config, graphs),
        ) as pool:
            records = list(pool.imap_unordered(_eval_sample, [(i, key) for i in indices]))
        records.sort(key=lambda r: r.index)
    return records


def _init_worker(key, config, graphs):  # pragma: no cover - subprocess body
    _WORKER_STATE[key] = (config, graphs)


# ---------------------------------------------------------------------------
# Certified-ordering spot checks.


@dataclass(frozen=True)
class SpotcheckReport:
    passed: bool
    checked: int
    violations: tuple  # (index, r_low_graph, r_high_graph)
    witness_kind: str
    witness_level: Optional[int]

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (
            f"{verdict}: {self.checked} samples, {len(self.violations)} violations "
            f"(witness: {self.witness_kind} at depth {self.witness_level})"
        )


def preorder_spotcheck(
    g_low: LabeledDigraph,
    g_high: LabeledDigraph,
    witness_kind: str,
    config: ExperimentConfig,
    tmax: int = 3,
) -> SpotcheckReport:
    """Certify g_low <= g_high by a simulation-based witness, then sample
    systems and demand the bound of g_high never exceeds the bound of g_low
    by more than numerical noise. A violation falsifies the certificate
    chain or the solver, so it is always a reportable bug.
    """
    level: Optional[int]
    if witness_kind == "direct":
        witness = find_simulation(g_low, g_high)
        level = 0
    elif witness_kind == "fwd_comp":
        verdict = simulates_comp_lift(g_low, g_high, tmax)
        witness = verdict.witness if verdict.is_yes else None
        level = verdict.level
    elif witness_kind == "bwd_comp":
        witness, level = None, None
        for t in range(tmax + 1):
            witness = find_simulation(bwd_comp_lift(g_low, t), g_high)
            if witness is not None:
                level = t
                break
    elif witness_kind == "transitive":
        witness = find_simulation(transitive_comp_lift(g_low, tmax).graph, g_high)
        level = tmax
    else:
        raise GraphError(f"unknown witness kind {witness_kind!r}")
    if witness is None:
        raise GraphError(f"no {witness_kind} simulation witness within depth {tmax}")

    violations = []
    checked = 0
    for index in range(config.samples):
        stream = RngStream(config.seed, index, config.generator_id)
        pair = sample_stable_invertible_pair(config.n, stream)
        alphabet = g_low.alphabet
        mats = MatrixSet(
            alphabet, tuple((pair.a1, pair.a2)[i % 2] for i in range(len(alphabet)))
        )
        r_low = rho_upper(g_low, mats, tol=config.tol, warn_not_path_complete=False).r_upper
        r_high = rho_upper(g_high, mats, tol=config.tol, warn_not_path_complete=False).r_upper
        checked += 1
        if r_high > r_low + 2 * config.tol:
            violations.append((index, r_low, r_high))
    return SpotcheckReport(
        passed=not violations,
        checked=checked,
        violations=tuple(violations),
        witness_kind=witness_kind,
        witness_level=level,
    )
