"""Complexity conversion, rank comparison, runtime tables, moments.

The complexity of a produced string is -log2 of its probability; the value
is kept as a real number (never rounded internally), so equal counts give
identical complexities and the complexity ranking is exactly the frequency
ranking reversed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from statistics import median as _median

from scipy.stats import spearmanr

from .distribution import Distribution, canonical_rank_key
from .errors import DistributionError, StringNotProducedError
from .sweep import ShardCheckpoint

COMPLEXITY_MAGIC = "ctm-complexity v1"


def complexity_of(dist: Distribution, s: str, offset: float = 0.0) -> float:
    """-log2 of the string's probability, in bits.

    ``offset`` is subtracted from the raw value for callers that want to
    display a constant print-program correction; the default reports raw
    values. Raises StringNotProducedError for absent strings, which is a
    different statement than probability zero.
    """
    return -math.log2(dist.probability(s)) - offset


@dataclass(frozen=True, slots=True)
class ComplexityRow:
    string: str
    probability: float
    complexity: float


@dataclass(frozen=True, slots=True)
class ComplexityTable:
    """Strings ranked from least to most complex."""

    n: int
    rows: tuple[ComplexityRow, ...]


def complexity_table(
    dist: Distribution, length: int | None = None, offset: float = 0.0
) -> ComplexityTable:
    """Full complexity ranking, optionally restricted to one string length.

    Rows are sorted by ascending complexity with ties broken by (length,
    lexicographic); because complexity is monotone in the count, this is the
    frequency ranking reversed.
    """
    strings = [s for s in dist.counts if length is None or len(s) == length]
    strings.sort(key=lambda s: canonical_rank_key(s, dist.counts[s]))
    rows = tuple(
        ComplexityRow(s, dist.probability(s), complexity_of(dist, s, offset))
        for s in strings
    )
    return ComplexityTable(n=dist.n, rows=rows)


@dataclass(frozen=True, slots=True)
class RankComparison:
    """How the frequency ranking of one space carries over to another."""

    common_strings: int
    spearman: float
    displaced: int
    max_rank_distance: int
    mean_rank_distance: float
    stddev_rank_distance: float
    first_displaced_rank: int | None


def _canonical_ranks(strings: list[str], dist: Distribution) -> dict[str, int]:
    ordered = sorted(strings, key=lambda s: canonical_rank_key(s, dist.counts[s]))
    return {s: i for i, s in enumerate(ordered, start=1)}


def compare_rankings(coarse: Distribution, fine: Distribution) -> RankComparison:
    """Compare frequency rankings over the strings common to both.

    Displacement statistics use the canonical ranking (count desc, length,
    lexicographic) of the common set within each distribution; the Spearman
    coefficient ranks the raw counts with average-rank treatment of exact
    ties. Two all-tied rankings compare as 1.0.
    """
    common = sorted(set(coarse.counts) & set(fine.counts))
    if not common:
        raise DistributionError("the distributions share no strings")
    rank_c = _canonical_ranks(common, coarse)
    rank_f = _canonical_ranks(common, fine)
    distances = {s: abs(rank_c[s] - rank_f[s]) for s in common}
    moved = [d for d in distances.values() if d]
    displaced = len(moved)
    mean_d = sum(moved) / displaced if displaced else 0.0
    var_d = sum((d - mean_d) ** 2 for d in moved) / displaced if displaced else 0.0
    first = min((rank_c[s] for s in common if distances[s]), default=None)

    x = [coarse.counts[s] for s in common]
    y = [fine.counts[s] for s in common]
    if len(common) == 1 or (len(set(x)) == 1 and len(set(y)) == 1):
        rho = 1.0  # identical (all-tied) rankings
    else:
        rho = float(spearmanr(x, y).statistic)
    return RankComparison(
        common_strings=len(common),
        spearman=rho,
        displaced=displaced,
        max_rank_distance=max(moved, default=0),
        mean_rank_distance=mean_d,
        stddev_rank_distance=math.sqrt(var_d),
        first_displaced_rank=first,
    )


@dataclass(frozen=True, slots=True)
class RuntimeTables:
    """Output length vs halting time, as dense matrices.

    ``conditional[i][j]`` is P(length = lengths[i] | halted at steps[j]):
    every column with any mass sums to 1. ``joint[i][j]`` follows the
    published convention of per-blank machine counts over the dual halting
    total, i.e. histogram/(2 * halting runs) - half the per-run frequency.
    """

    lengths: tuple[int, ...]
    steps: tuple[int, ...]
    conditional: tuple[tuple[float, ...], ...]
    joint: tuple[tuple[float, ...], ...]


def runtime_tables(
    ckpt: ShardCheckpoint,
    max_length: int | None = None,
    max_step: int | None = None,
) -> RuntimeTables:
    """Build the conditional and joint length-vs-time tables.

    Rows cover lengths 1..max_length and columns steps 1..max_step
    (defaulting to the largest observed values), with explicit zeros so the
    matrices print like the published tables.
    """
    hist = ckpt.joint_histogram
    if not hist:
        raise DistributionError("checkpoint has no halting runs to tabulate")
    lengths = tuple(range(1, (max_length or max(l for l, _ in hist)) + 1))
    steps = tuple(range(1, (max_step or max(t for _, t in hist)) + 1))
    col_totals = {t: 0 for t in steps}
    for (l, t), c in hist.items():
        if t in col_totals:
            col_totals[t] += c
    conditional = tuple(
        tuple(
            hist.get((l, t), 0) / col_totals[t] if col_totals[t] else 0.0
            for t in steps
        )
        for l in lengths
    )
    denom = 2 * ckpt.halting_count
    joint = tuple(
        tuple(hist.get((l, t), 0) / denom for t in steps) for l in lengths
    )
    return RuntimeTables(lengths=lengths, steps=steps, conditional=conditional, joint=joint)


@dataclass(frozen=True, slots=True)
class SummaryStats:
    """Population moments of the within-length probabilities.

    The probability values of all produced strings of one length are
    renormalized to sum to 1 over that length class before taking moments
    (so the mean is exactly 1/count). Conventions differ across tools, so
    the median is reported both interpolated (even counts average the two
    middle values) and as the lower middle order statistic, and kurtosis
    both raw (normal = 3) and excess (normal = 0).
    """

    count: int
    mean: float
    median: float
    median_low: float
    variance: float
    skewness: float
    kurtosis: float
    kurtosis_excess: float


def summary_stats(dist: Distribution, length: int) -> SummaryStats:
    """Moments of the probabilities of all produced strings of one length."""
    counts = [c for s, c in dist.counts.items() if len(s) == length]
    if not counts:
        raise DistributionError(f"no strings of length {length} in the distribution")
    total = sum(counts)
    values = sorted(c / total for c in counts)
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    if var > 0.0:
        m3 = sum((v - mean) ** 3 for v in values) / n
        m4 = sum((v - mean) ** 4 for v in values) / n
        skew = m3 / var**1.5
        kurt = m4 / var**2
    else:
        skew = 0.0
        kurt = 0.0
    return SummaryStats(
        count=n,
        mean=mean,
        median=float(_median(values)),
        median_low=values[(n - 1) // 2],
        variance=var,
        skewness=skew,
        kurtosis=kurt,
        kurtosis_excess=kurt - 3.0 if var > 0.0 else 0.0,
    )


def misplaced_strings(dist: Distribution) -> list[str]:
    """Strings ranked above at least one strictly shorter string.

    Returned in ranking order. In spaces where frequency still tracks
    length these are the outliers that climbed out of their length block.
    """
    ranked = dist.ranked_strings()
    out = []
    min_after = [0] * len(ranked)
    shortest = 1 << 60
    for i in range(len(ranked) - 1, -1, -1):
        min_after[i] = shortest
        shortest = min(shortest, len(ranked[i]))
    for s, shorter_below in zip(ranked, min_after):
        if shorter_below < len(s):
            out.append(s)
    return out


def complexity_to_text(table: ComplexityTable) -> str:
    lines = [f"{COMPLEXITY_MAGIC} n={table.n}"]
    for row in table.rows:
        lines.append(f"{row.string}\t{row.probability:.12g}\t{row.complexity:.12g}")
    return "\n".join(lines) + "\n"


def write_complexity(table: ComplexityTable, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(complexity_to_text(table))


def write_runtime_csv(tables: RuntimeTables, conditional_path: str, joint_path: str) -> None:
    """Export both tables as CSV matrices: length rows, step columns."""
    for path, matrix in ((conditional_path, tables.conditional), (joint_path, tables.joint)):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["length"] + [f"t={t}" for t in tables.steps])
            for length, row in zip(tables.lengths, matrix):
                writer.writerow([length] + [f"{v:.12g}" for v in row])


def raise_if_absent(dist: Distribution, s: str) -> None:
    """Explicit absence check used by CLI surfaces."""
    if s not in dist:
        raise StringNotProducedError(f"{s!r} not produced in ({dist.n},2)")
