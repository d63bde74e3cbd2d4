"""Output frequency distributions and their symmetry structure.

A distribution assigns each produced string the fraction of halting runs
that produced it, over the full machine space with both blank symbols.
Files and in-memory state carry integer counts only; probabilities are
derived on demand, so merging and reproduction stay lossless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .enumeration import machine_count
from .errors import DistributionError, InvariantError, StringNotProducedError
from .sweep import ShardCheckpoint

DIST_MAGIC = "ctm-dist v1"


def bit_complement(s: str) -> str:
    return s.translate(str.maketrans("01", "10"))


def canonical_rank_key(s: str, count: int) -> tuple[int, int, str]:
    """Sort key for frequency ranking: count desc, then length, then lex."""
    return (-count, len(s), s)


@dataclass(slots=True)
class Distribution:
    """Empirical output distribution of one machine space.

    ``counts`` maps each produced string to the number of halting runs that
    produced it; ``halting_total`` is the total number of halting runs.
    """

    n: int
    halting_total: int
    counts: dict[str, int]

    def probability(self, s: str) -> float:
        if s not in self.counts:
            raise StringNotProducedError(f"{s!r} not produced in ({self.n},2)")
        return self.counts[s] / self.halting_total

    def __contains__(self, s: str) -> bool:
        return s in self.counts

    def __len__(self) -> int:
        return len(self.counts)

    def ranked_strings(self) -> list[str]:
        """All strings by descending count, ties by (length, lexicographic)."""
        return sorted(self.counts, key=lambda s: canonical_rank_key(s, self.counts[s]))

    def validate(self) -> None:
        if sum(self.counts.values()) != self.halting_total:
            raise InvariantError("counts do not sum to the halting total")
        for s, c in self.counts.items():
            if c < 1:
                raise InvariantError(f"non-positive count for {s!r}")
            if self.counts.get(bit_complement(s)) != c:
                raise InvariantError(f"complement closure broken at {s!r}")
            if self.counts.get(s[::-1]) != c:
                raise InvariantError(f"reversal closure broken at {s!r}")


def complete_by_symmetry(ckpt: ShardCheckpoint) -> ShardCheckpoint:
    """Reconstruct the dual-blank checkpoint from a blank-0-only sweep.

    Each machine's blank-1 run halts exactly when the complement machine's
    blank-0 run halts, at the same step, producing the bit-complemented
    output; since complementing machines permutes the full space, crediting
    every string's complement with the same count reproduces the direct
    dual sweep bit-exactly. Reversals need no credit: mirror machines are
    themselves enumerated, so reversal symmetry is already internal.
    """
    ckpt.validate()
    if ckpt.blank_mode != "zero":
        raise DistributionError("checkpoint is already dual; nothing to complete")
    if not ckpt.covers_full_space():
        raise DistributionError(
            "symmetry completion needs the full index range, got "
            + ",".join(f"[{lo}:{hi})" for lo, hi in ckpt.ranges)
        )
    counts: dict[str, int] = {}
    for s, c in ckpt.string_counts.items():
        counts[s] = counts.get(s, 0) + c
        comp = bit_complement(s)
        counts[comp] = counts.get(comp, 0) + c
    completed = ShardCheckpoint(
        n=ckpt.n,
        blank_mode="dual",
        max_steps=ckpt.max_steps,
        ranges=ckpt.ranges,
        halting_count=2 * ckpt.halting_count,
        nonhalting_count=2 * ckpt.nonhalting_count,
        string_counts=counts,
        joint_histogram={key: 2 * c for key, c in ckpt.joint_histogram.items()},
    )
    completed.validate()
    return completed


def build_distribution(ckpt: ShardCheckpoint) -> Distribution:
    """Normalize a full-space dual checkpoint into a distribution.

    Partial-range checkpoints are rejected (their quotient is not the space
    distribution), as are blank-0-only checkpoints, which must go through
    complete_by_symmetry first.
    """
    ckpt.validate()
    if not ckpt.covers_full_space():
        raise DistributionError(
            f"checkpoint covers only {ckpt.span} of {machine_count(ckpt.n)} machines; "
            "a partial range does not define the distribution"
        )
    if ckpt.blank_mode != "dual":
        raise DistributionError(
            "blank-0-only checkpoint: apply complete_by_symmetry first"
        )
    dist = Distribution(
        n=ckpt.n,
        halting_total=ckpt.halting_count,
        counts=dict(ckpt.string_counts),
    )
    dist.validate()
    return dist


@dataclass(frozen=True, slots=True)
class StringGroup:
    """Closure of a string under reversal and bit-complementation.

    ``group_count``, when built against a distribution, is the number of
    machines whose blank-0 run produced a member, i.e. half the dual-run
    total of the group (the convention of the published group table).
    """

    representative: str
    members: tuple[str, ...]
    group_count: int | None = field(default=None, compare=False)


def string_group(s: str, dist: Distribution | None = None) -> StringGroup:
    """Group of ``s``; the lexicographically smallest member represents it."""
    if not s or set(s) - {"0", "1"}:
        raise DistributionError(f"not a nonempty binary string: {s!r}")
    members = sorted({s, s[::-1], bit_complement(s), bit_complement(s[::-1])})
    count: int | None = None
    if dist is not None:
        total = sum(dist.counts.get(m, 0) for m in members)
        assert total % 2 == 0, "dual-run group totals are even by closure"
        count = total // 2
    return StringGroup(representative=members[0], members=tuple(members), group_count=count)


def group_table(dist: Distribution) -> list[StringGroup]:
    """All groups of the distribution, largest count first."""
    groups: dict[str, StringGroup] = {}
    for s in dist.counts:
        g = string_group(s, dist)
        groups.setdefault(g.representative, g)
    return sorted(
        groups.values(),
        key=lambda g: (-(g.group_count or 0), len(g.representative), g.representative),
    )


def length_distribution(dist: Distribution) -> dict[int, float]:
    """Probability of producing a string of each length."""
    totals: dict[int, int] = {}
    for s, c in dist.counts.items():
        totals[len(s)] = totals.get(len(s), 0) + c
    return {l: totals[l] / dist.halting_total for l in sorted(totals)}


def strings_per_length(dist: Distribution) -> dict[int, int]:
    """Number of distinct produced strings of each length."""
    out: dict[int, int] = {}
    for s in dist.counts:
        out[len(s)] = out.get(len(s), 0) + 1
    return dict(sorted(out.items()))


def ones_count_distribution(dist: Distribution) -> dict[int, float]:
    """Probability of producing a string with exactly k ones.

    All observed k are reported, including 0; published tables typically
    start at k = 1.
    """
    totals: dict[int, int] = {}
    for s, c in dist.counts.items():
        k = s.count("1")
        totals[k] = totals.get(k, 0) + c
    return {k: totals[k] / dist.halting_total for k in sorted(totals)}


def distribution_to_text(dist: Distribution) -> str:
    """Serialize: header, then string/count/probability rows, ranked."""
    lines = [f"{DIST_MAGIC} n={dist.n} d={dist.halting_total}"]
    for s in dist.ranked_strings():
        c = dist.counts[s]
        lines.append(f"{s}\t{c}\t{c / dist.halting_total:.12g}")
    return "\n".join(lines) + "\n"


def distribution_from_text(text: str, source: str = "<string>") -> Distribution:
    lines = text.splitlines()
    if not lines:
        raise DistributionError(f"{source}: empty distribution file")
    head = lines[0].split()
    if head[:2] != DIST_MAGIC.split() or len(head) != 4:
        raise DistributionError(f"{source}: bad header {lines[0]!r}")
    try:
        n = int(head[2].removeprefix("n="))
        total = int(head[3].removeprefix("d="))
    except ValueError as exc:
        raise DistributionError(f"{source}: bad header: {exc}") from exc
    counts: dict[str, int] = {}
    for ln, line in enumerate(lines[1:], start=2):
        cols = line.split("\t")
        if len(cols) != 3:
            raise DistributionError(f"{source}: line {ln}: expected 3 columns")
        if cols[0] in counts:
            raise DistributionError(f"{source}: line {ln}: duplicate string {cols[0]!r}")
        try:
            counts[cols[0]] = int(cols[1])
        except ValueError as exc:
            raise DistributionError(f"{source}: line {ln}: {exc}") from exc
    dist = Distribution(n=n, halting_total=total, counts=counts)
    try:
        dist.validate()
    except InvariantError as exc:
        raise DistributionError(f"{source}: inconsistent distribution: {exc}") from exc
    return dist


def write_distribution(dist: Distribution, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(distribution_to_text(dist))


def read_distribution(path: str) -> Distribution:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DistributionError(f"{path}: {exc}") from exc
    return distribution_from_text(text, source=str(path))


def probability_sum(dist: Distribution) -> float:
    """Float sum of all probabilities (1 within 1e-12 for valid data)."""
    return math.fsum(c / dist.halting_total for c in dist.counts.values())
