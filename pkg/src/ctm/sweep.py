"""Exhaustive sweeps over machine spaces with sharding, checkpoints, merge.

A sweep simulates every machine in an index range on blank 0 (and blank 1
in dual mode), tallying output strings, a joint (output length, halting
step) histogram, and halting/non-halting totals. All counters are 64-bit
integers; there is no floating point anywhere in this module, so any
partition of a range into shards merges back to the identical checkpoint.
"""

from __future__ import annotations

import os
import tempfile
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import _kernel
from .enumeration import machine_count
from .errors import CheckpointError, IndexRangeError, InvariantError

BLANK_MODES = ("zero", "dual")
CHECKPOINT_MAGIC = "ctm-checkpoint v1"


@dataclass(frozen=True, slots=True)
class BusyBeaver:
    """Known busy-beaver values: max ones printed and max halting steps."""

    sigma: int
    smax: int


# Exact values, known for up to 4 states; smax is the exact halting cutoff.
BUSY_BEAVER: dict[int, BusyBeaver] = {
    1: BusyBeaver(sigma=1, smax=1),
    2: BusyBeaver(sigma=4, smax=6),
    3: BusyBeaver(sigma=6, smax=21),
    4: BusyBeaver(sigma=13, smax=107),
}

MAX_SWEEP_STATES = max(BUSY_BEAVER)


def default_max_steps(n: int) -> int:
    """The exact halting cutoff S(n) for supported state counts."""
    if n not in BUSY_BEAVER:
        raise IndexRangeError(f"no known step bound for n={n} (supported: 1..{MAX_SWEEP_STATES})")
    return BUSY_BEAVER[n].smax


def shard_range(n: int, shard_id: int, shard_total: int) -> tuple[int, int]:
    """Index sub-range [lo, hi) of shard ``shard_id`` out of ``shard_total``."""
    if shard_total < 1:
        raise IndexRangeError(f"shard total must be >= 1, got {shard_total}")
    if not 0 <= shard_id < shard_total:
        raise IndexRangeError(f"shard id {shard_id} outside [0, {shard_total})")
    count = machine_count(n)
    return (shard_id * count) // shard_total, ((shard_id + 1) * count) // shard_total


@dataclass(frozen=True, slots=True)
class SweepConfig:
    """What to sweep: space, blank mode, cutoff, and index range.

    ``max_steps`` defaults to the known exact cutoff for the space; a lower
    value undercounts halters and triggers a warning. The range may be given
    directly or derived from (shard_id, shard_total).
    """

    n: int
    blank_mode: str = "dual"
    max_steps: int | None = None
    index_range: tuple[int, int] | None = None
    shard_id: int | None = None
    shard_total: int | None = None

    def resolved(self) -> "SweepConfig":
        """Validate and fill in defaults, returning a concrete config."""
        if not 1 <= self.n <= MAX_SWEEP_STATES:
            raise IndexRangeError(
                f"sweeps support 1..{MAX_SWEEP_STATES} states, got {self.n}"
            )
        if self.blank_mode not in BLANK_MODES:
            raise ValueError(f"blank_mode must be one of {BLANK_MODES}, got {self.blank_mode!r}")
        count = machine_count(self.n)
        sharded = self.shard_id is not None or self.shard_total is not None
        if sharded:
            if self.shard_id is None or self.shard_total is None:
                raise IndexRangeError("shard_id and shard_total must be given together")
            if self.index_range is not None:
                raise IndexRangeError("give either index_range or shard_id/shard_total, not both")
            index_range = shard_range(self.n, self.shard_id, self.shard_total)
            if index_range[0] >= index_range[1]:
                raise IndexRangeError(
                    f"shard {self.shard_id} of {self.shard_total} is empty for n={self.n}"
                )
        elif self.index_range is not None:
            lo, hi = self.index_range
            if not 0 <= lo < hi <= count:
                raise IndexRangeError(
                    f"index range [{lo}, {hi}) invalid for n={self.n} ({count} machines)"
                )
            index_range = (lo, hi)
        else:
            index_range = (0, count)
        max_steps = self.max_steps if self.max_steps is not None else default_max_steps(self.n)
        if max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {max_steps}")
        if max_steps < default_max_steps(self.n):
            warnings.warn(
                f"max_steps={max_steps} is below the known halting cutoff "
                f"S({self.n})={default_max_steps(self.n)}; the sweep will undercount halters",
                RuntimeWarning,
                stacklevel=2,
            )
        return replace(
            self,
            max_steps=max_steps,
            index_range=index_range,
            shard_id=None,
            shard_total=None,
        )

    @property
    def runs_per_machine(self) -> int:
        return 2 if self.blank_mode == "dual" else 1


@dataclass(frozen=True, slots=True)
class ChampionInfo:
    """Longest-running halter seen in a sweep (in-memory only)."""

    index: int
    steps: int
    blank: int


def _canonical_ranges(ranges: list[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    """Sort, reject overlaps, and coalesce adjacent ranges."""
    ordered = sorted(ranges)
    merged: list[list[int]] = []
    for lo, hi in ordered:
        if lo >= hi:
            raise IndexRangeError(f"empty or inverted range [{lo}, {hi})")
        if merged and lo < merged[-1][1]:
            raise IndexRangeError(
                f"overlapping index ranges: [{merged[-1][0]}, {merged[-1][1]}) and [{lo}, {hi})"
            )
        if merged and lo == merged[-1][1]:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(slots=True)
class ShardCheckpoint:
    """Raw counts of one sweep over one or more disjoint index ranges."""

    n: int
    blank_mode: str
    max_steps: int
    ranges: tuple[tuple[int, int], ...]
    halting_count: int
    nonhalting_count: int
    string_counts: dict[str, int]
    joint_histogram: dict[tuple[int, int], int]
    champion: ChampionInfo | None = field(default=None, compare=False)

    @property
    def runs_per_machine(self) -> int:
        return 2 if self.blank_mode == "dual" else 1

    @property
    def span(self) -> int:
        return sum(hi - lo for lo, hi in self.ranges)

    def covers_full_space(self) -> bool:
        return self.ranges == ((0, machine_count(self.n)),)

    def validate(self) -> None:
        """Raise InvariantError unless internally consistent."""
        if not 1 <= self.n <= MAX_SWEEP_STATES:
            raise InvariantError(f"bad state count {self.n}")
        if self.blank_mode not in BLANK_MODES:
            raise InvariantError(f"bad blank mode {self.blank_mode!r}")
        if self.max_steps < 1:
            raise InvariantError(f"bad max_steps {self.max_steps}")
        count = machine_count(self.n)
        if self.ranges != _canonical_ranges(list(self.ranges)):
            raise InvariantError(f"ranges not canonical: {self.ranges}")
        for lo, hi in self.ranges:
            if not 0 <= lo < hi <= count:
                raise InvariantError(f"range [{lo}, {hi}) outside [0, {count})")
        runs = self.span * self.runs_per_machine
        if self.halting_count + self.nonhalting_count != runs:
            raise InvariantError(
                f"halting {self.halting_count} + nonhalting {self.nonhalting_count} "
                f"!= {runs} runs"
            )
        if sum(self.string_counts.values()) != self.halting_count:
            raise InvariantError("string counts do not sum to the halting count")
        for s, c in self.string_counts.items():
            if not s or set(s) - {"0", "1"}:
                raise InvariantError(f"bad output string {s!r}")
            if len(s) > self.max_steps + 1:
                raise InvariantError(f"output {s!r} longer than max_steps + 1")
            if c < 1:
                raise InvariantError(f"non-positive count for {s!r}")
        if sum(self.joint_histogram.values()) != self.halting_count:
            raise InvariantError("joint histogram does not sum to the halting count")
        for (length, steps), c in self.joint_histogram.items():
            # a halting transition never extends the visited span, so an
            # l-cell output needs at least l steps
            if not 1 <= length <= steps <= self.max_steps:
                raise InvariantError(f"impossible histogram cell ({length}, {steps})")
            if c < 1:
                raise InvariantError(f"non-positive histogram count at ({length}, {steps})")


def _best_champion(champions: list[ChampionInfo]) -> ChampionInfo:
    return max(champions, key=lambda c: (c.steps, -c.index, -c.blank))


def _reference_sweep_range(n: int, lo: int, hi: int, max_steps: int, dual: bool) -> tuple:
    """Interpreted sweep for step horizons beyond the kernel's packed-output
    limit; same results, orders of magnitude slower."""
    from .enumeration import index_to_machine
    from .machine import simulate

    counts: dict[str, int] = {}
    hist: dict[tuple[int, int], int] = {}
    halting = 0
    nonhalting = 0
    champion: tuple[int, int, int] | None = None
    blanks = (0, 1) if dual else (0,)
    for index in range(lo, hi):
        machine = index_to_machine(n, index)
        for blank in blanks:
            outcome = simulate(machine, blank=blank, max_steps=max_steps)
            if outcome.halted:
                halting += 1
                counts[outcome.output] = counts.get(outcome.output, 0) + 1
                key = (len(outcome.output), outcome.steps)
                hist[key] = hist.get(key, 0) + 1
                if champion is None or outcome.steps > champion[1]:
                    champion = (index, outcome.steps, blank)
            else:
                nonhalting += 1
    return halting, nonhalting, counts, hist, champion


def _sweep_chunk(args: tuple[int, int, int, int, bool]) -> tuple:
    n, lo, hi, max_steps, dual = args
    if max_steps > _kernel.MAX_KERNEL_STEPS:
        return _reference_sweep_range(n, lo, hi, max_steps, dual)
    return _kernel.sweep_range(n, lo, hi, max_steps, dual)


def run_sweep(config: SweepConfig, jobs: int = 1, progress=None) -> ShardCheckpoint:
    """Sweep the configured range and return its checkpoint.

    ``jobs`` > 1 splits the range into contiguous chunks handled by worker
    processes; each worker accumulates privately and the integer merge makes
    the result independent of scheduling. ``progress``, if given, is called
    as progress(done_chunks, total_chunks) after each chunk.
    """
    cfg = config.resolved()
    lo, hi = cfg.index_range
    dual = cfg.blank_mode == "dual"
    total = hi - lo
    jobs = max(1, min(jobs, total))
    nchunks = 1 if jobs == 1 else min(total, jobs * 4)
    bounds = [lo + (total * k) // nchunks for k in range(nchunks + 1)]
    chunks = [
        (cfg.n, bounds[k], bounds[k + 1], cfg.max_steps, dual)
        for k in range(nchunks)
        if bounds[k] < bounds[k + 1]
    ]
    if len(chunks) == 1:
        results = [_sweep_chunk(chunks[0])]
        if progress is not None:
            progress(1, 1)
    else:
        _kernel.warm_up()  # compile once before forking workers
        results = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for done, res in enumerate(pool.map(_sweep_chunk, chunks), start=1):
                results.append(res)
                if progress is not None:
                    progress(done, len(chunks))

    halting = 0
    nonhalting = 0
    string_counts: dict[str, int] = {}
    joint: dict[tuple[int, int], int] = {}
    champions: list[ChampionInfo] = []
    for h, nh, counts, hist, champ in results:
        halting += h
        nonhalting += nh
        for s, c in counts.items():
            string_counts[s] = string_counts.get(s, 0) + c
        for key, c in hist.items():
            joint[key] = joint.get(key, 0) + c
        if champ is not None:
            champions.append(ChampionInfo(index=champ[0], steps=champ[1], blank=champ[2]))
    ckpt = ShardCheckpoint(
        n=cfg.n,
        blank_mode=cfg.blank_mode,
        max_steps=cfg.max_steps,
        ranges=((lo, hi),),
        halting_count=halting,
        nonhalting_count=nonhalting,
        string_counts=string_counts,
        joint_histogram=joint,
        champion=_best_champion(champions) if champions else None,
    )
    ckpt.validate()
    return ckpt


def merge_checkpoints(parts: list[ShardCheckpoint]) -> ShardCheckpoint:
    """Field-wise sum of compatible checkpoints over disjoint ranges."""
    if not parts:
        raise CheckpointError("nothing to merge: empty checkpoint list")
    head = parts[0]
    for p in parts:
        p.validate()
        if (p.n, p.blank_mode, p.max_steps) != (head.n, head.blank_mode, head.max_steps):
            raise CheckpointError(
                "incompatible checkpoint headers: "
                f"(n={head.n}, blank={head.blank_mode}, max_steps={head.max_steps}) vs "
                f"(n={p.n}, blank={p.blank_mode}, max_steps={p.max_steps})"
            )
    ranges = _canonical_ranges([r for p in parts for r in p.ranges])
    string_counts: dict[str, int] = {}
    joint: dict[tuple[int, int], int] = {}
    for p in parts:
        for s, c in p.string_counts.items():
            string_counts[s] = string_counts.get(s, 0) + c
        for key, c in p.joint_histogram.items():
            joint[key] = joint.get(key, 0) + c
    # champion survives only if every part that saw halters tracked one
    halting_parts = [p for p in parts if p.halting_count]
    champions = [p.champion for p in halting_parts]
    champion = _best_champion(champions) if champions and all(champions) else None
    merged = ShardCheckpoint(
        n=head.n,
        blank_mode=head.blank_mode,
        max_steps=head.max_steps,
        ranges=ranges,
        halting_count=sum(p.halting_count for p in parts),
        nonhalting_count=sum(p.nonhalting_count for p in parts),
        string_counts=string_counts,
        joint_histogram=joint,
        champion=champion,
    )
    merged.validate()
    return merged


def checkpoint_to_text(ckpt: ShardCheckpoint) -> str:
    """Serialize to the line-oriented text format (sorted, byte-stable)."""
    ranges = ",".join(f"{lo}:{hi}" for lo, hi in ckpt.ranges)
    lines = [
        CHECKPOINT_MAGIC,
        f"n={ckpt.n} blank={ckpt.blank_mode} max_steps={ckpt.max_steps} range={ranges}",
        f"halting={ckpt.halting_count} nonhalting={ckpt.nonhalting_count}",
    ]
    for s in sorted(ckpt.string_counts):
        lines.append(f"{s}\t{ckpt.string_counts[s]}")
    lines.append("#joint")
    for length, steps in sorted(ckpt.joint_histogram):
        lines.append(f"{length}\t{steps}\t{ckpt.joint_histogram[(length, steps)]}")
    return "\n".join(lines) + "\n"


def checkpoint_from_text(text: str, source: str = "<string>") -> ShardCheckpoint:
    """Parse the text format; CheckpointError names ``source`` on failure."""

    def fail(msg: str):
        raise CheckpointError(f"{source}: {msg}")

    lines = text.splitlines()
    if len(lines) < 4:
        fail("truncated checkpoint")
    if lines[0] != CHECKPOINT_MAGIC:
        fail(f"bad magic line {lines[0]!r} (expected {CHECKPOINT_MAGIC!r})")
    try:
        header = dict(kv.split("=", 1) for kv in lines[1].split())
        n = int(header["n"])
        blank_mode = header["blank"]
        max_steps = int(header["max_steps"])
        ranges = tuple(
            (int(part.split(":")[0]), int(part.split(":")[1]))
            for part in header["range"].split(",")
        )
        totals = dict(kv.split("=", 1) for kv in lines[2].split())
        halting = int(totals["halting"])
        nonhalting = int(totals["nonhalting"])
    except (KeyError, ValueError, IndexError) as exc:
        fail(f"bad header: {exc}")
    if blank_mode not in BLANK_MODES:
        fail(f"bad blank mode {blank_mode!r}")
    string_counts: dict[str, int] = {}
    joint: dict[tuple[int, int], int] = {}
    section = "strings"
    for ln, line in enumerate(lines[3:], start=4):
        if line == "#joint":
            if section != "strings":
                fail(f"line {ln}: duplicate #joint sentinel")
            section = "joint"
            continue
        cols = line.split("\t")
        try:
            if section == "strings":
                if len(cols) != 2:
                    raise ValueError("expected 2 columns")
                if cols[0] in string_counts:
                    raise ValueError(f"duplicate string {cols[0]!r}")
                string_counts[cols[0]] = int(cols[1])
            else:
                if len(cols) != 3:
                    raise ValueError("expected 3 columns")
                key = (int(cols[0]), int(cols[1]))
                if key in joint:
                    raise ValueError(f"duplicate joint row {key}")
                joint[key] = int(cols[2])
        except ValueError as exc:
            fail(f"line {ln}: {exc}")
    if section != "joint":
        fail("missing #joint sentinel")
    ckpt = ShardCheckpoint(
        n=n,
        blank_mode=blank_mode,
        max_steps=max_steps,
        ranges=ranges,
        halting_count=halting,
        nonhalting_count=nonhalting,
        string_counts=string_counts,
        joint_histogram=joint,
    )
    try:
        ckpt.validate()
    except (InvariantError, IndexRangeError) as exc:
        fail(f"inconsistent checkpoint: {exc}")
    if n in BUSY_BEAVER and max_steps < BUSY_BEAVER[n].smax:
        warnings.warn(
            f"{source}: max_steps={max_steps} is below S({n})={BUSY_BEAVER[n].smax}; "
            "halters are undercounted",
            RuntimeWarning,
            stacklevel=2,
        )
    return ckpt


def write_checkpoint(ckpt: ShardCheckpoint, path: str) -> None:
    """Atomically write a checkpoint file (write to temp, then rename)."""
    ckpt.validate()
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".ctm-ckpt-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(checkpoint_to_text(ckpt))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_checkpoint(path: str) -> ShardCheckpoint:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CheckpointError(f"{path}: {exc}") from exc
    return checkpoint_from_text(text, source=str(path))


@dataclass(slots=True)
class SweepTiming:
    """Wall-clock record of a sweep, for throughput reporting."""

    machines: int
    runs: int
    seconds: float

    @property
    def machines_per_second(self) -> float:
        return self.machines / self.seconds if self.seconds > 0 else float("inf")


def timed_sweep(
    config: SweepConfig, jobs: int = 1, progress=None
) -> tuple[ShardCheckpoint, SweepTiming]:
    """run_sweep plus wall-clock timing of the sweep proper."""
    start = time.perf_counter()
    ckpt = run_sweep(config, jobs=jobs, progress=progress)
    elapsed = time.perf_counter() - start
    return ckpt, SweepTiming(
        machines=ckpt.span,
        runs=ckpt.halting_count + ckpt.nonhalting_count,
        seconds=elapsed,
    )
