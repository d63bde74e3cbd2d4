"""Command-line interface: reproducible batch workflows over stable files.

Every subcommand is deterministic given its flags and input files; data
files carry full precision and sorted rows, so repeated runs are
byte-identical. Console tables round to 3 significant digits (complexities
to 2 decimals). Exit codes: 0 success, 1 internal inconsistency (a bug),
2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed

from . import _kernel, analysis, distribution, sweep
from .enumeration import index_to_machine, machine_count
from .errors import (
    CheckpointError,
    CtmError,
    DistributionError,
    IndexRangeError,
    InvariantError,
    MalformedMachineError,
)
from .machine import MachineDescriptor, simulate
from .sweep import (
    BUSY_BEAVER,
    MAX_SWEEP_STATES,
    ShardCheckpoint,
    SweepConfig,
    default_max_steps,
    merge_checkpoints,
    read_checkpoint,
    run_sweep,
    shard_range,
    write_checkpoint,
)

CHECKPOINT_DIR_ENV = "CTM_CHECKPOINT_DIR"

EXIT_OK = 0
EXIT_BUG = 1
EXIT_USAGE = 2
EXIT_IO = 3


class UsageError(CtmError, ValueError):
    pass


def _machine_text(machine: MachineDescriptor) -> str:
    lines = [f"machine n={machine.n} index={machine.index}"]
    for state in range(1, machine.n + 1):
        for symbol in (0, 1):
            e = machine.entry(state, symbol)
            action = (
                "halt"
                if e.is_halting
                else f"move {'+1' if e.move > 0 else '-1'}, next state {e.next_state}"
            )
            lines.append(f"  state {state}, read {symbol}: write {e.write}, {action}")
    return "\n".join(lines)


def _parse_blank(value: str, allow_dual: bool) -> str:
    allowed = ("0", "1", "dual") if allow_dual else ("0", "1")
    if value not in allowed:
        raise UsageError(f"--blank must be one of {'|'.join(allowed)}, got {value!r}")
    return value


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def cmd_count(args: argparse.Namespace) -> int:
    print(machine_count(args.states))
    return EXIT_OK


def cmd_show(args: argparse.Namespace) -> int:
    _require(args.index is not None, "--index is required")
    print(_machine_text(index_to_machine(args.states, args.index)))
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    _require(args.index is not None, "--index is required")
    blank = int(_parse_blank(args.blank or "0", allow_dual=False))
    max_steps = args.max_steps if args.max_steps is not None else default_max_steps(args.states)
    machine = index_to_machine(args.states, args.index)
    outcome = simulate(machine, blank=blank, max_steps=max_steps)
    print(_machine_text(machine))
    if outcome.halted:
        print(f"halted after {outcome.steps} step{'s' if outcome.steps != 1 else ''}")
        print(f"output {outcome.output}")
    else:
        print(f"did not halt within {max_steps} steps")
    print(
        f"result\tn={args.states}\tindex={args.index}\tblank={blank}"
        f"\tmax_steps={max_steps}\thalted={int(outcome.halted)}"
        f"\tsteps={outcome.steps}\toutput={outcome.output if outcome.halted else '-'}"
    )
    return EXIT_OK


def _sweep_config(args: argparse.Namespace) -> SweepConfig:
    blank = _parse_blank(args.blank or "dual", allow_dual=True)
    _require(blank != "1", "sweeps run blank 0 (and blank 1 in dual mode); --blank 1 is not a sweep mode")
    mode = "dual" if blank == "dual" else "zero"
    return SweepConfig(
        n=args.states,
        blank_mode=mode,
        max_steps=args.max_steps,
        shard_id=args.shard_id,
        shard_total=args.shards,
    )


def cmd_sweep(args: argparse.Namespace) -> int:
    _require(args.out is not None, "--out is required")
    _require(
        (args.shards is None) == (args.shard_id is None),
        "--shards and --shard-id must be given together",
    )
    config = _sweep_config(args)
    jobs = args.jobs or os.cpu_count() or 1
    ckpt, timing = sweep.timed_sweep(config, jobs=jobs)
    write_checkpoint(ckpt, args.out)
    print(
        f"sweep: n={ckpt.n} blank={ckpt.blank_mode} {timing.runs} runs over "
        f"{timing.machines} machines in {timing.seconds:.2f}s "
        f"({timing.machines_per_second:,.0f} machines/s) -> {args.out}",
        file=sys.stderr,
    )
    if args.track_max_steps:
        if ckpt.champion is None:
            print("max-steps champion: none (no halting run in range)")
        else:
            c = ckpt.champion
            print(f"max-steps champion: index={c.index} steps={c.steps} blank={c.blank}")
    return EXIT_OK


def cmd_merge(args: argparse.Namespace) -> int:
    _require(args.out is not None, "--out is required")
    _require(bool(args.inputs), "at least one checkpoint file is required")
    parts = [read_checkpoint(path) for path in args.inputs]
    merged = merge_checkpoints(parts)
    write_checkpoint(merged, args.out)
    return EXIT_OK


def _distribution_from_checkpoints(paths: list[str]) -> distribution.Distribution:
    parts = [read_checkpoint(path) for path in paths]
    merged = merge_checkpoints(parts) if len(parts) > 1 else parts[0]
    if merged.blank_mode == "zero":
        merged = distribution.complete_by_symmetry(merged)
    return distribution.build_distribution(merged)


def cmd_dist(args: argparse.Namespace) -> int:
    _require(args.out is not None, "--out is required")
    _require(bool(args.inputs), "at least one checkpoint file is required")
    dist = _distribution_from_checkpoints(args.inputs)
    distribution.write_distribution(dist, args.out)
    print(
        f"dist: n={dist.n} d={dist.halting_total} strings={len(dist)} -> {args.out}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_complexity(args: argparse.Namespace) -> int:
    _require(args.dist is not None, "--dist is required")
    dist = distribution.read_distribution(args.dist)
    if args.string is not None:
        analysis.raise_if_absent(dist, args.string)
        p = dist.probability(args.string)
        c = analysis.complexity_of(dist, args.string)
        print(f"{args.string}\t{p:.12g}\t{c:.12g}")
        return EXIT_OK
    table = analysis.complexity_table(dist, length=args.length)
    if args.out is not None:
        analysis.write_complexity(table, args.out)
    else:
        for row in table.rows:
            print(f"{row.string}\t{row.probability:.3g}\t{row.complexity:.2f}")
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    coarse = distribution.read_distribution(args.coarse)
    fine = distribution.read_distribution(args.fine)
    r = analysis.compare_rankings(coarse, fine)
    first = r.first_displaced_rank if r.first_displaced_rank is not None else "-"
    print(
        f"common={r.common_strings} spearman={r.spearman:.3g} displaced={r.displaced} "
        f"max_rank_distance={r.max_rank_distance} mean_rank_distance={r.mean_rank_distance:.3g} "
        f"stddev_rank_distance={r.stddev_rank_distance:.3g} first_displaced_rank={first}"
    )
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    _require(args.dist is not None, "--dist is required")
    _require(args.length is not None, "--length is required")
    dist = distribution.read_distribution(args.dist)
    s = analysis.summary_stats(dist, args.length)
    print(
        f"count={s.count} mean={s.mean:.3g} median={s.median:.3g} "
        f"median_low={s.median_low:.3g} variance={s.variance:.3g} "
        f"skewness={s.skewness:.3g} kurtosis={s.kurtosis:.3g} kurtosis_excess={s.kurtosis_excess:.3g}"
    )
    return EXIT_OK


def cmd_runtimes(args: argparse.Namespace) -> int:
    ckpt = read_checkpoint(args.checkpoint)
    tables = analysis.runtime_tables(ckpt, max_length=args.length, max_step=args.max_steps)
    if args.out is not None:
        conditional = f"{args.out}-conditional.csv"
        joint = f"{args.out}-joint.csv"
        analysis.write_runtime_csv(tables, conditional, joint)
        print(f"runtimes: wrote {conditional} and {joint}", file=sys.stderr)
        return EXIT_OK
    header = "length " + " ".join(f"t={t}" for t in tables.steps)
    print("conditional P(length | step):")
    print(header)
    for length, row in zip(tables.lengths, tables.conditional):
        print(f"{length} " + " ".join(f"{v:.3g}" for v in row))
    print("joint P(length, step):")
    print(header)
    for length, row in zip(tables.lengths, tables.joint):
        print(f"{length} " + " ".join(f"{v:.3g}" for v in row))
    return EXIT_OK


def _pipeline_shard_paths(ckpt_dir: str, n: int, mode: str, shards: int) -> list[str]:
    width = len(str(shards - 1))
    return [
        os.path.join(ckpt_dir, f"n{n}-{mode}-{k:0{width}d}of{shards}.ckpt")
        for k in range(shards)
    ]


def cmd_pipeline(args: argparse.Namespace) -> int:
    n = args.states
    blank = _parse_blank(args.blank or "dual", allow_dual=True)
    _require(blank != "1", "pipelines run blank 0 (and blank 1 in dual mode); --blank 1 is not a sweep mode")
    mode = "dual" if blank == "dual" else "zero"
    if n >= 4 and not args.yes_long_run:
        raise UsageError(
            f"a full ({n},2) sweep is {machine_count(n):,} machines and runs for hours; "
            "pass --yes-long-run to confirm"
        )
    jobs = args.jobs or os.cpu_count() or 1
    shards = args.shards or (512 if n >= 4 else max(jobs * 4, 1))
    max_steps = args.max_steps if args.max_steps is not None else default_max_steps(n)
    outdir = args.out or "."
    ckpt_dir = os.environ.get(CHECKPOINT_DIR_ENV) or os.path.join(outdir, "checkpoints")
    os.makedirs(outdir, exist_ok=True)
    os.makedirs(ckpt_dir, exist_ok=True)

    paths = _pipeline_shard_paths(ckpt_dir, n, mode, shards)
    parts: dict[int, ShardCheckpoint] = {}
    pending: list[int] = []
    for k, path in enumerate(paths):
        expected_range = shard_range(n, k, shards)
        if os.path.exists(path):
            ckpt = read_checkpoint(path)  # corrupt file -> error naming it
            if (
                ckpt.n != n
                or ckpt.blank_mode != mode
                or ckpt.max_steps != max_steps
                or ckpt.ranges != (expected_range,)
            ):
                raise CheckpointError(
                    f"{path}: checkpoint does not match this pipeline "
                    f"(expected n={n} blank={mode} max_steps={max_steps} "
                    f"range={expected_range[0]}:{expected_range[1]})"
                )
            parts[k] = ckpt
        elif expected_range[0] < expected_range[1]:
            pending.append(k)
    if parts:
        print(f"pipeline: resuming, {len(parts)} of {shards} shards present", file=sys.stderr)

    swept_machines = 0
    start = time.perf_counter()
    if pending:
        _kernel.warm_up()
        configs = {
            k: SweepConfig(n=n, blank_mode=mode, max_steps=max_steps, shard_id=k, shard_total=shards)
            for k in pending
        }
        if jobs == 1 or len(pending) == 1:
            for done, k in enumerate(pending, start=1):
                ckpt = run_sweep(configs[k])
                write_checkpoint(ckpt, paths[k])
                parts[k] = ckpt
                swept_machines += ckpt.span
                print(f"pipeline: shard {k} done ({done}/{len(pending)})", file=sys.stderr)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = {pool.submit(run_sweep, configs[k]): k for k in pending}
                for done, fut in enumerate(as_completed(futures), start=1):
                    k = futures[fut]
                    ckpt = fut.result()
                    write_checkpoint(ckpt, paths[k])
                    parts[k] = ckpt
                    swept_machines += ckpt.span
                    print(f"pipeline: shard {k} done ({done}/{len(pending)})", file=sys.stderr)
    elapsed = time.perf_counter() - start

    merged = merge_checkpoints([parts[k] for k in sorted(parts)])
    write_checkpoint(merged, os.path.join(outdir, f"d{n}.ckpt"))
    completed = (
        distribution.complete_by_symmetry(merged) if merged.blank_mode == "zero" else merged
    )
    dist = distribution.build_distribution(completed)
    dist_path = os.path.join(outdir, f"d{n}.dist")
    distribution.write_distribution(dist, dist_path)
    table = analysis.complexity_table(dist)
    cplx_path = os.path.join(outdir, f"d{n}.cplx")
    analysis.write_complexity(table, cplx_path)
    rate = swept_machines / elapsed if elapsed > 0 and swept_machines else 0.0
    print(
        f"pipeline: n={n} d={dist.halting_total} strings={len(dist)}; "
        f"swept {swept_machines:,} machines in {elapsed:.2f}s"
        + (f" ({rate:,.0f} machines/s)" if swept_machines else " (all shards resumed)")
        + f"; wrote {dist_path}, {cplx_path}",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctm",
        description=(
            "Exhaustive sweeps of small binary Turing machines: output "
            "frequency distributions and -log2 complexity tables."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_: str, **kwargs) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_, **kwargs)
        return p

    def states_flag(p: argparse.ArgumentParser) -> None:
        p.add_argument("--states", type=int, required=True, metavar="1..4",
                       help="number of machine states")

    p = add("count", "print the number of machines in the space")
    states_flag(p)
    p.set_defaults(func=cmd_count)

    p = add("show", "print a machine's transition table")
    states_flag(p)
    p.add_argument("--index", type=int, help="machine index in the enumeration")
    p.set_defaults(func=cmd_show)

    p = add("run", "run one machine and print its outcome")
    states_flag(p)
    p.add_argument("--index", type=int, help="machine index in the enumeration")
    p.add_argument("--blank", help="blank symbol: 0 or 1 (default 0)")
    p.add_argument("--max-steps", type=int, help="step cutoff (default: known bound)")
    p.set_defaults(func=cmd_run)

    p = add("sweep", "sweep an index range and write a checkpoint")
    states_flag(p)
    p.add_argument("--blank", help="0 (zero-only) or dual (default dual)")
    p.add_argument("--max-steps", type=int, help="step cutoff (default: known bound)")
    p.add_argument("--shards", type=int, help="total number of shards")
    p.add_argument("--shard-id", type=int, help="which shard to sweep")
    p.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
    p.add_argument("--out", help="checkpoint file to write")
    p.add_argument("--track-max-steps", action="store_true",
                   help="report the longest-running halting machine")
    p.set_defaults(func=cmd_sweep)

    p = add("merge", "merge shard checkpoints into one")
    p.add_argument("inputs", nargs="*", metavar="CKPT", help="checkpoint files")
    p.add_argument("--out", help="merged checkpoint file to write")
    p.set_defaults(func=cmd_merge)

    p = add("dist", "build a distribution file from full-space checkpoints")
    p.add_argument("inputs", nargs="*", metavar="CKPT", help="checkpoint files")
    p.add_argument("--out", help="distribution file to write")
    p.set_defaults(func=cmd_dist)

    p = add("complexity", "complexity table (or one string) from a distribution")
    p.add_argument("--dist", help="distribution file")
    p.add_argument("--string", help="report this string only")
    p.add_argument("--length", type=int, help="restrict the table to one length")
    p.add_argument("--out", help="complexity file to write (default: print)")
    p.set_defaults(func=cmd_complexity)

    p = add("compare", "rank comparison between two distributions")
    p.add_argument("coarse", help="distribution file (smaller space)")
    p.add_argument("fine", help="distribution file (larger space)")
    p.set_defaults(func=cmd_compare)

    p = add("stats", "moments of the probabilities at one string length")
    p.add_argument("--dist", help="distribution file")
    p.add_argument("--length", type=int, help="string length")
    p.set_defaults(func=cmd_stats)

    p = add("runtimes", "length-vs-halting-time tables from a checkpoint")
    p.add_argument("checkpoint", help="checkpoint file with the joint histogram")
    p.add_argument("--length", type=int, help="largest length row to include")
    p.add_argument("--max-steps", type=int, help="largest step column to include")
    p.add_argument("--out", help="output path prefix for the two CSV files")
    p.set_defaults(func=cmd_runtimes)

    p = add("pipeline", "sweep, merge, and export distribution + complexity files")
    states_flag(p)
    p.add_argument("--blank", help="0 (zero-only, completed by symmetry) or dual (default)")
    p.add_argument("--max-steps", type=int, help="step cutoff (default: known bound)")
    p.add_argument("--shards", type=int, help="checkpoint granularity")
    p.add_argument("--jobs", type=int, help="worker processes (default: all cores)")
    p.add_argument("--out", help="output directory (default: .)")
    p.add_argument("--yes-long-run", action="store_true",
                   help="confirm a multi-hour 4-state sweep")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "states") and not 1 <= args.states <= MAX_SWEEP_STATES:
            raise UsageError(f"--states must be in 1..{MAX_SWEEP_STATES}, got {args.states}")
        return args.func(args)
    except (CheckpointError, OSError) as exc:
        print(f"ctm: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvariantError, AssertionError) as exc:
        print(f"ctm: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_BUG
    except ValueError as exc:
        # usage-level problems: bad flags, bad indices, absent strings, ...
        print(f"ctm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
