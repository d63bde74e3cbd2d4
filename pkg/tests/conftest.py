"""Shared fixtures: cached sweeps and a pure-Python reference accumulator.

The reference accumulator deliberately uses only the machine-core simulator
and the enumeration bijection, not the sweep engine, so it stays an
independent oracle for the JIT-compiled sweep path.
"""

from __future__ import annotations

import pytest

from ctm import _kernel
from ctm.distribution import build_distribution
from ctm.enumeration import index_to_machine, machine_count
from ctm.machine import simulate
from ctm.sweep import ShardCheckpoint, SweepConfig, default_max_steps, run_sweep


def brute_force_checkpoint(
    n: int,
    blank_mode: str,
    max_steps: int | None = None,
    index_range: tuple[int, int] | None = None,
) -> ShardCheckpoint:
    """Accumulate a checkpoint with the reference simulator, one run at a time."""
    if max_steps is None:
        max_steps = default_max_steps(n)
    lo, hi = index_range if index_range is not None else (0, machine_count(n))
    blanks = (0, 1) if blank_mode == "dual" else (0,)
    counts: dict[str, int] = {}
    hist: dict[tuple[int, int], int] = {}
    halting = 0
    nonhalting = 0
    for index in range(lo, hi):
        machine = index_to_machine(n, index)
        for blank in blanks:
            outcome = simulate(machine, blank=blank, max_steps=max_steps)
            if outcome.halted:
                halting += 1
                counts[outcome.output] = counts.get(outcome.output, 0) + 1
                key = (len(outcome.output), outcome.steps)
                hist[key] = hist.get(key, 0) + 1
            else:
                nonhalting += 1
    return ShardCheckpoint(
        n=n,
        blank_mode=blank_mode,
        max_steps=max_steps,
        ranges=((lo, hi),),
        halting_count=halting,
        nonhalting_count=nonhalting,
        string_counts=counts,
        joint_histogram=hist,
    )


@pytest.fixture(scope="session", autouse=True)
def jit_warm():
    _kernel.warm_up()


@pytest.fixture(scope="session")
def d1_dual(jit_warm):
    return run_sweep(SweepConfig(n=1, blank_mode="dual"))


@pytest.fixture(scope="session")
def d1_zero(jit_warm):
    return run_sweep(SweepConfig(n=1, blank_mode="zero"))


@pytest.fixture(scope="session")
def d2_dual(jit_warm):
    return run_sweep(SweepConfig(n=2, blank_mode="dual"))


@pytest.fixture(scope="session")
def d2_zero(jit_warm):
    return run_sweep(SweepConfig(n=2, blank_mode="zero"))


@pytest.fixture(scope="session")
def d3_dual(jit_warm):
    return run_sweep(SweepConfig(n=3, blank_mode="dual"), jobs=2)


@pytest.fixture(scope="session")
def d3_zero(jit_warm):
    return run_sweep(SweepConfig(n=3, blank_mode="zero"), jobs=2)


@pytest.fixture(scope="session")
def dist1(d1_dual):
    return build_distribution(d1_dual)


@pytest.fixture(scope="session")
def dist2(d2_dual):
    return build_distribution(d2_dual)


@pytest.fixture(scope="session")
def dist3(d3_dual):
    return build_distribution(d3_dual)


@pytest.fixture(scope="session")
def oracle_d2_dual():
    return brute_force_checkpoint(2, "dual")


@pytest.fixture(scope="session")
def oracle_d2_zero():
    return brute_force_checkpoint(2, "zero")
