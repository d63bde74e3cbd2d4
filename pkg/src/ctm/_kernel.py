"""JIT-compiled inner loop for exhaustive sweeps.

The kernel walks a contiguous index range with a base-(4n+2) digit odometer
(no per-machine base conversion), simulates each machine on blank 0 and
optionally blank 1, and accumulates per-output counts and a joint
(output length, halting step) histogram. Output strings are packed into two
64-bit words, which covers lengths up to 128; with the supported cutoffs
(max one bit per step plus the start cell) that is any max_steps <= 127.

Everything here is a private implementation detail of ctm.sweep; the
pure-Python simulator in ctm.machine is the behavioral reference and the
test suite checks the two against each other.
"""

from __future__ import annotations

import numpy as np
from numba import njit, types
from numba.typed import Dict

# one packed output: (length, bits 0..63, bits 64..127)
_KEY = types.UniTuple(types.uint64, 3)

MAX_KERNEL_STEPS = 127


@njit(cache=True, nogil=True)
def _sweep_range(n, lo, hi, max_steps, dual):  # pragma: no cover - jitted
    base = 4 * n + 2
    nslots = 2 * n
    # per-digit decode tables
    wr = np.empty(base, np.uint8)
    mv = np.empty(base, np.int64)
    ns = np.empty(base, np.int64)
    for d in range(base):
        if d < 4 * n:
            wr[d] = d & 1
            mv[d] = 1 if ((d >> 1) & 1) == 0 else -1
            ns[d] = (d >> 2) + 1
        else:
            wr[d] = d - 4 * n
            mv[d] = 0
            ns[d] = 0
    # digit odometer seeded from lo, plus the current machine's table
    digits = np.empty(nslots, np.int64)
    x = lo
    for i in range(nslots):
        digits[i] = x % base
        x //= base
    tw = np.empty(nslots, np.uint8)
    tm = np.empty(nslots, np.int64)
    tn = np.empty(nslots, np.int64)
    for i in range(nslots):
        d = digits[i]
        tw[i] = wr[d]
        tm[i] = mv[d]
        tn[i] = ns[d]
    # one tape per blank symbol, each restored to its own blank after a run
    size = 2 * max_steps + 3
    center = max_steps + 1
    tapes = np.empty((2, size), np.uint8)
    tapes[0, :] = 0
    tapes[1, :] = 1
    counts = Dict.empty(_KEY, types.uint64)
    joint = np.zeros((max_steps + 2, max_steps + 1), np.uint64)
    halting = 0
    nonhalting = 0
    champ_steps = 0
    champ_index = -1
    champ_blank = 0
    nblanks = 2 if dual else 1
    for index in range(lo, hi):
        for blank in range(nblanks):
            # A (state 1, blank) entry that stays in state 1 repeats forever:
            # the head only ever reaches fresh blank cells. Skip the run.
            if tn[blank] == 1:
                nonhalting += 1
                continue
            tape = tapes[blank]
            state = 1
            pos = center
            minp = pos
            maxp = pos
            halted = False
            steps = 0
            for step in range(1, max_steps + 1):
                slot = ((state - 1) << 1) + tape[pos]
                tape[pos] = tw[slot]
                pos += tm[slot]
                state = tn[slot]
                if pos < minp:
                    minp = pos
                elif pos > maxp:
                    maxp = pos
                if state == 0:
                    halted = True
                    steps = step
                    break
            if minp < 1 or maxp > size - 2:
                raise AssertionError("tape buffer overflow")
            if halted:
                L = maxp - minp + 1
                w0 = np.uint64(0)
                w1 = np.uint64(0)
                for i in range(L):
                    b = np.uint64(tape[minp + i])
                    if i < 64:
                        w0 |= b << np.uint64(i)
                    else:
                        w1 |= b << np.uint64(i - 64)
                key = (np.uint64(L), w0, w1)
                if key in counts:
                    counts[key] += np.uint64(1)
                else:
                    counts[key] = np.uint64(1)
                joint[L, steps] += np.uint64(1)
                halting += 1
                if steps > champ_steps:
                    champ_steps = steps
                    champ_index = index
                    champ_blank = blank
            else:
                nonhalting += 1
            for p in range(minp, maxp + 1):
                tape[p] = blank
        # advance the odometer and refresh only the changed slots
        if index + 1 < hi:
            i = 0
            while True:
                digits[i] += 1
                if digits[i] == base:
                    digits[i] = 0
                    tw[i] = wr[0]
                    tm[i] = mv[0]
                    tn[i] = ns[0]
                    i += 1
                else:
                    d = digits[i]
                    tw[i] = wr[d]
                    tm[i] = mv[d]
                    tn[i] = ns[d]
                    break
    # flatten the dict so nothing numba-typed crosses the boundary
    m = len(counts)
    out_len = np.empty(m, np.int64)
    out_w0 = np.empty(m, np.uint64)
    out_w1 = np.empty(m, np.uint64)
    out_cnt = np.empty(m, np.uint64)
    j = 0
    for k, v in counts.items():
        out_len[j] = np.int64(k[0])
        out_w0[j] = k[1]
        out_w1[j] = k[2]
        out_cnt[j] = v
        j += 1
    return (
        halting,
        nonhalting,
        out_len,
        out_w0,
        out_w1,
        out_cnt,
        joint,
        champ_steps,
        champ_index,
        champ_blank,
    )


def _unpack_string(length: int, w0: int, w1: int) -> str:
    bits = []
    for i in range(length):
        w = w0 if i < 64 else w1
        bits.append("01"[(w >> (i % 64)) & 1])
    return "".join(bits)


def sweep_range(
    n: int, lo: int, hi: int, max_steps: int, dual: bool
) -> tuple[int, int, dict[str, int], dict[tuple[int, int], int], tuple[int, int, int] | None]:
    """Run the kernel and translate its outputs to plain Python objects.

    Returns (halting, nonhalting, string counts, joint histogram, champion)
    where champion is (index, steps, blank) of the longest-running halter in
    the range (lowest index and blank 0 winning ties) or None if nothing
    halted.
    """
    if max_steps > MAX_KERNEL_STEPS:
        raise ValueError(
            f"max_steps {max_steps} exceeds the kernel's packed-output limit "
            f"({MAX_KERNEL_STEPS})"
        )
    halting, nonhalting, ls, w0s, w1s, cs, joint, ch_steps, ch_index, ch_blank = _sweep_range(
        n, lo, hi, max_steps, dual
    )
    counts = {
        _unpack_string(int(l), int(w0), int(w1)): int(c)
        for l, w0, w1, c in zip(ls, w0s, w1s, cs)
    }
    hist: dict[tuple[int, int], int] = {}
    nz = np.nonzero(joint)
    for l, t in zip(*nz):
        hist[(int(l), int(t))] = int(joint[l, t])
    champion = (int(ch_index), int(ch_steps), int(ch_blank)) if halting else None
    return int(halting), int(nonhalting), counts, hist, champion


def warm_up() -> None:
    """Trigger JIT compilation (cached on disk) before forking workers."""
    sweep_range(1, 0, 1, 1, True)
