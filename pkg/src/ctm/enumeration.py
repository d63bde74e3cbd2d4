"""Canonical enumeration of the (n,2) machine space and symmetry transforms.

Each machine corresponds to one index below (4n+2)^(2n): the index is read
as 2n base-(4n+2) digits, least significant first, one digit per table slot
in slot order. Digit d < 4n is a non-halting entry with write = d mod 2,
move = +1 if (d div 2) mod 2 = 0 else -1, next state = d div 4 + 1; digit
d >= 4n is a halting entry writing d - 4n. The digit layout is part of the
checkpoint file contract and must not change: shard boundaries reference
raw indices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IndexRangeError, MalformedMachineError
from .machine import HALT_STATE, MachineDescriptor, TransitionEntry

# Exact sweeps are supported up to 4 states; the index encoding itself stays
# within 64 bits up to 6 states and overflows at 7.
MAX_SWEEP_STATES = 4
MAX_ENCODING_STATES = 6


@dataclass(frozen=True, slots=True)
class SpaceSpec:
    """A machine space: state count and number of machines in it."""

    n: int
    machine_count: int


def machine_count(n: int) -> int:
    """Number of machines with n states: (4n+2)^(2n)."""
    if n < 1:
        raise IndexRangeError(f"state count must be >= 1, got {n}")
    if n > MAX_ENCODING_STATES:
        raise IndexRangeError(
            f"(4n+2)^(2n) exceeds 64 bits for n={n} (supported: n <= {MAX_ENCODING_STATES})"
        )
    return (4 * n + 2) ** (2 * n)


def space(n: int) -> SpaceSpec:
    return SpaceSpec(n=n, machine_count=machine_count(n))


def _decode_digit(n: int, d: int) -> TransitionEntry:
    if d < 4 * n:
        return TransitionEntry(
            write=d & 1,
            move=1 if (d >> 1) & 1 == 0 else -1,
            next_state=(d >> 2) + 1,
        )
    return TransitionEntry(write=d - 4 * n, move=0, next_state=HALT_STATE)


def _encode_digit(n: int, e: TransitionEntry) -> int:
    if e.is_halting:
        return 4 * n + e.write
    return ((e.next_state - 1) << 2) | ((0 if e.move == 1 else 1) << 1) | e.write


def index_to_machine(n: int, index: int) -> MachineDescriptor:
    """Decode an enumeration index into its machine."""
    count = machine_count(n)
    if not 0 <= index < count:
        raise IndexRangeError(
            f"index {index} out of range for n={n} ({count} machines)"
        )
    base = 4 * n + 2
    x = index
    entries = []
    for _ in range(2 * n):
        entries.append(_decode_digit(n, x % base))
        x //= base
    return MachineDescriptor(n=n, table=tuple(entries), index=index)


def machine_to_index(machine: MachineDescriptor) -> int:
    """Inverse of index_to_machine."""
    machine.validate()
    if machine.n > MAX_ENCODING_STATES:
        raise MalformedMachineError(
            f"n={machine.n} exceeds the 64-bit encoding limit ({MAX_ENCODING_STATES})"
        )
    n = machine.n
    base = 4 * n + 2
    index = 0
    for e in reversed(machine.table):
        index = index * base + _encode_digit(n, e)
    return index


def _rebuild(n: int, entries: list[TransitionEntry]) -> MachineDescriptor:
    m = MachineDescriptor(n=n, table=tuple(entries), index=0)
    return MachineDescriptor(n=n, table=m.table, index=machine_to_index(m))


def complement_machine(machine: MachineDescriptor) -> MachineDescriptor:
    """Swap each state's read-0/read-1 entries and complement every write.

    The result run on blank 0 reproduces the original's run on blank 1 with
    bit-complemented output and equal step count. Involution.
    """
    machine.validate()
    entries = []
    for state in range(1, machine.n + 1):
        e0 = machine.entry(state, 0)
        e1 = machine.entry(state, 1)
        entries.append(TransitionEntry(1 - e1.write, e1.move, e1.next_state))
        entries.append(TransitionEntry(1 - e0.write, e0.move, e0.next_state))
    return _rebuild(machine.n, entries)


def mirror_machine(machine: MachineDescriptor) -> MachineDescriptor:
    """Negate the move of every non-halting entry.

    The mirrored machine halts together with the original at equal step
    counts and produces the reversed output. Involution.
    """
    machine.validate()
    entries = [
        TransitionEntry(e.write, -e.move, e.next_state) for e in machine.table
    ]
    return _rebuild(machine.n, entries)
