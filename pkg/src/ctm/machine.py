"""Binary two-way-tape Turing machines and the bounded reference simulator.

A machine has states 1..n plus the halt state 0 over the alphabet {0, 1}.
Every (state, read symbol) pair maps to a transition entry; halting entries
write a symbol, move nowhere and enter state 0, so no transition ever starts
from state 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedMachineError

HALT_STATE = 0
MOVES = (-1, 0, 1)


@dataclass(frozen=True, slots=True)
class TransitionEntry:
    """One transition: symbol to write, head move, successor state.

    ``move`` is -1 (left), +1 (right), or 0; 0 occurs exactly on halting
    entries (``next_state == 0``), which apply their write and stop.
    """

    write: int
    move: int
    next_state: int

    @property
    def is_halting(self) -> bool:
        return self.next_state == HALT_STATE


@dataclass(frozen=True, slots=True)
class MachineDescriptor:
    """An n-state machine: its transition table plus its enumeration ordinal.

    ``table`` holds exactly 2n entries ordered (state 1, read 0),
    (state 1, read 1), ..., (state n, read 1). ``index`` is the machine's
    position in the canonical enumeration of the (n,2) space.
    """

    n: int
    table: tuple[TransitionEntry, ...]
    index: int

    def entry(self, state: int, symbol: int) -> TransitionEntry:
        """Transition entry for ``state`` in 1..n reading ``symbol``."""
        return self.table[((state - 1) << 1) | symbol]

    def validate(self) -> None:
        """Raise MalformedMachineError unless every invariant holds."""
        if self.n < 1:
            raise MalformedMachineError(f"state count must be >= 1, got {self.n}")
        if len(self.table) != 2 * self.n:
            raise MalformedMachineError(
                f"table must have {2 * self.n} entries for n={self.n}, "
                f"got {len(self.table)}"
            )
        if self.index < 0:
            raise MalformedMachineError(f"index must be >= 0, got {self.index}")
        for slot, e in enumerate(self.table):
            where = f"entry (state {slot // 2 + 1}, read {slot % 2})"
            if e.write not in (0, 1):
                raise MalformedMachineError(f"{where}: write must be 0 or 1")
            if e.move not in MOVES:
                raise MalformedMachineError(f"{where}: move must be -1, 0 or +1")
            if not 0 <= e.next_state <= self.n:
                raise MalformedMachineError(
                    f"{where}: next state {e.next_state} outside [0, {self.n}]"
                )
            # move 0 if and only if the entry halts
            if (e.move == 0) != (e.next_state == HALT_STATE):
                raise MalformedMachineError(
                    f"{where}: move 0 and halting must coincide "
                    f"(move={e.move}, next_state={e.next_state})"
                )


@dataclass(frozen=True, slots=True)
class SimulationOutcome:
    """Result of one bounded run.

    ``steps`` counts executed steps; entering the halt state counts as the
    step in which the halting write is applied. ``output`` is the tape
    content over the contiguous span of cells the head occupied at the start
    of some step (the halting transition moves nowhere, so it never extends
    the span); it is None when the run was cut off.
    """

    halted: bool
    steps: int
    output: str | None


def simulate(machine: MachineDescriptor, blank: int, max_steps: int) -> SimulationOutcome:
    """Run ``machine`` from state 1 on a tape filled with ``blank``.

    The run starts with the head on the origin cell and stops when state 0
    is entered or after ``max_steps`` steps, whichever comes first. A run
    that does not reach state 0 within the bound is reported as non-halting
    with no output; with ``max_steps`` at the known maximum halting time for
    the space this classification is exact.

    Pure function of its arguments; safe to call concurrently.
    """
    machine.validate()
    if blank not in (0, 1):
        raise ValueError(f"blank symbol must be 0 or 1, got {blank}")
    if max_steps < 1:
        raise ValueError(f"max_steps must be >= 1, got {max_steps}")

    # A run bounded by max_steps visits at most max_steps + 1 cells, so a
    # fixed buffer with the origin centered can never overflow.
    size = 2 * max_steps + 3
    center = max_steps + 1
    tape = bytearray([blank]) * size
    table = machine.table
    pos = center
    minp = maxp = pos
    state = 1
    for step in range(1, max_steps + 1):
        e = table[((state - 1) << 1) | tape[pos]]
        tape[pos] = e.write
        pos += e.move
        state = e.next_state
        if pos < minp:
            minp = pos
        elif pos > maxp:
            maxp = pos
        if state == HALT_STATE:
            assert 0 < minp and maxp < size - 1, "tape buffer overflow"
            output = "".join("01"[b] for b in tape[minp : maxp + 1])
            assert 1 <= len(output) <= step + 1
            return SimulationOutcome(halted=True, steps=step, output=output)
    assert 0 < minp and maxp < size - 1, "tape buffer overflow"
    return SimulationOutcome(halted=False, steps=max_steps, output=None)
