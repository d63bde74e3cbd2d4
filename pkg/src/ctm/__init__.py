"""Exhaustive small-Turing-machine sweeps and coding-theorem complexity.

Simulates every n-state 2-symbol machine (n <= 4) under the known exact
halting cutoffs, builds the output frequency distribution of each space,
and converts probabilities to -log2 complexity values.
"""

from .analysis import (
    ComplexityRow,
    ComplexityTable,
    RankComparison,
    RuntimeTables,
    SummaryStats,
    compare_rankings,
    complexity_of,
    complexity_table,
    misplaced_strings,
    runtime_tables,
    summary_stats,
)
from .distribution import (
    Distribution,
    StringGroup,
    build_distribution,
    complete_by_symmetry,
    group_table,
    length_distribution,
    ones_count_distribution,
    read_distribution,
    string_group,
    strings_per_length,
    write_distribution,
)
from .enumeration import (
    SpaceSpec,
    complement_machine,
    index_to_machine,
    machine_count,
    machine_to_index,
    mirror_machine,
    space,
)
from .errors import (
    CheckpointError,
    CtmError,
    DistributionError,
    IndexRangeError,
    InvariantError,
    MalformedMachineError,
    StringNotProducedError,
)
from .machine import MachineDescriptor, SimulationOutcome, TransitionEntry, simulate
from .sweep import (
    BUSY_BEAVER,
    BusyBeaver,
    ChampionInfo,
    ShardCheckpoint,
    SweepConfig,
    default_max_steps,
    merge_checkpoints,
    read_checkpoint,
    run_sweep,
    shard_range,
    write_checkpoint,
)

__version__ = "0.1.0"

__all__ = [
    "BUSY_BEAVER",
    "BusyBeaver",
    "ChampionInfo",
    "CheckpointError",
    "ComplexityRow",
    "ComplexityTable",
    "CtmError",
    "Distribution",
    "DistributionError",
    "IndexRangeError",
    "InvariantError",
    "MachineDescriptor",
    "MalformedMachineError",
    "RankComparison",
    "RuntimeTables",
    "ShardCheckpoint",
    "SimulationOutcome",
    "SpaceSpec",
    "StringGroup",
    "StringNotProducedError",
    "SummaryStats",
    "SweepConfig",
    "TransitionEntry",
    "build_distribution",
    "compare_rankings",
    "complement_machine",
    "complete_by_symmetry",
    "complexity_of",
    "complexity_table",
    "default_max_steps",
    "group_table",
    "index_to_machine",
    "length_distribution",
    "machine_count",
    "machine_to_index",
    "merge_checkpoints",
    "mirror_machine",
    "misplaced_strings",
    "ones_count_distribution",
    "read_checkpoint",
    "read_distribution",
    "run_sweep",
    "runtime_tables",
    "shard_range",
    "simulate",
    "space",
    "string_group",
    "strings_per_length",
    "summary_stats",
    "write_checkpoint",
    "write_distribution",
]
