import csv
import math

import pytest
from scipy import stats as scipy_stats

from ctm.analysis import (
    compare_rankings,
    complexity_of,
    complexity_table,
    complexity_to_text,
    misplaced_strings,
    runtime_tables,
    summary_stats,
    write_runtime_csv,
)
from ctm.distribution import Distribution
from ctm.errors import DistributionError, StringNotProducedError


def make_dist(counts: dict[str, int], n: int = 2) -> Distribution:
    return Distribution(n=n, halting_total=sum(counts.values()), counts=counts)


def test_complexity_of_half_is_one_bit(dist1):
    assert complexity_of(dist1, "0") == 1.0
    assert complexity_of(dist1, "1") == 1.0


def test_complexity_identity_holds_exactly(dist2):
    for s in dist2.counts:
        c = complexity_of(dist2, s)
        assert abs(c + math.log2(dist2.probability(s))) < 1e-9


def test_complexity_absent_string(dist2):
    with pytest.raises(StringNotProducedError, match=r"not produced in \(2,2\)"):
        complexity_of(dist2, "0001")


def test_complexity_offset_display(dist1):
    assert complexity_of(dist1, "0", offset=1.0) == 0.0


def test_monotone_conversion(dist2):
    for s in dist2.counts:
        for t in dist2.counts:
            cs, ct = dist2.counts[s], dist2.counts[t]
            xs, xt = complexity_of(dist2, s), complexity_of(dist2, t)
            if cs > ct:
                assert xs < xt
            elif cs == ct:
                assert xs == xt


def test_complexity_table_orders_rows(dist2):
    table = complexity_table(dist2)
    values = [row.complexity for row in table.rows]
    assert values == sorted(values)
    assert [r.string for r in table.rows[:2]] == ["0", "1"]
    assert len(table.rows) == 22


def test_complexity_table_one_state(dist1):
    table = complexity_table(dist1)
    assert [(r.string, r.complexity) for r in table.rows] == [("0", 1.0), ("1", 1.0)]


def test_complexity_table_length_filter(dist2):
    table = complexity_table(dist2, length=3)
    assert all(len(r.string) == 3 for r in table.rows)
    assert len(table.rows) == 8


def test_complexity_text_format(dist1):
    text = complexity_to_text(complexity_table(dist1))
    lines = text.splitlines()
    assert lines[0] == "ctm-complexity v1 n=1"
    assert lines[1] == "0\t0.5\t1"


def test_compare_identity(dist2):
    r = compare_rankings(dist2, dist2)
    assert r.spearman == 1.0
    assert r.displaced == 0
    assert r.max_rank_distance == 0
    assert r.first_displaced_rank is None
    assert r.common_strings == 22


def test_compare_exact_reversal():
    a = make_dist({"0": 30, "01": 20, "011": 10})
    b = make_dist({"0": 10, "01": 20, "011": 30})
    r = compare_rankings(a, b)
    assert r.spearman == -1.0
    assert r.displaced == 2
    assert r.max_rank_distance == 2
    assert r.first_displaced_rank == 1


def test_compare_all_tied_is_identity(dist1):
    r = compare_rankings(dist1, dist1)
    assert r.spearman == 1.0 and r.displaced == 0


def test_compare_requires_overlap():
    a = make_dist({"0": 1, "1": 1})
    b = make_dist({"00": 1, "11": 1})
    with pytest.raises(DistributionError, match="no strings"):
        compare_rankings(a, b)


def test_compare_one_to_two_states(dist1, dist2):
    r = compare_rankings(dist1, dist2)
    assert r.common_strings == 2
    assert r.displaced == 0
    assert r.spearman == 1.0


def test_compare_two_to_three_states(dist2, dist3):
    r = compare_rankings(dist2, dist3)
    assert r.common_strings == 22
    assert r.spearman > 0.9


def test_displacement_statistics_consistency():
    a = make_dist({"0": 40, "01": 30, "011": 20, "0111": 10})
    b = make_dist({"0": 40, "01": 30, "011": 10, "0111": 20})
    r = compare_rankings(a, b)
    assert r.displaced == 2
    assert r.first_displaced_rank == 3
    assert r.mean_rank_distance == 1.0
    assert r.stddev_rank_distance == 0.0


def test_runtime_conditional_columns_sum_to_one(d2_dual, d3_dual):
    for ckpt in (d2_dual, d3_dual):
        tables = runtime_tables(ckpt)
        for j, t in enumerate(tables.steps):
            has_mass = any((l, t) in ckpt.joint_histogram for l in tables.lengths)
            col = sum(row[j] for row in tables.conditional)
            if has_mass:
                assert abs(col - 1.0) < 1e-9
            else:
                assert col == 0.0
        # one-step halters write exactly one visited cell
        assert tables.conditional[0][0] == 1.0


def test_runtime_no_mass_before_length(d3_dual):
    for (length, steps) in d3_dual.joint_histogram:
        assert steps >= length


def test_runtime_joint_uses_per_blank_convention(d2_dual):
    tables = runtime_tables(d2_dual)
    total = sum(sum(row) for row in tables.joint)
    # full horizon: per-blank counts over dual halting runs sum to 1/2
    assert abs(total - 0.5) < 1e-12
    one_step = d2_dual.joint_histogram[(1, 1)]
    assert tables.joint[0][0] == one_step / (2 * d2_dual.halting_count)


def test_runtime_horizon_bounds(d3_dual):
    tables = runtime_tables(d3_dual, max_length=4, max_step=5)
    assert tables.lengths == (1, 2, 3, 4)
    assert tables.steps == (1, 2, 3, 4, 5)


def test_runtime_csv_export(tmp_path, d2_dual):
    tables = runtime_tables(d2_dual)
    cond = tmp_path / "rt-conditional.csv"
    joint = tmp_path / "rt-joint.csv"
    write_runtime_csv(tables, str(cond), str(joint))
    with open(cond, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "length"
    assert rows[0][1] == "t=1"
    assert float(rows[1][1]) == 1.0
    assert len(rows) == len(tables.lengths) + 1


def test_summary_stats_uniform_pair(dist1):
    s = summary_stats(dist1, 1)
    assert s.count == 2
    assert s.variance == 0.0
    assert s.mean == 0.5
    assert s.skewness == 0.0


def test_summary_stats_match_population_moments(dist2):
    s = summary_stats(dist2, 3)
    counts = [c for k, c in dist2.counts.items() if len(k) == 3]
    values = [c / sum(counts) for c in counts]
    assert s.count == 8
    assert s.mean == pytest.approx(1 / 8)
    assert s.variance == pytest.approx(
        sum((v - 1 / 8) ** 2 for v in values) / 8
    )
    assert s.skewness == pytest.approx(scipy_stats.skew(values, bias=True))
    assert s.kurtosis == pytest.approx(
        scipy_stats.kurtosis(values, bias=True, fisher=False)
    )
    assert s.kurtosis_excess == pytest.approx(s.kurtosis - 3.0)


def test_summary_stats_requires_strings(dist1):
    with pytest.raises(DistributionError, match="length 5"):
        summary_stats(dist1, 5)


def test_misplaced_empty_for_single_length(dist1):
    assert misplaced_strings(dist1) == []


def test_misplaced_empty_for_two_states(dist2):
    # every length block strictly dominates the next in this space
    assert misplaced_strings(dist2) == []


def test_misplaced_detects_climbers():
    d = make_dist({"0": 50, "1": 50, "0101": 40, "00": 10, "11": 10})
    assert misplaced_strings(d) == ["0101"]
