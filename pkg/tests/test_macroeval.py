from __future__ import annotations

import itertools
import json
import random

import pytest

from refgraph.errors import ComparisonError
from refgraph.macroeval import (
    FormatSpec,
    OverlapReport,
    ToolEdgeList,
    compute_ratios,
    compute_regions,
    normalize_tool_output,
    percent_half_up,
    render_report,
    report_from_json,
)
from refgraph.model import NormalizationProfile


def lists_from_regions(regions: dict[frozenset[str], int], tools: list[str]):
    """Materialize synthetic key sets realizing an exact region layout."""
    keys: dict[str, set[str]] = {t: set() for t in tools}
    counter = itertools.count()
    for members, count in regions.items():
        for _ in range(count):
            key = f"e{next(counter)}"
            for tool in members:
                keys[tool].add(key)
    return [ToolEdgeList(t, frozenset(keys[t])) for t in tools]


def region_map(spec: dict[str, int]) -> dict[frozenset[str], int]:
    return {frozenset(name.split("&")): count for name, count in spec.items()}


# Region systems solved by hand from the published per-tool aggregates;
# every marginal (totals, shared, unique, k-shared, union) was checked
# against the row before being frozen here.
THEALGORITHMS_REGIONS = region_map(
    {
        "refexpo": 644,
        "pyan": 228,
        "pycg": 96,
        "refexpo&pyan": 373,
        "refexpo&pycg": 32,
        "pyan&pycg": 4,
        "refexpo&pyan&pycg": 356,
    }
)

GUAVA_REGIONS = region_map(
    {
        "refexpo": 1790,
        "jarviz": 27,
        "df": 259,
        "sonargraph": 462,
        "refexpo&jarviz": 1685,
        "refexpo&df": 0,
        "refexpo&sonargraph": 1922,
        "jarviz&df": 119,
        "jarviz&sonargraph": 0,
        "df&sonargraph": 0,
        "refexpo&jarviz&df": 1000,
        "refexpo&jarviz&sonargraph": 1163,
        "refexpo&df&sonargraph": 487,
        "jarviz&df&sonargraph": 0,
        "refexpo&jarviz&df&sonargraph": 335,
    }
)


class TestNormalizeToolOutput:
    def test_core_csv(self, tmp_path, fixtures):
        from refgraph.csvio import write_edges_csv
        from refgraph.extractor import extract_project

        graph, _, _ = extract_project(fixtures / "demo_project")
        out = tmp_path / "core.csv"
        write_edges_csv(graph, out)
        tool = normalize_tool_output(out, "core", tool_name="ours")
        assert len(tool.keys) == graph.edge_count == 3

    def test_adjacency_dedup(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text(json.dumps({"f": ["g", "g"]}))
        tool = normalize_tool_output(path, "adjacency")
        assert tool.keys == frozenset({"f->g"})

    def test_generic_csv_columns(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("caller,callee\nm.a,m.b\nm.a,m.c\n")
        tool = normalize_tool_output(path, "csv:caller,callee")
        assert tool.keys == frozenset({"m.a->m.b", "m.a->m.c"})

    def test_signature_stripping_pairs_tools(self, tmp_path):
        # One tool writes signatures, the other does not; under a
        # strip_signatures profile both produce identical key sets.
        with_sig = tmp_path / "a.csv"
        with_sig.write_text("source,target\npkg.C.m(int),pkg.D.n(str)\n")
        without = tmp_path / "b.csv"
        without.write_text("source,target\npkg.C.m,pkg.D.n\n")
        profile = NormalizationProfile(strip_signatures=True)
        a = normalize_tool_output(with_sig, "csv:source,target", profile)
        b = normalize_tool_output(without, "csv:source,target", profile)
        assert a.keys == b.keys == frozenset({"pkg.C.m->pkg.D.n"})

    def test_unmappable_over_ten_percent_errors(self, tmp_path):
        rows = ["source,target"] + ["m.a,m.b"] * 8 + [",missing"] * 2
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(rows) + "\n")
        with pytest.raises(ComparisonError, match="unmappable"):
            normalize_tool_output(path, "csv:source,target")

    def test_unknown_format_rejected(self):
        with pytest.raises(ComparisonError, match="unknown tool format"):
            FormatSpec.parse("xml")


class TestComputeRegions:
    def test_disjoint_sets(self):
        report = compute_regions(
            [ToolEdgeList("t1", frozenset({"a"})), ToolEdgeList("t2", frozenset({"b"}))]
        )
        assert report.regions == {frozenset({"t1"}): 1, frozenset({"t2"}): 1}
        assert report.per_tool["t1"].unique == 1
        assert report.per_tool["t1"].shared == 0
        assert report.union_size == 2

    def test_identical_sets(self):
        keys = frozenset({"a", "b", "c"})
        report = compute_regions(
            [ToolEdgeList("t1", keys), ToolEdgeList("t2", keys)]
        )
        assert report.regions == {frozenset({"t1", "t2"}): 3}
        for stats in report.per_tool.values():
            assert stats.shared == 3 and stats.unique == 0

    def test_fewer_than_two_tools_rejected(self):
        with pytest.raises(ComparisonError, match="at least 2"):
            compute_regions([ToolEdgeList("t1", frozenset())])

    def test_more_than_five_tools_rejected(self):
        tools = [ToolEdgeList(f"t{i}", frozenset()) for i in range(6)]
        with pytest.raises(ComparisonError, match="at most 5"):
            compute_regions(tools)

    def test_duplicate_names_rejected(self):
        tools = [ToolEdgeList("t", frozenset()), ToolEdgeList("t", frozenset())]
        with pytest.raises(ComparisonError, match="unique"):
            compute_regions(tools)

    def test_brute_force_oracle_random_instances(self):
        rng = random.Random(424242)
        for _ in range(200):
            n_tools = rng.randint(2, 4)
            universe = [f"k{i}" for i in range(rng.randint(0, 50))]
            tools = [
                ToolEdgeList(
                    f"t{i}",
                    frozenset(k for k in universe if rng.random() < 0.4),
                )
                for i in range(n_tools)
            ]
            report = compute_regions(tools)
            # Oracle: classify each element of the union by membership.
            expected: dict[frozenset[str], int] = {}
            union = set().union(*(t.keys for t in tools))
            for key in union:
                members = frozenset(t.tool_name for t in tools if key in t.keys)
                expected[members] = expected.get(members, 0) + 1
            assert report.regions == expected
            assert sum(report.regions.values()) == report.union_size == len(union)
            for tool in tools:
                stats = report.per_tool[tool.tool_name]
                assert stats.total == stats.shared + stats.unique == len(tool.keys)

    def test_symmetry_under_permutation(self):
        lists = lists_from_regions(THEALGORITHMS_REGIONS, ["refexpo", "pyan", "pycg"])
        base = compute_regions(lists)
        flipped = compute_regions(list(reversed(lists)))
        assert base.regions == flipped.regions
        assert base.per_tool == flipped.per_tool
        assert base.tools == list(reversed(flipped.tools))

    def test_pairwise_inclusion_exclusion(self):
        lists = lists_from_regions(GUAVA_REGIONS, ["refexpo", "jarviz", "df", "sonargraph"])
        report = compute_regions(lists)
        by_name = {t.tool_name: t.keys for t in lists}
        for a, b in itertools.combinations(by_name, 2):
            direct = len(by_name[a] & by_name[b])
            from_regions = sum(
                count for members, count in report.regions.items()
                if a in members and b in members
            )
            assert direct == from_regions


class TestComputeRatios:
    def test_thealgorithms_row(self):
        # Table row: union 1733; tool 1405 total, 761 shared, 644 unique.
        lists = lists_from_regions(THEALGORITHMS_REGIONS, ["refexpo", "pyan", "pycg"])
        report = compute_ratios(compute_regions(lists))
        assert report.union_size == 1733
        stats = report.per_tool["refexpo"]
        assert (stats.total, stats.shared, stats.unique) == (1405, 761, 644)
        assert percent_half_up(stats.total, report.union_size) == 81
        assert percent_half_up(stats.shared, report.union_size) == 44
        assert percent_half_up(stats.unique, report.union_size) == 37
        assert report.all_shared == 356
        assert report.k_shared[2] == 409

    def test_guava_row(self):
        # Table row: union 9,249; tool 8,382 total, 6,592 shared, 1,790 unique.
        lists = lists_from_regions(GUAVA_REGIONS, ["refexpo", "jarviz", "df", "sonargraph"])
        report = compute_ratios(compute_regions(lists))
        assert report.union_size == 9249
        stats = report.per_tool["refexpo"]
        assert (stats.total, stats.shared, stats.unique) == (8382, 6592, 1790)
        assert percent_half_up(stats.total, report.union_size) == 91
        assert percent_half_up(stats.shared, report.union_size) == 71
        assert percent_half_up(stats.unique, report.union_size) == 19
        assert report.k_shared[2] == 3726
        assert report.k_shared[3] == 2650
        assert report.all_shared == 335
        assert report.shared_total() == 6711

    def test_single_tool_owns_union(self):
        lists = [
            ToolEdgeList("big", frozenset({"a", "b"})),
            ToolEdgeList("empty", frozenset()),
        ]
        report = compute_ratios(compute_regions(lists))
        stats = report.per_tool["big"]
        assert stats.total_ratio == 1.0
        assert stats.shared_ratio == 0.0
        assert stats.unique_ratio == 1.0

    def test_shared_plus_unique_equals_total_ratio(self):
        lists = lists_from_regions(THEALGORITHMS_REGIONS, ["refexpo", "pyan", "pycg"])
        report = compute_ratios(compute_regions(lists))
        for stats in report.per_tool.values():
            assert stats.shared_ratio + stats.unique_ratio == pytest.approx(stats.total_ratio)

    def test_degenerate_empty_union(self):
        lists = [ToolEdgeList("t1", frozenset()), ToolEdgeList("t2", frozenset())]
        report = compute_ratios(compute_regions(lists))
        assert report.degenerate
        assert all(s.total_ratio == 0.0 for s in report.per_tool.values())


class TestRendering:
    def three_tool_report(self) -> OverlapReport:
        lists = lists_from_regions(THEALGORITHMS_REGIONS, ["refexpo", "pyan", "pycg"])
        return compute_ratios(compute_regions(lists))

    def test_markdown_header_columns(self):
        table = render_report(self.three_tool_report(), "markdown")
        header = table.splitlines()[0]
        for column in ("Total Edges", "All shared", "Two Shared", "Shared"):
            assert column in header
        assert "Three Shared" not in header  # only for 4+ tools

    def test_markdown_four_tools_has_three_shared(self):
        lists = lists_from_regions(GUAVA_REGIONS, ["refexpo", "jarviz", "df", "sonargraph"])
        table = render_report(compute_ratios(compute_regions(lists)), "markdown")
        assert "Three Shared" in table.splitlines()[0]
        assert "8,382 (91%)" in table
        assert "6,592 (71%)" in table
        assert "1,790 (19%)" in table

    def test_rounding_half_up(self):
        assert percent_half_up(905, 1000) == 91
        assert percent_half_up(904, 1000) == 90
        assert percent_half_up(895, 1000) == 90  # 89.5 rounds up

    def test_json_round_trip(self):
        report = self.three_tool_report()
        back = report_from_json(render_report(report, "json"))
        assert back.regions == report.regions
        assert back.union_size == report.union_size
        assert back.k_shared == report.k_shared
        for name, stats in report.per_tool.items():
            assert back.per_tool[name] == stats

    def test_unknown_style_rejected(self):
        with pytest.raises(ComparisonError, match="unknown report style"):
            render_report(self.three_tool_report(), "yaml")
