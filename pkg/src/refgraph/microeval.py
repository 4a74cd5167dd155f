"""Ground-truth suites, the tag-based cleanup procedure, and recall scoring.

A suite manifest is plain text: a ``[case <id>]`` header per case followed
by ``category = ...``, ``dir = ...`` and one ``src -> tgt [tag]`` line per
expected edge, where the tag is ``static``, ``dynamic``, or ``external``.
Cleanup drops edges whose tag is in the requested set and removes cases
left empty; recall is correctly-found expected edges over all expected
edges, matched on normalized name pairs with edge kinds ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .config import ProjectConfig
from .errors import SuiteError
from .extractor import extract_project
from .model import DependencyGraph, NormalizationProfile

VALID_TAGS = frozenset({"static", "dynamic", "external"})
CLEANUP_TAGS = frozenset({"dynamic", "external"})

_EDGE_RE = re.compile(r"^(\S+)\s*->\s*(\S+)\s*\[(\w+)\]$")
_CASE_RE = re.compile(r"^\[case\s+([\w.-]+)\]$")


@dataclass(frozen=True)
class ExpectedEdge:
    source: str
    target: str
    tag: str


@dataclass
class TestCase:
    __test__ = False  # not a pytest class despite the name

    id: str
    category: str
    source_dir: str  # relative to the suite root, POSIX separators
    expected: tuple[ExpectedEdge, ...]


@dataclass
class CleanupSummary:
    initial_cases: int
    initial_edges: int
    removed_by_tag: dict[str, int]
    removed_cases: int
    final_cases: int
    final_edges: int

    @property
    def removed_edges(self) -> int:
        return sum(self.removed_by_tag.values())


@dataclass
class TestSuite:
    __test__ = False  # not a pytest class despite the name

    name: str
    root: Path
    cases: list[TestCase]
    mode: str = "initial"
    cleanup: CleanupSummary | None = None

    @property
    def total_edges(self) -> int:
        return sum(len(case.expected) for case in self.cases)

    @property
    def categories(self) -> list[str]:
        return sorted({case.category for case in self.cases})


def load_suite(manifest_path: str | Path) -> TestSuite:
    """Parse and validate a suite manifest; errors name the offending case."""
    manifest_path = Path(manifest_path)
    try:
        text = manifest_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SuiteError(f"cannot read manifest {manifest_path}: {exc}") from exc

    root = manifest_path.parent
    name = manifest_path.stem
    cases: list[TestCase] = []
    seen_ids: set[str] = set()

    current_id: str | None = None
    category = ""
    source_dir = ""
    edges: list[ExpectedEdge] = []

    def finish_case() -> None:
        nonlocal current_id, category, source_dir, edges
        if current_id is None:
            return
        if not category:
            raise SuiteError(f"case {current_id}: missing category")
        if not source_dir:
            raise SuiteError(f"case {current_id}: missing dir")
        if not (root / source_dir).is_dir():
            raise SuiteError(
                f"case {current_id}: source dir {source_dir!r} not found under {root}"
            )
        cases.append(TestCase(current_id, category, source_dir, tuple(edges)))
        current_id, category, source_dir, edges = None, "", "", []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        case_match = _CASE_RE.match(line)
        if case_match:
            finish_case()
            current_id = case_match.group(1)
            if current_id in seen_ids:
                raise SuiteError(f"duplicate case id {current_id!r} (line {lineno})")
            seen_ids.add(current_id)
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if eq and key == "suite" and current_id is None:
            name = value.strip()
            continue
        if current_id is None:
            raise SuiteError(f"line {lineno}: content outside any [case ...] block")
        if eq and key == "category":
            category = value.strip()
            continue
        if eq and key == "dir":
            source_dir = value.strip()
            continue
        edge_match = _EDGE_RE.match(line)
        if edge_match is None:
            raise SuiteError(f"case {current_id}, line {lineno}: cannot parse {line!r}")
        source, target, tag = edge_match.groups()
        if tag not in VALID_TAGS:
            raise SuiteError(f"case {current_id}, line {lineno}: unknown tag {tag!r}")
        edges.append(ExpectedEdge(source, target, tag))
    finish_case()

    return TestSuite(name, root, cases)


def clean_suite(suite: TestSuite, drop_tags: frozenset[str] = CLEANUP_TAGS) -> TestSuite:
    """Remove expected edges with a dropped tag, then empty cases entirely."""
    invalid = set(drop_tags) - CLEANUP_TAGS
    if invalid:
        raise SuiteError(f"cannot drop tags {sorted(invalid)}; only dynamic/external")

    removed_by_tag = {tag: 0 for tag in sorted(drop_tags)}
    kept_cases: list[TestCase] = []
    removed_cases = 0
    for case in suite.cases:
        kept = tuple(e for e in case.expected if e.tag not in drop_tags)
        for edge in case.expected:
            if edge.tag in drop_tags:
                removed_by_tag[edge.tag] += 1
        if kept:
            kept_cases.append(replace(case, expected=kept))
        elif case.expected:
            removed_cases += 1
        else:
            kept_cases.append(case)

    summary = CleanupSummary(
        initial_cases=len(suite.cases),
        initial_edges=suite.total_edges,
        removed_by_tag=removed_by_tag,
        removed_cases=removed_cases,
        final_cases=len(kept_cases),
        final_edges=sum(len(c.expected) for c in kept_cases),
    )
    mode = "cleaned" if drop_tags else suite.mode
    return TestSuite(suite.name, suite.root, kept_cases, mode=mode, cleanup=summary)


@dataclass
class CategoryRecall:
    category: str
    cases: int
    expected_edges: int
    correct: int
    recall: float
    vacuous: bool = False


@dataclass
class RecallReport:
    mode: str
    categories: list[CategoryRecall]
    total_cases: int
    total_expected: int
    total_correct: int
    total_recall: float
    missing: list[tuple[str, ExpectedEdge]] = field(default_factory=list)


def evaluate_recall(
    actual: DependencyGraph,
    suite: TestSuite,
    profile: NormalizationProfile | None = None,
) -> RecallReport:
    """Score a suite against an extracted graph.

    An expected edge counts as correct when its normalized name pair appears
    among the actual edges; duplicate actual edges cannot double-count, and
    a category whose expected set is empty scores a vacuous 1.0.
    """
    profile = profile or NormalizationProfile()
    actual_keys = {
        profile.pair_key(e.source.qualified_name, e.target.qualified_name)
        for e in actual.edges
    }

    by_category: dict[str, CategoryRecall] = {}
    missing: list[tuple[str, ExpectedEdge]] = []
    for case in suite.cases:
        bucket = by_category.setdefault(
            case.category, CategoryRecall(case.category, 0, 0, 0, 1.0)
        )
        bucket.cases += 1
        for edge in case.expected:
            bucket.expected_edges += 1
            if profile.pair_key(edge.source, edge.target) in actual_keys:
                bucket.correct += 1
            else:
                missing.append((case.id, edge))

    categories = []
    for name in sorted(by_category):
        bucket = by_category[name]
        if bucket.expected_edges:
            bucket.recall = bucket.correct / bucket.expected_edges
        else:
            bucket.recall = 1.0
            bucket.vacuous = True
        categories.append(bucket)

    total_expected = sum(c.expected_edges for c in categories)
    total_correct = sum(c.correct for c in categories)
    total_recall = total_correct / total_expected if total_expected else 1.0
    return RecallReport(
        suite.mode,
        categories,
        total_cases=len(suite.cases),
        total_expected=total_expected,
        total_correct=total_correct,
        total_recall=total_recall,
        missing=missing,
    )


def extract_suite_graph(
    suite: TestSuite, config: ProjectConfig | None = None
) -> DependencyGraph:
    """Extract each case directory as its own project and unite the graphs.

    Every case graph is namespaced under its directory path so entity names
    line up with the manifest's suite-root-relative names.
    """
    union = DependencyGraph()
    for source_dir in sorted({case.source_dir for case in suite.cases}):
        graph, _, _ = extract_project(suite.root / source_dir, config)
        dotted = source_dir.replace("/", ".")
        union.update(graph.prefixed(dotted, source_dir))
    return union


def format_recall_table(
    initial: RecallReport | None, cleaned: RecallReport | None
) -> str:
    """Render per-category recall in the two-mode table layout.

    With both modes, the starred columns carry the cleaned suite and the
    Corrects column counts cleaned-mode hits.
    """
    if initial is None and cleaned is None:
        raise ValueError("nothing to format")
    both = initial is not None and cleaned is not None

    if both:
        header = ["Category", "Cases", "Edges", "Edges*", "Corrects", "Recall", "Recall*"]
    else:
        header = ["Category", "Cases", "Edges", "Corrects", "Recall"]
    rows = [header]

    primary = initial if initial is not None else cleaned
    assert primary is not None
    cleaned_by_cat = {c.category: c for c in cleaned.categories} if cleaned else {}

    def fmt(value: float) -> str:
        return f"{value:.2f}"

    for cat in primary.categories:
        starred = cleaned_by_cat.get(cat.category)
        if both:
            rows.append(
                [
                    cat.category,
                    str(cat.cases),
                    str(cat.expected_edges),
                    str(starred.expected_edges if starred else 0),
                    str(starred.correct if starred else 0),
                    fmt(cat.recall),
                    fmt(starred.recall if starred else 1.0),
                ]
            )
        else:
            rows.append(
                [cat.category, str(cat.cases), str(cat.expected_edges),
                 str(cat.correct), fmt(cat.recall)]
            )
    if both:
        assert initial is not None and cleaned is not None
        rows.append(
            [
                "Total",
                str(initial.total_cases),
                str(initial.total_expected),
                str(cleaned.total_expected),
                str(cleaned.total_correct),
                fmt(initial.total_recall),
                fmt(cleaned.total_recall),
            ]
        )
    else:
        rows.append(
            [
                "Total",
                str(primary.total_cases),
                str(primary.total_expected),
                str(primary.total_correct),
                fmt(primary.total_recall),
            ]
        )

    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * widths[j] for j in range(len(header))))
    return "\n".join(lines)
