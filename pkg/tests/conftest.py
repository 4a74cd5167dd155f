from __future__ import annotations

from pathlib import Path

import pytest

from refgraph.extractor import analyze_project, extract_edges, load_project

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


def write_project(root: Path, files: dict[str, str]) -> Path:
    """Materialize a {relpath: source} mapping under root."""
    for rel, source in files.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(source, encoding="utf-8")
    return root


def analyze_source(root: Path, files: dict[str, str]):
    """Full pipeline over inline sources: (project, resolution, graph)."""
    write_project(root, files)
    project = load_project(root)
    resolution = analyze_project(project)
    graph = extract_edges(project, resolution)
    return project, resolution, graph


def edge_pairs(graph) -> set[tuple[str, str, str]]:
    return {
        (e.source.qualified_name, e.target.qualified_name, e.kind.value)
        for e in graph.edges
    }
