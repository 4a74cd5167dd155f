"""refgraph: static dependency-graph extraction and evaluation for Python source."""

from .csvio import read_edges_csv, write_edges_csv
from .extractor import (
    analyze_project,
    classify_external,
    extract_edges,
    extract_project,
    filter_edges,
    load_project,
)
from .model import (
    DependencyEdge,
    DependencyGraph,
    EdgeKind,
    EntityKind,
    EntityRef,
    NormalizationProfile,
    canonical_key,
)

__version__ = "0.1.0"

__all__ = [
    "DependencyEdge",
    "DependencyGraph",
    "EdgeKind",
    "EntityKind",
    "EntityRef",
    "NormalizationProfile",
    "analyze_project",
    "canonical_key",
    "classify_external",
    "extract_edges",
    "extract_project",
    "filter_edges",
    "load_project",
    "read_edges_csv",
    "write_edges_csv",
]
