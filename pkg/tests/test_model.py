from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refgraph.model import (
    DependencyEdge,
    DependencyGraph,
    EdgeKind,
    EntityKind,
    EntityRef,
    NormalizationProfile,
    canonical_key,
    external_ref,
)


def entity(name: str, kind=EntityKind.FUNCTION, file="m.py") -> EntityRef:
    return EntityRef(name, kind=kind, file=file)


def edge(src: str, tgt: str, kind=EdgeKind.CALL, line=1) -> DependencyEdge:
    return DependencyEdge(entity(src), entity(tgt), kind, line)


class TestEntityRef:
    def test_rejects_whitespace_in_name(self):
        with pytest.raises(ValueError):
            EntityRef("a b", file="m.py")
        with pytest.raises(ValueError):
            EntityRef("", file="m.py")

    def test_external_iff_file_empty(self):
        with pytest.raises(ValueError):
            EntityRef("a", file="", is_external=False)
        with pytest.raises(ValueError):
            EntityRef("a", file="m.py", is_external=True)
        assert external_ref("os").is_external

    def test_span_is_metadata_not_identity(self):
        a = EntityRef("a.f", EntityKind.FUNCTION, "a.py", span=(1, 1, 2, 5))
        b = EntityRef("a.f", EntityKind.FUNCTION, "a.py", span=(9, 9, 9, 9))
        assert a == b
        assert len({a, b}) == 1


class TestDependencyEdge:
    def test_external_source_rejected(self):
        with pytest.raises(ValueError):
            DependencyEdge(external_ref("os"), entity("a.f"), EdgeKind.CALL)

    def test_inherit_source_must_be_class(self):
        cls = entity("a.B", EntityKind.CLASS)
        base = entity("a.A", EntityKind.CLASS)
        DependencyEdge(cls, base, EdgeKind.INHERIT)  # fine
        DependencyEdge(cls, external_ref("x.Y"), EdgeKind.INHERIT)  # unknown ok
        with pytest.raises(ValueError):
            DependencyEdge(entity("a.f"), base, EdgeKind.INHERIT)
        with pytest.raises(ValueError):
            DependencyEdge(cls, entity("a.f"), EdgeKind.INHERIT)


class TestDependencyGraph:
    def test_endpoints_always_in_nodes(self):
        g = DependencyGraph(edges=[edge("a.f", "a.g")])
        names = {n.qualified_name for n in g.nodes}
        assert names == {"a.f", "a.g"}

    def test_dedup_ignores_line_keeps_smallest(self):
        g = DependencyGraph()
        g.add_edge(edge("a.f", "a.g", line=9))
        g.add_edge(edge("a.f", "a.g", line=3))
        g.add_edge(edge("a.f", "a.g", line=5))
        assert g.edge_count == 1
        assert next(iter(g.edges)).line == 3

    def test_insertion_order_never_matters(self):
        edges = [edge("a.f", "a.g"), edge("a.g", "a.h", EdgeKind.IMPORT), edge("a.h", "a.f", line=7)]
        g1 = DependencyGraph(edges=edges)
        g2 = DependencyGraph(edges=list(reversed(edges)))
        assert g1 == g2
        assert g1.sorted_edges() == g2.sorted_edges()

    def test_kind_counts(self):
        g = DependencyGraph(edges=[edge("a.f", "a.g"), edge("a.f", "a.h", EdgeKind.IMPORT)])
        assert g.kind_counts() == {"call": 1, "import": 1}

    def test_prefixed_renames_internal_only(self):
        g = DependencyGraph(edges=[
            DependencyEdge(entity("main"), external_ref("os"), EdgeKind.IMPORT, 1),
            edge("main", "main.f"),
        ])
        out = g.prefixed("suite.case", "suite/case")
        names = {n.qualified_name for n in out.nodes}
        assert names == {"suite.case.main", "suite.case.main.f", "os"}
        internal = next(n for n in out.nodes if n.qualified_name == "suite.case.main")
        assert internal.file == "suite/case/m.py"


# Normalization table written down before the implementation.
NORMALIZATION_TABLE = [
    ("m.f", NormalizationProfile(), "m.f"),
    ("a.B$C.m(int)", NormalizationProfile(strip_signatures=True), "a.B.C.m"),
    ("src/pkg/mod.ext::f", NormalizationProfile(path_to_module=True), "src.pkg.mod.f"),
    ("dir\\sub\\mod.py::C::m", NormalizationProfile(path_to_module=True), "dir.sub.mod.C.m"),
    ("pkg/mod.py", NormalizationProfile(path_to_module=True), "pkg.mod"),
    ("A.m(int, str)", NormalizationProfile(strip_signatures=True), "A.m"),
    ("x.y.z", NormalizationProfile(path_to_module=True), "x.y.z"),
    ("M$Inner.f", NormalizationProfile(), "M.Inner.f"),
    ("A.B", NormalizationProfile(case_fold=True), "a.b"),
    ("a.m(int)(x)", NormalizationProfile(strip_signatures=True), "a.m"),
    ("n.f( int , str )", NormalizationProfile(strip_signatures=True), "n.f"),
]


class TestNormalization:
    @pytest.mark.parametrize("name,profile,expected", NORMALIZATION_TABLE)
    def test_table(self, name, profile, expected):
        assert profile.normalize(name) == expected

    def test_canonical_key_examples(self):
        profile = NormalizationProfile(strip_signatures=True)
        e = DependencyEdge(
            EntityRef("a.B$C.m(int)", EntityKind.FUNCTION, "a.py"),
            EntityRef("a.D.n", EntityKind.FUNCTION, "a.py"),
            EdgeKind.CALL,
        )
        assert canonical_key(e, profile) == "a.B.C.m->a.D.n"
        assert canonical_key(edge("m.f", "m.g")) == "m.f->m.g"

    def test_drop_kind_false_appends_kind(self):
        profile = NormalizationProfile(drop_kind=False)
        assert canonical_key(edge("m.f", "m.g"), profile) == "m.f->m.g[call]"

    @settings(max_examples=200, deadline=None)
    @given(
        name=st.text(
            alphabet=st.characters(whitelist_categories=("Ll", "Lu", "Nd"),
                                   whitelist_characters="./\\:$()_,"),
            min_size=1, max_size=40,
        ),
        strip=st.booleans(),
        path=st.booleans(),
        fold=st.booleans(),
    )
    def test_normalize_idempotent(self, name, strip, path, fold):
        profile = NormalizationProfile(
            strip_signatures=strip, path_to_module=path, case_fold=fold
        )
        once = profile.normalize(name)
        assert profile.normalize(once) == once
