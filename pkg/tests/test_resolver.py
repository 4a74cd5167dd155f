from __future__ import annotations

from conftest import analyze_source, edge_pairs
from refgraph.model import EdgeKind
from refgraph.resolver.assignment import var_node
from refgraph.resolver.resolution import resolve_attribute, resolve_call
from refgraph.resolver.values import ClassObj, FunctionObj, InstanceOf


def call_site_at(resolution, module: str, line: int):
    sites = [
        s for s in resolution.graph.sites.calls.values()
        if s.module == module and s.line == line
    ]
    assert sites, f"no call site at {module}:{line}"
    return sites[0]


def attr_site_at(resolution, module: str, line: int, attr: str):
    sites = [
        s for s in resolution.graph.sites.attrs.values()
        if s.module == module and s.line == line and s.attr == attr
    ]
    assert sites, f"no attr site at {module}:{line}.{attr}"
    return sites[0]


class TestAssignmentGraph:
    def test_alias_flow_reaches_call_site(self, tmp_path):
        source = "def f():\n    pass\n\ng = f\ng()\n"
        _, resolution, _ = analyze_source(tmp_path, {"m.py": source})
        g_values = resolution.values[var_node("m", "g")]
        assert any(
            isinstance(v, FunctionObj) and v.entity.qualified_name == "m.f"
            for v in g_values
        )
        site = call_site_at(resolution, "m", 5)
        assert resolution.values[site.callee_node] == g_values

    def test_plain_constant_seeds_nothing(self, tmp_path):
        _, resolution, _ = analyze_source(tmp_path, {"m.py": "x = 1\n"})
        assert resolution.values[var_node("m", "x")] == frozenset()

    def test_dict_slot_flow_hand_traced(self, tmp_path):
        # d = {"k": f}; d["k"]() -- f flows through the constant-key slot
        # into the call site's callee.
        source = 'def f():\n    pass\n\nd = {"k": f}\nd["k"]()\n'
        _, resolution, _ = analyze_source(tmp_path, {"m.py": source})
        site = call_site_at(resolution, "m", 5)
        callee = resolution.values[site.callee_node]
        assert {v.entity.qualified_name for v in callee if isinstance(v, FunctionObj)} == {"m.f"}


class TestResolveCall:
    def test_direct_function_call(self, tmp_path):
        _, resolution, _ = analyze_source(
            tmp_path, {"m.py": "def f():\n    pass\n\nf()\n"}
        )
        site = call_site_at(resolution, "m", 4)
        targets = resolve_call(site, resolution.values, resolution.hierarchy)
        assert {(e.qualified_name, k) for e, k in targets} == {("m.f", EdgeKind.CALL)}

    def test_class_with_initializer(self, tmp_path):
        source = (
            "class C:\n"
            "    def __init__(self):\n"
            "        self.x = 1\n"
            "\n"
            "C()\n"
        )
        _, resolution, _ = analyze_source(tmp_path, {"m.py": source})
        site = call_site_at(resolution, "m", 5)
        targets = resolve_call(site, resolution.values, resolution.hierarchy)
        assert {(e.qualified_name, k) for e, k in targets} == {
            ("m.C", EdgeKind.INSTANTIATE),
            ("m.C.__init__", EdgeKind.CALL),
        }

    def test_method_found_on_grandparent_in_diamond(self, tmp_path):
        # Resolves along the hand-derived order [D, B, C, A]: ping is only
        # on A, so the call lands there after skipping B and C.
        source = (
            "class A:\n"
            "    def ping(self):\n"
            "        return 'a'\n"
            "class B(A):\n"
            "    pass\n"
            "class C(A):\n"
            "    pass\n"
            "class D(B, C):\n"
            "    pass\n"
            "d = D()\n"
            "d.ping()\n"
        )
        _, resolution, _ = analyze_source(tmp_path, {"m.py": source})
        site = call_site_at(resolution, "m", 11)
        targets = resolve_call(site, resolution.values, resolution.hierarchy)
        assert {(e.qualified_name, k) for e, k in targets} == {("m.A.ping", EdgeKind.CALL)}

    def test_unknown_never_fabricates(self, tmp_path):
        _, resolution, _ = analyze_source(
            tmp_path, {"m.py": "mystery()\n"}
        )
        site = call_site_at(resolution, "m", 1)
        assert resolve_call(site, resolution.values, resolution.hierarchy) == set()


class TestResolveAttribute:
    def test_self_attribute_resolves_to_class_slot(self, tmp_path):
        source = (
            "class C:\n"
            "    def __init__(self):\n"
            "        self.x = 1\n"
            "    def read(self):\n"
            "        return self.x\n"
        )
        _, resolution, _ = analyze_source(tmp_path, {"m.py": source})
        site = attr_site_at(resolution, "m", 5, "x")
        targets = resolve_attribute(site, resolution.values, resolution.hierarchy)
        assert {e.qualified_name for e in targets} == {"m.C.x"}

    def test_unknown_receiver_yields_nothing(self, tmp_path):
        _, resolution, _ = analyze_source(tmp_path, {"m.py": "y = mystery.attr\n"})
        site = attr_site_at(resolution, "m", 1, "attr")
        assert resolve_attribute(site, resolution.values, resolution.hierarchy) == set()

    def test_module_alias_attribute(self, tmp_path):
        files = {
            "pkg/__init__.py": "",
            "pkg/mod.py": "def f():\n    pass\n",
            "main.py": "import pkg.mod as m\n\ny = m.f\n",
        }
        _, resolution, _ = analyze_source(tmp_path, files)
        site = attr_site_at(resolution, "main", 3, "f")
        targets = resolve_attribute(site, resolution.values, resolution.hierarchy)
        assert {e.qualified_name for e in targets} == {"pkg.mod.f"}


class TestDerivedFlows:
    def test_bound_method_receives_instance(self, tmp_path):
        source = (
            "class C:\n"
            "    def m(self):\n"
            "        return self\n"
            "\n"
            "c = C()\n"
            "c.m()\n"
        )
        _, resolution, _ = analyze_source(tmp_path, {"m.py": source})
        self_values = resolution.values[var_node("m.C.m", "self")]
        assert any(
            isinstance(v, InstanceOf) and v.cls.qualified_name == "m.C"
            for v in self_values
        )

    def test_static_method_not_bound(self, tmp_path):
        source = (
            "def sink(x):\n"
            "    x()\n"
            "\n"
            "class C:\n"
            "    @staticmethod\n"
            "    def util(fn):\n"
            "        fn()\n"
            "\n"
            "def probe():\n"
            "    pass\n"
            "\n"
            "c = C()\n"
            "c.util(probe)\n"
        )
        _, resolution, graph = analyze_source(tmp_path, {"m.py": source})
        # probe lands in the *first* parameter of the static method.
        fn_values = resolution.values[var_node("m.C.util", "fn")]
        assert {v.entity.qualified_name for v in fn_values if isinstance(v, FunctionObj)} == {
            "m.probe"
        }
        assert ("m.C.util", "m.probe", "call") in edge_pairs(graph)

    def test_classmethod_receives_class(self, tmp_path):
        source = (
            "class C:\n"
            "    @classmethod\n"
            "    def make(cls):\n"
            "        return cls()\n"
            "\n"
            "c = C.make()\n"
        )
        _, resolution, graph = analyze_source(tmp_path, {"m.py": source})
        cls_values = resolution.values[var_node("m.C.make", "cls")]
        assert any(
            isinstance(v, ClassObj) and v.entity.qualified_name == "m.C"
            for v in cls_values
        )
        # cls() inside the classmethod instantiates C.
        assert ("m.C.make", "m.C", "instantiate") in edge_pairs(graph)
