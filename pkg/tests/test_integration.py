from __future__ import annotations

from conftest import FIXTURES, analyze_source, edge_pairs, write_project
from refgraph.config import ProjectConfig
from refgraph.extractor import analyze_project, extract_edges, load_project
from refgraph.frontend.parsing import parse_module


def test_builtins_file_drives_higher_order_edges(tmp_path):
    # A project-specific table entry marks an external callable as invoking
    # its first argument, which turns the passed function into a call edge.
    write_project(tmp_path, {
        "builtins.conf": "mylib.submit = 0\n",
        "proj/main.py": (
            "import mylib\n"
            "\n"
            "def job():\n"
            "    pass\n"
            "\n"
            "mylib.submit(job)\n"
        ),
    })
    config = ProjectConfig(builtins_file=str(tmp_path / "builtins.conf"))
    project = load_project(tmp_path / "proj", config)
    resolution = analyze_project(project)
    graph = extract_edges(project, resolution)
    pairs = edge_pairs(graph)
    assert ("main", "main.job", "call") in pairs
    assert ("main", "mylib.submit", "call") in pairs


def test_default_reduce_entry(tmp_path):
    source = (
        "from functools import reduce\n"
        "\n"
        "def add(a, b):\n"
        "    return a\n"
        "\n"
        "reduce(add, [1, 2, 3])\n"
    )
    _, _, graph = analyze_source(tmp_path, {"main.py": source})
    assert ("main", "main.add", "call") in edge_pairs(graph)


def test_external_star_import_contributes_nothing(tmp_path):
    source = "from os.path import *\n\njoin('a', 'b')\n"
    project, resolution, graph = analyze_source(tmp_path, {"main.py": source})
    # join stays unresolved: no fabricated call edge, import edge remains.
    pairs = edge_pairs(graph)
    assert ("main", "os.path", "import") in pairs
    assert not any(tgt.endswith("join") for _, tgt, _ in pairs)


def test_chained_assignment_example(tmp_path):
    # a = b = f: both names reach the definition.
    source = "def f():\n    pass\n\na = b = f\na()\nb()\n"
    _, _, graph = analyze_source(tmp_path, {"m.py": source})
    assert ("m", "m.f", "call") in edge_pairs(graph)


def test_bundled_fixture_corpus_parses_with_zero_opaque():
    for root in (FIXTURES / "mini_suite", FIXTURES / "demo_project", FIXTURES / "import_shapes"):
        for path in sorted(root.rglob("*.py")):
            module = parse_module(path.relative_to(root), root=root)
            assert module.opaque_count == 0, path


def test_conditional_import_in_try_block(tmp_path):
    source = (
        "try:\n"
        "    import json\n"
        "except ImportError:\n"
        "    json = None\n"
        "\n"
        "def dump(x):\n"
        "    return json.dumps(x)\n"
    )
    _, _, graph = analyze_source(tmp_path, {"m.py": source})
    pairs = edge_pairs(graph)
    assert ("m", "json", "import") in pairs
    assert ("m.dump", "json.dumps", "call") in pairs


def test_import_inside_function_attributes_to_function(tmp_path):
    source = "def lazy():\n    import os\n    return os.getcwd()\n"
    _, _, graph = analyze_source(tmp_path, {"m.py": source})
    pairs = edge_pairs(graph)
    assert ("m.lazy", "os", "import") in pairs
    assert ("m.lazy", "os.getcwd", "call") in pairs


def test_walrus_and_comprehension_flows(tmp_path):
    source = (
        "def f():\n"
        "    pass\n"
        "\n"
        "fs = [f for _ in range(2)]\n"
        "calls = [g() for g in fs]\n"
    )
    _, _, graph = analyze_source(tmp_path, {"m.py": source})
    assert ("m", "m.f", "call") in edge_pairs(graph)


def test_match_pattern_references(tmp_path):
    source = (
        "import enum\n"
        "\n"
        "class Color(enum.Enum):\n"
        "    RED = 1\n"
        "\n"
        "def pick(x):\n"
        "    match x:\n"
        "        case Color.RED:\n"
        "            return 1\n"
        "        case _:\n"
        "            return 0\n"
    )
    _, _, graph = analyze_source(tmp_path, {"m.py": source})
    assert ("m.pick", "m.Color.RED", "attribute_access") in edge_pairs(graph)


def test_vararg_receives_extra_positionals(tmp_path):
    source = (
        "def sink(*fns):\n"
        "    for fn in fns:\n"
        "        fn()\n"
        "\n"
        "def a():\n"
        "    pass\n"
        "\n"
        "def b():\n"
        "    pass\n"
        "\n"
        "sink(a, b)\n"
    )
    _, _, graph = analyze_source(tmp_path, {"m.py": source})
    pairs = edge_pairs(graph)
    assert ("m.sink", "m.a", "call") in pairs
    assert ("m.sink", "m.b", "call") in pairs


def test_pathological_nesting_degrades_per_file(tmp_path):
    files = {
        "deep.py": "x = " + " + ".join(["1"] * 60000) + "\n",
        "normal.py": "def ok():\n    pass\n\nok()\n",
    }
    write_project(tmp_path, files)
    project = load_project(tmp_path)
    resolution = analyze_project(project)
    graph = extract_edges(project, resolution)
    assert any("deep.py" in err for err in project.file_errors)
    assert ("normal", "normal.ok", "call") in edge_pairs(graph)


def test_legitimate_deep_chains_analyze_fully(tmp_path):
    files = {
        "chains.py": (
            "def f(v):\n"
            "    return f\n"
            "\n"
            "g = f" + "(1)" * 300 + "\n"
        ),
    }
    _, _, graph = analyze_source(tmp_path, files)
    assert ("chains", "chains.f", "call") in edge_pairs(graph)
