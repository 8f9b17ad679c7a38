import copy
import io as stdio
import json
import os
import subprocess
import sys

import pytest

from bnskein import io
from bnskein.cli import run

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "demos", "data")


def data(name):
    return os.path.join(DATA, name)


def cli(*argv):
    out, err = stdio.StringIO(), stdio.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def cli_json(*argv):
    code, out, err = cli(*argv)
    return code, (json.loads(out) if out.strip() else None), err


# --- round trips ---------------------------------------------------------------


def _round(kind, obj):
    if kind == "algebra":
        return io.algebra_to_json(io.parse_algebra(obj))
    if kind == "cobordism":
        return io.cobordism_to_json(io.parse_cobordism(obj))
    if kind == "graph":
        return io.graph_to_json(io.parse_graph(obj, base_dir=DATA))
    G, A, objects, terminal = io.parse_functor_graph(obj, base_dir=DATA)
    return io.functor_graph_to_json(G, A, objects, terminal)


FILES = [
    ("khovanov_algebra.json", "algebra"),
    ("universal_quadratic_algebra.json", "algebra"),
    ("torus.json", "cobordism"),
    ("pants.json", "cobordism"),
    ("copants.json", "cobordism"),
    ("two_surfaces.json", "graph"),
    ("split_surface.json", "graph"),
    ("connected_chain.json", "graph"),
    ("functor_graph.json", "functor"),
]


@pytest.mark.parametrize("name,kind", FILES)
def test_round_trip_fixpoint(name, kind):
    once = _round(kind, io.load_json(data(name)))
    twice = _round(kind, json.loads(io.dumps(once)))
    assert io.dumps(once) == io.dumps(twice)


@pytest.mark.parametrize("name", ["khovanov", "homology_s2", "universal_quadratic", "trivial"])
def test_builtin_algebra_round_trip(name):
    A = io.parse_algebra(name)
    B = io.parse_algebra(json.loads(io.dumps(io.algebra_to_json(A))))
    assert B.mul == A.mul and B.counit == A.counit and B.comul == A.comul


def test_malformed_mul_is_schema_error():
    obj = io.load_json(data("khovanov_algebra.json"))
    bad = copy.deepcopy(obj)
    bad["mul"][0] = bad["mul"][0][:1]
    with pytest.raises(io.SchemaError) as exc:
        io.parse_algebra(bad)
    assert exc.value.path.startswith("$.mul")


def test_schema_errors_have_paths():
    with pytest.raises(io.SchemaError):
        io.parse_cobordism({"inputs": ["a"], "outputs": [], "components": [{"id": "k", "genus": -1}]})
    with pytest.raises(io.SchemaError):
        io.parse_algebra({"basis": "1x"})


def test_unknown_builtin():
    with pytest.raises(Exception):
        io.parse_algebra("no_such_algebra")


# --- CLI -------------------------------------------------------------------------


def test_check_algebra_ok():
    code, out, _ = cli_json("check-algebra", "khovanov")
    assert code == 0 and out["pass"] and out["failures"] == []
    assert out["handle_element"] == ["0", "2"]
    code, out, _ = cli_json("check-algebra", data("universal_quadratic_algebra.json"))
    assert code == 0 and out["pass"]


def test_check_algebra_failing_axioms(tmp_path):
    obj = io.load_json(data("khovanov_algebra.json"))
    obj["comul"][0].append([0, 0, "1"])
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(obj))
    code, out, err = cli_json("check-algebra", str(path))
    assert code == 1 and not out["pass"]
    assert "frobenius" in {f["axiom"] for f in out["failures"]}


def test_malformed_mul_exit_code(tmp_path):
    obj = io.load_json(data("khovanov_algebra.json"))
    obj["mul"] = [[["1", "0"]]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(obj))
    code, out, err = cli("check-algebra", str(path))
    assert code == 1 and "$.mul" in err and out == ""


def test_missing_file_exit_code():
    code, _, err = cli("tqft", "does/not/exist.json")
    assert code == 1 and "no such file" in err


def test_tqft_torus():
    code, out, _ = cli_json("tqft", data("torus.json"))
    assert code == 0 and out["scalar"] == "2"


def test_glue_pants():
    code, out, _ = cli_json("glue", data("copants.json"), data("pants.json"))
    assert code == 0
    assert [c["genus"] for c in out["components"]] == [1]


def test_colim_functor_graph():
    code, out, _ = cli_json("colim", data("functor_graph.json"), "--ring", "z", "--check")
    assert code == 0 and out["agree"]
    assert (out["free_rank"], out["torsion"]) == (1, [2])


def test_present_examples():
    for name, rank in [("two_surfaces.json", 3), ("split_surface.json", 5)]:
        code, out, _ = cli_json("present", data(name))
        assert code == 0 and out["free_rank"] == rank


def test_local_connected_agrees():
    code, out, _ = cli_json("local-connected", data("connected_chain.json"))
    assert code == 0 and out["agree"] and out["present"]["free_rank"] == 6


def test_sigma_i_oracle():
    code, out, _ = cli_json("sigma-i", "--genus", "1", "--parity", "0", "--max-k", "4", "--oracle")
    assert code == 0 and out["agree"]
    assert [r["pipeline"] for r in out["table"]] == [1, 2, 3]


def test_sigma_i_needs_rational_ring():
    code, _, _ = cli("sigma-i", "--genus", "0", "--parity", "0", "--max-k", "2", "--ring", "z")
    assert code == 1


def test_unorientable_oracle():
    code, out, _ = cli_json("unorientable", "--n", "2", "--max-degree", "2", "--oracle")
    assert code == 0 and out["agree"]
    assert out["table"][0]["free_rank"] == 4


def test_oracle_disagreement_exit_code(monkeypatch):
    import bnskein.cli as mod

    monkeypatch.setattr(mod, "tensor_algebra_oracle", lambda A, g, k: [0] * (k + 1))
    code, out, err = cli("sigma-i", "--genus", "0", "--parity", "0", "--max-k", "2", "--oracle")
    assert code == 2 and "oracle disagreement" in err
    assert json.loads(out)["agree"] is False


def test_text_output():
    code, out, _ = cli("present", data("two_surfaces.json"), "--text")
    assert code == 0 and "free_rank: 3" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bnskein", "tqft", data("torus.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["scalar"] == "2"


def test_required_fields():
    fg = io.load_json(data("functor_graph.json"))
    with pytest.raises(io.SchemaError, match="boundary"):
        io.parse_graph(fg, base_dir=DATA)
    g = io.load_json(data("two_surfaces.json"))
    del g["edges"][0]["parts"]
    with pytest.raises(io.SchemaError, match=r"\$\.edges\[0\]\.parts"):
        io.parse_graph(g, base_dir=DATA)
    with pytest.raises(io.SchemaError, match="outputs"):
        io.parse_cobordism({"inputs": [], "components": []})
