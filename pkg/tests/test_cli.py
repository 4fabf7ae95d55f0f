import json
import shutil

import pytest

from coarsesigma.cli import main
from coarsesigma.examples import GOLDEN_DIR, dumps, random_tree_model
from coarsesigma.dirseq import SymbolicSequence
import random


def write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


@pytest.fixture
def files(tmp_path):
    made = {
        "book": write(tmp_path / "book.json", {"kind": "discrete_open_book", "params": {"num_rays": 12}}),
        "net": write(tmp_path / "net.json", {"kind": "delta_net", "params": {"delta": "1/2"}}),
        "ints": write(tmp_path / "ints.json", {"kind": "integer_line"}),
        "point": write(tmp_path / "point.json", {"kind": "point_cloud", "params": {"distances": [[0]]}}),
        "floor": write(tmp_path / "floor.json", {"map": "floor", "control": "N+1", "closeness_K": "1"}),
        "incl": write(tmp_path / "incl.json", {"map": "inclusion", "control": "N", "closeness_K": "1"}),
        "D": write(tmp_path / "D.json", SymbolicSequence("N", "inclusion").to_json()),
        "B": write(tmp_path / "B.json", SymbolicSequence("omega", "identity").to_json()),
    }
    return made


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sigma_summary(files, capsys):
    code, out, _ = run(capsys, "sigma", "--space", files["book"], "--window", "1:4")
    assert code == 0
    assert [line.strip() for line in out.splitlines()[1:5]] == ["N=1: 1 class"] + [f"N={n}: {n} classes" for n in range(2, 5)]


def test_sigma_json_is_byte_identical(files, capsys, tmp_path):
    argv = ["sigma", "--space", files["book"], "--window", "1:3", "--json", "--output", str(tmp_path / "o.json")]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second == (tmp_path / "o.json").read_text()
    assert json.loads(first)["levels"][2]["N"] == 3


def test_sigma_output_feeds_limit(files, capsys, tmp_path):
    window = tmp_path / "w.json"
    run(capsys, "sigma", "--space", files["book"], "--window", "1:5", "--output", str(window))
    code, out, _ = run(capsys, "limit", str(window))
    assert code == 0 and out.strip() == "direct limit: 5 classes"
    seq = write(tmp_path / "seq.json", json.loads(window.read_text())["direct_sequence"])
    assert run(capsys, "limit", seq)[:2] == (0, out)


def test_point_space_has_empty_levels(files, capsys):
    code, out, _ = run(capsys, "sigma", "--space", files["point"], "--window", "1:2")
    assert code == 0 and "N=1: 0 classes" in out


def test_oracle_flag_on_random_model(capsys, tmp_path):
    space = random_tree_model(random.Random(4), 12)
    matrix = [[str(d) for d in row] for row in space.matrix]
    path = write(tmp_path / "m.json", {"kind": "point_cloud", "params": {"distances": matrix}})
    radius = max(space.matrix[space.basepoint])
    code, out, _ = run(capsys, "sigma", "--space", path, "--window", "1:2", "--radius", str(radius),
                       "--inner", "1", "--margin", "1", "--oracle")
    assert code == 0
    assert "oracle agreement: 2/2 levels" in out


def test_dot_export(files, capsys, tmp_path):
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "sigma", "--space", files["book"], "--window", "1:2", "--dot", str(dot))
    assert code == 0 and dot.read_text().startswith("graph")


def test_thin_truncation_exit(files, capsys):
    code, _, err = run(capsys, "sigma", "--space", files["book"], "--window", "1:4", "--radius", "6")
    assert code == 3 and "too thin" in err


def test_bad_input_exits(files, capsys, tmp_path):
    assert run(capsys, "sigma", "--space", str(tmp_path / "missing.json"))[0] == 2
    bad = write(tmp_path / "bad.json", {"kind": "klein_bottle"})
    code, _, err = run(capsys, "sigma", "--space", bad)
    assert code == 2 and "klein_bottle" in err
    (tmp_path / "broken.json").write_text("{")
    assert run(capsys, "limit", str(tmp_path / "broken.json"))[0] == 2
    assert run(capsys, "sigma", "--space", files["book"], "--window", "3:2")[0] == 2
    assert run(capsys, "limit", files["book"])[0] == 2


def test_compare_symbolic_sequences(files, capsys):
    code, out, _ = run(capsys, "compare", files["B"], files["D"])
    assert code == 0 and out.startswith("verdict: not_equivalent")
    code, out, _ = run(capsys, "compare", files["D"], files["D"], "--identity")
    assert code == 0 and out.startswith("verdict: equivalent-verified")
    assert run(capsys, "compare", files["D"], files["B"], "--identity")[0] == 2


def test_compare_limit_of_symbolic(files, capsys):
    code, out, _ = run(capsys, "limit", files["D"])
    assert code == 0 and out.strip() == "direct limit: cardinality omega"


def test_compare_line_and_integers(files, capsys):
    code, out, _ = run(capsys, "compare", files["net"], files["ints"], "--window", "1:3",
                       "--forward", files["floor"], "--backward", files["incl"])
    assert code == 0 and out.startswith("verdict: equivalent-verified")


def test_compare_with_bad_closeness_fails(files, capsys, tmp_path):
    tight = write(tmp_path / "tight.json", {"map": "floor", "control": "N+1", "closeness_K": "0"})
    code, out, _ = run(capsys, "compare", files["net"], files["ints"], "--window", "1:3",
                       "--forward", tight, "--backward", files["incl"], "--json")
    report = json.loads(out)
    assert report["verdict"] == "inconclusive"
    assert code == 1 and report["status"] == "fail"
    assert [d["closeness_ok"] for d in report["declared_data"]] == [False, True]


def test_compare_spaces_without_maps(files, capsys):
    code, out, _ = run(capsys, "compare", files["book"], files["ints"], "--window", "1:3")
    assert code == 0 and "window-relative" in out
    assert run(capsys, "compare", files["book"], files["D"])[0] == 2
    assert run(capsys, "compare", files["net"], files["ints"], "--forward", files["floor"])[0] == 2


def test_compare_with_morphism_files(capsys, tmp_path):
    from coarsesigma.examples import random_equivalent_pair
    pair = random_equivalent_pair(random.Random(3))
    a = write(tmp_path / "a.json", pair.source.to_json())
    b = write(tmp_path / "b.json", pair.target.to_json())
    f = write(tmp_path / "f.json", pair.forward.to_json())
    g = write(tmp_path / "g.json", pair.backward.to_json())
    code, out, _ = run(capsys, "compare", a, b, "--morphisms", f, g)
    # the finite window cannot close every composite, so this stays inconclusive
    assert code == 0 and out.startswith("verdict: inconclusive")
    code, out, _ = run(capsys, "compare", a, a, "--identity")
    assert code == 0 and out.startswith("verdict: equivalent-verified")
    code, out, _ = run(capsys, "compare", a, b, "--morphisms", g, f)
    assert code in (1, 2)


def test_verify_command_runs_every_example(capsys):
    code, out, _ = run(capsys, "verify-paper")
    assert code == 0 and out.splitlines()[-1] == "6 passed, 0 failed"


def test_verify_command_filter(capsys):
    code, out, _ = run(capsys, "verify-paper", "--filter", "symbolic_comparison", "--filter", "real_vs_int")
    assert code == 0
    assert out.splitlines() == ["PASS symbolic_comparison", "PASS real_vs_int", "2 passed, 0 failed"]
    assert run(capsys, "verify-paper", "--filter", "torus")[0] == 2


def test_verify_command_json_is_byte_identical(capsys):
    _, first, _ = run(capsys, "verify-paper", "--filter", "open_book", "--json")
    _, second, _ = run(capsys, "verify-paper", "--filter", "open_book", "--json")
    assert first == second and json.loads(first)["ok"]
    assert first == dumps(json.loads(first))


def test_verify_command_with_corrupted_goldens(capsys, tmp_path):
    shutil.copytree(GOLDEN_DIR, tmp_path, dirs_exist_ok=True)
    path = tmp_path / "symbolic_comparison.json"
    data = json.loads(path.read_text())
    data["corrupted"] = True
    path.write_text(dumps(data))
    code, out, _ = run(capsys, "verify-paper", "--filter", "symbolic_comparison", "--goldens", str(tmp_path))
    assert code == 1
    assert out.splitlines()[0] == ("FAIL symbolic_comparison; golden mismatch: "
                                   "$.corrupted: present on one side only")
