import json
import os
import subprocess
import sys

import pytest

from algworkbench.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main
from algworkbench.cyl_core import set_algebra_atoms
from algworkbench.cyl_core import structure
from algworkbench.games import delete_orbits
from algworkbench.ra_core import one_atom, to_json_dict, two_atom


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def dump(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def files(tmp_path):
    sa2 = set_algebra_atoms(2, 3)
    return {
        "two": dump(tmp_path / "two.json", to_json_dict(two_atom())),
        "one": dump(tmp_path / "one.json", to_json_dict(one_atom())),
        "sa1": dump(tmp_path / "sa1.json", structure.to_json_dict(set_algebra_atoms(1, 3))),
        "sa2": dump(tmp_path / "sa2.json", structure.to_json_dict(sa2)),
        "cut": dump(tmp_path / "cut.json", structure.to_json_dict(delete_orbits(sa2, [0, 1]))),
        "dir": tmp_path,
    }


@pytest.mark.parametrize("argv, atoms, valid", [
    (["monk", "--graph", "k3", "--colours", "3"], 10, True),
    (["rainbow", "--greens", "3", "--reds", "2", "--copies", "2"], 11, True),
    (["hirsch", "--m", "3", "--n", "3", "--r", "0"], 1, True),
    (["blur", "--l", "2", "--n-base", "6", "--mu", "1", "--t", "3"], None, True),
])
def test_build(capsys, argv, atoms, valid):
    code, doc = run(capsys, "build", *argv)
    assert code == EXIT_OK and doc["schema_version"] == 1
    s = doc["build"]["summary"]
    assert s["valid"] is valid and (atoms is None or s["atoms"] == atoms)


def test_build_blur_with_empty_index_set_is_usage_error(capsys):
    assert main(["build", "blur", "--mu", "0"]) == EXIT_USAGE


def test_build_matrices_needs_ra(capsys, files):
    assert main(["build", "matrices"]) == EXIT_USAGE
    code, doc = run(capsys, "build", "matrices", "--ra", files["two"])
    assert code == EXIT_OK and doc["kind"] == "ca_atom_structure" and doc["build"]["summary"]["valid"]


def test_validate_and_planted_defect(capsys, files, tmp_path):
    code, doc = run(capsys, "validate", files["two"])
    assert code == EXIT_OK and doc["ok"]
    bad = to_json_dict(two_atom())
    bad["consistent"] = [t for t in bad["consistent"] if t != [0, 1, 1]]  # breaks the identity law
    code, doc = run(capsys, "validate", dump(tmp_path / "bad.json", bad))
    assert code == EXIT_VERIFY and not doc["ok"] and doc["violations"]


def test_validate_ca(capsys, files):
    code, doc = run(capsys, "validate", files["sa2"])
    assert code == EXIT_OK and doc["ok"]


def test_matrices_and_basis_check(capsys, files, tmp_path):
    code, monk = run(capsys, "build", "monk", "--graph", "k3")
    path = dump(tmp_path / "k3.json", monk)
    code, doc = run(capsys, "basis-check", path, "--required")
    assert code == EXIT_OK and doc["count"] == 748 and doc["ok"] and doc["required_amalgams"] == 28
    code, doc = run(capsys, "matrices", files["one"])
    assert code == EXIT_OK and doc["count"] == 1


def test_solve_and_replay(capsys, files):
    cert = str(files["dir"] / "cert.json")
    code, doc = run(capsys, "solve", files["cut"], "--rounds", "2", "--cert", cert)
    assert code == EXIT_OK and doc["winner"] == "forall" and doc["message"] == "FORALL wins"
    code, doc = run(capsys, "replay", files["cut"], cert)
    assert code == EXIT_OK and doc["ok"]
    code, doc = run(capsys, "verify", files["cut"], cert)
    assert code == EXIT_OK and doc["ok"]
    # the same certificate does not replay against a different structure
    code, doc = run(capsys, "replay", files["sa2"], cert)
    assert code in (EXIT_VERIFY, EXIT_USAGE)


def test_solve_f_needs_more_pebbles(capsys, files):
    assert main(["solve", files["sa2"], "--kind", "F", "--m", "3"]) == EXIT_USAGE
    code, doc = run(capsys, "solve", files["sa2"], "--kind", "F", "--m", "4", "--rounds", "1")
    assert code == EXIT_OK and doc["message"] == "EXISTS wins"


def test_solve_budget_exit(capsys, files):
    code, doc = run(capsys, "solve", files["sa2"], "--rounds", "4", "--budget", "1")
    assert code == EXIT_BUDGET and doc["message"] == "undetermined within budget"


def test_hypersolve_and_replay(capsys, files):
    cert = str(files["dir"] / "hcert.json")
    code, doc = run(capsys, "hypersolve", files["sa1"], "--rounds", "2", "--cert", cert)
    assert code == EXIT_OK and doc["message"] == "EXISTS wins"
    code, doc = run(capsys, "replay", files["sa1"], cert)
    assert code == EXIT_OK and doc["ok"]


def test_rep_and_verify(capsys, files):
    out = str(files["dir"] / "rep.json")
    assert main(["rep", files["two"], "--max-base", "4", "--out", out]) == EXIT_OK
    doc = json.loads(open(out).read())
    assert doc["found"] and doc["representation"]["base"] == 3
    code, v = run(capsys, "verify", files["two"], out)
    assert code == EXIT_OK and v["ok"]
    rep = doc["representation"]
    rep["labels"][1][1] = 1 - rep["labels"][1][1]
    bad = dump(files["dir"] / "bad_rep.json", rep)
    code, v = run(capsys, "verify", files["two"], bad)
    assert code == EXIT_VERIFY and not v["ok"]
    code, doc = run(capsys, "rep", files["sa2"], "--max-base", "3")
    assert code == EXIT_OK and doc["representation"]["base"] == 2


def test_graph(capsys):
    code, doc = run(capsys, "graph", "c5")
    assert code == EXIT_OK and (doc["chromatic_number"], doc["clique_number"], doc["girth"]) == (3, 2, 5)
    assert main(["graph", "--random", "6", "0.5"]) == EXIT_USAGE
    code, a = run(capsys, "--seed", "7", "graph", "--random", "6", "0.5")
    code, b = run(capsys, "--seed", "7", "graph", "--random", "6", "0.5")
    assert a == b


def test_usage_errors(capsys, files, tmp_path, monkeypatch):
    assert main([]) == EXIT_USAGE
    assert main(["build", "nonsense"]) == EXIT_USAGE
    assert main(["--threads", "0", "graph", "k3"]) == EXIT_USAGE
    assert main(["validate", str(tmp_path / "missing.json")]) == EXIT_USAGE
    (tmp_path / "junk.json").write_text("{not json")
    assert main(["validate", str(tmp_path / "junk.json")]) == EXIT_USAGE
    assert main(["validate", dump(tmp_path / "odd.json", {"kind": "ra_atom_structure"})]) == EXIT_USAGE
    monkeypatch.setenv("ALGWB_BUDGET_PROFILE", "bogus")
    assert main(["graph", "k3"]) == EXIT_USAGE


def test_small_profile_budget(capsys, monkeypatch):
    monkeypatch.setenv("ALGWB_BUDGET_PROFILE", "small")
    assert main(["build", "hirsch", "--m", "3", "--n", "4", "--r", "1"]) == EXIT_BUDGET


def _cli(args, tmp, env_extra=None):
    env = dict(os.environ, **(env_extra or {}))
    return subprocess.run([sys.executable, "-m", "algworkbench.cli", *args], capture_output=True, cwd=tmp, env=env)


@pytest.mark.parametrize("args", [
    ["build", "monk", "--graph", "c5", "--colours", "3"],
    ["build", "rainbow", "--greens", "3", "--reds", "2"],
    ["--seed", "11", "graph", "--random", "7", "0.4"],
])
def test_byte_reproducible_across_processes(tmp_path, args):
    a = _cli(args, tmp_path)
    b = _cli(args, tmp_path, {"PYTHONHASHSEED": "123"})
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout and a.stdout


def test_threads_do_not_change_output(tmp_path):
    a = _cli(["--threads", "1", "build", "monk", "--graph", "k2"], tmp_path)
    b = _cli(["--threads", "4", "build", "monk", "--graph", "k2"], tmp_path)
    assert a.stdout == b.stdout
