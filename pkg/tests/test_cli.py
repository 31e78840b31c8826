import json
import subprocess
import sys

import pytest

from bellcone.cli import main
from bellcone.cone import loads_cone
from bellcone.lifting import mermin_klyshko
from bellcone.scenario import chsh_functional, pr_box
from bellcone.tensor import dumps_tensor, loads_tensor


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, t in {"pr": pr_box(), "chsh": chsh_functional()}.items():
        p = tmp_path / f"{name}.tensor"
        p.write_text(dumps_tensor(t))
        paths[name] = str(p)
    return paths


def test_counts(capsys):
    assert run(capsys, "counts", "-n", "2") == (0, "vertices=16 facets=16 duality=true\n", "")
    code, out, _ = run(capsys, "counts", "-n", "2", "-k", "3")
    assert code == 0 and out == "vertices=64 facets=36 duality=false\n"


def test_counts_json(capsys):
    code, out, _ = run(capsys, "counts", "-n", "2", "--json")
    assert code == 0
    assert json.loads(out) == {"status": "ok", "vertices": 16, "facets": 16, "duality": True}


def test_scenario(capsys):
    code, out, _ = run(capsys, "scenario", "-n", "3")
    assert code == 0 and "dim=27\n" in out and "group_order=3072\n" in out


def test_dualize_pr(capsys, files):
    code, out, _ = run(capsys, "dualize", files["pr"])
    assert code == 0 and loads_tensor(out) == chsh_functional()
    assert out.splitlines()[0] == "bellcone-tensor v1; n=2; variance=lower"
    assert "+1,+1 -1/2" in out.splitlines()


def test_pair(capsys, files):
    assert run(capsys, "pair", files["chsh"], files["pr"])[:2] == (0, "value=3\n")
    code, _, err = run(capsys, "pair", files["pr"], files["pr"])
    assert code == 2 and err.startswith("error:")


def test_membership_violation_has_certificate(capsys, files):
    code, out, _ = run(capsys, "membership", files["pr"])
    assert code == 1
    lines = out.splitlines()
    assert lines[:2] == ["member=false", "certificate value=-2"]
    assert loads_tensor("\n".join(lines[2:]) + "\n").variance == "lower"
    assert run(capsys, "membership", files["pr"], "--scenario", "ns")[:2] == (0, "member=true\n")


def test_ww_test(capsys, files):
    code, out, _ = run(capsys, "ww-test", files["pr"])
    assert code == 1 and out.startswith("local=false value=8 bound=4\n")


def test_mk(capsys):
    code, out, _ = run(capsys, "mk", "-n", "3")
    assert code == 0 and loads_tensor(out) == mermin_klyshko(3)


def test_enumerate_and_classify(capsys, tmp_path):
    code, out, err = run(capsys, "enumerate", "-n", "2")
    assert code == 0 and err == "rays=24 orbits=2 sizes=16,8\n"
    cone = loads_cone(out)
    assert len(cone) == 24
    path = tmp_path / "ns2.cone"
    path.write_text(out)
    code, out, _ = run(capsys, "classify", str(path), "-n", "2", "-o", str(tmp_path / "reps"))
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == "total=24 orbits=2"
    assert [line.split()[2] for line in lines[:2]] == ["size=16", "size=8"]
    reps = sorted((tmp_path / "reps").iterdir())
    assert [p.name for p in reps] == ["orbit-001.tensor", "orbit-002.tensor"]
    assert loads_tensor(reps[1].read_text()).variance == "upper"


def test_enumerate_bell_facets(capsys):
    code, out, err = run(capsys, "enumerate", "-n", "2", "--scenario", "bell")
    assert code == 0 and err == "facets=24 orbits=2 sizes=16,8\n"


def test_long_runs_need_flag(capsys):
    code, _, err = run(capsys, "enumerate", "-n", "3")
    assert code == 2 and "--allow-long" in err


def test_output_file(capsys, tmp_path):
    target = tmp_path / "pr.tensor"
    code, out, _ = run(capsys, "fixtures", "pr", "-o", str(target))
    assert code == 0 and out == ""
    assert loads_tensor(target.read_text()) == pr_box()


def test_fixtures(capsys):
    for name in ["gyni", "box40", "ineq17", "isotropic:3/2", "all-ones:3", "noise:2", "mk:2"]:
        code, out, _ = run(capsys, "fixtures", name)
        assert code == 0 and out.startswith("bellcone-tensor v1")
    for bad in ["nope", "isotropic:x", "pr:2"]:
        assert run(capsys, "fixtures", bad)[0] == 2


def test_lift_box(capsys, files):
    code, out, _ = run(capsys, "lift", "box", files["pr"], files["pr"], "--iota", "exchange(1,2)")
    assert code == 0 and loads_tensor(out).n == 3
    code, out, _ = run(capsys, "lift", "box", files["pr"], "--iota", "exchange(1,2)")
    assert code == 2


def test_lift_box2_noeigen(capsys, tmp_path):
    w = (pr_box() + loads_tensor(_all_ones(capsys))) / 2
    path = tmp_path / "w.tensor"
    path.write_text(dumps_tensor(w))
    code, out, _ = run(capsys, "lift", "box", str(path), "--iota", "swap(1),swap(2)",
                       "--kappa", "flip(1,-1),flip(1,+1),flip(2,-1),flip(2,+1)", "--json")
    doc = json.loads(out)
    assert code == 1 and doc["status"] == "violation" and doc["condition"] == "noeigen"
    assert doc["residual"]["entries"] == {"-1,-1": "-2", "+1,+1": "2"}


def _all_ones(capsys):
    return run(capsys, "fixtures", "all-ones:2")[1]


def test_lift_ineq_chsh_to_mk3(capsys, files):
    code, out, _ = run(capsys, "lift", "ineq", files["chsh"], "--iota", "swap(1),swap(2)",
                       "--kappa", "flip(2,-1),flip(2,+1)")
    assert code == 0 and loads_tensor(out) == mermin_klyshko(3)


def test_bad_spec_and_missing_file(capsys, files):
    assert run(capsys, "lift", "box", files["pr"], files["pr"], "--iota", "spin(1)")[0] == 2
    code, _, err = run(capsys, "dualize", "/nonexistent")
    assert code == 2 and "cannot read" in err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bellcone", "counts", "-n", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "vertices=4 facets=4 duality=true\n"
