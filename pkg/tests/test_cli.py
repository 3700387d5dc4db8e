import csv

import pytest

from pdework.cli import read_config, run

SMALL = ["--steps", "5", "--layers", "6", "--n-interior", "30", "--n-boundary", "12", "--n-initial", "8"]


def manifest(d):
    out = {}
    for line in (d / "manifest.txt").read_text().splitlines():
        k, v = line.split(" = ", 1)
        out[k] = v
    return out


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_converge_fdm(tmp_path):
    assert run(["converge", "fdm", "--levels", "8,16,32,64", "--out", str(tmp_path)]) == 0
    r = rows(tmp_path / "convergence.csv")
    assert r[0] == ["level", "h_or_N", "dof", "l2", "linf", "h1semi"]
    assert len(r) == 5
    m = manifest(tmp_path)
    assert 1.8 <= float(m["result.fitted_order"]) <= 2.2
    assert m["levels"] == "8,16,32,64" and m["command"] == "converge"


def test_solve_spectral_records_error(tmp_path):
    assert run(["solve", "spectral", "--n", "20", "--case", "exp", "--out", str(tmp_path)]) == 0
    assert float(manifest(tmp_path)["result.max_error"]) < 1e-9
    r = rows(tmp_path / "field.csv")
    assert r[0] == ["x", "u"] and len(r) == 22


@pytest.mark.parametrize("target,header", [("fdm", ["x", "y", "u"]), ("fem", ["x", "y", "u"]), ("fvm", ["x", "u"])])
def test_solve_classical_outputs(tmp_path, target, header):
    assert run(["solve", target, "--n", "8", "--out", str(tmp_path)]) == 0
    assert rows(tmp_path / "field.csv")[0] == header
    m = manifest(tmp_path)
    assert {"version.pdework", "version.numpy", "wall_time", "seed", "out"} <= set(m)


def test_manifest_is_sufficient_to_rerun(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["solve", "fvm", "--n", "40", "--nu", "0.05", "--out", str(a)]) == 0
    cfg = tmp_path / "cfg.txt"
    keep = {k: v for k, v in manifest(a).items() if k in ("a", "case", "n", "nu", "seed", "solver")}
    cfg.write_text("".join(f"{k} = {v}\n" for k, v in keep.items()))
    assert run(["solve", "fvm", "--config", str(cfg), "--out", str(b)]) == 0
    assert (a / "field.csv").read_bytes() == (b / "field.csv").read_bytes()


def test_usage_errors_exit_2(tmp_path, capsys):
    assert run(["solve", "fdm", "--bogus", "1"]) == 2
    assert run(["explode"]) == 2
    assert run([]) == 2
    assert run(["solve", "fvm", "--nu", "-1", "--out", str(tmp_path)]) == 2
    assert run(["solve", "fdm", "--case", "nope", "--out", str(tmp_path)]) == 2
    assert run(["converge", "fem", "--levels", "a,b", "--out", str(tmp_path)]) == 2
    assert run(["solve", "fdm", "--n", "4", "--out", "/proc/not-writable"]) == 2
    assert run(["pinn", "train", "poisson", "--weights", "0,1,1,1", "--out", str(tmp_path)] + SMALL) == 2
    assert run(["--help"]) == 0
    capsys.readouterr()


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_numerical_failure_exit_1(tmp_path):
    assert run(["pinn", "train", "poisson", "--lr", "1e300", "--out", str(tmp_path)] + SMALL) == 1


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.txt"
    cfg.write_text("# comment\nn = 6\nsolver = lu\nseed = 3\n")
    assert read_config(cfg) == {"n": "6", "solver": "lu", "seed": "3"}
    out = tmp_path / "o"
    assert run(["solve", "fdm", "--config", str(cfg), "--n", "5", "--out", str(out)]) == 0
    m = manifest(out)
    assert (m["n"], m["solver"], m["seed"]) == ("5", "lu", "3")
    bad = tmp_path / "bad.txt"
    bad.write_text("colour = red\n")
    assert run(["solve", "fdm", "--config", str(bad), "--out", str(out)]) == 2
    assert run(["solve", "fdm", "--config", str(tmp_path / "missing"), "--out", str(out)]) == 2


def test_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("PDEWORK_OUT", str(tmp_path))
    assert run(["solve", "fdm", "--n", "4"]) == 0
    assert (tmp_path / "solve-fdm" / "manifest.txt").exists()


def test_byte_determinism_classical(tmp_path):
    for name in ("a", "b"):
        assert run(["converge", "fem", "--levels", "2,4,8", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a" / "convergence.csv").read_bytes() == (tmp_path / "b" / "convergence.csv").read_bytes()


@pytest.mark.parametrize(
    "argv,files",
    [
        (["pinn", "train", "poisson"], ["history.csv", "model.txt", "field.csv"]),
        (["pinn", "train", "burgers", "--T", "0.6"], ["history.csv", "model.txt", "field.csv"]),
        (["pinn", "invert", "kappa", "--nd", "10"], ["history.csv", "model.txt", "observations.csv"]),
        (["pinn", "invert", "source", "--nd", "10", "--eval-n", "5"], ["history.csv", "source_model.txt", "field.csv"]),
        (["compare", "poisson", "--n", "4", "--eval-n", "5"], ["compare.csv", "history.csv"]),
    ],
)
def test_pinn_commands_are_byte_reproducible(tmp_path, argv, files):
    for name in ("a", "b"):
        assert run(argv + SMALL + ["--seed", "2", "--out", str(tmp_path / name)]) == 0
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    hist = rows(tmp_path / "a" / "history.csv")
    assert hist[0] == ["step", "Lf", "Lb", "Li", "Ld", "total", "kappa"] and len(hist) == 6
    ma = manifest(tmp_path / "a")
    mb = manifest(tmp_path / "b")
    for m in (ma, mb):
        m.pop("wall_time"), m.pop("out")
    assert ma == mb


def test_compare_csv_schema(tmp_path):
    assert run(["compare", "poisson", "--n", "4", "--eval-n", "5", "--out", str(tmp_path)] + SMALL) == 0
    r = rows(tmp_path / "compare.csv")
    assert r[0] == ["method", "dof", "rel_l2", "linf"]
    assert [x[0] for x in r[1:]] == ["pinn", "fdm", "fem"]


@pytest.mark.slow
def test_kappa_inversion_example(tmp_path):
    argv = ["pinn", "invert", "kappa", "--nd", "20", "--noise", "0.01", "--steps", "20000", "--seed", "0"]
    assert run(argv + ["--out", str(tmp_path)]) == 0
    assert abs(float(manifest(tmp_path)["result.kappa_hat"]) - 1.0) < 0.05
