"""Command-line entry point.

    pdework solve {fdm|fem|fvm|spectral}
    pdework converge {fdm|fem|fvm|spectral}
    pdework pinn train {poisson|burgers}
    pdework pinn invert {kappa|source}
    pdework compare poisson

Every run writes CSV artifacts and a ``manifest.txt`` (flat ``key = value``)
into its output directory.  Exit codes: 0 success, 1 numerical failure,
2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import platform
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .discretize import Interval1D
from .fdm import solve_fdm_poisson
from .fem import solve_fem_poisson
from .fvm import ConvDiffConfig, conservation_defect, solve_fvm_convdiff
from .neural.mlp import save_mlp
from .pinn import (
    Burgers1D,
    HeatInverseKappa,
    LossWeights,
    NetSpec,
    Observations,
    PoissonForward2D,
    SampleConfig,
    SourceInverse2D,
    TrainConfig,
    train,
    write_history,
)
from .spectral import solve_spectral_poisson
from .verify import (
    CASES_2D,
    boundary_layer_case,
    burgers_reference,
    convergence_study,
    exp_case,
    fdm_errors,
    fem_l2_error,
    heat_reference,
    l2_error,
    linf_error,
    write_convergence_csv,
)

OUT_ENV = "PDEWORK_OUT"
PI = np.pi

# built-in defaults, lowest precedence (then config file, then flags)
DEFAULTS = {
    "seed": 0,
    "case": None,
    "n": None,
    "levels": None,
    "a": 1.0,
    "nu": None,
    "solver": "cg",
    "steps": None,
    "lr": 1e-3,
    "lr_decay": 0.1,
    "layers": None,
    "n_interior": 2000,
    "n_boundary": 400,
    "n_initial": 400,
    "sampling": "uniform",
    "weights": "1,1,1,1",
    "strategy": "fixed",
    "balance_every": 100,
    "resample_every": 0,
    "T": None,
    "nd": 20,
    "noise": 0.0,
    "kappa_true": 1.0,
    "eval_n": 50,
}

METHOD_DEFAULTS = {
    ("solve", "fdm"): {"case": "sine", "n": 32},
    ("solve", "fem"): {"case": "sine", "n": 16},
    ("solve", "fvm"): {"case": "boundary_layer", "n": 80, "nu": 0.1},
    ("solve", "spectral"): {"case": "exp", "n": 20},
    ("converge", "fdm"): {"case": "sine", "levels": "8,16,32,64"},
    ("converge", "fem"): {"case": "sine", "levels": "4,8,16,32"},
    ("converge", "fvm"): {"case": "boundary_layer", "levels": "40,80,160,320", "nu": 0.1},
    ("converge", "spectral"): {"case": "exp", "levels": "4,8,12,16,20"},
    ("pinn", "poisson"): {"steps": 10000, "layers": "20,20,20", "lr": 3e-3, "weights": "1,10,1,1"},
    ("pinn", "burgers"): {
        "steps": 20000, "layers": "20,20,20,20", "lr": 3e-3, "nu": 0.01 / math.pi, "T": 1.0,
        "weights": "1,10,10,1",
    },
    ("pinn", "kappa"): {
        "steps": 10000, "layers": "20,20,20", "lr": 3e-3, "T": 0.25, "weights": "1,10,10,10",
        "n_interior": 1000, "n_boundary": 200, "n_initial": 200,
    },
    ("pinn", "source"): {"steps": 10000, "layers": "20,20,20", "lr": 3e-3, "nd": 200, "weights": "1,10,1,10"},
    ("compare", "poisson"): {"steps": 10000, "layers": "20,20,20", "lr": 3e-3, "n": 32, "weights": "1,10,1,1"},
}

CLASSICAL_KEYS = {"seed", "case", "n", "levels", "a", "nu", "solver"}
PINN_KEYS = {
    "seed", "steps", "lr", "lr_decay", "layers", "n_interior", "n_boundary", "sampling", "weights",
    "strategy", "balance_every", "resample_every", "eval_n",
}
RELEVANT = {
    "solve": CLASSICAL_KEYS - {"levels"},
    "converge": CLASSICAL_KEYS - {"n", "solver"},
    "pinn poisson": PINN_KEYS,
    "pinn burgers": PINN_KEYS | {"nu", "T", "n_initial"},
    "pinn kappa": PINN_KEYS | {"T", "n_initial", "nd", "noise", "kappa_true"},
    "pinn source": PINN_KEYS | {"nd", "noise"},
    "compare poisson": PINN_KEYS | {"n"},
}

INT_KEYS = {"seed", "n", "steps", "n_interior", "n_boundary", "n_initial", "balance_every", "resample_every", "nd", "eval_n"}
FLOAT_KEYS = {"a", "nu", "lr", "lr_decay", "T", "noise", "kappa_true"}


class UsageError(Exception):
    pass


# -- argument handling -------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value file; keys mirror the flag names")
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV}/<command>-<target> or runs/...)")
    p.add_argument("--seed", type=int)


def _classical(p):
    p.add_argument("--case", help="manufactured case: sine | patch (2D), boundary_layer (fvm), exp (spectral)")
    p.add_argument("--a", type=float, help="fvm convection speed")
    p.add_argument("--nu", type=float, help="fvm diffusion coefficient")
    p.add_argument("--solver", choices=["cg", "lu"], help="fdm linear solver")


def _pinn(p):
    p.add_argument("--steps", type=int)
    p.add_argument("--lr", type=float, help="initial Adam step size")
    p.add_argument("--lr-decay", dest="lr_decay", type=float, help="step size factor reached at the last step")
    p.add_argument("--layers", help="hidden widths, e.g. 20,20,20")
    p.add_argument("--n-interior", dest="n_interior", type=int)
    p.add_argument("--n-boundary", dest="n_boundary", type=int)
    p.add_argument("--n-initial", dest="n_initial", type=int)
    p.add_argument("--sampling", choices=["uniform", "lhs"])
    p.add_argument("--weights", help="lambda_f,lambda_b,lambda_i,lambda_d")
    p.add_argument("--strategy", choices=["fixed", "balance"])
    p.add_argument("--balance-every", dest="balance_every", type=int)
    p.add_argument("--resample-every", dest="resample_every", type=int)
    p.add_argument("--eval-n", dest="eval_n", type=int, help="evaluation grid points per axis")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    sup = argparse.SUPPRESS
    top = _Parser(prog="pdework", description=__doc__.split("\n")[0], argument_default=sup)
    top.add_argument("--version", action="version", version=f"pdework {__version__}")
    cmds = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve = cmds.add_parser("solve", help="single classical solve", argument_default=sup)
    solve.add_argument("target", choices=["fdm", "fem", "fvm", "spectral"])
    solve.add_argument("--n", type=int, help="fdm: interior points per axis; fem: cells per axis; fvm: cells; spectral: N")
    _classical(solve)
    _common(solve)
    solve.epilog = "The spectral solver is driven with the same -u'' = f convention as fdm/fem; f is negated internally."

    conv = cmds.add_parser("converge", help="refinement ladder with fitted order", argument_default=sup)
    conv.add_argument("target", choices=["fdm", "fem", "fvm", "spectral"])
    conv.add_argument("--levels", help="comma-separated resolutions")
    _classical(conv)
    _common(conv)

    pinn = cmds.add_parser("pinn", help="physics-informed training", argument_default=sup)
    pcmd = pinn.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    tr = pcmd.add_parser("train", help="forward problems", argument_default=sup)
    tr.add_argument("target", choices=["poisson", "burgers"])
    tr.add_argument("--nu", type=float, help="Burgers viscosity (default 0.01/pi)")
    tr.add_argument("--T", type=float, help="final time")
    _pinn(tr)
    _common(tr)
    inv = pcmd.add_parser("invert", help="inverse problems", argument_default=sup)
    inv.add_argument("target", choices=["kappa", "source"])
    inv.add_argument("--nd", type=int, help="number of observations")
    inv.add_argument("--noise", type=float, help="Gaussian noise level relative to the data standard deviation")
    inv.add_argument("--kappa-true", dest="kappa_true", type=float)
    inv.add_argument("--T", type=float, help="final time (kappa)")
    _pinn(inv)
    _common(inv)

    cmp_ = cmds.add_parser("compare", help="PINN against classical solvers", argument_default=sup)
    cmp_.add_argument("target", choices=["poisson"])
    cmp_.add_argument("--n", type=int, help="fdm interior points and fem cells per axis")
    _pinn(cmp_)
    _common(cmp_)
    return top


def read_config(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = val
    return out


def _coerce(key, val):
    if val is None:
        return None
    try:
        if key in INT_KEYS:
            return int(val)
        if key in FLOAT_KEYS:
            return float(val)
    except ValueError:
        raise UsageError(f"bad value for {key}: {val!r}") from None
    return val


def resolve(ns: argparse.Namespace) -> dict:
    """Merge defaults, config file and flags into one flat config."""
    given = vars(ns)
    command = given["command"]
    group = "pinn" if command == "pinn" else command
    cfg = dict(DEFAULTS)
    cfg.update(METHOD_DEFAULTS[(group, given["target"])])
    if "config" in given:
        cfg.update(read_config(given["config"]))
    for key, val in given.items():
        if key in DEFAULTS:
            cfg[key] = val
    group_key = command if command in ("solve", "converge") else f"{group} {given['target']}"
    cfg = {k: _coerce(k, v) for k, v in cfg.items() if k in RELEVANT[group_key]}
    cfg["command"] = command if command != "pinn" else f"pinn {given['mode']}"
    cfg["target"] = given["target"]
    if "out" in given:
        cfg["out"] = given["out"]
    else:
        root = os.environ.get(OUT_ENV, "runs")
        cfg["out"] = str(Path(root) / f"{cfg['command'].replace(' ', '-')}-{cfg['target']}")
    return cfg


# -- output helpers ----------------------------------------------------------


def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_rows(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_num(v) for v in row])


def write_manifest(path: Path, cfg: dict, results: dict, wall_time: float) -> None:
    lines = [f"{k} = {_num(v)}" for k, v in sorted(cfg.items()) if v is not None]
    lines += [
        f"version.pdework = {__version__}",
        f"version.numpy = {np.__version__}",
        f"version.scipy = {scipy.__version__}",
        f"version.python = {platform.python_version()}",
    ]
    lines += [f"result.{k} = {_num(v)}" for k, v in results.items()]
    lines.append(f"wall_time = {wall_time:.3f}")
    path.write_text("\n".join(lines) + "\n")


def _levels(cfg) -> list:
    try:
        levels = [int(s) for s in str(cfg["levels"]).split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad levels {cfg['levels']!r}") from None
    if not levels:
        raise UsageError("levels must be nonempty")
    return levels


def _case_2d(cfg):
    if cfg["case"] not in CASES_2D:
        raise UsageError(f"unknown 2D case {cfg['case']!r}; choose from {sorted(CASES_2D)}")
    return CASES_2D[cfg["case"]]()


def _check_case(cfg, expected):
    if cfg["case"] != expected:
        raise UsageError(f"{cfg['target']} supports case {expected!r} only")


def _fvm_case(cfg):
    _check_case(cfg, "boundary_layer")
    return boundary_layer_case(cfg["a"], cfg["nu"])


def _spectral_solve(N: int):
    """Solve the exp case through the CLI convention ``-u'' = f``."""
    f_cli = lambda x: -np.exp(x)  # noqa: E731
    case = exp_case()
    return solve_spectral_poisson(N, lambda x: -f_cli(x), case.params["a"], case.params["b"]), case


# -- commands ----------------------------------------------------------------


def cmd_solve(cfg, out: Path) -> dict:
    method, n = cfg["target"], cfg["n"]
    if n is None or n < 1:
        raise UsageError("--n must be a positive integer")
    if method == "fdm":
        case = _case_2d(cfg)
        U, rep = solve_fdm_poisson(n, case.forcing, case.exact, solver=cfg["solver"])
        X, Y = U.grid.mesh()
        write_rows(out / "field.csv", ["x", "y", "u"], zip(X.ravel(), Y.ravel(), U.values.ravel()))
        l2, linf = fdm_errors(U, case.exact)
        return {"l2": l2, "linf": linf, "iterations": rep.iterations, "converged": rep.converged}
    if method == "fem":
        case = _case_2d(cfg)
        sol, rep = solve_fem_poisson(n, case.forcing, case.exact)
        xy = sol.mesh.nodes
        write_rows(out / "field.csv", ["x", "y", "u"], zip(xy[:, 0], xy[:, 1], sol.nodal_values))
        return {
            "l2": fem_l2_error(sol.mesh, sol.nodal_values, case.exact),
            "linf": linf_error(sol.nodal_values, case.exact(xy[:, 0], xy[:, 1])),
            "iterations": rep.iterations,
            "converged": rep.converged,
        }
    if method == "fvm":
        case = _fvm_case(cfg)
        conf = ConvDiffConfig(Interval1D.uniform(n), cfg["a"], cfg["nu"], case.forcing, 0.0, 1.0)
        u = solve_fvm_convdiff(conf)
        x = conf.grid.nodes
        write_rows(out / "field.csv", ["x", "u"], zip(x, u))
        ue = case.exact(x)
        return {
            "l2": l2_error(u, ue),
            "linf": linf_error(u, ue),
            "conservation_defect": conservation_defect(conf, u),
            "monotone": bool(np.all(np.diff(u) >= 0)),
        }
    _check_case(cfg, "exp")
    if n < 2:
        raise UsageError("spectral needs --n >= 2")
    sol, case = _spectral_solve(n)
    write_rows(out / "field.csv", ["x", "u"], zip(sol.nodes, sol.nodal_values))
    xs = np.linspace(-1.0, 1.0, 1001)
    return {"max_error": linf_error(sol(xs), case.exact(xs)), "l2": l2_error(sol(xs), case.exact(xs))}


def cmd_converge(cfg, out: Path) -> dict:
    method = cfg["target"]
    if method in ("fdm", "fem"):
        case = _case_2d(cfg)
    elif method == "fvm":
        case = _fvm_case(cfg)
    else:
        _check_case(cfg, "exp")
        case = exp_case()
    report = convergence_study(method, case, _levels(cfg))
    write_convergence_csv(report, out / "convergence.csv")
    res = {"fitted_order": report.fitted_order, "fit_residual": report.fit_residual}
    if method != "spectral":
        res["linf_order"] = report.linf_order
    if method == "fem":
        res["h1_order"] = report.h1_order
    if method == "spectral":
        res["decay_ratios"] = " ".join(_num(r) for r in report.decay_ratios)
    failed = [lv for lv in report.levels if lv.error]
    res["failed_levels"] = len(failed)
    return res


def _net_cfg(cfg, d_in: int):
    try:
        hidden = tuple(int(s) for s in str(cfg["layers"]).split(",") if s.strip())
        weights = LossWeights(*(float(s) for s in str(cfg["weights"]).split(",")))
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad layers/weights: {exc}") from None
    net = NetSpec((d_in, *hidden, 1))
    tc = TrainConfig(
        steps=cfg["steps"], alpha=cfg["lr"], seed=cfg["seed"], resample_every=cfg["resample_every"],
        weight_strategy=cfg["strategy"], weights=weights, balance_every=cfg["balance_every"],
        lr_decay=cfg["lr_decay"], decay_steps=cfg["steps"],
    )
    return net, tc


def _unit_grid(n: int) -> np.ndarray:
    g = np.linspace(0.0, 1.0, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def _rel_l2(pred, exact) -> float:
    return float(np.linalg.norm(pred - exact) / np.linalg.norm(exact))


def sine_poisson_problem(observations=None) -> PoissonForward2D:
    return PoissonForward2D(
        lambda x, y: 2 * PI**2 * np.sin(PI * x) * np.sin(PI * y), lambda x, y: np.zeros_like(x),
        observations=observations,
    )


def _train_poisson(cfg, out: Path):
    net, tc = _net_cfg(cfg, 2)
    sc = SampleConfig(cfg["n_interior"], cfg["n_boundary"], 0, cfg["sampling"])
    model = train(sine_poisson_problem(), net, tc, sc)
    P = _unit_grid(cfg["eval_n"])
    pred = model.predict(P)
    exact = np.sin(PI * P[:, 0]) * np.sin(PI * P[:, 1])
    write_history(model.history, out / "history.csv")
    save_mlp(model.params, out / "model.txt")
    return model, P, pred, exact


def burgers_problem(nu: float, T: float) -> Burgers1D:
    zero = lambda t: np.zeros_like(np.asarray(t, float))  # noqa: E731
    return Burgers1D(nu, lambda x: -np.sin(PI * x), zero, zero, T)


def cmd_pinn_train(cfg, out: Path) -> dict:
    if cfg["target"] == "poisson":
        model, P, pred, exact = _train_poisson(cfg, out)
        write_rows(out / "field.csv", ["x", "y", "u"], zip(P[:, 0], P[:, 1], pred))
        return {
            "rel_l2": _rel_l2(pred, exact),
            "initial_loss": model.history[0].total,
            "final_loss": model.history[-1].total,
        }
    nu, T = cfg["nu"], cfg["T"]
    problem = burgers_problem(nu, T)
    net, tc = _net_cfg(cfg, 2)
    sc = SampleConfig(cfg["n_interior"], cfg["n_boundary"], cfg["n_initial"], cfg["sampling"])
    model = train(problem, net, tc, sc)
    write_history(model.history, out / "history.csv")
    save_mlp(model.params, out / "model.txt")
    xs = np.linspace(-1.0, 1.0, 201)
    ts = np.linspace(0.0, T, 101)
    X, Tt = np.meshgrid(xs, ts, indexing="ij")
    P = np.column_stack([X.ravel(), Tt.ravel()])
    write_rows(out / "field.csv", ["x", "t", "u"], zip(P[:, 0], P[:, 1], model.predict(P)))
    res = {
        "initial_loss": model.history[0].total,
        "final_loss": model.history[-1].total,
        "loss_ratio": model.history[-1].total / model.history[0].total,
    }
    if T >= 0.5:
        res["rel_l2_t05"] = burgers_error_at(model, nu, 0.5)
    return res


def burgers_error_at(model, nu: float, t: float, exclude: float = 0.1, n: int = 201) -> float:
    """Relative L2 error against the Cole-Hopf solution at time ``t`` outside ``|x| < exclude``."""
    xs = np.linspace(-1.0, 1.0, n)
    xs = xs[np.abs(xs) >= exclude]
    ref = burgers_reference(xs, t, nu)
    pred = model.predict(np.column_stack([xs, np.full_like(xs, t)]))
    return _rel_l2(pred, ref)


def heat_observations(nd: int, T: float, kappa: float, noise: float, seed: int) -> Observations:
    """Observations of ``exp(-kappa pi^2 t) sin(pi x)`` at uniform random interior points.

    Noise is Gaussian with standard deviation ``noise * std(clean values)``.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    pts = np.column_stack([rng.random(nd), T * rng.random(nd)])
    vals = heat_reference(pts[:, 0], pts[:, 1], kappa)
    if noise > 0:
        vals = vals + noise * np.std(vals) * rng.standard_normal(nd)
    return Observations(pts, vals)


def heat_problem(obs: Observations, T: float) -> HeatInverseKappa:
    zero = lambda t: np.zeros_like(np.asarray(t, float))  # noqa: E731
    return HeatInverseKappa(lambda x: np.sin(PI * x), zero, zero, obs, T)


def source_observations(nd: int, noise: float, seed: int) -> Observations:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    pts = rng.random((nd, 2))
    vals = np.sin(PI * pts[:, 0]) * np.sin(PI * pts[:, 1])
    if noise > 0:
        vals = vals + noise * np.std(vals) * rng.standard_normal(nd)
    return Observations(pts, vals)


def cmd_pinn_invert(cfg, out: Path) -> dict:
    nd = cfg["nd"]
    if nd is None or nd < 1:
        raise UsageError("--nd must be a positive integer")
    net, tc = _net_cfg(cfg, 2)
    if cfg["target"] == "kappa":
        T, k_true = cfg["T"], cfg["kappa_true"]
        obs = heat_observations(nd, T, k_true, cfg["noise"], cfg["seed"])
        sc = SampleConfig(cfg["n_interior"], cfg["n_boundary"], cfg["n_initial"], cfg["sampling"])
        model = train(heat_problem(obs, T), net, tc, sc)
        write_history(model.history, out / "history.csv")
        save_mlp(model.params, out / "model.txt")
        write_rows(out / "observations.csv", ["x", "t", "u"], zip(obs.points[:, 0], obs.points[:, 1], obs.values))
        return {
            "kappa_hat": model.kappa_hat,
            "kappa_rel_error": abs(model.kappa_hat - k_true) / k_true,
            "final_loss": model.history[-1].total,
        }
    obs = source_observations(nd, cfg["noise"], cfg["seed"])
    problem = SourceInverse2D(lambda x, y: np.zeros_like(x), obs)
    sc = SampleConfig(cfg["n_interior"], cfg["n_boundary"], 0, cfg["sampling"])
    model = train(problem, net, tc, sc)
    write_history(model.history, out / "history.csv")
    save_mlp(model.params, out / "model.txt")
    save_mlp(model.source_params, out / "source_model.txt")
    P = _unit_grid(cfg["eval_n"])
    f_hat = model.predict_source(P)
    u_hat = model.predict(P)
    f_true = 2 * PI**2 * np.sin(PI * P[:, 0]) * np.sin(PI * P[:, 1])
    write_rows(out / "field.csv", ["x", "y", "u", "f"], zip(P[:, 0], P[:, 1], u_hat, f_hat))
    return {
        "source_rel_l2": _rel_l2(f_hat, f_true),
        "u_rel_l2": _rel_l2(u_hat, f_true / (2 * PI**2)),
        "final_loss": model.history[-1].total,
    }


def cmd_compare(cfg, out: Path) -> dict:
    model, P, pred, exact = _train_poisson(cfg, out)
    case = CASES_2D["sine"]()
    n = cfg["n"]
    U, _ = solve_fdm_poisson(n, case.forcing, case.exact)
    X, Y = U.grid.mesh()
    fdm_rel = _rel_l2(U.values.ravel(), case.exact(X, Y).ravel())
    sol, _ = solve_fem_poisson(n, case.forcing, case.exact)
    xy = sol.mesh.nodes
    fem_rel = _rel_l2(sol.nodal_values, case.exact(xy[:, 0], xy[:, 1]))
    pinn_rel = _rel_l2(pred, exact)
    rows = [
        ("pinn", model.params.n_params, pinn_rel, linf_error(pred, exact)),
        ("fdm", n * n, fdm_rel, linf_error(U.values.ravel(), case.exact(X, Y).ravel())),
        ("fem", sol.mesh.n_nodes, fem_rel, linf_error(sol.nodal_values, case.exact(xy[:, 0], xy[:, 1]))),
    ]
    write_rows(out / "compare.csv", ["method", "dof", "rel_l2", "linf"], rows)
    return {"pinn_rel_l2": pinn_rel, "fdm_rel_l2": fdm_rel, "fem_rel_l2": fem_rel}


def dispatch(cfg, out: Path) -> dict:
    cmd = cfg["command"]
    if cmd == "solve":
        return cmd_solve(cfg, out)
    if cmd == "converge":
        return cmd_converge(cfg, out)
    if cmd == "pinn train":
        return cmd_pinn_train(cfg, out)
    if cmd == "pinn invert":
        return cmd_pinn_invert(cfg, out)
    return cmd_compare(cfg, out)


def run(argv=None) -> int:
    """Parse ``argv``, run the command and return the exit code."""
    start = time.perf_counter()
    try:
        ns = build_parser().parse_args(argv)
        cfg = resolve(ns)
        out = Path(cfg["out"])
        try:
            out.mkdir(parents=True, exist_ok=True)
            probe = out / ".write-test"
            probe.write_text("")
            probe.unlink()
        except OSError as exc:
            raise UsageError(f"output directory {out} is not writable: {exc}") from None
        results = dispatch(cfg, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:  # includes ConfigurationError
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ArithmeticError as exc:  # includes NumericalError

        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    write_manifest(out / "manifest.txt", cfg, results, time.perf_counter() - start)
    for k, v in results.items():
        print(f"{k} = {_num(v)}")
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
