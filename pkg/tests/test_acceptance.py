"""Acceptance criteria 1-12, one test each, each reporting a PASS/FAIL line."""

import time

import numpy as np
import pytest

from pdework.cli import run
from pdework.discretize import Interval1D, uniform_grid_2d
from pdework.fdm import assemble_fdm_poisson
from pdework.fem import solve_fem_poisson
from pdework.fvm import ConvDiffConfig, conservation_defect, solve_fvm_convdiff
from pdework.linalg import Tridiagonal, cg_solve, lu_solve, thomas_solve
from pdework.neural import MlpParams, forward, forward_jet, init_mlp, loss_param_grad, tape, tree_leaves, tree_unflatten
from pdework.verify import boundary_layer_case, convergence_study, exp_case, linear_patch_case, sine_case


def manifest(d):
    return dict(line.split(" = ", 1) for line in (d / "manifest.txt").read_text().splitlines())


def test_c01_fdm_order(criterion):
    t = time.perf_counter()
    r = convergence_study("fdm", sine_case(), [8, 16, 32, 64])
    dt = time.perf_counter() - t
    ok = 1.8 <= r.fitted_order <= 2.2 and 1.8 <= r.linf_order <= 2.2 and dt < 10
    criterion(1, ok, f"L2 order {r.fitted_order:.3f}, Linf order {r.linf_order:.3f}, {dt:.2f} s")


def test_c02_fem_orders(criterion):
    t = time.perf_counter()
    r = convergence_study("fem", sine_case(), [4, 8, 16, 32])
    dt = time.perf_counter() - t
    ok = 1.75 <= r.fitted_order <= 2.25 and 0.75 <= r.h1_order <= 1.25 and dt < 30
    criterion(2, ok, f"L2 order {r.fitted_order:.3f}, H1 order {r.h1_order:.3f}, {dt:.2f} s")


def test_c03_fem_patch(criterion):
    case = linear_patch_case()
    worst = 0.0
    for n in (1, 2, 4, 8):
        sol, _ = solve_fem_poisson(n, case.forcing, case.exact)
        xy = sol.mesh.nodes
        worst = max(worst, float(np.max(np.abs(sol.nodal_values - case.exact(xy[:, 0], xy[:, 1])))))
    criterion(3, worst <= 1e-10, f"max nodal error {worst:.2e}")


def _fvm_instances():
    case = boundary_layer_case(1.0, 0.1)
    for n in (20, 40, 80, 160):
        yield ConvDiffConfig(Interval1D.uniform(n), 1.0, 0.1, case.forcing, 0.0, 1.0)
    # cell Peclet numbers 10 and 100
    for nu in (1e-2, 1e-3):
        yield ConvDiffConfig(Interval1D.uniform(10), 1.0, nu, case.forcing, 0.0, 1.0)


def test_c04_fvm_order_and_monotonicity(criterion):
    t = time.perf_counter()
    r = convergence_study("fvm", boundary_layer_case(1.0, 0.1), [20, 40, 80, 160])
    monotone = all(np.all(np.diff(solve_fvm_convdiff(c)) >= 0) for c in _fvm_instances())
    dt = time.perf_counter() - t
    ok = r.fitted_order >= 0.9 and monotone and dt < 5
    criterion(4, ok, f"order {r.fitted_order:.3f}, monotone on all grids incl. Pe=100: {monotone}, {dt:.2f} s")


def test_c05_fvm_conservation(criterion):
    rng = np.random.default_rng(5)
    configs = list(_fvm_instances())
    for _ in range(20):
        nodes = np.sort(np.r_[0.0, rng.uniform(0, 1, 15), 1.0])
        configs.append(ConvDiffConfig(Interval1D(nodes), rng.uniform(-2, 2), rng.uniform(1e-3, 1), lambda x: np.cos(3 * x)))
    worst = max(conservation_defect(c, solve_fvm_convdiff(c)) for c in configs)
    criterion(5, worst <= 1e-10, f"max defect {worst:.2e} over {len(configs)} instances")


def test_c06_spectral(criterion):
    t = time.perf_counter()
    r = convergence_study("spectral", exp_case(), [4, 8, 12, 16, 20])
    dt = time.perf_counter() - t
    errs = [lv.linf for lv in r.levels]
    decays = all(b / a < 0.1 for a, b in zip(errs[:-1], errs[1:]) if a > 1e-12)
    ok = errs[-1] < 1e-9 and decays and dt < 2
    criterion(6, ok, f"max errors {' '.join(f'{e:.1e}' for e in errs)}, {dt:.2f} s")


def test_c07_solver_equivalence(criterion):
    rng = np.random.default_rng(7)
    worst_t = 0.0
    for _ in range(100):
        n = int(rng.integers(2, 201))
        sub, sup = rng.uniform(-1, 1, n - 1), rng.uniform(-1, 1, n - 1)
        diag = (np.abs(np.r_[0, sub]) + np.abs(np.r_[sup, 0]) + rng.uniform(0.5, 2, n)) * rng.choice([-1, 1], n)
        T = Tridiagonal(sub, diag, sup)
        b = rng.normal(size=n)
        ref = lu_solve(T.toarray(), b)
        worst_t = max(worst_t, np.linalg.norm(thomas_solve(T, b) - ref) / np.linalg.norm(ref))
    worst_c = 0.0
    for N in range(1, 17):
        A, b = assemble_fdm_poisson(uniform_grid_2d(N), lambda x, y: np.exp(x) * np.cos(y), lambda x, y: x * x - y)
        ref = lu_solve(A.toarray(), b)
        worst_c = max(worst_c, float(np.max(np.abs(cg_solve(A, b).x - ref))))
    ok = worst_t <= 1e-12 and worst_c <= 1e-8
    criterion(7, ok, f"thomas/LU rel {worst_t:.1e}, CG/LU max {worst_c:.1e}")


def _fd_jet(p, x, h=1e-4):
    d = len(x)
    g, l2 = np.empty(d), np.empty(d)
    u0 = forward(p, x)
    for k in range(d):
        e = np.zeros(d)
        e[k] = h
        up, um = forward(p, x + e), forward(p, x - e)
        g[k] = (up - um) / (2 * h)
        l2[k] = (up - 2 * u0 + um) / h**2
    return g, l2


def _fd_grad(loss, p, h=1e-6):
    leaves = [np.array(v, float) for v in tree_leaves(p)]
    out = []
    for i, leaf in enumerate(leaves):
        g = np.zeros_like(leaf)
        for idx in np.ndindex(leaf.shape):
            vals = []
            for s in (1, -1):
                pert = [v.copy() for v in leaves]
                pert[i][idx] += s * h
                vals.append(float(loss(tree_unflatten(p, pert))))
            g[idx] = (vals[0] - vals[1]) / (2 * h)
        out.append(g)
    return out


def test_c08_autodiff(criterion):
    t = time.perf_counter()
    bad = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(1, 4))
        hidden = [int(w) for w in rng.integers(1, 9, size=rng.integers(1, 4))]
        p = init_mlp((d, *hidden, 1), seed=seed)
        p = MlpParams(p.weights, tuple(0.3 * rng.normal(size=b.shape) for b in p.biases))
        x = rng.uniform(-1, 1, d)
        jet = forward_jet(p, x)
        g, l2 = _fd_jet(p, x)
        jet_ok = np.allclose(jet.grad, g, rtol=1e-4, atol=1e-6) and np.allclose(jet.lap_parts, l2, rtol=1e-4, atol=1e-6)
        pts = rng.uniform(-1, 1, (4, d))

        def loss(q):
            j = forward_jet(q, pts)
            r = j.laplacian + j.value * j.grad[:, 0] - 1.0
            return tape.mean(r * r)

        _, grads = loss_param_grad(loss, p)
        grad_ok = all(
            np.allclose(a, b, rtol=1e-4, atol=1e-6) for a, b in zip(tree_leaves(grads), _fd_grad(loss, p))
        )
        if not (jet_ok and grad_ok):
            bad.append(seed)
    dt = time.perf_counter() - t
    criterion(8, not bad and dt < 60, f"mismatching configurations {bad}, {dt:.1f} s")


def test_c09_pinn_poisson(criterion, tmp_path):
    argv = [
        "pinn", "train", "poisson", "--steps", "10000", "--layers", "20,20,20", "--lr", "3e-3",
        "--lr-decay", "0.1", "--n-interior", "2000", "--n-boundary", "400", "--weights", "1,10,1,1",
        "--eval-n", "50", "--seed", "0", "--out", str(tmp_path),
    ]
    t = time.perf_counter()
    code = run(argv)
    dt = time.perf_counter() - t
    err = float(manifest(tmp_path)["result.rel_l2"]) if code == 0 else float("nan")
    criterion(9, code == 0 and err < 0.02 and dt < 900, f"relative L2 {err:.4%}, {dt:.0f} s")


@pytest.mark.slow
def test_c10_pinn_burgers(criterion, tmp_path):
    argv = [
        "pinn", "train", "burgers", "--steps", "20000", "--layers", "20,20,20,20", "--lr", "3e-3",
        "--lr-decay", "0.1", "--n-interior", "2000", "--n-boundary", "400", "--n-initial", "400",
        "--weights", "1,10,10,1", "--T", "1.0", "--seed", "0", "--out", str(tmp_path),
    ]
    t = time.perf_counter()
    code = run(argv)
    dt = time.perf_counter() - t
    m = manifest(tmp_path) if code == 0 else {}
    ratio = float(m.get("result.loss_ratio", "nan"))
    err = float(m.get("result.rel_l2_t05", "nan"))
    ok = code == 0 and ratio <= 1e-2 and err < 0.05 and dt < 1800
    criterion(10, ok, f"loss ratio {ratio:.2e}, L2 error at t=0.5 {err:.3%}, {dt:.0f} s")


def test_c11_kappa_inversion(criterion, tmp_path):
    base = [
        "pinn", "invert", "kappa", "--nd", "20", "--steps", "10000", "--layers", "20,20,20", "--lr", "3e-3",
        "--lr-decay", "0.1", "--n-interior", "1000", "--n-boundary", "200", "--n-initial", "200",
        "--weights", "1,10,10,10", "--T", "0.25", "--kappa-true", "1.0",
    ]
    t = time.perf_counter()
    errs = {}
    for noise, seed in ((0.0, 0), (0.01, 0), (0.01, 1), (0.01, 2)):
        out = tmp_path / f"n{noise}-s{seed}"
        code = run(base + ["--noise", str(noise), "--seed", str(seed), "--out", str(out)])
        errs[(noise, seed)] = float(manifest(out)["result.kappa_rel_error"]) if code == 0 else float("nan")
    dt = time.perf_counter() - t
    ok = errs[(0.0, 0)] < 0.02 and all(errs[(0.01, s)] < 0.05 for s in range(3)) and dt < 900
    detail = ", ".join(f"noise {n} seed {s}: {e:.3%}" for (n, s), e in errs.items())
    criterion(11, ok, f"{detail}, {dt:.0f} s")


RUNS = [
    ["solve", "fdm", "--n", "12"],
    ["solve", "fem", "--n", "6"],
    ["solve", "fvm", "--n", "30"],
    ["solve", "spectral", "--n", "12"],
    ["converge", "fdm", "--levels", "4,8"],
    ["converge", "fem", "--levels", "2,4"],
    ["converge", "fvm", "--levels", "10,20"],
    ["converge", "spectral", "--levels", "4,8"],
    ["pinn", "train", "poisson", "--steps", "20", "--n-interior", "50", "--n-boundary", "20", "--eval-n", "6"],
    ["pinn", "train", "burgers", "--steps", "20", "--n-interior", "50", "--n-boundary", "20", "--n-initial", "20"],
    ["pinn", "invert", "kappa", "--steps", "20", "--noise", "0.01", "--n-interior", "50", "--n-boundary", "20"],
    ["pinn", "invert", "source", "--steps", "20", "--n-interior", "50", "--n-boundary", "20", "--eval-n", "6"],
    ["compare", "poisson", "--steps", "20", "--n", "4", "--n-interior", "50", "--n-boundary", "20", "--eval-n", "6"],
]


def _stable_manifest(raw: bytes) -> list:
    # wall time and the output path legitimately differ between the two runs
    return [x for x in raw.decode().splitlines() if not x.startswith(("wall_time =", "out ="))]


def test_c12_cli_determinism(criterion, tmp_path):
    differing = []
    for k, argv in enumerate(RUNS):
        dirs = [tmp_path / f"{k}-{rep}" for rep in "ab"]
        codes = [run(argv + ["--seed", "3", "--out", str(d)]) for d in dirs]
        if codes != [0, 0]:
            differing.append(" ".join(argv[:2]) + f" exit {codes}")
            continue
        names_a = sorted(p.name for p in dirs[0].iterdir())
        names_b = sorted(p.name for p in dirs[1].iterdir())
        if names_a != names_b:
            differing.append(" ".join(argv[:2]) + " file sets")
            continue
        for name in names_a:
            a, b = ((d / name).read_bytes() for d in dirs)
            if name == "manifest.txt":
                a, b = (_stable_manifest(x) for x in (a, b))
            if a != b:
                differing.append(f"{' '.join(argv[:2])}/{name}")
    criterion(12, not differing, f"{len(RUNS)} commands run twice, differing artifacts: {differing or 'none'}")
