"""Error norms, manufactured cases, reference solutions and refinement ladders."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .discretize import Interval1D, TriMesh, triangulate_unit_square
from .errors import NumericalError
from .fdm import FieldOnGrid, solve_fdm_poisson
from .fem import nodal_gradients, solve_fem_poisson
from .fvm import ConvDiffConfig, boundary_layer_exact, conservation_defect, solve_fvm_convdiff
from .spectral import solve_spectral_poisson

PI = np.pi
SPECTRAL_FLOOR = 1e-12


# -- norms -------------------------------------------------------------------


def l2_error(numeric, exact) -> float:
    """Root-mean-square of ``numeric - exact`` over sampled values."""
    e = np.asarray(numeric, float) - np.asarray(exact, float)
    return float(np.sqrt(np.mean(e * e)))


def linf_error(numeric, exact) -> float:
    return float(np.max(np.abs(np.asarray(numeric, float) - np.asarray(exact, float))))


def fdm_errors(field_: FieldOnGrid, exact) -> tuple[float, float]:
    """RMS and max error over the interior grid nodes."""
    X, Y = field_.grid.mesh()
    ue = exact(X[1:-1, 1:-1], Y[1:-1, 1:-1])
    return l2_error(field_.interior(), ue), linf_error(field_.interior(), ue)


def fem_l2_error(mesh: TriMesh, u, exact) -> float:
    """L2 norm of the error of a P1 field by edge-midpoint quadrature.

    The rule is exact for quadratics on each triangle.
    """
    u = np.asarray(u, float)
    tri = mesh.elements
    P = mesh.nodes[tri]  # (K, 3, 2)
    area = np.abs(mesh.signed_areas())
    total = np.zeros(len(tri))
    for a, b in ((0, 1), (1, 2), (2, 0)):
        mid = 0.5 * (P[:, a] + P[:, b])
        uh = 0.5 * (u[tri[:, a]] + u[tri[:, b]])
        e = uh - exact(mid[:, 0], mid[:, 1])
        total += e * e
    return float(np.sqrt(np.sum(area * total / 3.0)))


def h1_seminorm_error(mesh: TriMesh, u, exact_grad) -> float:
    """Area-weighted RMS of the element gradient error, exact gradient taken at centroids."""
    G = nodal_gradients(mesh, u)
    c = mesh.nodes[mesh.elements].mean(axis=1)
    gx, gy = exact_grad(c[:, 0], c[:, 1])
    d = G - np.column_stack([np.broadcast_to(gx, len(c)), np.broadcast_to(gy, len(c))])
    area = np.abs(mesh.signed_areas())
    return float(np.sqrt(np.sum(area * np.sum(d * d, axis=1)) / np.sum(area)))


def estimate_order(hs, errors) -> tuple[float, float]:
    """Least-squares slope of ``log e`` against ``log h`` and the RMS fit residual."""
    h = np.asarray(hs, float)
    e = np.asarray(errors, float)
    if h.shape != e.shape or h.size < 2:
        raise ValueError("need at least two (h, error) pairs of equal length")
    if np.any(~(h > 0)) or np.any(~(e > 0)):
        raise ValueError("step sizes and errors must be positive")
    lh, le = np.log(h), np.log(e)
    slope, icpt = np.polyfit(lh, le, 1)
    resid = le - (slope * lh + icpt)
    return float(slope), float(np.sqrt(np.mean(resid * resid)))


# -- manufactured cases ------------------------------------------------------


@dataclass(frozen=True)
class ManufacturedCase:
    """Closed-form solution with matching forcing and boundary data.

    ``forcing`` follows the sign convention of the target solver:
    ``-lap(u) = f`` for fdm/fem, ``u'' = f`` for spectral, and
    ``a u' - nu u'' = f`` for fvm.
    """

    name: str
    exact: Callable
    forcing: Callable
    exact_grad: Optional[Callable] = None
    params: dict = field(default_factory=dict)


def sine_case() -> ManufacturedCase:
    return ManufacturedCase(
        "sine",
        exact=lambda x, y: np.sin(PI * x) * np.sin(PI * y),
        forcing=lambda x, y: 2 * PI**2 * np.sin(PI * x) * np.sin(PI * y),
        exact_grad=lambda x, y: (PI * np.cos(PI * x) * np.sin(PI * y), PI * np.sin(PI * x) * np.cos(PI * y)),
    )


def linear_patch_case() -> ManufacturedCase:
    return ManufacturedCase(
        "patch",
        exact=lambda x, y: 1 + 2 * x - y,
        forcing=lambda x, y: np.zeros_like(x),
        exact_grad=lambda x, y: (2.0 + 0 * x, -1.0 + 0 * y),
    )


def boundary_layer_case(a: float = 1.0, nu: float = 0.1) -> ManufacturedCase:
    return ManufacturedCase(
        "boundary_layer",
        exact=lambda x: boundary_layer_exact(x, a, nu),
        forcing=lambda x: np.zeros_like(x),
        params={"a": a, "nu": nu, "u_left": 0.0, "u_right": 1.0},
    )


def exp_case() -> ManufacturedCase:
    return ManufacturedCase("exp", exact=np.exp, forcing=np.exp, params={"a": math.exp(-1), "b": math.e})


CASES_2D = {"sine": sine_case, "patch": linear_patch_case}


# -- ladders -----------------------------------------------------------------


@dataclass(frozen=True)
class LevelResult:
    level: int
    h_or_N: float
    dof: int
    l2: float
    linf: float
    h1semi: Optional[float] = None
    error: Optional[str] = None
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-level norms plus a fitted order.

    For fdm/fem/fvm ``fitted_order`` is the slope of log(L2) against log(h).
    For spectral it is the exponential rate ``-d ln(L2) / dN`` and
    ``decay_ratios`` holds successive error ratios.
    """

    method: str
    levels: tuple
    fitted_order: float
    fit_residual: float
    linf_order: float = math.nan
    h1_order: float = math.nan
    decay_ratios: tuple = ()

    def ok_levels(self):
        return [lv for lv in self.levels if lv.error is None]


def run_level(method: str, case: ManufacturedCase, k: int, level: int) -> LevelResult:
    if method == "fdm":
        U, rep = solve_fdm_poisson(level, case.forcing, case.exact)
        l2, linf = fdm_errors(U, case.exact)
        return LevelResult(k, U.grid.h, level * level, l2, linf, extra={"iterations": rep.iterations})
    if method == "fem":
        sol, rep = solve_fem_poisson(level, case.forcing, case.exact)
        mesh = sol.mesh
        xy = mesh.nodes
        linf = linf_error(sol.nodal_values, case.exact(xy[:, 0], xy[:, 1]))
        l2 = fem_l2_error(mesh, sol.nodal_values, case.exact)
        h1 = h1_seminorm_error(mesh, sol.nodal_values, case.exact_grad) if case.exact_grad else None
        return LevelResult(k, 1.0 / level, mesh.n_nodes, l2, linf, h1, extra={"iterations": rep.iterations})
    if method == "fvm":
        p = case.params
        cfg = ConvDiffConfig(Interval1D.uniform(level), p["a"], p["nu"], case.forcing, p["u_left"], p["u_right"])
        u = solve_fvm_convdiff(cfg)
        ue = case.exact(cfg.grid.nodes)
        return LevelResult(
            k, 1.0 / level, level + 1, l2_error(u, ue), linf_error(u, ue),
            extra={"conservation": conservation_defect(cfg, u), "monotone": bool(np.all(np.diff(u) >= 0))},
        )
    if method == "spectral":
        p = case.params
        sol = solve_spectral_poisson(level, case.forcing, p["a"], p["b"])
        xs = np.linspace(-1.0, 1.0, 1001)
        vals, ue = sol(xs), case.exact(xs)
        return LevelResult(k, level, level + 1, l2_error(vals, ue), linf_error(vals, ue))
    raise ValueError(f"unknown method {method!r}")


def convergence_study(method: str, case: ManufacturedCase, levels) -> ConvergenceReport:
    """Solve on each level, collect norms and fit the convergence order.

    A level whose solve fails is recorded with its error message and the
    study carries on with the remaining levels.
    """
    levels = list(levels)
    if not levels:
        raise ValueError("no refinement levels given")
    if method == "spectral":
        levels = sorted(levels)
    else:
        levels = sorted(levels)  # increasing resolution == decreasing h
    results = []
    for k, level in enumerate(levels):
        try:
            results.append(run_level(method, case, k, level))
        except (ArithmeticError, ValueError) as exc:
            results.append(LevelResult(k, math.nan, 0, math.nan, math.nan, error=f"{type(exc).__name__}: {exc}"))

    ok = [r for r in results if r.error is None and r.l2 > 0]
    order = resid = linf_order = h1_order = math.nan
    ratios = ()
    if method == "spectral":
        ratios = tuple(b.l2 / a.l2 for a, b in zip(ok[:-1], ok[1:]))
        # the rate fit ignores levels already at round-off
        above = [r for r in ok if r.l2 > SPECTRAL_FLOOR]
        ok = above if len(above) >= 2 else ok
        if len(ok) >= 2:
            Ns = np.array([r.h_or_N for r in ok], float)
            slope, icpt = np.polyfit(Ns, np.log([r.l2 for r in ok]), 1)
            fit = slope * Ns + icpt
            order = float(-slope)
            resid = float(np.sqrt(np.mean((np.log([r.l2 for r in ok]) - fit) ** 2)))
    elif len(ok) >= 2:
        hs = [r.h_or_N for r in ok]
        order, resid = estimate_order(hs, [r.l2 for r in ok])
        if all(r.linf > 0 for r in ok):
            linf_order, _ = estimate_order(hs, [r.linf for r in ok])
        if all(r.h1semi is not None and r.h1semi > 0 for r in ok):
            h1_order, _ = estimate_order(hs, [r.h1semi for r in ok])
    return ConvergenceReport(method, tuple(results), order, resid, linf_order, h1_order, ratios)


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_convergence_csv(report: ConvergenceReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["level", "h_or_N", "dof", "l2", "linf", "h1semi"])
        for r in report.levels:
            hN = int(r.h_or_N) if report.method == "spectral" and r.error is None else r.h_or_N
            w.writerow([r.level, _fmt(hN), r.dof, _fmt(r.l2), _fmt(r.linf), _fmt(r.h1semi)])


# -- reference solutions -----------------------------------------------------


def heat_reference(x, t, kappa: float = 1.0):
    """``exp(-kappa pi^2 t) sin(pi x)``."""
    return np.exp(-kappa * PI**2 * np.asarray(t, float)) * np.sin(PI * np.asarray(x, float))


def _hopf_point(x: float, t: float, nu: float, epsrel: float) -> float:
    # with eta = s z, s = sqrt(4 nu t):
    #   u = -int sin(pi(x - eta)) w / int w,  w = exp(-cos(pi(x - eta)) / (2 pi nu) - eta^2 / (4 nu t))
    s = math.sqrt(4.0 * nu * t)
    c = 1.0 / (2.0 * PI * nu)

    def expo(z):
        return -np.cos(PI * (x - s * z)) * c - z * z

    # the cosine term varies by at most 2c, so this window holds all the mass
    half = math.sqrt(2.0 * c + 60.0) + 1.0
    grid = np.linspace(-half, half, 4001)
    e = expo(grid)
    peak = float(e.max())
    alive = grid[e - peak > -60.0]
    lo, hi = float(alive.min()) - 0.5, float(alive.max()) + 0.5
    zpk = float(grid[np.argmax(e)])
    pts = [zpk] if lo < zpk < hi else None

    def w(z):
        return math.exp(expo(z) - peak)

    den = _quad(w, lo, hi, pts, epsrel, 0.0)
    # |u| <= 1, so an absolute tolerance scaled by den bounds the relative error of u
    num = _quad(lambda z: -math.sin(PI * (x - s * z)) * w(z), lo, hi, pts, epsrel, epsrel * den)
    return num / den


def _quad(fn, lo, hi, points, epsrel, epsabs):
    res = integrate.quad(fn, lo, hi, points=points, epsabs=epsabs, epsrel=epsrel, limit=500, full_output=1)
    if len(res) > 3:
        raise NumericalError(f"quadrature did not converge: {res[3]}")
    return res[0]


def burgers_reference(x, t, nu: float, epsrel: float = 1e-13):
    """Cole-Hopf solution of viscous Burgers with ``u0 = -sin(pi x)``.

    Scalar or array ``x`` at a single time ``t`` >= 0.
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    if t < 0:
        raise ValueError("t must be nonnegative")
    xs = np.asarray(x, float)
    if t == 0:
        return -np.sin(PI * xs)
    out = np.array([_hopf_point(float(v), float(t), nu, epsrel) for v in xs.ravel()]).reshape(xs.shape)
    return float(out) if out.ndim == 0 else out
