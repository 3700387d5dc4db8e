import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pdework.discretize import triangulate_unit_square
from pdework.errors import GeometryError
from pdework.fem import apply_dirichlet, assemble_fem, element_load, element_stiffness, solve_fem_poisson
from pdework.linalg import cg_solve, csr_from_arrays
from pdework.verify import fem_l2_error, h1_seminorm_error, sine_case

zero = lambda x, y: np.zeros_like(x)  # noqa: E731
P0, P1, P2 = (0.0, 0.0), (1.0, 0.0), (0.0, 1.0)


def test_unit_right_triangle_stiffness():
    expected = 0.5 * np.array([[2, -1, -1], [-1, 1, 0], [-1, 0, 1]], float)
    np.testing.assert_allclose(element_stiffness(P0, P1, P2), expected, atol=1e-15)


def test_stiffness_scale_invariant():
    p = np.array([(0.1, 0.2), (0.9, 0.35), (0.3, 0.8)])
    np.testing.assert_allclose(element_stiffness(*(3 * p)), element_stiffness(*p), rtol=1e-13)


def test_element_load():
    np.testing.assert_array_equal(element_load(P0, P1, P2, zero), 0.0)
    np.testing.assert_allclose(element_load(P0, P1, P2, lambda x, y: 1.0), 1 / 6, rtol=1e-15)
    np.testing.assert_allclose(element_load(P0, P1, P2, lambda x, y: x), 1 / 18, rtol=1e-15)


def test_degenerate_triangle():
    with pytest.raises(GeometryError):
        element_stiffness((0, 0), (1, 1), (2, 2))
    with pytest.raises(GeometryError):
        element_load((0, 0), (1e-8, 0), (0, 1e-8), zero)


triangles = st.lists(st.floats(-2, 2), min_size=6, max_size=6).filter(
    lambda v: abs((v[2] - v[0]) * (v[5] - v[1]) - (v[4] - v[0]) * (v[3] - v[1])) > 1e-3
)


@settings(max_examples=60, deadline=None)
@given(triangles)
def test_stiffness_symmetric_zero_rows(v):
    p = [(v[0], v[1]), (v[2], v[3]), (v[4], v[5])]
    area2 = (v[2] - v[0]) * (v[5] - v[1]) - (v[4] - v[0]) * (v[3] - v[1])
    if area2 < 0:
        p[1], p[2] = p[2], p[1]
    K = element_stiffness(*p)
    np.testing.assert_allclose(K, K.T, atol=1e-12 * np.abs(K).max())
    np.testing.assert_allclose(K.sum(axis=1), 0, atol=1e-10 * np.abs(K).max())
    assert np.all(np.linalg.eigvalsh(K) > -1e-10 * np.abs(K).max())


def test_global_matrix_n1():
    A, b = assemble_fem(triangulate_unit_square(1), zero)
    D = A.toarray()
    assert D.shape == (4, 4)
    np.testing.assert_allclose(D, D.T)
    np.testing.assert_allclose(D.sum(axis=1), 0, atol=1e-15)
    np.testing.assert_array_equal(b, 0.0)


def test_global_matrix_equals_dense_scatter():
    mesh = triangulate_unit_square(3)
    f = lambda x, y: 1 + x * y  # noqa: E731
    A, b = assemble_fem(mesh, f)
    D = np.zeros((mesh.n_nodes, mesh.n_nodes))
    bb = np.zeros(mesh.n_nodes)
    for tri in mesh.elements:
        pts = mesh.nodes[tri]
        K = element_stiffness(*pts)
        L = element_load(*pts, f)
        for a in range(3):
            bb[tri[a]] += L[a]
            for c in range(3):
                D[tri[a], tri[c]] += K[a, c]
    np.testing.assert_allclose(A.toarray(), D, atol=1e-14)
    np.testing.assert_allclose(b, bb, atol=1e-15)


def test_bandwidth_follows_adjacency():
    mesh = triangulate_unit_square(2)
    A, _ = assemble_fem(mesh, zero)
    adj = np.eye(mesh.n_nodes, dtype=bool)
    for tri in mesh.elements:
        for a in tri:
            for c in tri:
                adj[a, c] = True
    assert np.all((A.toarray() != 0) <= adj)
    rows, cols, _ = A.triplets()
    assert np.all(adj[rows, cols])


def test_global_matrix_psd_with_constant_kernel():
    A, _ = assemble_fem(triangulate_unit_square(5), zero)
    D = A.toarray()
    np.testing.assert_allclose(D @ np.ones(len(D)), 0, atol=1e-13)
    assert np.linalg.eigvalsh(D).min() > -1e-12


def test_dirichlet_all_boundary():
    mesh = triangulate_unit_square(1)
    A, b = assemble_fem(mesh, lambda x, y: np.ones_like(x))
    g = np.array([1.0, 2.0, 3.0, 4.0])
    A2, b2 = apply_dirichlet(A, b, np.arange(4), g)
    np.testing.assert_array_equal(A2.toarray(), np.eye(4))
    np.testing.assert_array_equal(b2, g)


def test_dirichlet_zero_data_keeps_interior_rhs():
    mesh = triangulate_unit_square(4)
    A, b = assemble_fem(mesh, lambda x, y: 1 + x)
    A2, b2 = apply_dirichlet(A, b, mesh.boundary_nodes, 0.0)
    inner = np.setdiff1d(np.arange(mesh.n_nodes), mesh.boundary_nodes)
    np.testing.assert_array_equal(b2[inner], b[inner])
    np.testing.assert_array_equal(b2[mesh.boundary_nodes], 0.0)
    assert A2.is_symmetric()
    # definiteness probe: CG converges and the interior block is SPD
    res = cg_solve(A2, b2, tol=1e-12)
    assert res.converged
    assert np.linalg.eigvalsh(A2.toarray()[np.ix_(inner, inner)]).min() > 0


def test_linear_exactness():
    for n in (1, 2, 4, 8):
        sol, _ = solve_fem_poisson(n, zero, lambda x, y: x + y)
        xy = sol.mesh.nodes
        np.testing.assert_allclose(sol.nodal_values, xy[:, 0] + xy[:, 1], atol=1e-10)


def test_sine_case_n16_and_ratio():
    case = sine_case()
    e = {}
    for n in (8, 16):
        sol, rep = solve_fem_poisson(n, case.forcing, case.exact)
        assert rep.converged
        bn = sol.mesh.boundary_nodes
        np.testing.assert_array_equal(sol.nodal_values[bn], case.exact(*sol.mesh.nodes[bn].T))
        e[n] = fem_l2_error(sol.mesh, sol.nodal_values, case.exact)
    assert e[16] < 1e-2
    assert 3.3 <= e[8] / e[16] <= 4.7


def test_h1_seminorm_examples():
    mesh = triangulate_unit_square(4)
    xy = mesh.nodes
    u = 3 * xy[:, 0] - 2 * xy[:, 1] + 1
    assert h1_seminorm_error(mesh, u, lambda x, y: (3.0, -2.0)) < 1e-13
    assert h1_seminorm_error(mesh, np.zeros(mesh.n_nodes), lambda x, y: (1.0, 0.0)) == pytest.approx(1.0, abs=1e-14)
    case = sine_case()
    e = []
    for n in (8, 16):
        sol, _ = solve_fem_poisson(n, case.forcing, case.exact)
        e.append(h1_seminorm_error(sol.mesh, sol.nodal_values, case.exact_grad))
    assert 1.8 <= e[0] / e[1] <= 2.2


def test_fem_l2_exact_for_linear_error():
    # the edge-midpoint rule is exact for quadratics, so a linear error is integrated exactly:
    # integral of (x + y)^2 over the unit square is 7/6
    mesh = triangulate_unit_square(3)
    e = fem_l2_error(mesh, np.zeros(mesh.n_nodes), lambda x, y: x + y)
    assert e == pytest.approx(np.sqrt(7 / 6), rel=1e-14)
