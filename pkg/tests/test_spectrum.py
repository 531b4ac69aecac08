from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpodpo.floquet import dispersion, floquet_matrix
from cpodpo.graph import Parameters, ParameterError, random_parameters
from cpodpo.spectrum import (band_functions, dispersion_residual, edges_covered, eigvals_hermitian,
                             match_to_solutions, real_extrema)

from conftest import graph, params_file, run


def test_eigvals_examples():
    assert np.allclose(eigvals_hermitian(np.diag([3.0, -1.0])), [-1, 3])
    assert np.allclose(eigvals_hermitian([[0, 1], [1, 0]]), [-1, 1])
    with pytest.raises(ValueError):
        eigvals_hermitian([[0, 1], [2, 0]])


def test_hexagonal_eigenvalues_at_identity(hexagonal):
    c = params_file(hexagonal, "hexagonal_params")
    M = floquet_matrix(hexagonal, c).evaluate(np.array([1, 1]))
    assert np.allclose(eigvals_hermitian(M), [0, 2 * (6 + 3 + 2)])


@settings(max_examples=30)
@given(st.integers(1, 6), st.integers(0, 10 ** 6))
def test_eigvals_random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = A + A.conj().T
    w = eigvals_hermitian(H)
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(H).real) < 1e-10 * max(1, np.abs(H).max())


def test_hexagonal_bands(hexagonal):
    c = params_file(hexagonal, "hexagonal_params")
    grid = band_functions(hexagonal, c)
    assert grid.N == 64 and grid.m == 2
    (a, b), (p, q) = grid.bands
    assert abs(a) < 1e-12 and abs(b - 10) < 1e-9 and abs(p - 12) < 1e-9 and abs(q - 22) < 1e-9
    assert dispersion_residual(grid, dispersion(hexagonal, c)) < 1e-9
    assert np.all(np.diff(grid.values, axis=1) >= 0)


def test_complex_parameters_rejected(hexagonal):
    with pytest.raises(ParameterError):
        band_functions(hexagonal, random_parameters(hexagonal, 1, "complex"))


def test_square_band():
    g = graph("square")
    c = Parameters((Fraction(1), Fraction(1)), (Fraction(0),))
    grid = band_functions(g, c)
    lo, hi = grid.bands[0]
    assert abs(lo) < 1e-12 and abs(hi - 8) < 1e-12
    lam = 4 - 2 * np.cos(grid.thetas[:, 0]) - 2 * np.cos(grid.thetas[:, 1])
    assert np.allclose(grid.values[:, 0], lam)


def test_square_extrema():
    g = graph("square")
    e, V = 2.0, 0.5
    c = Parameters((Fraction(2), Fraction(2)), (Fraction(1, 2),))
    pts = real_extrema(g, c, band_functions(g, c))
    assert len(pts) == 4
    assert sorted(p.value for p in pts) == pytest.approx([V, V + 4 * e, V + 4 * e, V + 8 * e], abs=1e-10)
    assert sorted(p.kind for p in pts) == ["max", "min", "saddle", "saddle"]
    for p in pts:
        assert np.all(np.isclose(p.theta, 0) | np.isclose(p.theta, np.pi))


def test_flat_bands():
    g = graph("dimer")
    c = Parameters((Fraction(0),) * len(g.edges), (Fraction(-1), Fraction(2)))
    grid = band_functions(g, c, 16)
    assert grid.bands == [(-1.0, -1.0), (2.0, 2.0)]
    pts = real_extrema(g, c, grid)
    assert [p.kind for p in pts] == ["degenerate-flat", "degenerate-flat"]
    assert not any(p.refined for p in pts)


def test_hexagonal_extrema_and_matching(hexagonal):
    from cpodpo.critical import CriticalOptions, solve_cpe
    c = params_file(hexagonal, "hexagonal_params")
    grid = band_functions(hexagonal, c)
    pts = real_extrema(hexagonal, c, grid)
    for j in range(2):
        ext = [p for p in pts if p.band == j and p.kind in ("min", "max")]
        assert len(ext) == 2
    assert edges_covered(pts, grid)
    rep = solve_cpe(hexagonal, c, CriticalOptions(skip_faces=True))
    assert match_to_solutions(pts, rep.solutions) == len([p for p in pts if p.refined])
    # converse: each real-torus critical point lies within a grid cell of a detected point
    cell = 2 * np.pi / grid.N
    for s in rep.solutions:
        if not s["real_torus"]:
            continue
        th = np.angle([complex(*s["point"]["z1"]), complex(*s["point"]["z2"])]) % (2 * np.pi)
        near = [np.max(np.abs(np.angle(np.exp(1j * (th - p.theta))))) for p in pts]
        assert min(near) <= cell


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_grid_values_in_bands(seed):
    g = graph("dimer")
    c = random_parameters(g, seed)
    grid = band_functions(g, c, 12)
    for j, (lo, hi) in enumerate(grid.bands):
        assert np.all((grid.values[:, j] >= lo) & (grid.values[:, j] <= hi))
    assert dispersion_residual(grid, dispersion(g, c)) < 1e-9
    assert grid.continuity_constant() >= 0


def test_csv_shape(hexagonal):
    c = params_file(hexagonal, "hexagonal_params")
    grid = band_functions(hexagonal, c, 8)
    lines = grid.to_csv().strip().split("\n")
    assert lines[0] == "theta1,theta2,lambda1,lambda2"
    assert len(lines) == 65
