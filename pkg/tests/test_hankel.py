"""Tests for grids, the Hankel transform, and the radial operator A_nu."""

import math
import os

import numpy as np
import pytest

from invsq.errors import DomainError, GridError, TruncationWarning
from invsq.hankel import (
    PHYSICAL,
    SPECTRAL,
    ModeField,
    PotentialSetup,
    RadialGrid,
    apply_a_nu,
    export_grid_csv,
    export_kernel,
    grid_inner,
    grid_norm,
    hankel_transform,
    import_grid_csv,
    import_kernel,
    make_grid,
    order_of_mode,
)


@pytest.fixture(scope="module")
def grid():
    return make_grid(12.0, 512, "CompositeGaussLegendre")


def gauss_mode(setup, nu, grid):
    """Self-reciprocal profile r^(nu-(n-2)/2) exp(-r^2/2)."""
    r = grid.nodes
    vals = r ** (nu - (setup.n - 2) / 2.0) * np.exp(-r * r / 2.0)
    return ModeField(k=0, ell=1, space=PHYSICAL, values=vals, grid=grid)


def test_setup_validation():
    PotentialSetup(3, -0.24)
    with pytest.raises(DomainError):
        PotentialSetup(2, -0.5)      # needs a > 0 in dimension 2
    with pytest.raises(DomainError):
        PotentialSetup(3, -0.25)     # boundary is excluded (strict)
    with pytest.raises(DomainError):
        PotentialSetup(1, 0.0)


def test_order_of_mode_examples():
    assert order_of_mode(PotentialSetup(3, 0.0), 0) == pytest.approx(0.5, abs=1e-15)
    assert order_of_mode(PotentialSetup(2, 1.0), 0) == pytest.approx(1.0, abs=1e-15)
    assert order_of_mode(PotentialSetup(4, -0.75), 0) == pytest.approx(0.5, abs=1e-15)


def test_order_of_mode_monotone_and_asymptotic():
    setup = PotentialSetup(3, 1.7)
    nus = [order_of_mode(setup, k) for k in range(0, 64)]
    assert np.all(np.diff(nus) > 0.0)
    for k in range(20, 64):
        ratio = nus[k] / setup.mu(k)
        assert 1.0 - abs(setup.a) / k**2 <= ratio <= 1.0 + abs(setup.a) / k**2


def test_make_grid_uniform_midpoints():
    g = make_grid(1.0, 64, "Uniform")
    assert np.allclose(g.nodes, (np.arange(64) + 0.5) / 64.0, rtol=0, atol=1e-15)
    assert np.allclose(g.weights, 1.0 / 64.0, rtol=0, atol=1e-18)


def test_make_grid_gauss_polynomial_exactness():
    g = make_grid(10.0, 512, "CompositeGaussLegendre")
    val = float(np.sum(g.weights * g.nodes ** 2))
    assert abs(val - 1000.0 / 3.0) < 1e-12 * 1000.0 / 3.0


def test_make_grid_gauss_error_function_oracle():
    g = make_grid(10.0, 512, "CompositeGaussLegendre")
    val = float(np.sum(g.weights * np.exp(-g.nodes ** 2)))
    assert abs(val - math.sqrt(math.pi) / 2.0) < 1e-10


def test_make_grid_odd_count():
    g = make_grid(5.0, 100, "gauss")
    assert g.q == 100
    assert abs(np.sum(g.weights) - 5.0) < 1e-12 * 5.0


def test_grid_invariants():
    with pytest.raises(GridError):
        RadialGrid(nodes=np.linspace(0.0, 1.0, 64), weights=np.full(64, 1 / 64.0),
                   r_max=1.0, scheme="Uniform")   # includes the origin
    with pytest.raises(DomainError):
        make_grid(1.0, 32, "Uniform")


def test_transform_zero_and_space_flip(grid):
    setup = PotentialSetup(3, 1.0)
    f = ModeField(k=0, ell=1, space=PHYSICAL,
                  values=np.zeros(grid.q, dtype=complex), grid=grid)
    g = hankel_transform(setup, setup.nu(0), f)
    assert g.space == SPECTRAL
    assert np.all(g.values == 0.0)


@pytest.mark.parametrize("n,a", [(3, 0.0), (3, 1.0), (2, 1.0), (4, -0.75)])
def test_gaussian_self_reciprocal(n, a, grid):
    setup = PotentialSetup(n, a)
    nu = setup.nu(0)
    f = gauss_mode(setup, nu, grid)
    g = hankel_transform(setup, nu, f)
    sel = (grid.nodes >= 0.1) & (grid.nodes <= 4.0)
    rho = grid.nodes[sel]
    expected = rho ** (nu - (n - 2) / 2.0) * np.exp(-rho * rho / 2.0)
    rel = np.abs(g.values[sel] - expected) / np.abs(expected)
    assert np.max(rel) < 1e-7


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.7, 10.0])
def test_involution_and_isometry(nu, grid):
    # profile vanishes fast at the origin and is spectrally contained in the
    # grid for every tested order, so the round trip is meaningful at 1e-6
    setup = PotentialSetup(3, 1.0)
    r = grid.nodes
    f = ModeField(k=0, ell=1, space=PHYSICAL,
                  values=(r / 3.0) ** 8 * np.exp(-((r - 3.0) / 1.3) ** 2) * (1.0 + 0.3j),
                  grid=grid)
    g = hankel_transform(setup, nu, f)
    back = hankel_transform(setup, nu, g)
    nrm = grid_norm(grid, setup.n, f.values)
    assert grid_norm(grid, setup.n, back.values - f.values) / nrm < 1e-6
    assert abs(grid_norm(grid, setup.n, g.values) / nrm - 1.0) < 1e-6
    assert back.space == PHYSICAL


def test_self_adjointness(grid):
    setup = PotentialSetup(3, 1.0)
    rng = np.random.default_rng(5)
    r = grid.nodes
    envelope = np.exp(-((r - 4.0) / 1.2) ** 2)
    for nu in [0.5, 2.7]:
        f = ModeField(k=0, ell=1, space=PHYSICAL,
                      values=envelope * (rng.normal(size=grid.q) + 1j * rng.normal(size=grid.q)),
                      grid=grid)
        g = ModeField(k=0, ell=1, space=PHYSICAL,
                      values=envelope * (rng.normal(size=grid.q) + 1j * rng.normal(size=grid.q)),
                      grid=grid)
        lhs = grid_inner(grid, setup.n, hankel_transform(setup, nu, f).values, g.values)
        rhs = grid_inner(grid, setup.n, f.values, hankel_transform(setup, nu, g).values)
        assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_eigen_relation():
    # H_nu(A_nu f) = rho^2 H_nu f within 5e-4 relative on rho in [0.2, 3];
    # uniform spacing keeps the difference stencil second order pointwise
    setup = PotentialSetup(3, 1.0)
    ugrid = make_grid(12.0, 1024, "Uniform")
    nu = setup.nu(0)
    f = gauss_mode(setup, nu, ugrid)
    lhs = hankel_transform(setup, nu, apply_a_nu(setup, nu, f)).values
    rhs = ugrid.nodes ** 2 * hankel_transform(setup, nu, f).values
    sel = (ugrid.nodes >= 0.2) & (ugrid.nodes <= 3.0)
    rel = np.abs(lhs[sel] - rhs[sel]) / np.abs(rhs[sel])
    assert np.max(rel) < 5e-4


def test_apply_a_nu_zero_and_errors(grid):
    setup = PotentialSetup(3, 0.0)
    z = ModeField(k=0, ell=1, space=PHYSICAL,
                  values=np.zeros(grid.q, dtype=complex), grid=grid)
    assert np.all(apply_a_nu(setup, 0.5, z).values == 0.0)
    with pytest.raises(GridError):
        small = make_grid(4.0, 64, "Uniform")
        apply_a_nu(setup, 0.5, ModeField(k=0, ell=1, space=PHYSICAL,
                                         values=np.zeros(64, dtype=complex), grid=small))
    with pytest.raises(DomainError):
        apply_a_nu(setup, 0.5, ModeField(k=0, ell=1, space=SPECTRAL,
                                         values=np.zeros(grid.q, dtype=complex), grid=grid))


def test_sinc_is_fixed_by_a_nu():
    # in 3 dimensions with a = 0, -Laplacian of sin(r)/r equals sin(r)/r
    setup = PotentialSetup(3, 0.0)
    ugrid = make_grid(12.0, 512, "Uniform")
    f = ModeField(k=0, ell=1, space=PHYSICAL,
                  values=np.sin(ugrid.nodes) / ugrid.nodes, grid=ugrid)
    out = apply_a_nu(setup, 0.5, f)
    interior = slice(2, ugrid.q - 2)
    err = np.abs(out.values[interior] - f.values[interior])
    assert np.max(err) < 1e-4


def test_tail_mass_warning(grid):
    setup = PotentialSetup(3, 1.0)
    vals = np.exp(-((grid.nodes - 11.5) / 0.4) ** 2).astype(complex)
    f = ModeField(k=0, ell=1, space=PHYSICAL, values=vals, grid=grid)
    with pytest.warns(TruncationWarning):
        hankel_transform(setup, setup.nu(0), f)


def test_grid_csv_round_trip(tmp_path, grid):
    path = os.path.join(tmp_path, "grid.csv")
    export_grid_csv(grid, path)
    back = import_grid_csv(path)
    assert np.array_equal(back.nodes, grid.nodes)
    assert np.array_equal(back.weights, grid.weights)
    assert back.r_max == grid.r_max and back.scheme == grid.scheme


def test_kernel_round_trip(tmp_path, grid):
    setup = PotentialSetup(3, 1.0)
    path = os.path.join(tmp_path, "kernel.npz")
    export_kernel(setup, setup.nu(0), grid, path)
    K, g2, nu = import_kernel(path)
    assert nu == setup.nu(0)
    assert K.shape == (grid.q, grid.q)
    assert np.array_equal(g2.nodes, grid.nodes)
