import numpy as np
import pytest

from isofno import darcy, spectral
from isofno.checks import manufactured_errors
from isofno.errors import ShapeError, SolverError
from isofno.grid import D4, apply_group


def _grid(n):
    x = darcy.node_coordinates(n)
    return np.meshgrid(x, x, indexing="ij")


def test_quadratic_solution_is_exact():
    # the 5-point stencil has no truncation error on x(1-x)y(1-y)
    n = 33
    X, Y = _grid(n)
    exact = X * (1 - X) * Y * (1 - Y)
    f = 2 * (X * (1 - X) + Y * (1 - Y))
    u = darcy.solve_darcy(np.ones((n, n)), f, tol=1e-13)
    assert np.abs(u - exact).max() < 1e-12


def test_second_order_convergence():
    errs = manufactured_errors()
    orders = np.log2(errs[:-1] / errs[1:])
    assert orders.min() >= 1.9


def test_zero_forcing():
    a = darcy.threshold_coefficient(darcy.sample_grf(0, 16))
    assert not darcy.solve_darcy(a, 0.0).any()


def test_solution_properties():
    s = darcy.generate_sample(3, 48)
    assert s.u[0].max() == s.u[-1].max() == s.u[:, 0].max() == s.u[:, -1].max() == 0.0
    assert s.u.min() >= -1e-7
    assert 0 < s.u.max() < 0.1
    assert np.all(np.isfinite(s.u))


def test_solver_d4_equivariance():
    tol = 1e-9
    s = darcy.generate_sample(5, 32, tol)
    for g in D4:
        assert np.abs(darcy.solve_darcy(apply_group(g, s.a), 1.0, tol) - apply_group(g, s.u)).max() < 10 * tol


def test_conservation():
    n, tol = 40, 1e-10
    s = darcy.generate_sample(9, n, tol)
    h = 1.0 / (n - 1)
    kx, ky = darcy.face_diffusivities(s.a)
    interior = darcy.apply_operator(kx, ky, s.u, h)[1:-1, 1:-1].sum() * h * h
    outflow = darcy.boundary_outflow(s.a, s.u)
    assert outflow == pytest.approx(interior, rel=1e-12)
    source = (n - 2) ** 2 * h * h
    assert abs(outflow - source) < 10 * tol * source


def test_harmonic_faces():
    kx, ky = darcy.face_diffusivities(np.array([[3.0, 12.0], [12.0, 12.0]]))
    assert kx[0, 0] == pytest.approx(2 * 3 * 12 / 15)
    assert ky[1, 0] == 12.0


def test_solver_failures():
    a = darcy.threshold_coefficient(darcy.sample_grf(1, 32))
    with pytest.raises(SolverError) as err:
        darcy.solve_darcy(a, 1.0, tol=1e-12, max_iter=3)
    assert err.value.iterations == 3 and err.value.residual > 1e-12
    with pytest.raises(ShapeError):
        darcy.solve_darcy(np.ones((4, 5)))
    with pytest.raises(ValueError):
        darcy.solve_darcy(-np.ones((4, 4)))


def test_grf_determinism_and_mean():
    assert np.array_equal(darcy.sample_grf(4, 32), darcy.sample_grf(4, 32))
    assert not np.array_equal(darcy.sample_grf(4, 32), darcy.sample_grf(5, 32))
    n = 64
    for seed in range(100):
        w = darcy.sample_grf(seed, n)
        assert abs(w.mean()) < 3 * w.std() / n


def test_grf_spectral_decay():
    n, tau = 64, 3.0
    k = spectral.signed_frequencies(n)
    kk = np.sqrt(k[:, None] ** 2 + k[None, :] ** 2)
    lo, hi = (kk >= 1) & (kk <= 2), (kk >= 8) & (kk <= 16)
    density = (4 * np.pi**2 * kk**2 + tau**2) ** -2.0
    expected = density[lo].sum() / density[hi].sum()
    e_lo = e_hi = 0.0
    for seed in range(100):
        p = np.abs(spectral.fft2(darcy.sample_grf(seed, n))) ** 2
        e_lo += p[lo].sum()
        e_hi += p[hi].sum()
    assert e_lo / e_hi == pytest.approx(expected, rel=0.2)


def test_threshold():
    assert np.all(darcy.threshold_coefficient(np.ones((3, 3))) == darcy.A_HIGH)
    w = darcy.sample_grf(2, 32)
    a, b = darcy.threshold_coefficient(w), darcy.threshold_coefficient(-w)
    inner = w != 0
    assert np.all((a == darcy.A_HIGH) == (b == darcy.A_LOW))
    assert np.all(a[inner] + b[inner] == darcy.A_HIGH + darcy.A_LOW)


def test_high_fraction():
    frac = np.mean([np.mean(darcy.threshold_coefficient(darcy.sample_grf(s, 64)) == darcy.A_HIGH) for s in range(100)])
    assert abs(frac - 0.5) < 0.05


def test_dataset_seed_schedule():
    ds = darcy.generate_dataset(2, 10, 16)
    again = darcy.generate_dataset(2, 10, 16)
    for s, t, seed in zip(ds, again, (10, 11)):
        single = darcy.generate_sample(seed, 16)
        assert np.array_equal(s.a, single.a) and np.array_equal(s.u, single.u)
        assert np.array_equal(s.u, t.u)
        assert s.u.min() >= -1e-7
    with pytest.raises(ValueError):
        darcy.generate_dataset(0, 0, 16)
