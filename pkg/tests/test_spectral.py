import numpy as np
import pytest

from crapperwaves.crapper import crapper_theta_tau
from crapperwaves.errors import GridMismatch, NonZeroMean, OutOfDomain
from crapperwaves.spectral import (SpectralField, antiderivative_from, derivative, disk_extension_eval,
                                   grid, harmonic_extension, hilbert, inner_product)

N = 128


def field(func, parity="none", n=N):
    return SpectralField.from_function(func, n, parity)


def test_grid_places_symmetry_points_on_nodes():
    a = grid(N)
    assert a[0] == -np.pi
    assert a[N // 2] == 0.0


@pytest.mark.parametrize("n", [32, 100, 96])
def test_grid_size_must_be_power_of_two(n):
    with pytest.raises(ValueError):
        SpectralField(np.zeros(n))


def test_hilbert_of_sine_is_minus_cosine():
    out = hilbert(field(np.sin, "odd"))
    assert out.parity == "even"
    assert np.max(np.abs(out.samples + np.cos(grid(N)))) < 1e-13


def test_hilbert_kills_constants():
    assert hilbert(field(lambda a: np.ones_like(a))).sup() < 1e-15


def test_hilbert_squared_is_minus_identity_off_mean():
    f = field(lambda a: np.cos(3 * a) + 2.0, "even")
    assert np.max(np.abs(hilbert(hilbert(f)).samples + np.cos(3 * grid(N)))) < 1e-13


def test_hilbert_matches_crapper_pair():
    theta, tau = crapper_theta_tau(0.3, 256)
    assert np.max(np.abs(hilbert(theta).samples - tau.samples)) < 1e-11


def test_derivative_examples():
    out = derivative(field(lambda a: np.sin(2 * a), "odd"))
    assert out.parity == "even"
    assert np.max(np.abs(out.samples - 2 * np.cos(2 * grid(N)))) < 1e-12
    assert derivative(field(lambda a: 0 * a + 5.0)).sup() < 1e-13


@pytest.mark.parametrize("func,expected", [
    (np.cos, np.sin),
    (np.sin, lambda a: -np.cos(a) - 1.0),
])
def test_antiderivative_from_minus_pi(func, expected):
    out = antiderivative_from(field(func))
    assert abs(out.samples[0]) < 1e-15
    assert np.max(np.abs(out.samples - expected(grid(N)))) < 1e-12


def test_antiderivative_rejects_nonzero_mean():
    with pytest.raises(NonZeroMean):
        antiderivative_from(field(lambda a: 1.0 + np.cos(a)))


def test_derivative_undoes_antiderivative():
    f = field(np.sin, "odd")
    assert np.max(np.abs(derivative(antiderivative_from(f)).samples - f.samples)) < 1e-12


def test_antiderivative_of_crapper_integrand_against_quadrature():
    A = 0.2
    theta, tau = crapper_theta_tau(A, 256)
    f = SpectralField(np.exp(-tau.samples) * np.sin(theta.samples), "odd")
    F = antiderivative_from(f)
    # oracle: adaptive quadrature of the closed-form integrand
    from scipy.integrate import quad

    def integrand(a):
        m = (1 + A * np.exp(1j * a)) / (1 - A * np.exp(1j * a))
        return np.exp(-2 * np.log(abs(m))) * np.sin(-2 * np.angle(m))

    a = F.alpha
    for j in range(0, 256, 13):
        ref = quad(integrand, -np.pi, a[j], epsabs=1e-13)[0]
        assert abs(F.samples[j] - ref) < 1e-11
    assert np.max(np.abs(F.samples - F.samples[::-1][np.r_[255, 0:255]])) < 1e-12
    assert abs(F.samples[0]) < 1e-14


def test_disk_extension_single_mode():
    assert disk_extension_eval(field(np.cos, "even"), 0.5, 0.0) == pytest.approx(0.5, abs=1e-14)


def test_disk_extension_of_crapper_tau():
    _, tau = crapper_theta_tau(0.3, 256)
    assert disk_extension_eval(tau, 0.5, 0.0) == pytest.approx(2 * np.log(1.15 / 0.85), abs=1e-13)


@pytest.mark.parametrize("kmax", [1, 4, 8])
def test_disk_extension_near_boundary(kmax):
    # geometric tail bound: |f(a) - Pf(rho, a)| <= (1 - rho^kmax) sum |c_k|
    amp = 1.0 / np.arange(1, kmax + 1)
    f = field(lambda a: sum(c * np.cos(k * a + k) for k, c in enumerate(amp, 1)))
    a = np.linspace(-3, 3, 7)
    rho = 0.99
    exact = sum(c * np.cos(k * a + k) for k, c in enumerate(amp, 1))
    err = np.max(np.abs(disk_extension_eval(f, rho, a) - exact))
    assert err <= (1 - rho ** kmax) * amp.sum() + 1e-14


@pytest.mark.parametrize("rho", [0.0, 1.0, -0.5, 1.5])
def test_disk_extension_domain(rho):
    with pytest.raises(OutOfDomain):
        disk_extension_eval(field(np.cos), rho, 0.0)


def test_harmonic_extension_derivatives_match_closed_form():
    f = field(lambda a: np.sin(3 * a), "odd")
    a, psi = 0.4, -0.3
    assert harmonic_extension(f.samples, a, psi, d_alpha=1) == pytest.approx(3 * np.exp(3 * psi) * np.cos(3 * a))
    assert harmonic_extension(f.samples, a, psi, d_psi=1) == pytest.approx(3 * np.exp(3 * psi) * np.sin(3 * a))


@pytest.mark.parametrize("f,g,expected", [
    (np.sin, np.sin, np.pi),
    (np.sin, np.cos, 0.0),
    (lambda a: 0 * a + 1, lambda a: 0 * a + 1, 2 * np.pi),
])
def test_inner_product_examples(f, g, expected):
    assert inner_product(field(f), field(g)) == pytest.approx(expected, abs=1e-13)


def test_inner_product_grid_mismatch():
    with pytest.raises(GridMismatch):
        inner_product(field(np.sin), field(np.sin, n=256))


def test_coefficients_are_true_fourier_coefficients():
    f = field(lambda a: 3 * np.cos(2 * a) + np.sin(a))
    c = f.coeffs
    assert c[2] == pytest.approx(1.5)
    assert c[1] == pytest.approx(-0.5j)


def test_parity_symmetrization():
    f = SpectralField(np.cos(grid(N)) + np.sin(grid(N)), "even")
    assert np.max(np.abs(f.samples - np.cos(grid(N)))) < 1e-15
