import numpy as np
import pytest

from crapperwaves.crapper import WaveParams, crapper_theta_tau
from crapperwaves.errors import InnerNotConverged
from crapperwaves.kernels import InterfaceCurve
from crapperwaves.residuals import (Packing, Projector, cosine_coeffs, from_cosine, from_sine, gamma_operator,
                                    jacobian, lyapunov_projection, residual, sheet_operator, sine_coeffs,
                                    solvability_functional)
from crapperwaves.solver import crapper_state
from crapperwaves.spectral import SpectralField, derivative, grid, inner_product, reflect

MODES = [
    WaveParams(A=0.3),
    WaveParams(A=0.3, mode="point", vortex_rho0=0.5),
    WaveParams(A=0.3, mode="patch", patch_radius=0.0),
    WaveParams(A=0.3, mode="patch", patch_radius=0.05, fixed_radius=True),
]


@pytest.mark.parametrize("params", MODES, ids=["none", "point", "patch", "patch-fixed"])
def test_crapper_state_is_a_root(params):
    res = residual(crapper_state(0.3, 256), params)
    assert res.norm() <= 1e-9
    assert abs(res.solvability) <= 1e-9


def test_gamma_taylor(rng):
    A, N = 0.3, 128
    params = WaveParams(A=A)
    base = crapper_state(A, N)
    b = rng.standard_normal(8) / np.arange(1, 9) ** 2
    t1 = from_sine(np.concatenate([b, np.zeros(N // 2 - 9)]), N)
    lin = gamma_operator(t1, A).samples
    F0 = residual(base, params).F1.samples
    errs = []
    for eps in (1e-3, 5e-4):
        st = base.with_(theta_A=SpectralField(base.theta_A.samples + eps * t1.samples, "odd"))
        errs.append(np.max(np.abs(residual(st, params).F1.samples - F0 - eps * lin)))
    assert errs[1] / errs[0] == pytest.approx(0.25, abs=0.02)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_gamma_flat(k):
    a = grid(64)
    out = gamma_operator(SpectralField(np.sin(k * a), "odd"), 0.0)
    assert np.max(np.abs(out.samples - (k - 1) * np.cos(k * a))) < 1e-12


@pytest.mark.parametrize("A", [0.2, 0.44])
def test_gamma_translation_mode(A):
    theta_c, _ = crapper_theta_tau(A, 256)
    out = gamma_operator(derivative(theta_c), A)
    assert out.sup() <= 1e-9 * derivative(theta_c).sup()


def test_projection(rng):
    a = grid(128)
    f = SpectralField(sum(rng.standard_normal() * np.cos(k * a) for k in range(6)), "even")
    pf, rest = lyapunov_projection(f, 0.3)
    ppf, _ = lyapunov_projection(pf, 0.3)
    assert np.max(np.abs(ppf.samples - pf.samples)) < 1e-13
    total = inner_product(f, f)
    assert inner_product(pf, pf) + inner_product(rest, rest) == pytest.approx(total, rel=1e-12)
    assert abs(inner_product(pf, rest)) < 1e-12 * total


def test_projector_basis():
    P = Projector(0.3, 64)
    assert np.allclose(P.Q.T @ P.Q, np.eye(P.Q.shape[1]), atol=1e-13)
    assert np.max(np.abs(P.reduce(P.g))) < 1e-13


def test_sheet_operator_linear(crapper_cache, rng):
    _, _, curve, _ = crapper_cache(0.3, 128)
    a = grid(128)
    u = SpectralField(np.cos(a) + 0.3, "even")
    v = SpectralField(np.cos(3 * a), "even")
    s, t = rng.standard_normal(2)
    lhs = sheet_operator(SpectralField(s * u.samples + t * v.samples, "even"), curve).samples
    rhs = s * sheet_operator(u, curve).samples + t * sheet_operator(v, curve).samples
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_sheet_operator_flat():
    a = grid(64)
    curve = InterfaceCurve(-(a + np.pi) - 1j, np.full(64, -1.0 + 0j), complex(-2 * np.pi))
    w = SpectralField(np.cos(2 * a) + 1.0, "even")
    assert np.max(np.abs(sheet_operator(w, curve).samples - w.samples)) < 1e-13


def test_solvability_at_crapper():
    params = WaveParams(A=0.3)
    state = crapper_state(0.3, 128)
    assert abs(solvability_functional(0.0, 0.0, 0.0, state, params)) < 1e-12


def test_solvability_needs_converged_state():
    params = WaveParams(A=0.3)
    state = crapper_state(0.3, 128)
    bumped = state.with_(theta_A=SpectralField(state.theta_A.samples + 1e-3 * np.sin(2 * grid(128)), "odd"))
    with pytest.raises(InnerNotConverged):
        solvability_functional(0.0, 0.0, 0.0, bumped, params)


def test_residual_parity():
    params = WaveParams(A=0.3, mode="point", omega0=0.01, p=0.01, B=0.001)
    state = crapper_state(0.3, 128)
    state = state.with_(theta_A=SpectralField(state.theta_A.samples + 1e-3 * np.sin(3 * grid(128)), "odd"))
    res = residual(state, params)
    for f in (res.F1.samples, res.F2.samples):
        assert np.max(np.abs(f - reflect(f))) < 1e-11


def test_packing_round_trip():
    state = crapper_state(0.3, 64).with_(r=0.05)
    pk = Packing(64, with_r=True)
    x = pk.pack(state)
    assert x.size == pk.size == 31 + 33 + 1
    back = pk.unpack(x, state)
    assert np.allclose(back.theta_A.samples, state.theta_A.samples, atol=1e-15)
    assert np.allclose(back.omega_sheet.samples, state.omega_sheet.samples, atol=1e-15)
    assert back.r == 0.05


def test_coefficient_round_trip(rng):
    b = rng.standard_normal(31)
    a = rng.standard_normal(33)
    assert np.allclose(sine_coeffs(from_sine(b, 64)), b, atol=1e-14)
    assert np.allclose(cosine_coeffs(from_cosine(a, 64)), a, atol=1e-14)


def test_jacobian_blocks():
    A, N = 0.3, 64
    params = WaveParams(A=A)
    state = crapper_state(A, N)
    J_fd = jacobian(state, params, scheme="central")
    J_an = jacobian(state, params, mode="analytic_at_crapper")
    m = N // 2 - 1
    scale = np.max(np.abs(J_fd))
    assert np.max(np.abs(J_an[:m, :m] - J_fd[:m, :m])) < 1e-7 * scale
    assert np.max(np.abs(J_an[:, m:] - J_fd[:, m:])) < 1e-7 * scale
    assert np.max(np.abs(J_an[m:, :m] - J_fd[m:, :m])) < 1e-7 * scale


def test_jacobian_patch_radius_row():
    A, N = 0.3, 64
    params = WaveParams(A=A, mode="patch", patch_radius=0.05)
    state = crapper_state(A, N).with_(r=0.05)
    J_fd = jacobian(state, params, scheme="central")
    J_an = jacobian(state, params, mode="analytic", scheme="central")
    assert J_fd.shape == (N + 1, N + 1)
    assert np.max(np.abs(J_an[-1] - J_fd[-1])) < 1e-7 * np.max(np.abs(J_fd[-1]))


def test_fixed_radius_reports_F3():
    params = WaveParams(A=0.3, mode="patch", patch_radius=0.05, fixed_radius=True)
    res = residual(crapper_state(0.3, 64).with_(r=0.05), params)
    assert res.F3 is None
    assert res.extras["F3_reported"].size == 128
    free = residual(crapper_state(0.3, 64).with_(r=0.05), params.with_(fixed_radius=False))
    assert np.allclose(free.F3, res.extras["F3_reported"])


@pytest.mark.parametrize("anchor", ["vortex", "crest"])
def test_anchor(anchor):
    params = WaveParams(A=0.3, mode="point", omega0=0.01, anchor=anchor)
    res = residual(crapper_state(0.3, 64), params)
    if anchor == "crest":
        assert res.curve.z[0].imag == pytest.approx(-1.0, abs=1e-14)
    else:
        # the vortex sits at the origin, directly below the trough
        assert res.curve.z[32].real == pytest.approx(0.0, abs=1e-14)
        assert res.curve.z[32].imag > 0.0
