import numpy as np
import pytest

from crapperwaves.errors import CurvesTooClose, DegeneratePatch, OriginOnCurve, SelfIntersecting
from crapperwaves.kernels import (InterfaceCurve, _log_self_integral, birkhoff_rott, circle_boundary,
                                  d_r_F3, gamma_tilde, patch_boundary, patch_self_velocity,
                                  patch_velocity_on_curve, point_vortex_velocity, sheet_velocity_at,
                                  tangential)
from crapperwaves.spectral import grid


def flat_curve(N, y=-1.0):
    a = grid(N)
    return InterfaceCurve(-(a + np.pi) + 1j * y, np.full(N, -1.0 + 0j), complex(-2 * np.pi))


def test_flat_sheet_has_no_velocity():
    curve = flat_curve(64)
    vel = birkhoff_rott(curve, np.full(64, 0.7))
    assert np.max(np.abs(vel)) < 1e-13


@pytest.mark.parametrize("A", [0.2, 0.3])
def test_grid_refinement(crapper_cache, A):
    _, _, c1, w1 = crapper_cache(A, 128)
    _, _, c2, w2 = crapper_cache(A, 256)
    v1 = birkhoff_rott(c1, w1)
    v2 = birkhoff_rott(c2, w2)[::2]
    assert np.max(np.abs(v1 - v2)) < 1e-10


def test_common_shift_permutes_output(crapper_cache):
    _, _, curve, w = crapper_cache(0.3, 128)
    vel = birkhoff_rott(curve, w)
    shifted = InterfaceCurve(np.roll(curve.z, 3), np.roll(curve.dz, 3), curve.period)
    assert np.allclose(birkhoff_rott(shifted, np.roll(w.samples, 3)), np.roll(vel, 3, axis=0), atol=1e-14)


def test_tangential_velocity_even(crapper_cache):
    _, _, curve, w = crapper_cache(0.3, 128)
    t = tangential(birkhoff_rott(curve, w), curve.dz)
    mirror = np.roll(t[::-1], 1)
    assert np.max(np.abs(t - mirror)) < 1e-12


def test_off_curve_velocity_matches_image_sum(crapper_cache):
    _, _, curve, w = crapper_cache(0.2, 128)
    pts = np.array([0.3 - 2.5j, -1.0 - 3.0j])
    periodic = sheet_velocity_at(pts, curve, w)
    h = 2 * np.pi / curve.N
    n = np.arange(-20000, 20001)[:, None, None]
    d = pts[None, :, None] - (curve.z[None, None, :] + n * curve.period)
    total = (1j / (2 * np.pi)) * np.sum(1.0 / d, axis=0) @ w.samples * h
    assert np.allclose(periodic[:, 0] - 1j * periodic[:, 1], total, atol=1e-5)


def test_point_vortex_unit():
    target = InterfaceCurve(np.array([1j]), np.array([1.0 + 0j]), complex(-2 * np.pi))
    vel = point_vortex_velocity(target, 2 * np.pi, periodic=False)
    assert np.allclose(vel, [[1.0, 0.0]], atol=1e-15)
    assert np.all(point_vortex_velocity(target, 0.0) == 0.0)


def test_point_vortex_circulation():
    # positive strength turns clockwise in this convention
    a = grid(400)
    ring = 0.5 * np.exp(-1j * a)
    target = InterfaceCurve(ring, -0.5j * np.exp(-1j * a), complex(-2 * np.pi))
    for periodic in (False, True):
        vel = point_vortex_velocity(target, 0.3, periodic=periodic)
        circ = np.sum(tangential(vel, target.dz)) * 2 * np.pi / a.size
        assert circ == pytest.approx(0.3, rel=1e-12)


def test_vortex_on_curve_rejected():
    curve = flat_curve(32, y=0.0)
    with pytest.raises(OriginOnCurve):
        point_vortex_velocity(curve, 0.1, center=curve.z[5])


def test_coincident_nodes_rejected(crapper_cache):
    _, _, curve, w = crapper_cache(0.2, 64)
    z = curve.z.copy()
    z[10] = z[40]
    with pytest.raises(SelfIntersecting):
        birkhoff_rott(InterfaceCurve(z, curve.dz, curve.period), w)


def test_patch_curve_limits():
    g, _ = gamma_tilde(np.array([0.0, np.pi / 2, -np.pi / 2]))
    assert g[0] == pytest.approx(1.0)
    assert g[1] == pytest.approx(0.5j * np.pi, abs=1e-15)
    assert g[2] == pytest.approx(-0.5j * np.pi, abs=1e-15)
    p = patch_boundary(0.0, 32, center=1.0 - 2.0j)
    assert np.all(p.gamma == 1.0 - 2.0j)


def test_patch_branches_meet():
    eps = 1e-9
    for a in (np.pi / 2, -np.pi / 2):
        lo, _ = gamma_tilde(np.array([a - eps, a + eps]))
        assert abs(lo[0] - lo[1]) < 1e-8
    g, _ = gamma_tilde(np.array([-np.pi, np.pi]))
    assert abs(g[0] - g[1]) < 1e-15


@pytest.mark.parametrize("r", [0.05, 1.0])
def test_patch_area(r):
    p = patch_boundary(r, 1024)
    x, y = p.gamma.real, p.gamma.imag
    area = 0.5 * np.sum(x * p.dgamma.imag - y * p.dgamma.real) * 2 * np.pi / p.N
    assert area == pytest.approx(2 * np.pi * np.log(2) * r * r, rel=1e-5)


def test_patch_derivative():
    a = np.linspace(-3.0, 3.0, 41)
    h = 1e-6
    _, dg = gamma_tilde(a)
    fd = (gamma_tilde(a + h)[0] - gamma_tilde(a - h)[0]) / (2 * h)
    assert np.max(np.abs(dg - fd)) < 1e-7


def test_log_self_integral_circle():
    c = circle_boundary(1.0, 64)
    out = _log_self_integral(c.shape, c.dshape)
    assert np.max(np.abs(out + 1j * np.pi * c.shape)) < 1e-12


def test_circle_self_term_normal_zero():
    a = grid(64)
    far = InterfaceCurve(-(a + np.pi) + 50j, np.full(64, -1.0 + 0j), complex(-2 * np.pi))
    c = circle_boundary(0.3, 64)
    out = patch_self_velocity(c, far, np.zeros(64), 0.01)
    assert np.max(np.abs(out.samples)) < 1e-14


def test_patch_velocity_scaling(crapper_cache):
    _, _, curve, _ = crapper_cache(0.2, 128)
    shifted = curve.translated(-curve.z[64].imag * 1j + 1.2j)
    v = [patch_velocity_on_curve(shifted, patch_boundary(r, 128), 0.01, shifted.period) for r in (0.02, 0.01)]
    ratio = np.max(np.abs(v[1])) / np.max(np.abs(v[0]))
    assert ratio == pytest.approx(0.25, abs=0.01)
    assert np.all(patch_velocity_on_curve(shifted, patch_boundary(0.02), 0.0) == 0.0)


def test_patch_touching_curve():
    curve = flat_curve(64, y=0.0)
    p = patch_boundary(0.5, 64, center=curve.z[20] - 0.5)
    with pytest.raises(CurvesTooClose):
        patch_velocity_on_curve(curve, p, 0.01)


def test_degenerate_patch(crapper_cache):
    _, _, curve, w = crapper_cache(0.2, 128)
    with pytest.raises(DegeneratePatch):
        patch_self_velocity(patch_boundary(0.0), curve, w, 0.01)


def test_d_r_F3_matches_difference(crapper_cache):
    _, _, curve, w = crapper_cache(0.2, 128)
    curve = curve.translated(-curve.z[64].imag * 1j + 1.0j)
    h = 1e-6
    fd = patch_self_velocity(patch_boundary(h, 128), curve, w, 0.0).samples / h
    exact = d_r_F3(curve, w, 128).samples
    assert np.max(np.abs(fd - exact)) <= 1e-5 * np.max(np.abs(exact))
