"""Interface reconstruction and geometric diagnostics."""

import warnings

import numpy as np

from .errors import DegenerateParametrization
from .spectral import SpectralField, derivative_array, grid

NEAR_TOUCH = 1e-10


def reconstruct_interface(state, params):
    """Integrate dz/dalpha = -exp(-tau + i theta)/W for a (candidate) state."""
    from .residuals import build_curve, interface_fields

    tau, theta, W, _ = interface_fields(state, params)
    return build_curve(state, params, tau, theta, W)


def _upsample_periodic(f, factor):
    """Trigonometric interpolation of periodic samples onto a finer grid."""
    N = f.shape[-1]
    M = N * factor
    F = np.fft.fft(f)
    G = np.zeros(M, dtype=complex)
    h = N // 2
    G[:h] = F[:h]
    G[-h + 1:] = F[-h + 1:]
    G[h] = 0.5 * F[h]
    G[-h] = 0.5 * F[h]
    out = np.fft.ifft(G) * factor
    return out if np.iscomplexobj(f) else out.real


def dense_points(curve, factor=4):
    """Interface samples on a grid ``factor`` times finer (one period)."""
    N = curve.N
    alpha = grid(N)
    slope = curve.period / (2.0 * np.pi)
    periodic = curve.z - slope * (alpha + np.pi)
    fine_alpha = grid(N * factor)
    return _upsample_periodic(periodic, factor) + slope * (fine_alpha + np.pi)


def detect_overhang(curve, factor=8):
    """(flag, measure): x is non-monotone along the interface.

    ``measure`` is the largest excursion of dx/dalpha against the mean
    direction of travel (zero when the profile is a graph).
    """
    dx = _upsample_periodic(np.asarray(curve.dz.real), factor)
    direction = np.sign(curve.period.real) or -1.0
    against = -direction * dx
    measure = float(max(0.0, np.max(against)))
    return bool(measure > 0.0 and np.min(against) < 0.0), measure


def _orient(a, b, c):
    return (b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real)


def detect_self_intersection(curve, factor=4):
    """True iff two non-adjacent segments of the (refined) polyline cross.

    The central period is tested against itself and its two neighbouring
    copies. Near contacts below 1e-10 raise a warning instead.
    """
    pts = dense_points(curve, factor) if factor > 1 else np.asarray(curve.z)
    n = pts.size
    P = curve.period
    line = np.concatenate([pts - P, pts, pts + P, [pts[0] + 2 * P]])
    a, b = line[:-1], line[1:]
    gi = np.arange(n, 2 * n)
    gj = np.arange(3 * n)
    A1, B1 = a[gi][:, None], b[gi][:, None]
    A2, B2 = a[gj][None, :], b[gj][None, :]
    d1 = _orient(A1, B1, A2)
    d2 = _orient(A1, B1, B2)
    d3 = _orient(A2, B2, A1)
    d4 = _orient(A2, B2, B1)
    far = np.abs(gi[:, None] - gj[None, :]) > 1
    cross = (d1 * d2 < 0) & (d3 * d4 < 0) & far
    scale = np.abs(B1 - A1) * np.abs(B2 - A2)
    strict = cross & (np.minimum(np.abs(d1), np.abs(d2)) > NEAR_TOUCH * scale) \
        & (np.minimum(np.abs(d3), np.abs(d4)) > NEAR_TOUCH * scale)
    if np.any(cross & ~strict):
        warnings.warn("interface segments touch to within 1e-10", RuntimeWarning)
    return bool(np.any(strict))


def curvature(curve):
    """Signed curvature (x' y'' - y' x'')/|z'|^3 from spectral derivatives."""
    dz = np.asarray(curve.dz)
    speed = np.abs(dz)
    if np.min(speed) < 1e-12:
        raise DegenerateParametrization("|dz/dalpha| vanishes at a node")
    d2z = derivative_array(dz.real) + 1j * derivative_array(dz.imag)
    K = (dz.real * d2z.imag - dz.imag * d2z.real) / speed ** 3
    return SpectralField(K, "none")


def steepness(curve):
    """Crest-to-trough height over horizontal period length."""
    y = curve.y
    return float((np.max(y) - np.min(y)) / abs(curve.period))
