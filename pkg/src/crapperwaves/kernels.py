"""Boundary-integral kernels: Birkhoff-Rott, point vortex, vortex patch.

Points of the plane are handled as complex numbers z = x + iy. A velocity
(u, v) induced by a vortex at z' is (y - y', -(x - x')) / (2 pi |z - z'|^2),
i.e. u - iv = i / (2 pi (z - z')). Periodic images with horizontal shift P
are summed with the identity sum_n 1/(d + nP) = (pi/P) cot(pi d/P).
"""

from dataclasses import dataclass

import numpy as np

from .errors import CurvesTooClose, DegeneratePatch, OriginOnCurve, SelfIntersecting
from .spectral import SpectralField, antiderivative_array, grid

CONTACT_TOL = 1e-8


@dataclass(frozen=True)
class InterfaceCurve:
    """Sampled interface z(alpha_j) with z(alpha + 2pi) = z(alpha) + period."""

    z: np.ndarray
    dz: np.ndarray
    period: complex

    @property
    def N(self):
        return self.z.size

    @property
    def alpha(self):
        return grid(self.N)

    @property
    def x(self):
        return self.z.real

    @property
    def y(self):
        return self.z.imag

    def translated(self, shift):
        return InterfaceCurve(self.z + shift, self.dz, self.period)

    def closed(self):
        """Samples over [-pi, pi] including the repeated end point."""
        return np.append(self.z, self.z[0] + self.period)

    def symmetry_error(self):
        from .spectral import reflect

        ey = np.max(np.abs(self.y - reflect(self.y)))
        # the node alpha = -pi is its own mirror only up to the period shift
        ex = max(np.max(np.abs((self.x + reflect(self.x))[1:])),
                 abs(2 * self.x[0] + self.period.real))
        return float(max(ex, ey))


def curve_from_derivative(dz, y_at_pi=None, y_at_zero=None):
    """Integrate sampled dz/dalpha into a periodic curve centred at x(0) = 0."""
    dz = np.asarray(dz, dtype=complex)
    N = dz.size
    alpha = grid(N)
    m = np.mean(dz)
    fluct = dz - m
    F = antiderivative_array(np.stack([fluct.real, fluct.imag]))
    z = m * (alpha + np.pi) + F[0] + 1j * F[1]
    z = z - z[N // 2].real
    if y_at_zero is not None:
        z = z + 1j * (y_at_zero - z[N // 2].imag)
    elif y_at_pi is not None:
        z = z + 1j * (y_at_pi - z[0].imag)
    return InterfaceCurve(z, dz, complex(2.0 * np.pi * m))


def _kernel_scale(period):
    P = period.real if abs(period.imag) < 1e-12 * max(1.0, abs(period)) else period
    return P


def pairwise_gaps(curve):
    """Minimum distance between non-adjacent nodes, period images included."""
    z = curve.z
    N = z.size
    d = z[:, None] - z[None, :]
    P = curve.period
    gap = np.minimum(np.abs(d), np.minimum(np.abs(d + P), np.abs(d - P)))
    idx = np.arange(N)
    off = np.abs(idx[:, None] - idx[None, :])
    off = np.minimum(off, N - off)
    gap[off <= 1] = np.inf
    return float(np.min(gap))


def birkhoff_rott_matrix(curve, check=True):
    """Complex matrix M with (u - iv)(alpha_j) = sum_j' M[j, j'] w(alpha_j').

    Alternating-point trapezoid rule: a target at an even node sees only odd
    sources and vice versa, each with weight 2h.
    """
    z = curve.z
    N = z.size
    if check and pairwise_gaps(curve) < CONTACT_TOL:
        raise SelfIntersecting("interface nodes come closer than the contact tolerance")
    P = _kernel_scale(curve.period)
    idx = np.arange(N)
    odd = (idx[:, None] - idx[None, :]) % 2 == 1
    d = z[:, None] - z[None, :]
    M = np.zeros((N, N), dtype=complex)
    M[odd] = (1j / (2.0 * np.pi)) * (np.pi / P) / np.tan(np.pi * d[odd] / P)
    return M * (4.0 * np.pi / N)


def birkhoff_rott(curve, strength):
    """Velocity pairs (u, v) of the periodized Birkhoff-Rott integral."""
    w = np.asarray(getattr(strength, "samples", strength), dtype=float)
    if w.size != curve.N:
        from .errors import GridMismatch

        raise GridMismatch("strength and curve use different grids")
    conj_vel = birkhoff_rott_matrix(curve) @ w
    return np.column_stack([conj_vel.real, -conj_vel.imag])


def sheet_matrix(curve):
    """Real matrix of w -> 2 BR(z, w) . dz/dalpha."""
    M = birkhoff_rott_matrix(curve)
    return 2.0 * np.real(M * curve.dz[:, None])


def tangential(vel, dz):
    """Dot product of velocity pairs with dz/dalpha."""
    return vel[:, 0] * dz.real + vel[:, 1] * dz.imag


def point_vortex_velocity(curve, omega0, periodic=True, center=0.0):
    """Velocity of a vortex of strength omega0 at ``center``.

    With ``periodic`` the whole row of images spaced by the curve period is
    included; otherwise the planar kernel (omega0/2pi)(y, -x)/|z|^2 is used.
    """
    z = np.asarray(curve.z if hasattr(curve, "z") else curve, dtype=complex) - center
    if np.min(np.abs(z)) < CONTACT_TOL:
        raise OriginOnCurve("vortex lies on the interface")
    if omega0 == 0.0:
        return np.zeros((z.size, 2))
    if periodic:
        P = _kernel_scale(curve.period)
        conj_vel = 1j * omega0 / (2.0 * np.pi) * (np.pi / P) / np.tan(np.pi * z / P)
    else:
        conj_vel = 1j * omega0 / (2.0 * np.pi * z)
    return np.column_stack([conj_vel.real, -conj_vel.imag])


# ---------------------------------------------------------------- vortex patch

def _bcotb(b):
    """b cot b and its derivative, with the removable point b = 0 handled."""
    b = np.asarray(b, dtype=float)
    small = np.abs(b) < 1e-3
    safe = np.where(small, 1.0, b)
    c = np.where(small, 1.0 - b ** 2 / 3.0 - b ** 4 / 45.0, safe / np.tan(safe))
    dc = np.where(small, -2.0 * b / 3.0 - 4.0 * b ** 3 / 45.0,
                  (np.sin(safe) * np.cos(safe) - safe) / np.sin(safe) ** 2)
    return c, dc


def gamma_tilde(alpha):
    """Unit patch curve and its derivative (complex samples).

    Middle branch (a cot a, a) for |a| <= pi/2; the outer branches are the
    mirror image (-b cot b, -b) with b = a -+ pi. The region enclosed is
    |x| <= y cot y, |y| <= pi/2, traversed counterclockwise.
    """
    alpha = np.asarray(alpha, dtype=float)
    mid = np.abs(alpha) <= np.pi / 2
    beta = np.where(alpha < 0, alpha + np.pi, alpha - np.pi)
    b = np.where(mid, alpha, beta)
    c, dc = _bcotb(b)
    sign = np.where(mid, 1.0, -1.0)
    g = sign * (c + 1j * b)
    dg = sign * (dc + 1j)
    return g, dg


@dataclass(frozen=True)
class PatchBoundary:
    """Patch curve gamma = center + r * gamma_tilde on an N-point grid."""

    gamma: np.ndarray
    dgamma: np.ndarray
    r: float
    center: complex = 0j
    shape: np.ndarray = None
    dshape: np.ndarray = None

    @property
    def N(self):
        return self.gamma.size

    @property
    def alpha(self):
        return grid(self.N)


def patch_boundary(r, N=128, center=0j):
    g, dg = gamma_tilde(grid(N))
    return PatchBoundary(center + r * g, r * dg, float(r), complex(center), g, dg)


def circle_boundary(R, N=128, center=0j):
    """Circle of radius R with the same data layout (a test adapter)."""
    a = grid(N)
    g, dg = np.exp(1j * a), 1j * np.exp(1j * a)
    return PatchBoundary(center + R * g, R * dg, float(R), complex(center), g, dg)


PATCH_GAP = 1e-6


def _periodic_log(d, period):
    """log|d| summed over periodic images (up to an additive constant)."""
    if period is None:
        return np.log(np.abs(d))
    k = 2.0 * np.pi / abs(period.real)
    a, b = k * d.real, k * d.imag
    return 0.5 * np.log(4.0 * (np.sinh(0.5 * b) ** 2 + np.sin(0.5 * a) ** 2))


def _periodic_log_remainder(d, period):
    """periodic_log(d) - log|k d|, smooth through d = 0."""
    if period is None:
        return np.zeros(np.shape(d))
    k = 2.0 * np.pi / abs(period.real)
    a, b = k * d.real, k * d.imag
    rho2 = a * a + b * b
    small = rho2 < 1e-6
    safe = np.where(small, 1.0, rho2)
    arg = np.where(small, 1.0, 4.0 * (np.sinh(0.5 * b) ** 2 + np.sin(0.5 * a) ** 2) / safe)
    direct = 0.5 * np.log(arg)
    series = (b * b - a * a) / 24.0
    return np.where(small, series, direct)


def patch_velocity_on_curve(target, patch, omega0, period=None):
    """(omega0/2pi) int log|z - gamma'| dgamma' at every target point."""
    z = np.asarray(target.z if hasattr(target, "z") else target, dtype=complex)
    if omega0 == 0.0 or patch.r == 0.0:
        return np.zeros((z.size, 2))
    d = z[:, None] - patch.gamma[None, :]
    if np.min(np.abs(d)) < PATCH_GAP:
        raise CurvesTooClose("patch boundary touches the target curve")
    h = 2.0 * np.pi / patch.N
    # the closed integral of dgamma vanishes; subtracting the centre value
    # keeps the corner quadrature error at O(r^2) instead of O(r)
    L = _periodic_log(d, period) - _periodic_log(z - patch.center, period)[:, None]
    vec = (L @ patch.dgamma) * h * omega0 / (2.0 * np.pi)
    return np.column_stack([vec.real, vec.imag])


def _log_self_integral(shape, dshape):
    """P.V. int log|g(a) - g(a')| dg(a') da' over a closed curve (complex result).

    log|g - g'| is split into log(|g - g'| / |2 sin((a - a')/2)|), integrated
    by the trapezoid rule, plus log|2 sin((a - a')/2)|, integrated exactly
    through its Fourier multiplier -pi/|k|.
    """
    N = shape.size
    a = grid(N)
    diff = a[:, None] - a[None, :]
    dist = np.abs(shape[:, None] - shape[None, :])
    s = np.abs(2.0 * np.sin(0.5 * diff))
    np.fill_diagonal(s, 1.0)
    np.fill_diagonal(dist, 1.0)
    smooth = np.log(dist / s)
    np.fill_diagonal(smooth, np.log(np.abs(dshape)))
    h = 2.0 * np.pi / N
    out = (smooth @ dshape) * h
    k = np.abs(np.fft.fftfreq(N, d=1.0 / N))
    mult = np.zeros(N)
    mult[k > 0] = -np.pi / k[k > 0]
    for part, unit in ((dshape.real, 1.0), (dshape.imag, 1j)):
        out = out + unit * np.real(np.fft.ifft(np.fft.fft(part) * mult))
    return out


def sheet_velocity_at(points, curve, strength):
    """Velocity pairs induced by the sheet at points off the interface."""
    p = np.asarray(points, dtype=complex)
    w = np.asarray(getattr(strength, "samples", strength), dtype=float)
    d = p[:, None] - curve.z[None, :]
    P = _kernel_scale(curve.period)
    h = 2.0 * np.pi / curve.N
    conj_vel = (1j / (2.0 * np.pi)) * (np.pi / P) * ((1.0 / np.tan(np.pi * d / P)) @ w) * h
    return np.column_stack([conj_vel.real, -conj_vel.imag])


def _normal_component(vel, dg):
    """vel . (dg)^perp with (a, b)^perp = (b, -a)."""
    return vel[:, 0] * dg.imag - vel[:, 1] * dg.real


def patch_self_velocity(patch, curve, strength, omega0, period=None):
    """Normal velocity on the patch boundary: sheet term plus patch self term."""
    if patch.r == 0.0:
        raise DegeneratePatch("the self term needs a patch of positive radius")
    d = patch.gamma[:, None] - curve.z[None, :]
    if np.min(np.abs(np.concatenate([d.ravel(), (d + curve.period).ravel(),
                                     (d - curve.period).ravel()]))) < PATCH_GAP:
        raise CurvesTooClose("patch boundary touches the interface")
    out = _normal_component(sheet_velocity_at(patch.gamma, curve, strength), patch.dgamma)
    if omega0 != 0.0:
        shape, dshape = patch.shape, patch.dshape
        if shape is None:
            shape, dshape = (patch.gamma - patch.center) / patch.r, patch.dgamma / patch.r
        vec = patch.r * _log_self_integral(shape, dshape)
        if period is not None:
            h = 2.0 * np.pi / patch.N
            dd = patch.gamma[:, None] - patch.gamma[None, :]
            vec = vec + (_periodic_log_remainder(dd, period) @ patch.dgamma) * h
        vel = omega0 / (2.0 * np.pi) * np.column_stack([vec.real, vec.imag])
        out = out + _normal_component(vel, patch.dgamma)
    return SpectralField(out, "none")


def d_r_F3(curve, strength, N=128, center=0j, periodic=True):
    """D_r F3 at r = 0: the sheet velocity at the patch centre against (d gamma~)^perp.

    With ``periodic=False`` the planar kernel is used, which gives
    -(d gamma~_2 / 2 pi) int Z_2 / |Z|^2 w da, Z = z - center, plus the
    vertical-velocity term (zero for symmetric data).
    """
    _, dg = gamma_tilde(grid(N))
    w = np.asarray(getattr(strength, "samples", strength), dtype=float)
    if periodic:
        vel = sheet_velocity_at(np.array([center]), curve, w)[0]
    else:
        Z = curve.z - center
        h = 2.0 * np.pi / curve.N
        vel = np.array([-np.sum(Z.imag / np.abs(Z) ** 2 * w) * h, np.sum(Z.real / np.abs(Z) ** 2 * w) * h])
        vel /= 2.0 * np.pi
    return SpectralField(vel[0] * dg.imag - vel[1] * dg.real, "none")
