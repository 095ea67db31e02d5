"""Nonlinear operators F1 (Bernoulli), F2 (tangential kinematics), F3 (patch).

Unknowns: theta_A (odd), the sheet strength w (even), the constant B and,
for a patch, its radius r. The reduced system drops the component of F1
along cos(theta_c), which B controls through the scalar solvability
function f(B) = (cos theta_c, F1).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import elliptic
from .crapper import crapper_theta_tau
from .errors import DegeneratePatch, InnerNotConverged, SingularJacobian
from .kernels import (_kernel_scale, curve_from_derivative, patch_boundary, patch_self_velocity,
                      patch_velocity_on_curve, point_vortex_velocity, sheet_matrix,
                      tangential)
from .spectral import (SpectralField, antiderivative_array, derivative_array,
                       harmonic_extension, hilbert_array, inner_product)


@dataclass(frozen=True)
class SolutionState:
    theta_A: SpectralField
    omega_sheet: SpectralField
    B: float = 0.0
    r: float = None

    @property
    def N(self):
        return self.theta_A.N

    def with_(self, **kw):
        return replace(self, **kw)


@dataclass
class ResidualBundle:
    F1: SpectralField
    F2: SpectralField
    F3: np.ndarray = None
    projected_F1: SpectralField = None
    solvability: float = 0.0
    curve: object = None
    corrections: object = None
    extras: dict = field(default_factory=dict)
    F3_scalar: float = None

    def norm(self):
        """Sup norm of the reduced residual ((I - Pi) F1, F2[, F3]).

        The Nyquist mode of F1 is left out: it is not among the equations
        (theta_A has no Nyquist sine mode to balance it).
        """
        parts = [np.max(np.abs(drop_nyquist(self.projected_F1.samples))), np.max(np.abs(self.F2.samples))]
        if self.F3 is not None:
            parts.append(np.max(np.abs(np.atleast_1d(self.F3))))
        return float(max(parts))


# ---------------------------------------------------------------- coefficients

def drop_nyquist(samples):
    F = np.fft.rfft(samples)
    F[-1] = 0.0
    return np.fft.irfft(F, n=np.shape(samples)[-1])


def _true_coeffs(samples):
    N = samples.size
    F = np.fft.rfft(samples) / N
    k = np.arange(F.size)
    return np.where(k % 2 == 0, F, -F)


def _from_true(c, N):
    k = np.arange(c.size)
    F = np.where(k % 2 == 0, c, -c) * N
    return np.fft.irfft(F, n=N)


def sine_coeffs(f):
    """b_k, k = 1..N/2-1, of an odd field sum b_k sin(k alpha)."""
    s = np.asarray(getattr(f, "samples", f), dtype=float)
    c = _true_coeffs(s)
    return -2.0 * c[1:s.size // 2].imag


def from_sine(b, N):
    c = np.zeros(N // 2 + 1, dtype=complex)
    c[1:N // 2] = -0.5j * np.asarray(b)
    return SpectralField(_from_true(c, N), "odd")


def cosine_coeffs(f):
    """a_k, k = 0..N/2, of an even field a_0 + sum a_k cos(k alpha)."""
    s = np.asarray(getattr(f, "samples", f), dtype=float)
    c = _true_coeffs(s).real
    a = 2.0 * c
    a[0] = c[0]
    a[-1] = c[-1]
    return a


def from_cosine(a, N):
    a = np.asarray(a, dtype=float)
    c = 0.5 * a.astype(complex)
    c[0] = a[0]
    c[-1] = a[-1]
    return SpectralField(_from_true(c, N), "even")


def orthonormal_cos(f):
    """Coordinates of an even field in the L2-orthonormal cosines, k < N/2."""
    a = cosine_coeffs(f)[:-1]
    y = a * np.sqrt(np.pi)
    y[0] = a[0] * np.sqrt(2.0 * np.pi)
    return y


# ---------------------------------------------------------------- linear blocks

def gamma_operator(theta1, A):
    """cosh(H theta_c) H theta1 + q(A) d_alpha theta1."""
    from .crapper import q_of_A

    theta_c, _ = crapper_theta_tau(A, theta1.N)
    t1 = np.asarray(theta1.samples)
    out = np.cosh(hilbert_array(theta_c.samples)) * hilbert_array(t1) + q_of_A(A) * derivative_array(t1)
    return SpectralField(out, "even" if theta1.parity == "odd" else "none")


def sheet_operator(omega1, curve):
    """(A(z) + I) w = 2 BR(z, w) . dz + w."""
    w = np.asarray(omega1.samples)
    return SpectralField(sheet_matrix(curve) @ w + w, omega1.parity)


def lyapunov_projection(f, A):
    """(Pi f, (I - Pi) f) with Pi the L2 projector onto span{cos theta_c}."""
    theta_c, _ = crapper_theta_tau(A, f.N)
    g = SpectralField(np.cos(theta_c.samples), "even")
    coef = inner_product(f, g) / inner_product(g, g)
    pf = SpectralField(coef * g.samples, f.parity)
    return pf, SpectralField(f.samples - pf.samples, f.parity)


class Projector:
    """Orthonormal complement of cos(theta_c) in the cosine coordinates."""

    def __init__(self, A, N):
        theta_c, _ = crapper_theta_tau(A, N)
        self.g = SpectralField(np.cos(theta_c.samples), "even")
        y = orthonormal_cos(self.g)
        y = y / np.linalg.norm(y)
        e0 = np.zeros_like(y)
        e0[0] = 1.0
        v = y + np.sign(y[0] or 1.0) * e0
        R = np.eye(y.size) - 2.0 * np.outer(v, v) / np.dot(v, v)
        self.Q = R[:, 1:]

    def reduce(self, F1):
        return self.Q.T @ orthonormal_cos(F1)


# ---------------------------------------------------------------- assembly

def interface_fields(state, params, green=None):
    """tau, theta, W on the interface plus the correction record."""
    th = np.asarray(state.theta_A.samples)
    tauA = hilbert_array(th)
    N = th.size
    w0 = params.omega0
    if params.mode == "point" and w0 != 0.0:
        corr = elliptic.point_corrections(state.theta_A, w0, params.vortex_rho0)
        tau = tauA + w0 * corr.tau_tilde.samples
        theta = th + w0 * corr.theta_tilde.samples
        W = np.full(N, corr.W0)
    elif params.mode == "patch" and w0 != 0.0 and patch_radius(state, params) != 0.0:
        corr = elliptic.patch_corrections(state.theta_A, w0, params, patch_radius(state, params))
        tau = tauA + w0 * corr.tau_tilde.samples
        theta = th + w0 * corr.theta_tilde.samples
        W = np.asarray(corr.W_interface.samples)
    else:
        corr = None
        tau, theta, W = tauA, th, np.ones(N)
    return tau, theta, W, corr


def vortex_depth(theta_A, psi0, W0=1.0, nodes=64):
    """Height of the interface point alpha = 0 above the vortex at psi0."""
    x, wts = np.polynomial.legendre.leggauss(nodes)
    psi = 0.5 * psi0 * (1.0 - x)
    tauA = harmonic_extension(hilbert_array(theta_A.samples), 0.0 * psi, psi)
    return float(0.5 * abs(psi0) * np.sum(wts * np.exp(-tauA)) / W0)


def build_curve(state, params, tau, theta, W):
    dz = -np.exp(-tau + 1j * theta) / W
    if params.anchor == "vortex" and params.mode in ("point", "patch"):
        psi0 = params.psi0 if params.mode == "point" else params.patch_center_psi
        depth = vortex_depth(state.theta_A, psi0, float(W[W.size // 2]))
        return curve_from_derivative(dz, y_at_zero=depth)
    return curve_from_derivative(dz, y_at_pi=-1.0)


def bernoulli_residual(tau, theta, W, params):
    """F1 as an array (W may vary along the interface for a patch)."""
    e = np.exp(-tau)
    integral = antiderivative_array(e * np.sin(theta) / W)
    if params.gravity_grouping == "inside":
        grav = -params.p * e * (integral - 1.0)
    else:
        grav = -params.p * e * integral + params.p
    return np.sinh(tau) + grav + params.q * W * derivative_array(theta) - params.B * e


def residual_point(state, params, projector=None):
    return _residual(state, params, projector)


def residual_patch(state, params, projector=None):
    return _residual(state, params, projector)


def _residual(state, params, projector=None):
    tau, theta, W, corr = interface_fields(state, params)
    F1 = SpectralField(bernoulli_residual(tau, theta, W, params), "even")
    curve = build_curve(state, params, tau, theta, W)
    K = sheet_matrix(curve)
    w = np.asarray(state.omega_sheet.samples)
    tang = K @ w + w
    if params.mode == "point" and params.omega0 != 0.0:
        vel = point_vortex_velocity(curve, params.omega0, periodic=params.periodic_vortex)
        tang = tang + 2.0 * tangential(vel, curve.dz)
    F3 = None
    F3_scalar, extras = None, {}
    if params.mode == "patch":
        extra, F3, F3_scalar, extras = patch_terms(state, params, curve, W)
        tang = tang + extra
        if params.fixed_radius:
            extras["F3_reported"], F3 = F3, None
    F2 = SpectralField(W * tang + 2.0, "even")
    _, proj = lyapunov_projection(F1, params.A)
    solv = inner_product(F1, SpectralField(np.cos(crapper_theta_tau(params.A, state.N)[0].samples), "even"))
    extras.update(K=K, W=W)
    return ResidualBundle(F1=F1, F2=F2, F3=F3, projected_F1=proj, solvability=solv,
                          curve=curve, corrections=corr, extras=extras, F3_scalar=F3_scalar)


PATCH_NODES = 128


def patch_radius(state, params):
    if params.fixed_radius or state.r is None:
        return float(params.patch_radius)
    return float(state.r)


def patch_terms(state, params, curve, W):
    """Patch contributions: 2 v_patch . dz for F2, the normal velocity F3 on
    the patch boundary and its projection on d_alpha gamma~_2 (the r equation).

    The patch is centred at the point below alpha = 0 at working depth psi_p.
    """
    r = patch_radius(state, params)
    N = state.N
    depth = vortex_depth(state.theta_A, params.patch_center_psi, float(W[N // 2]))
    center = complex(curve.z[N // 2].real, curve.z[N // 2].imag - depth)
    patch = patch_boundary(r, PATCH_NODES, center)
    period = curve.period if params.periodic_vortex else None
    w0 = params.omega0
    vel = patch_velocity_on_curve(curve, patch, w0, period)
    extra = 2.0 * tangential(vel, curve.dz)
    weight = patch.dshape.imag / PATCH_NODES
    # the sheet part of F3 is linear in w; its row feeds the analytic Jacobian
    normal = patch.dshape if r == 0.0 else patch.dgamma
    sheet_row = _sheet_normal_matrix(patch.gamma, normal, curve)
    if r == 0.0:
        if w0 != 0.0:
            raise DegeneratePatch("r = 0 with omega0 != 0")
        F3 = np.zeros(PATCH_NODES)
    else:
        F3 = np.asarray(patch_self_velocity(patch, curve, state.omega_sheet, w0, period).samples)
    extras = {"patch": patch, "F3_sheet_row": weight @ sheet_row}
    return extra, F3, float(weight @ F3), extras


def _sheet_normal_matrix(points, normal, curve):
    """Matrix w -> (sheet velocity at points) . normal^perp."""
    d = points[:, None] - curve.z[None, :]
    P = _kernel_scale(curve.period)
    h = 2.0 * np.pi / curve.N
    conj = (1j / (2.0 * np.pi)) * (np.pi / P) / np.tan(np.pi * d / P) * h
    u, v = conj.real, -conj.imag
    return u * normal.imag[:, None] - v * normal.real[:, None]


def residual(state, params):
    if params.mode == "patch":
        return residual_patch(state, params)
    return residual_point(state, params)


def solvability_functional(B, p, omega0, inner_state, params, tol=1e-9):
    """f(B; p, omega0) = (cos theta_c, F1) at a converged inner state."""
    prm = params.with_(B=B, p=p, omega0=omega0)
    res = residual(inner_state.with_(B=B), prm)
    if res.norm() > tol:
        raise InnerNotConverged(f"projected residual {res.norm():.3e} exceeds {tol:g}")
    return res.solvability


# ---------------------------------------------------------------- packing

class Packing:
    """Map between a SolutionState and the flat Newton vector."""

    def __init__(self, N, with_r=False):
        self.N = N
        self.m = N // 2 - 1
        self.n_w = N // 2 + 1
        self.with_r = with_r

    @property
    def size(self):
        return self.m + self.n_w + int(self.with_r)

    def pack(self, state):
        parts = [sine_coeffs(state.theta_A), cosine_coeffs(state.omega_sheet)]
        if self.with_r:
            parts.append([state.r or 0.0])
        return np.concatenate(parts)

    def unpack(self, x, template):
        th = from_sine(x[:self.m], self.N)
        w = from_cosine(x[self.m:self.m + self.n_w], self.N)
        r = float(x[-1]) if self.with_r else template.r
        return template.with_(theta_A=th, omega_sheet=w, r=r)

    def equations(self, res, projector):
        parts = [projector.reduce(res.F1), cosine_coeffs(res.F2)]
        if self.with_r:
            parts.append(np.atleast_1d(res.F3_scalar))
        return np.concatenate(parts)


def fd_step(value):
    return 1e-6 * (1.0 + abs(value))


def jacobian(state, params, mode="finite_difference", scheme="forward", projector=None,
             packing=None, base=None):
    """Dense Jacobian of the reduced equations in the packed coordinates.

    ``analytic_at_crapper`` uses Gamma for the F1 block and (A + I) for the
    sheet block; the off-diagonal D_theta F2 block is always differenced.
    """
    N = state.N
    packing = packing or Packing(N, with_r=params.mode == "patch" and not params.fixed_radius)
    projector = projector or Projector(params.A, N)
    x0 = packing.pack(state)
    if base is None:
        base = residual(state, params)
    e0 = packing.equations(base, projector)
    J = np.zeros((e0.size, x0.size))
    m = packing.m

    def evaluate(x):
        return packing.equations(residual(packing.unpack(x, state), params), projector)

    # theta (and r) columns by differencing
    fd_cols = list(range(m)) + ([x0.size - 1] if packing.with_r else [])
    if mode == "finite_difference":
        fd_cols += list(range(m, m + packing.n_w))
    for j in fd_cols:
        h = fd_step(x0[j])
        xp = x0.copy()
        xp[j] += h
        if scheme == "central":
            xm = x0.copy()
            xm[j] -= h
            J[:, j] = (evaluate(xp) - evaluate(xm)) / (2.0 * h)
        else:
            J[:, j] = (evaluate(xp) - e0) / h
    if mode != "finite_difference":
        # F2 is linear in the sheet strength: exact columns W (K + I) cos(k alpha)
        K = base.extras["K"]
        W = base.extras["W"]
        for i in range(packing.n_w):
            a = np.zeros(packing.n_w)
            a[i] = 1.0
            col = from_cosine(a, N).samples
            J[:m, m + i] = 0.0
            J[m:m + packing.n_w, m + i] = cosine_coeffs(W * (K @ col + col))
            if packing.with_r:
                row = base.extras["F3_sheet_row"]
                J[-1, m + i] = row @ col * (1.0 if state.r else 0.0)
    if mode == "analytic_at_crapper":
        for j in range(m):
            b = np.zeros(m)
            b[j] = 1.0
            J[:m, j] = projector.reduce(gamma_operator(from_sine(b, N), params.A))
    cond = np.linalg.cond(J)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularJacobian(f"condition number {cond:.3e}")
    return J
