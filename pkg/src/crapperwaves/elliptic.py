"""Vorticity-induced corrections W, tau~, theta~ in the (phi, psi) strip.

Working coordinates: phi = -alpha, psi = log(rho) <= 0, the interface is
psi = 0. The perturbation tau~ solves a Poisson problem whose right-hand
side has a point (dipole) part and a smooth part built from theta_A; both
are inverted with the periodic free-space Green function

    G2(phi, psi) = log(2 (cosh psi - cos phi)) / (4 pi).
"""

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, OutOfDomain, OutOfRange
from .spectral import (SpectralField, antiderivative_array, derivative_array, grid,
                       harmonic_extension, harmonic_extension_set, hilbert_array)

OMEGA_CAP_POINT = 0.1
OMEGA_CAP_PATCH = 0.05


@dataclass(frozen=True)
class GreensKernel:
    """Periodic Green function of the Laplacian and its derivatives."""

    psi_min: float = -8.0

    @staticmethod
    def _den(phi, psi):
        # cosh psi - cos phi without cancellation near the singularity
        return 2.0 * (np.sinh(0.5 * psi) ** 2 + np.sin(0.5 * phi) ** 2)

    def value(self, phi, psi):
        return np.log(2.0 * self._den(phi, psi)) / (4.0 * np.pi)

    def d_psi(self, phi, psi):
        return np.sinh(psi) / (4.0 * np.pi * self._den(phi, psi))

    def d_phi(self, phi, psi):
        return np.sin(phi) / (4.0 * np.pi * self._den(phi, psi))

    def d_psipsi(self, phi, psi):
        den = self._den(phi, psi)
        return (1.0 - np.cosh(psi) * np.cos(phi)) / (4.0 * np.pi * den ** 2)

    def d_phipsi(self, phi, psi):
        den = self._den(phi, psi)
        return -np.sin(phi) * np.sinh(psi) / (4.0 * np.pi * den ** 2)

    def modes(self, phi, psi, kmax=2000):
        """Mode expansion (|psi| - sum 2/k e^{-k|psi|} cos k phi)/(4 pi); an oracle."""
        k = np.arange(1, kmax + 1)
        s = np.sum(2.0 / k * np.exp(-k * abs(psi)) * np.cos(k * phi))
        return (abs(psi) - s) / (4.0 * np.pi)


@dataclass(frozen=True)
class CorrectionFields:
    """Interface traces of the vorticity corrections.

    ``dpsi_tau_tilde`` is the normal derivative of tau~ on psi = 0, needed
    to recover theta~.
    """

    tau_tilde: SpectralField
    theta_tilde: SpectralField
    W_interface: SpectralField
    tau_tilde_at_vortex: float
    iterations: int = 0
    dpsi_tau_tilde: SpectralField = None
    W0: float = 1.0
    tau_at_vortex: float = 0.0
    contraction: float = 0.0
    extras: dict = None


def _check_rho(rho0):
    if not 0.0 < rho0 < 1.0:
        raise OutOfDomain(f"rho0 must lie in (0, 1), got {rho0}")


def point_W0(theta_A, tau_tilde_at_vortex, omega0, rho0):
    """W0 = exp(omega0 e^{-2 tau(0, rho0)} / rho0)."""
    _check_rho(rho0)
    tau0 = _tau_A_at(theta_A, 0.0, np.log(rho0)) + omega0 * tau_tilde_at_vortex
    return float(np.exp(omega0 * np.exp(-2.0 * tau0) / rho0))


def _tau_A_at(theta_A, alpha, psi):
    samples = getattr(theta_A, "samples", theta_A)
    return float(harmonic_extension(hilbert_array(samples), alpha, psi))


def smooth_part(theta_samples, alpha, psi):
    """S solving Lap S = d_phi d_psi theta_A (free-space inversion).

    S = -(psi/2) d_alpha theta_A - (1/4) H theta_A, both harmonically extended.
    """
    da = harmonic_extension(theta_samples, alpha, psi, d_alpha=1)
    ht = harmonic_extension(hilbert_array(theta_samples), alpha, psi)
    return -0.5 * psi * da - 0.25 * ht


def _kappa(omega0, c):
    """(1 - W0^2)/(omega0 W0) with W0 = exp(omega0 c); limit -2c at omega0 = 0."""
    if omega0 == 0.0:
        return -2.0 * c
    return -2.0 * np.sinh(omega0 * c) / omega0


def _inv_w_minus_one(omega0, c):
    """(1/W0 - 1)/omega0; limit -c."""
    if omega0 == 0.0:
        return -c
    return np.expm1(-omega0 * c) / omega0


def point_tilde_tau(theta_A, omega0, rho0, green=GreensKernel(), max_iter=50, tol=1e-15):
    """tau~ on the interface for a point vortex at (phi, psi) = (0, log rho0)."""
    _check_rho(rho0)
    if abs(omega0) > OMEGA_CAP_POINT:
        raise OutOfRange(f"|omega0| <= {OMEGA_CAP_POINT} required, got {omega0}")
    th = np.asarray(theta_A.samples)
    N = th.size
    alpha = theta_A.alpha
    psi0 = float(np.log(rho0))
    tauA0 = _tau_A_at(th, 0.0, psi0)
    S0 = float(smooth_part(th, 0.0, psi0))
    tau0 = tauA0
    for it in range(1, max_iter + 1):
        c = np.exp(-2.0 * tau0) / rho0
        kappa = _kappa(omega0, c)
        new = tauA0 + omega0 * (-kappa * S0)
        if abs(new - tau0) <= tol * max(1.0, abs(new)):
            tau0 = new
            break
        tau0 = new
    else:
        raise NoConvergence(f"vortex self-consistency did not settle in {max_iter} steps")
    c = np.exp(-2.0 * tau0) / rho0
    kappa = _kappa(omega0, c)
    W0 = float(np.exp(omega0 * c))
    e2 = np.exp(-2.0 * tau0)
    phi = -alpha
    tauA = hilbert_array(th)
    dth = derivative_array(th)
    trace = -e2 * green.d_psi(phi, -psi0) - kappa * (-0.25 * tauA)
    dpsi = -e2 * green.d_psipsi(phi, -psi0) + 0.25 * kappa * dth
    return CorrectionFields(
        tau_tilde=SpectralField(trace, "even"),
        theta_tilde=None,
        W_interface=SpectralField(np.full(N, W0), "even"),
        tau_tilde_at_vortex=float(-kappa * S0),
        iterations=it,
        dpsi_tau_tilde=SpectralField(dpsi, "even"),
        W0=W0,
        tau_at_vortex=float(tau0),
        extras={"kappa": float(kappa), "c": float(c)},
    )


def point_tilde_theta(corr, theta_A, omega0, W0):
    """Odd theta~ from d_alpha theta~ = -(1/W0) d_psi tau~ + ((1/W0 - 1)/omega0) d_alpha theta_A."""
    th = np.asarray(theta_A.samples)
    dth = derivative_array(th)
    if corr is None or corr.dpsi_tau_tilde is None:
        return SpectralField(np.zeros(th.size), "odd")
    c = np.log(W0) / omega0 if omega0 != 0.0 else corr.extras["c"]
    slope = -corr.dpsi_tau_tilde.samples / W0 + _inv_w_minus_one(omega0, c) * dth
    return SpectralField(antiderivative_array(slope), "odd")


def point_corrections(theta_A, omega0, rho0, green=GreensKernel()):
    corr = point_tilde_tau(theta_A, omega0, rho0, green)
    theta_t = point_tilde_theta(corr, theta_A, omega0, corr.W0)
    return _replace(corr, theta_tilde=theta_t)


def _replace(corr, **kw):
    from dataclasses import replace

    return replace(corr, **kw)


def point_tilde_tau_interior(theta_A, corr, alpha, psi, rho0, green=GreensKernel()):
    """tau~ at interior points (psi < 0), vortex singularity included."""
    th = np.asarray(theta_A.samples)
    e2 = np.exp(-2.0 * corr.tau_at_vortex)
    kappa = corr.extras["kappa"]
    psi0 = np.log(rho0)
    return -e2 * green.d_psi(-np.asarray(alpha), np.asarray(psi) - psi0) - kappa * smooth_part(th, alpha, psi)


# ---------------------------------------------------------------- vortex patch
#
# The patch occupies, in working coordinates, the scaled unit region
# |x| <= y cot y, |y| <= pi/2 centred at (0, psi_p) with scale s = r e^{tau_p}.
# Sources live on a column quadrature: for each x node the patch chord
# (Gauss in y) and the strip above it up to the interface (Gauss in psi).
# x = sin(pi t / 2) with t Gauss on each half removes the square-root edge
# of the chord and the kink of its width at x = 0.


def _chord_halfwidth(x):
    """Y(x) solving Y cot Y = |x| on [0, pi/2] (Y = 0 for |x| >= 1)."""
    from scipy.optimize import brentq

    out = np.zeros(np.shape(x))
    for i, xi in np.ndenumerate(np.abs(np.asarray(x, dtype=float))):
        if xi >= 1.0:
            continue
        if xi == 0.0:
            out[i] = 0.5 * np.pi
            continue
        out[i] = brentq(lambda y: (y / np.tan(y) if y > 1e-8 else 1.0) - xi, 1e-12, 0.5 * np.pi)
    return out


def _cumulative_matrix(u):
    """S with (S f)_k ~ int_{-1}^{u_k} f on Gauss-Legendre nodes u."""
    L = np.polynomial.legendre
    n = u.size
    V = L.legvander(u, n - 1)
    cols = [L.legval(u, L.legint(np.eye(n)[j], lbnd=-1)) for j in range(n)]
    return np.column_stack(cols) @ np.linalg.inv(V)


@dataclass(frozen=True)
class PatchQuadrature:
    """Node layout for the patch and the column above it."""

    s: float
    psi_p: float
    n_x: int = 16
    n_p: int = 12
    n_u: int = 16

    def __post_init__(self):
        L = np.polynomial.legendre
        # each half x in [0, 1] separately: the chord width has a kink at x = 0
        uh, wh = L.leggauss(self.n_x // 2)
        th = 0.5 * (uh + 1.0)
        xh = np.sin(0.5 * np.pi * th)
        wxh = wh * 0.25 * np.pi * np.cos(0.5 * np.pi * th)
        x = np.concatenate([-xh[::-1], xh])
        wx = np.concatenate([wxh[::-1], wxh])
        t = np.concatenate([-th[::-1], th])
        Y = _chord_halfwidth(x)
        u, wu = L.leggauss(self.n_p)
        v, wv = L.leggauss(self.n_u)
        s, pp = self.s, self.psi_p
        half = s * Y[:, None]
        top = pp + s * Y
        set_ = object.__setattr__
        set_(self, "t", t)
        set_(self, "u_half", uh)
        set_(self, "x", x)
        set_(self, "Y", Y)
        set_(self, "wu", wu)
        set_(self, "S", _cumulative_matrix(u))
        set_(self, "phi", np.repeat(s * x[:, None], self.n_p + self.n_u, axis=1))
        patch_psi = pp + half * u[None, :]
        col_psi = top[:, None] + (-top[:, None]) * 0.5 * (v[None, :] + 1.0)
        set_(self, "psi", np.hstack([patch_psi, col_psi]))
        wa_p = (s * wx)[:, None] * half * wu[None, :]
        wa_c = (s * wx)[:, None] * (-0.5 * top)[:, None] * wv[None, :]
        set_(self, "weight", np.hstack([wa_p, wa_c]))
        set_(self, "in_patch", np.hstack([np.ones_like(wa_p, bool), np.zeros_like(wa_c, bool)]))

    @property
    def shape(self):
        return self.psi.shape

    def cumulative(self, f):
        """int from the patch bottom of f (given on patch nodes) on all nodes."""
        fp = f[:, :self.n_p]
        half = self.s * self.Y[:, None]
        inner = half * (fp @ self.S.T)
        total = half[:, 0] * (fp @ self.wu)
        return np.hstack([inner, np.repeat(total[:, None], self.n_u, axis=1)])

    def chord_integral(self, f):
        """int over each vertical chord of the patch of f (patch nodes)."""
        return self.s * self.Y * (f[:, :self.n_p] @ self.wu)


def patch_scale(theta_A, r, psi_p):
    """Working-coordinate size s = r exp(tau_A(0, psi_p)) of a physical radius r."""
    return abs(r) * np.exp(_tau_A_at(theta_A, 0.0, psi_p))


def _patch_theta_data(th, quad):
    """tau_A, d_phi theta_A, d_psi theta_A, d_phi d_psi theta_A on the nodes."""
    tau, da, dp, dap = harmonic_extension_set(
        [(hilbert_array(th), 0, 0), (th, 1, 0), (th, 0, 1), (th, 1, 1)], -quad.phi, quad.psi)
    return tau, -da, dp, -dap


def _source_densities(E, I, J, tt, d, omega0):
    """Densities q (kernel d_psi G), q (kernel G), q (kernel d_phi G)."""
    _, dphi, dpsi, dphipsi = d
    q_psi = -E + omega0 * (2.0 * E * tt + E * I)
    q_g = (E * dphi + I * dphipsi
           + omega0 * (-2.0 * E * tt * dphi - 2.0 * J * dphipsi - 2.0 * E * I * dphi - I * I * dphipsi))
    q_phi = -dpsi * I + omega0 * 2.0 * J * dpsi
    return q_psi, q_g, q_phi


def _direct_kernels(quad, targets_phi, targets_psi):
    """Kernel matrices (d_psi G, G, d_phi G) from the nodes to interior targets.

    A source node coinciding with a target is skipped (punctured rule).
    """
    dp = np.ravel(targets_phi)[:, None] - np.ravel(quad.phi)[None, :]
    ds = np.ravel(targets_psi)[:, None] - np.ravel(quad.psi)[None, :]
    same = (np.abs(dp) < 1e-14) & (np.abs(ds) < 1e-14)
    dp = np.where(same, 1.0, dp)
    ds = np.where(same, 1.0, ds)
    den = GreensKernel._den(dp, ds)
    fac = np.where(same, 0.0, 1.0 / (4.0 * np.pi))
    return (fac * np.sinh(ds) / den, fac * np.log(2.0 * den), fac * np.sin(dp) / den)


def _apply_direct(quad, q, kernels, shape):
    out = sum(K @ np.ravel(a * quad.weight) for K, a in zip(kernels, q))
    return out.reshape(shape)


def _apply_interface(quad, q, N):
    """Trace and normal derivative on psi = 0 through the mode series, truncated at N/2."""
    q_psi, q_g, q_phi = (np.ravel(a * quad.weight) for a in q)
    phs = np.ravel(quad.phi)
    dep = -np.ravel(quad.psi)
    k = np.arange(1, N // 2 + 1)
    damp = np.exp(-np.outer(k, dep))
    damp[-1] *= 0.5
    ck, sk = damp * np.cos(np.outer(k, phs)), damp * np.sin(np.outer(k, phs))
    phi_t = -grid(N)
    C, S = np.cos(np.outer(phi_t, k)), np.sin(np.outer(phi_t, k))

    def cos_sum(q, wk):
        # sum_k wk sum_src q e^{-k d} cos k(phi - phi')
        return C @ (wk * (ck @ q)) + S @ (wk * (sk @ q))

    def sin_sum(q, wk):
        # sum_k wk sum_src q e^{-k d} sin k(phi - phi')
        return S @ (wk * (ck @ q)) - C @ (wk * (sk @ q))

    two = np.full(k.size, 2.0)
    trace = (np.sum(dep * q_g) - cos_sum(q_g, 2.0 / k)
             + np.sum(q_psi) + cos_sum(q_psi, two)
             + sin_sum(q_phi, two))
    dpsi = (np.sum(q_g) + cos_sum(q_g, two)
            - cos_sum(q_psi, 2.0 * k)
            - sin_sum(q_phi, 2.0 * k))
    return trace / (4.0 * np.pi), dpsi / (4.0 * np.pi)


def patch_tilde_tau(theta_A, omega0, r, psi_p, quad=None,
                    max_iter=60, tol=1e-14):
    """tau~ for a patch by Picard iteration tau~ = b + omega0 A1(tau~) + omega0 A2.

    The iteration runs on the patch nodes (A1 sees tau~ only there); the
    interface trace and normal derivative follow from the converged values.
    ``contraction`` is the largest observed ratio of successive increments.
    """
    if abs(omega0) > OMEGA_CAP_PATCH:
        raise OutOfRange(f"|omega0| <= {OMEGA_CAP_PATCH} required, got {omega0}")
    th = np.asarray(theta_A.samples)
    N = th.size
    if quad is None:
        quad = PatchQuadrature(patch_scale(th, r, psi_p), psi_p)
    d = _patch_theta_data(th, quad)
    E = np.where(quad.in_patch, np.exp(-2.0 * d[0]), 0.0)
    I = quad.cumulative(E)
    tp_phi, tp_psi = quad.phi[:, :quad.n_p], quad.psi[:, :quad.n_p]
    tt = np.zeros(quad.shape)
    kernels = _direct_kernels(quad, tp_phi, tp_psi)
    prev_step, ratio = None, 0.0
    for it in range(1, max_iter + 1):
        J = quad.cumulative(E * tt)
        q = _source_densities(E, I, J, tt, d, omega0)
        new = np.zeros(quad.shape)
        new[:, :quad.n_p] = _apply_direct(quad, q, kernels, tp_phi.shape)
        step = float(np.max(np.abs(new - tt)))
        if prev_step is not None and prev_step > 0.0 and it > 2:
            ratio = max(ratio, step / prev_step)
        tt, prev_step = new, step
        if step <= tol * max(1.0, float(np.max(np.abs(tt)))):
            break
    else:
        raise NoConvergence(f"patch Picard iteration did not settle in {max_iter} steps")
    J = quad.cumulative(E * tt)
    q = _source_densities(E, I, J, tt, d, omega0)
    trace, dpsi = _apply_interface(quad, q, N)
    center = float(_apply_direct(quad, q, _direct_kernels(quad, [0.0], [psi_p]), (1,))[0])
    W = patch_W(quad, d[0], tt, omega0, N)
    return CorrectionFields(
        tau_tilde=SpectralField(trace, "even"),
        theta_tilde=None,
        W_interface=W,
        tau_tilde_at_vortex=center,
        iterations=it,
        dpsi_tau_tilde=SpectralField(dpsi, "even"),
        W0=float(W.samples[N // 2]),
        tau_at_vortex=float(_tau_A_at(th, 0.0, psi_p) + omega0 * center),
        contraction=float(ratio),
        extras={"quad": quad, "nodes_tau_tilde": tt, "nodes_tau_A": d[0], "s": quad.s},
    )


def patch_chord_density(quad, tau_A_nodes, tt, omega0, N):
    """w(alpha) with W(alpha, 1) = 1 + omega0 w: chord integrals of e^{-2 tau}."""
    f = np.exp(-2.0 * (tau_A_nodes + omega0 * tt))
    Q = f[:, :quad.n_p] @ quad.wu
    half = quad.n_x // 2
    # chord averages are even in x; fit the two halves symmetrically in |t|
    Qh = 0.5 * (Q[half:] + Q[:half][::-1])
    coef = np.polynomial.legendre.legfit(quad.u_half, Qh, half - 1)
    x = -grid(N) / quad.s if quad.s > 0 else np.full(N, np.inf)
    inside = np.abs(x) < 1.0
    out = np.zeros(N)
    u = 4.0 / np.pi * np.arcsin(np.abs(x[inside])) - 1.0
    out[inside] = quad.s * _chord_halfwidth(x[inside]) * np.polynomial.legendre.legval(u, coef)
    return out


def patch_W(quad, tau_A_nodes, tt, omega0, N):
    """W on the interface; identically 1 outside the angular shadow of the patch."""
    w = patch_chord_density(quad, tau_A_nodes, tt, omega0, N)
    return SpectralField(1.0 + omega0 * w, "even")


def patch_tilde_theta(corr, theta_A, omega0):
    """theta~ from omega0 d_phi theta~ = (1/W - 1) d_phi theta_A + omega0 d_psi tau~.

    A homogeneous term c psi is added to tau~ so that d_alpha theta~ has zero
    mean and theta~ stays periodic; c is stored as ``extras['c_homogeneous']``.
    """
    th = np.asarray(theta_A.samples)
    dth = derivative_array(th)
    W = np.asarray(corr.W_interface.samples)
    quad = corr.extras["quad"]
    w = patch_chord_density(quad, corr.extras["nodes_tau_A"], corr.extras["nodes_tau_tilde"], omega0, th.size)
    slope = -(w / W) * dth - corr.dpsi_tau_tilde.samples
    c = float(np.mean(slope))
    corr.extras["c_homogeneous"] = c
    return SpectralField(antiderivative_array(slope - c), "odd")


def patch_corrections(theta_A, omega0, params, r):
    corr = patch_tilde_tau(theta_A, omega0, r, params.patch_center_psi)
    theta_t = patch_tilde_theta(corr, theta_A, omega0)
    c = corr.extras["c_homogeneous"]
    dpsi = SpectralField(corr.dpsi_tau_tilde.samples + c, "even")
    return _replace(corr, theta_tilde=theta_t, dpsi_tau_tilde=dpsi)
