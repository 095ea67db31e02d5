"""Invariant suite run by ``crapperwaves check``."""

from dataclasses import dataclass

import numpy as np

from .crapper import A0, OVERHANG_A, WaveParams, crapper_interface, crapper_sheet_strength, crapper_theta_tau, q_of_A
from .geometry import detect_overhang, detect_self_intersection
from .kernels import sheet_matrix
from .residuals import gamma_operator, residual
from .spectral import SpectralField, derivative_array, hilbert_array, inner_product


@dataclass
class CheckResult:
    name: str
    value: float
    bound: str
    passed: bool

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<28s} {self.value:<12.4g} {self.bound}"


def crapper_residual(A, N=256):
    theta, _ = crapper_theta_tau(A, N)
    th = theta.samples
    return float(np.max(np.abs(np.sinh(hilbert_array(th)) + q_of_A(A) * derivative_array(th))))


def closure_residual(A, N=256):
    curve = crapper_interface(A, N)
    w = crapper_sheet_strength(A, N, curve)
    K = sheet_matrix(curve)
    return float(np.max(np.abs(K @ w.samples + w.samples + 2.0)))


def spectral_radius(A, N=256, iterations=400, seed=0):
    """Power-iteration estimate of the spectral radius of the sheet operator.

    Uses two-step growth ratios so a +-lambda pair does not stall the estimate.
    """
    K = sheet_matrix(crapper_interface(A, N))
    x = np.random.default_rng(seed).standard_normal(N)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iterations):
        y = K @ (K @ x)
        n = np.linalg.norm(y)
        if n == 0.0:
            return 0.0
        est = np.sqrt(n)
        x = y / n
    return float(est)


def cokernel_defect(A, N=256, samples=20, seed=0, modes=None):
    """max |(Gamma theta1, cos theta_c)| / ||theta1|| over random odd theta1."""
    rng = np.random.default_rng(seed)
    theta_c, _ = crapper_theta_tau(A, N)
    g = SpectralField(np.cos(theta_c.samples), "even")
    alpha = theta_c.alpha
    kmax = modes or N // 4
    worst = 0.0
    for _ in range(samples):
        b = rng.standard_normal(kmax) / np.arange(1, kmax + 1) ** 2
        t1 = SpectralField(np.sin(np.outer(alpha, np.arange(1, kmax + 1))) @ b, "odd")
        val = abs(inner_product(gamma_operator(t1, A), g)) / np.max(np.abs(t1.samples))
        worst = max(worst, val)
    return float(worst)


def outer_slope(A, N=256, h=1e-6):
    """Central difference of f(B) = (cos theta_c, F1) with the inner system re-solved."""
    from .solver import crapper_state, newton_inner

    prm = WaveParams(A=A)
    start = crapper_state(A, N)
    vals = []
    for B in (h, -h):
        _, _, res = newton_inner(prm.with_(B=B), start, return_info=True)
        vals.append(res.solvability)
    return float((vals[0] - vals[1]) / (2.0 * h))


def run_suite(A, N=256, slope=True):
    out = [
        CheckResult("crapper residual", crapper_residual(A, N), "<= 1e-9", False),
        CheckResult("kinematic closure", closure_residual(A, N), "<= 1e-8", False),
        CheckResult("spectral radius", spectral_radius(A, N), "<= 0.999", False),
        CheckResult("cokernel orthogonality", cokernel_defect(A, N), "<= 1e-9", False),
    ]
    out[0].passed = out[0].value <= 1e-9
    out[1].passed = out[1].value <= 1e-8
    out[2].passed = out[2].value <= 0.999
    out[3].passed = out[3].value <= 1e-9
    if slope:
        s = outer_slope(A, N)
        out.append(CheckResult("outer slope + 2 pi", abs(s + 2.0 * np.pi), "<= 1e-5",
                               abs(s + 2.0 * np.pi) <= 1e-5))
    curve = crapper_interface(A, N)
    over, _ = detect_overhang(curve)
    cross = detect_self_intersection(curve)
    out.append(CheckResult("overhang flag", float(over), f"== (A > {OVERHANG_A:.5f})",
                           over == (A > OVERHANG_A)))
    out.append(CheckResult("self-intersection flag", float(cross), f"== (A > {A0})", cross == (A > A0)))
    return out


def revalidate(record, tol=None):
    """Recompute the residual of a stored state; compare with its tolerance."""
    state, params = record.to_state(), record.to_params()
    res = residual(state, params)
    bound = tol if tol is not None else record.residuals.get("tolerance", 1e-10)
    out = [CheckResult("stored state residual", res.norm(), f"<= {bound:g}", res.norm() <= bound)]
    if "solvability_tolerance" in record.residuals:
        sb = record.residuals["solvability_tolerance"]
        out.append(CheckResult("solvability |f(B)|", abs(res.solvability), f"<= {sb:g}",
                               abs(res.solvability) <= sb))
    return out
