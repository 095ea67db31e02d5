"""Two-level Newton solve: reduced system for (theta_A, w[, r]) at fixed B,
then a scalar secant iteration on f(B) = (cos theta_c, F1)."""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .crapper import WaveParams, crapper_sheet_strength, crapper_theta_tau
from .errors import CrapperError, NoBracket, NoConvergence, SingularJacobian
from .geometry import detect_overhang, detect_self_intersection
from .residuals import Packing, Projector, SolutionState, jacobian, residual

INNER_TOL = 1e-11
OUTER_TOL = 1e-10
PARAM_CAP = 0.05
B_CAP = 0.5


@dataclass
class NewtonInfo:
    iterations: int = 0
    history: list = field(default_factory=list)
    jacobians: int = 0


class JacobianCache:
    """Keeps an LU factorisation for chord steps; refreshed when progress stalls."""

    def __init__(self):
        self.lu = None
        self.key = None

    def factor(self, J, key):
        self.lu = scipy.linalg.lu_factor(J)
        self.key = key

    def clear(self):
        self.lu = None


def crapper_state(A, N, with_r=False):
    theta_c, _ = crapper_theta_tau(A, N)
    w = crapper_sheet_strength(A, N)
    return SolutionState(theta_c, w, 0.0, 0.0 if with_r else None)


def newton_inner(params, initial, tol=INNER_TOL, max_iter=10, cache=None, return_info=False):
    """Damped (chord) Newton on ((I - Pi) F1, F2[, F3]) at fixed B, p, omega0."""
    N = initial.N
    with_r = params.mode == "patch" and not params.fixed_radius
    packing = Packing(N, with_r=with_r)
    projector = Projector(params.A, N)
    cache = cache if cache is not None else JacobianCache()
    key = (params.A, N, params.mode)
    if cache.key != key:
        cache.clear()
    state = initial.with_(B=params.B)
    if with_r and state.r is None:
        state = state.with_(r=params.patch_radius)
    res = residual(state, params)
    info = NewtonInfo(history=[res.norm()])
    fresh = False
    while info.history[-1] > tol:
        if info.iterations >= max_iter:
            raise NoConvergence(f"inner Newton stopped at residual {info.history[-1]:.3e}", info.history)
        if cache.lu is None:
            cache.factor(jacobian(state, params, projector=projector, packing=packing, base=res), key)
            info.jacobians += 1
            fresh = True
        x = packing.pack(state)
        dx = -scipy.linalg.lu_solve(cache.lu, packing.equations(res, projector))
        lam = 1.0
        for _ in range(7):
            try:
                trial = packing.unpack(x + lam * dx, state)
                tres = residual(trial, params)
                if tres.norm() < info.history[-1]:
                    break
            except CrapperError:
                pass
            lam *= 0.5
        else:
            if fresh:
                raise NoConvergence("no descent after 6 step halvings", info.history)
            cache.clear()
            continue
        info.iterations += 1
        prev = info.history[-1]
        state, res = trial, tres
        info.history.append(res.norm())
        # a chord step that contracts poorly triggers a fresh Jacobian
        if info.history[-1] > 0.05 * prev and info.history[-1] > tol:
            cache.clear()
            fresh = False
        else:
            fresh = False
    if return_info:
        return state, info, res
    return state


def _check_caps(p, omega0, cap=PARAM_CAP):
    if abs(p) > cap or abs(omega0) > cap:
        raise NoBracket(f"(p, omega0) = ({p}, {omega0}) outside the neighbourhood cap {cap}")


@dataclass
class OuterInfo:
    B_history: list = field(default_factory=list)
    f_history: list = field(default_factory=list)
    inner: list = field(default_factory=list)
    slope: float = -2.0 * np.pi


def solve_B_star(p, omega0, params, warm_start, tol=OUTER_TOL, max_iter=20, cache=None,
                 inner_tol=INNER_TOL, return_info=False, param_cap=PARAM_CAP, B_cap=B_CAP):
    """Root B* of f(B; p, omega0) by secant steps seeded with slope -2 pi."""
    _check_caps(p, omega0, param_cap)
    cache = cache if cache is not None else JacobianCache()
    info = OuterInfo()
    state = warm_start

    def f_of(B, start):
        prm = params.with_(B=B, p=p, omega0=omega0)
        st, inner, res = newton_inner(prm, start, tol=inner_tol, cache=cache, return_info=True)
        info.inner.append(inner)
        info.B_history.append(B)
        info.f_history.append(res.solvability)
        return st, res.solvability

    B = warm_start.B
    state, f = f_of(B, state)
    slope = info.slope
    for _ in range(max_iter):
        if abs(f) <= tol:
            break
        B_new = B - f / slope
        if abs(B_new) > B_cap:
            raise NoBracket(f"secant iterate B = {B_new:.3e} left |B| <= {B_cap}")
        state_new, f_new = f_of(B_new, state)
        if B_new != B:
            s = (f_new - f) / (B_new - B)
            if np.isfinite(s) and s != 0.0:
                slope = s
        B, f, state = B_new, f_new, state_new
    else:
        raise NoConvergence(f"outer solve stopped at |f| = {abs(f):.3e}", info.f_history)
    info.slope = slope
    if return_info:
        return B, state, info
    return B, state


@dataclass
class ContinuationRun:
    params_path: list = field(default_factory=list)
    states: list = field(default_factory=list)
    B_star: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    failure: str = None

    @property
    def final(self):
        return self.states[-1] if self.states else None


def continuation_sweep(A, path, mode="point", N=256, base_params=None, tol=INNER_TOL,
                       max_step=5e-4, initial=None, outer_tol=OUTER_TOL, param_cap=PARAM_CAP,
                       B_cap=B_CAP):
    """March along (p, omega0) from the Crapper point, warm-starting each solve."""
    prm = base_params if base_params is not None else WaveParams(A=A, mode=mode)
    prm = prm.with_(A=A, mode=mode, q=None) if base_params is None else prm
    with_r = mode == "patch" and not prm.fixed_radius
    state = initial if initial is not None else crapper_state(A, N)
    if with_r and not state.r:
        # r = 0 is a root of the radius equation; start from the configured size
        state = state.with_(r=prm.patch_radius)
    run = ContinuationRun()
    cache = JacobianCache()
    prev = None
    for p, w0 in path:
        if prev is not None and max(abs(p - prev[0]), abs(w0 - prev[1])) > max_step + 1e-15:
            run.failure = f"step to ({p}, {w0}) exceeds the maximum step {max_step}"
            break
        try:
            B, state, info = solve_B_star(p, w0, prm, state, tol=outer_tol, cache=cache,
                                          inner_tol=tol, return_info=True, param_cap=param_cap,
                                          B_cap=B_cap)
        except CrapperError as exc:
            run.failure = f"{type(exc).__name__}: {exc}"
            break
        cur = prm.with_(p=p, omega0=w0, B=B)
        res = residual(state, cur)
        flag, measure = detect_overhang(res.curve)
        run.params_path.append((p, w0))
        run.states.append(state)
        run.B_star.append(B)
        run.diagnostics.append({
            "residual": res.norm(),
            "solvability": res.solvability,
            "newton_iterations": [i.iterations for i in info.inner],
            "outer_iterations": len(info.B_history),
            "overhang": bool(flag),
            "overhang_measure": float(measure),
            "self_intersection": bool(detect_self_intersection(res.curve)),
        })
        prev = (p, w0)
    return run


def linear_path(target, steps):
    p, w0 = target
    return [(p * i / steps, w0 * i / steps) for i in range(steps + 1)]
