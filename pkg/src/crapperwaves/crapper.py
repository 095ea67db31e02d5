"""Exact Crapper capillary waves and the scalar parameter record."""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import OutOfRange, SingularSystem
from .spectral import SpectralField, grid

A0 = 0.45467  # first self-contact of the Crapper profile
OVERHANG_A = np.sqrt(2.0) - 1.0


@dataclass(frozen=True)
class WaveParams:
    """Scalar parameters of a (possibly perturbed) Crapper wave.

    ``q`` defaults to the Crapper value q(A). ``anchor`` selects the vertical
    translation of the interface: ``"vortex"`` puts the vortex (or patch
    centre) at the origin, ``"crest"`` pins the crest at height -1.
    """

    A: float
    q: float = None
    p: float = 0.0
    B: float = 0.0
    omega0: float = 0.0
    vortex_rho0: float = 0.5
    patch_radius: float = 0.0
    patch_center_psi: float = float(np.log(0.5))
    mode: str = "none"
    anchor: str = "vortex"
    gravity_grouping: str = "inside"
    periodic_vortex: bool = True
    psi_min: float = -8.0
    fixed_radius: bool = False
    extras: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not abs(self.A) < 1.0:
            raise OutOfRange(f"|A| must be < 1, got {self.A}")
        if self.q is None:
            object.__setattr__(self, "q", q_of_A(self.A))
        if self.mode not in ("none", "point", "patch"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "point" and not 0.0 < self.vortex_rho0 < 1.0:
            raise OutOfRange("vortex_rho0 must lie in (0, 1)")
        if self.patch_radius < 0.0:
            raise OutOfRange("patch radius must be non-negative")
        if self.mode == "patch" and not self.patch_center_psi < 0.0:
            raise OutOfRange("patch centre must satisfy psi_p < 0")
        if self.anchor not in ("vortex", "crest"):
            raise ValueError(f"unknown anchor {self.anchor!r}")
        if self.gravity_grouping not in ("inside", "outside"):
            raise ValueError(f"unknown gravity grouping {self.gravity_grouping!r}")

    @property
    def psi0(self):
        return float(np.log(self.vortex_rho0))

    def with_(self, **kw):
        return replace(self, **kw)

    def scalars(self):
        keys = ("A", "q", "p", "B", "omega0", "vortex_rho0", "patch_radius",
                "patch_center_psi", "mode", "anchor", "gravity_grouping",
                "periodic_vortex", "psi_min", "fixed_radius")
        return {k: getattr(self, k) for k in keys}


def _check_A(A):
    if not abs(A) < 1.0:
        raise OutOfRange(f"|A| must be < 1, got {A}")


def q_of_A(A):
    _check_A(A)
    return (1.0 + A * A) / (1.0 - A * A)


def _mobius(A, alpha):
    w = A * np.exp(1j * np.asarray(alpha))
    return (1.0 + w) / (1.0 - w)


def crapper_theta_tau(A, N):
    """Exact (theta_c, tau_c) on the N-point grid."""
    _check_A(A)
    m = _mobius(A, grid(N))
    theta = -2.0 * np.angle(m)
    tau = 2.0 * np.log(np.abs(m))
    return SpectralField(theta, "odd"), SpectralField(tau, "even")


def theta_c_series(A, alpha, terms=400):
    """Series form -4 sum_{n odd} A^n/n sin(n alpha); used as a test oracle."""
    n = np.arange(1, 2 * terms, 2)
    return -4.0 * np.sum((A ** n / n)[:, None] * np.sin(np.outer(n, alpha)), axis=0)


def tau_c_series(A, alpha, terms=400):
    n = np.arange(1, 2 * terms, 2)
    return 4.0 * np.sum((A ** n / n)[:, None] * np.cos(np.outer(n, alpha)), axis=0)


def max_theta_c(A):
    """Closed-form maximum of |theta_c| over one period."""
    return 2.0 * np.arcsin(2.0 * abs(A) / (1.0 + A * A))


def crapper_z_closed(A, alpha):
    """Closed-form Crapper interface up to a constant: -alpha + 4i/(1 + A e^{i alpha})."""
    return -np.asarray(alpha) + 4j / (1.0 + A * np.exp(1j * np.asarray(alpha)))


def crapper_interface(A, N, crest_height=-1.0):
    """Crapper interface from integrating dz/dalpha = -exp(-tau_c + i theta_c).

    Centred so that x(0) = 0 and translated so that y(+-pi) = ``crest_height``.
    """
    from .kernels import curve_from_derivative

    theta, tau = crapper_theta_tau(A, N)
    dz = -np.exp(-tau.samples + 1j * theta.samples)
    return curve_from_derivative(dz, y_at_pi=crest_height)


def crapper_sheet_strength(A, N, curve=None):
    """Sheet strength solving 2 BR(z_c, w) . dz_c + w + 2 = 0."""
    from .kernels import sheet_matrix

    _check_A(A)
    if curve is None:
        curve = crapper_interface(A, N)
    K = sheet_matrix(curve)
    try:
        w = np.linalg.solve(K + np.eye(N), -2.0 * np.ones(N))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        raise SingularSystem("non-finite sheet strength")
    return SpectralField(w, "even")
