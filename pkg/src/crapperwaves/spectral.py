"""Periodic spectral operations on the grid alpha_j = -pi + 2*pi*j/N.

Fields are stored by their samples. Fourier multipliers are applied with
numpy's FFT; because the grid starts at -pi the true coefficient is
``c_k = (-1)^k F_k / N``, but a multiplier acts on ``F_k`` and ``c_k`` alike,
so the shift only matters when coefficients are exposed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, NonZeroMean, OutOfDomain

PARITIES = ("even", "odd", "none")
MEAN_TOL = 1e-10


def grid(N):
    """Nodes alpha_j = -pi + 2 pi j / N."""
    return -np.pi + 2.0 * np.pi * np.arange(N) / N


def wavenumbers(N):
    return np.fft.fftfreq(N, d=1.0 / N)


def _check_N(N):
    if N < 64 or N & (N - 1):
        raise ValueError(f"grid size must be a power of two >= 64, got {N}")


def reflect(samples):
    """Samples of f(-alpha) given samples of f(alpha) on the grid."""
    return np.roll(samples[..., ::-1], 1, axis=-1)


def project_parity(samples, parity):
    samples = np.asarray(samples, dtype=float)
    if parity == "even":
        return 0.5 * (samples + reflect(samples))
    if parity == "odd":
        return 0.5 * (samples - reflect(samples))
    return samples


def _flip(parity):
    return {"even": "odd", "odd": "even"}.get(parity, "none")


@dataclass(frozen=True)
class SpectralField:
    """Real 2pi-periodic function sampled on the standard grid."""

    samples: np.ndarray
    parity: str = "none"

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        _check_N(s.size)
        if self.parity not in PARITIES:
            raise ValueError(f"unknown parity {self.parity!r}")
        s = project_parity(s, self.parity)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, func, N, parity="none"):
        return cls(func(grid(N)), parity)

    @classmethod
    def zeros(cls, N, parity="none"):
        return cls(np.zeros(N), parity)

    @property
    def N(self):
        return self.samples.size

    @property
    def alpha(self):
        return grid(self.N)

    @property
    def coeffs(self):
        """Complex coefficients c_k, k = 0..N/2 (negative modes by conjugation)."""
        F = np.fft.rfft(self.samples) / self.N
        k = np.arange(F.size)
        return np.where(k % 2 == 0, F, -F)

    def mean(self):
        return float(np.mean(self.samples))

    def sup(self):
        return float(np.max(np.abs(self.samples)))

    def with_samples(self, samples, parity=None):
        return SpectralField(samples, self.parity if parity is None else parity)

    def __add__(self, other):
        if isinstance(other, SpectralField):
            _same_grid(self, other)
            par = self.parity if self.parity == other.parity else "none"
            return SpectralField(self.samples + other.samples, par)
        keep = self.parity == "even" or not other
        return SpectralField(self.samples + other, self.parity if keep else "none")

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, c):
        return SpectralField(self.samples * float(c), self.parity)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self


def _same_grid(f, g):
    if f.N != g.N:
        raise GridMismatch(f"grid sizes differ: {f.N} vs {g.N}")


# Array-level multipliers. These are the workhorses used inside the solver;
# the SpectralField wrappers below add parity bookkeeping.

def _apply(samples, mult):
    return np.real(np.fft.ifft(np.fft.fft(samples, axis=-1) * mult, axis=-1))


def hilbert_array(samples):
    N = np.shape(samples)[-1]
    k = wavenumbers(N)
    mult = -1j * np.sign(k)
    mult[N // 2] = 0.0
    return _apply(samples, mult)


def derivative_array(samples, order=1):
    N = np.shape(samples)[-1]
    k = wavenumbers(N)
    mult = (1j * k) ** order
    if order % 2:
        mult[N // 2] = 0.0
    return _apply(samples, mult)


def antiderivative_array(samples, check=True):
    """Periodic antiderivative F with F(-pi) = 0."""
    samples = np.asarray(samples, dtype=float)
    N = samples.shape[-1]
    m = np.mean(samples, axis=-1)
    if check and np.any(np.abs(m) > MEAN_TOL):
        raise NonZeroMean(f"mean {np.max(np.abs(m)):.3e} exceeds {MEAN_TOL:g}")
    k = wavenumbers(N)
    mult = np.zeros(N, dtype=complex)
    nz = k != 0
    mult[nz] = 1.0 / (1j * k[nz])
    mult[N // 2] = 0.0
    F = _apply(samples, mult)
    return F - F[..., :1]


def hilbert(f):
    return SpectralField(hilbert_array(f.samples), _flip(f.parity))


def derivative(f):
    return SpectralField(derivative_array(f.samples), _flip(f.parity))


def antiderivative_from(f, base=-np.pi):
    """Antiderivative vanishing at ``base`` (only the grid start -pi is supported)."""
    if not np.isclose(base, -np.pi):
        raise ValueError("antiderivatives are anchored at -pi")
    F = antiderivative_array(f.samples)
    return SpectralField(F, _flip(f.parity))


def symmetrize(f, parity):
    return SpectralField(f.samples, parity)


def inner_product(f, g):
    _same_grid(f, g)
    return float(2.0 * np.pi / f.N * np.dot(f.samples, g.samples))


def mode_amplitudes(samples):
    """Return (k, c_k) over the full symmetric range, c_k the true coefficient."""
    N = np.shape(samples)[-1]
    k = wavenumbers(N)
    F = np.fft.fft(samples, axis=-1) / N
    sign = np.where(k.astype(int) % 2 == 0, 1.0, -1.0)
    c = F * sign
    # split the Nyquist mode evenly between +N/2 and -N/2
    c[..., N // 2] *= 0.5
    return k, c


def harmonic_extension(samples, alpha, psi, d_alpha=0, d_psi=0):
    """Evaluate sum_k c_k (ik)^a |k|^b e^{|k| psi} e^{ik alpha} (real part).

    ``psi <= 0`` is the log-radius; ``alpha`` and ``psi`` broadcast.
    """
    k, c = mode_amplitudes(np.asarray(samples, dtype=float))
    nyq = len(k) // 2
    kk = np.concatenate([k, [-k[nyq]]])
    cc = np.concatenate([c, [c[nyq]]])
    alpha = np.asarray(alpha, dtype=float)
    psi = np.asarray(psi, dtype=float)
    a, p = np.broadcast_arrays(alpha, psi)
    w = cc * (1j * kk) ** d_alpha * np.abs(kk) ** d_psi
    phase = np.exp(np.multiply.outer(np.abs(kk), p.ravel()) + 1j * np.multiply.outer(kk, a.ravel()))
    out = np.real(w @ phase)
    return out.reshape(a.shape)


def harmonic_extension_set(specs, alpha, psi):
    """Several extensions sharing one phase matrix; specs = [(samples, d_alpha, d_psi), ...]."""
    alpha = np.asarray(alpha, dtype=float)
    psi = np.asarray(psi, dtype=float)
    a, p = np.broadcast_arrays(alpha, psi)
    phase = None
    out = []
    for samples, da, dp in specs:
        k, c = mode_amplitudes(np.asarray(samples, dtype=float))
        nyq = len(k) // 2
        kk = np.concatenate([k, [-k[nyq]]])
        cc = np.concatenate([c, [c[nyq]]])
        if phase is None:
            phase = np.exp(np.multiply.outer(np.abs(kk), p.ravel()) + 1j * np.multiply.outer(kk, a.ravel()))
        w = cc * (1j * kk) ** da * np.abs(kk) ** dp
        out.append(np.real(w @ phase).reshape(a.shape))
    return out


def disk_extension_eval(f, rho, alpha):
    """Harmonic extension of ``f`` into the unit disk at (rho, alpha)."""
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr <= 0.0) or np.any(rho_arr >= 1.0):
        raise OutOfDomain(f"rho must lie in (0, 1), got {rho}")
    val = harmonic_extension(f.samples, alpha, np.log(rho_arr))
    return float(val) if np.ndim(val) == 0 else val
