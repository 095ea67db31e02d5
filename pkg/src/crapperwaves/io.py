"""JSON state files and CSV profile tables.

A state file holds everything needed to rebuild a SolutionState and its
WaveParams. Numbers are written with ``repr`` precision and keys sorted, so
writing a loaded record reproduces the file byte for byte.
"""

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .crapper import WaveParams
from .errors import VersionError
from .residuals import SolutionState, cosine_coeffs, from_cosine, from_sine, sine_coeffs

SCHEMA_VERSION = 1
CSV_COLUMNS = ("alpha", "x", "y", "theta", "tau", "sheet_strength")


@dataclass
class SolutionRecord:
    """Serializable form of a solution: coefficient lists plus scalars."""

    N: int
    params: dict
    theta_sine: list
    omega_cosine: list
    B: float
    r: float = None
    residuals: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    @property
    def omega_mean(self):
        return self.omega_cosine[0]

    def to_state(self):
        th = from_sine(np.array(self.theta_sine, dtype=float), self.N)
        w = from_cosine(np.array(self.omega_cosine, dtype=float), self.N)
        return SolutionState(th, w, float(self.B), self.r)

    def to_params(self):
        return WaveParams(**self.params)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "N": self.N,
            "params": self.params,
            "theta_A_sine": self.theta_sine,
            "omega_sheet_cosine": self.omega_cosine,
            "omega_sheet_mean": self.omega_mean,
            "B": self.B,
            "r": self.r,
            "residuals": self.residuals,
            "diagnostics": self.diagnostics,
        }


def _plain(value):
    """Convert numpy scalars and arrays into JSON-native values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


def make_record(state, params, residuals=None, diagnostics=None):
    return SolutionRecord(
        N=state.N,
        params=_plain(params.scalars()),
        theta_sine=_plain(sine_coeffs(state.theta_A)),
        omega_cosine=_plain(cosine_coeffs(state.omega_sheet)),
        B=float(state.B),
        r=None if state.r is None else float(state.r),
        residuals=_plain(residuals or {}),
        diagnostics=_plain(diagnostics or {}),
    )


def dumps(record):
    return json.dumps(record.to_dict(), sort_keys=True, indent=2) + "\n"


def write_record(record, path):
    path = Path(path)
    try:
        path.write_text(dumps(record))
    except OSError as exc:
        raise OSError(f"cannot write state file {path}: {exc}") from exc
    return path


def read_record(path):
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read state file {path}: {exc}") from exc
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise VersionError(f"{path}: schema version {version!r} is not supported (expected {SCHEMA_VERSION})")
    return SolutionRecord(
        N=doc["N"], params=doc["params"], theta_sine=doc["theta_A_sine"],
        omega_cosine=doc["omega_sheet_cosine"], B=doc["B"], r=doc["r"],
        residuals=doc["residuals"], diagnostics=doc["diagnostics"],
    )


def profile_rows(state, params):
    """Rows alpha, x, y, theta, tau, sheet strength; the first node repeated at alpha = pi."""
    from .residuals import build_curve, interface_fields

    tau, theta, W, _ = interface_fields(state, params)
    curve = build_curve(state, params, tau, theta, W)
    alpha = curve.alpha
    w = np.asarray(state.omega_sheet.samples)
    rows = [(a, z.real, z.imag, t, s, o) for a, z, t, s, o in zip(alpha, curve.z, theta, tau, w)]
    z_end = curve.z[0] + curve.period
    rows.append((np.pi, z_end.real, z_end.imag, theta[0], tau[0], w[0]))
    return rows


def write_csv(state, params, path):
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(CSV_COLUMNS)
            for row in profile_rows(state, params):
                out.writerow([repr(float(v)) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write profile table {path}: {exc}") from exc
    return path


def read_csv(path):
    with Path(path).open() as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    return header, data


def export_solution(state, params, path, residuals=None, diagnostics=None):
    """Write ``path`` (JSON) and its CSV companion next to it; return both paths."""
    path = Path(path)
    record = make_record(state, params, residuals, diagnostics)
    write_record(record, path)
    # the table comes from the stored coefficients so ``export`` reproduces it
    csv_path = write_csv(record.to_state(), record.to_params(), path.with_suffix(".csv"))
    return path, csv_path
