"""Static SVG drawings of one wave period."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import dense_points  # noqa: E402

SVG_SALT = "crapperwaves"


def _overhang_mask(points, period):
    """Segments travelled against the mean horizontal direction."""
    dx = np.diff(points.real)
    direction = np.sign(period.real) or -1.0
    return direction * dx < 0.0


def emit_plot(curve, path, patch=None, vortex=None, title=None, factor=4):
    """Draw the interface, its two neighbouring periods, and the vorticity.

    Elements carry gids (interface, ghost, overhang, vortex, patch-outline)
    so that drawings can be compared structurally.
    """
    path = Path(path)
    pts = dense_points(curve, factor) if curve.N > 1 else curve.z
    pts = np.append(pts, pts[0] + curve.period)
    plt.rcParams["svg.hashsalt"] = SVG_SALT
    fig, ax = plt.subplots(figsize=(7.0, 3.5))
    for shift in (-curve.period, curve.period):
        ghost = pts + shift
        (line,) = ax.plot(ghost.real, ghost.imag, color="0.75", lw=1.0, ls="--")
        line.set_gid("ghost")
    (main,) = ax.plot(pts.real, pts.imag, color="tab:blue", lw=1.5)
    main.set_gid("interface")
    mask = _overhang_mask(pts, curve.period)
    if np.any(mask):
        seg = np.where(mask, 1, 0)
        edges = np.flatnonzero(np.diff(np.concatenate([[0], seg, [0]])))
        for start, stop in zip(edges[::2], edges[1::2]):
            piece = pts[start:stop + 1]
            (hl,) = ax.plot(piece.real, piece.imag, color="tab:red", lw=2.5)
            hl.set_gid("overhang")
    if vortex is not None:
        (mk,) = ax.plot([vortex.real], [vortex.imag], marker="o", color="k", ms=5, ls="none")
        mk.set_gid("vortex")
    if patch is not None:
        g = np.append(patch.gamma, patch.gamma[0])
        (ol,) = ax.plot(g.real, g.imag, color="k", lw=1.0)
        ol.set_gid("patch-outline")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    try:
        fmt = path.suffix.lstrip(".").lower() or "svg"
        meta = {"Date": None} if fmt in ("svg", "pdf") else {}
        fig.savefig(path, format=fmt, metadata=meta)
    except OSError as exc:
        raise OSError(f"cannot write drawing {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path
