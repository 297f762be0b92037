"""Figure rendering for the report-producing commands.

Every figure is written next to its delimited output file and is
deterministic for a fixed input (fixed figure size, no timestamps, Agg
backend), so reruns stay byte-identical.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _save_atomic(fig, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    os.close(fd)
    try:
        fig.savefig(tmp, format=path.suffix.lstrip(".") or "png", dpi=150,
                    metadata={"Software": "birkhoff"})
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def figure_path_for(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def plot_asymptotic_trend(rows, path) -> None:
    """Genus trend g/t^2 against the half-helicity reference, plus deviation."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    t = [r.t_n for r in rows]
    gdat = [r.g_over_t2 for r in rows]
    ref = [r.hel_ref for r in rows]
    dev = [r.rel_dev for r in rows]
    labels = [f"({r.p},{r.q})" if r.p is not None else "" for r in rows]

    ax1.plot(t, gdat, marker="o", color="#1f5fa8", label=r"$g/t^2$")
    ax1.plot(t, ref, linestyle="--", color="#b3362c", label="Hel/2")
    for x, y, lab in zip(t, gdat, labels):
        ax1.annotate(lab, (x, y), textcoords="offset points", xytext=(4, 4),
                     fontsize=7)
    ax1.set_xlabel("orbit period t")
    ax1.set_ylabel("genus / t^2")
    ax1.legend(frameon=False)

    ax2.plot(t, dev, marker="s", color="#3c763d")
    ax2.set_yscale("log")
    ax2.set_xlabel("orbit period t")
    ax2.set_ylabel("relative deviation from Hel/2")
    ax2.grid(True, which="both", alpha=0.3)

    fig.tight_layout()
    _save_atomic(fig, path)


def plot_hopf_table(rows, path) -> None:
    """Euler characteristic and genus of multi-fiber sections versus m."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ms = [r["m"] for r in rows]
    ax.plot(ms, [r["chi"] for r in rows], marker="o", color="#1f5fa8",
            label="Euler characteristic")
    ax.plot(ms, [r["genus"] for r in rows], marker="s", color="#b3362c",
            label="genus")
    ax.set_xlabel("number of fibers m")
    ax.set_ylabel("value")
    ax.set_xticks(ms)
    ax.legend(frameon=False)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save_atomic(fig, path)
