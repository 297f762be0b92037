"""Curve file format (JSON).

Schema::

    {
      "ambient": "s3" | "r3",
      "curves": [
        {"name": "gamma_0",
         "vertices": [[x, y, z, (w)], ...],
         "normals":  [[...], ...]}        # optional, per vertex
      ]
    }

Vertices are row-major and the closing edge is implicit. The reader rejects
NaN/Inf everywhere and, for "s3", vertex norms deviating from 1 by more than
1e-6 (valid vertices are then renormalized exactly).
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import InputError
from .geometry import PolyCurve

NORM_REJECT = 1e-6


def _check_finite(rows, what: str) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 2:
        raise InputError(f"{what} must be a list of coordinate rows")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} contains NaN or Inf")
    return arr


def load_curves(path) -> list[PolyCurve]:
    """Read a curve file; normals (when present) are attached per curve name."""
    curves, _ = load_curves_with_normals(path)
    return curves


def load_curves_with_normals(path) -> tuple[list[PolyCurve], list[np.ndarray | None]]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot parse curve file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputError("curve file must contain a JSON object")
    ambient = doc.get("ambient")
    if ambient not in ("s3", "r3"):
        raise InputError('curve file needs "ambient": "s3" or "r3"')
    dim = 4 if ambient == "s3" else 3
    entries = doc.get("curves")
    if not isinstance(entries, list) or not entries:
        raise InputError('curve file needs a non-empty "curves" list')
    curves: list[PolyCurve] = []
    normals: list[np.ndarray | None] = []
    for k, entry in enumerate(entries):
        if not isinstance(entry, dict) or "vertices" not in entry:
            raise InputError(f"curve #{k} lacks a vertices array")
        verts = _check_finite(entry["vertices"], f"curve #{k} vertices")
        if verts.shape[1] != dim:
            raise InputError(
                f"curve #{k}: expected {dim} coordinates per vertex, got {verts.shape[1]}")
        if ambient == "s3":
            norms = np.linalg.norm(verts, axis=1)
            if np.any(np.abs(norms - 1.0) > NORM_REJECT):
                worst = float(np.abs(norms - 1.0).max())
                raise InputError(
                    f"curve #{k}: vertex norm deviates from 1 by {worst:.2e}")
            verts = verts / norms[:, None]
        name = str(entry.get("name", f"curve_{k}"))
        try:
            curves.append(PolyCurve(verts, ambient=ambient, name=name))
        except Exception as exc:
            raise InputError(f"curve #{k} ({name}) invalid: {exc}") from exc
        if "normals" in entry:
            nrm = _check_finite(entry["normals"], f"curve #{k} normals")
            if nrm.shape != verts.shape:
                raise InputError(f"curve #{k}: normals must align with vertices")
            normals.append(nrm)
        else:
            normals.append(None)
    return curves, normals


def save_curves(path, curves, normals=None) -> None:
    """Write curves (and optional per-curve normal arrays) atomically."""
    curves = list(curves)
    ambient = curves[0].ambient
    doc = {"ambient": ambient, "curves": []}
    for k, c in enumerate(curves):
        if c.ambient != ambient:
            raise InputError("all curves in one file share an ambient")
        entry = {"name": c.name or f"curve_{k}",
                 "vertices": [list(map(float, v)) for v in c.vertices]}
        if normals is not None and normals[k] is not None:
            entry["normals"] = [list(map(float, v)) for v in np.asarray(normals[k])]
        doc["curves"].append(entry)
    write_json_atomic(path, doc)


def write_json_atomic(path, obj) -> None:
    """Serialize ``obj`` to JSON at ``path`` via a temp file and rename."""
    path = Path(path)
    _atomic_write_text(path, json.dumps(obj, indent=2) + "\n")


def write_text_atomic(path, text: str) -> None:
    _atomic_write_text(Path(path), text)


def _atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fraction_to_json(fr) -> str | int:
    """Exact JSON form of a rational: int when integral, else "p/q"."""
    if fr.denominator == 1:
        return int(fr.numerator)
    return f"{fr.numerator}/{fr.denominator}"
