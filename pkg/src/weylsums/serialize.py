"""File output: CSV / JSON / binary grid dumps, all written atomically.

Atomic means temp file + rename in the destination directory, so a
crashed run never leaves a half-written report and reruns with the same
arguments are byte-identical.

Binary grid layout (little-endian): magic b"WEYL1", uint32 N, uint32
length, uint8 axis (0 = x-grid at fixed t, 1 = t-grid at fixed x),
float64 fixed coordinate, then length * (float64 re, float64 im).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

_MAGIC = b"WEYL1"


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode())


def write_csv(path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    atomic_write_text(path, buf.getvalue())


def write_json(path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def params_hash(obj) -> str:
    """Content hash of a parameter set (canonical JSON, sha256)."""
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def grid_to_csv(path, values: np.ndarray, spacing: float, origin: float = 0.0) -> None:
    """Grid dump: index, node, re, im, modulus."""
    rows = (
        (j, repr(origin + j * spacing), repr(float(v.real)), repr(float(v.imag)),
         repr(float(abs(v))))
        for j, v in enumerate(values)
    )
    write_csv(path, ["index", "node", "re", "im", "modulus"], rows)


def grid_to_binary(path, values: np.ndarray, N: int, axis: str, fixed: float) -> None:
    """Binary grid dump; axis "x" means an x-grid at fixed t and vice versa."""
    if axis not in ("x", "t"):
        raise ValueError(f"axis must be 'x' or 't', got {axis!r}")
    head = _MAGIC + struct.pack("<IIBd", N, len(values), 0 if axis == "x" else 1, fixed)
    body = np.ascontiguousarray(
        np.stack([values.real, values.imag], axis=1), dtype="<f8"
    ).tobytes()
    atomic_write_bytes(path, head + body)


def read_binary_grid(path) -> tuple[int, int, str, float, np.ndarray]:
    raw = Path(path).read_bytes()
    if raw[:5] != _MAGIC:
        raise ValueError(f"{path} is not a grid dump (bad magic)")
    N, count, axis, fixed = struct.unpack("<IIBd", raw[5 : 5 + 17])
    flat = np.frombuffer(raw[5 + 17 :], dtype="<f8").reshape(count, 2)
    return N, count, "x" if axis == 0 else "t", fixed, flat[:, 0] + 1j * flat[:, 1]


def profile_to_csv(path, profile) -> None:
    rows = (
        (repr(float(x)), repr(float(s)), repr(float(t)), repr(float(w)))
        for x, s, t, w in zip(profile.x, profile.sup_values,
                              profile.argmax_times, profile.cell_width)
    )
    write_csv(path, ["x", "sup", "t_star", "cell_width"], rows)


def certificate_dict(cert) -> dict:
    return {
        "t_spacing": cert.t_spacing,
        "lipschitz_bound": cert.lipschitz_bound,
        "max_undershoot": cert.max_undershoot,
        "refined": cert.refined,
        "taylor_order": cert.taylor_order,
        "numeric_slack": cert.numeric_slack,
        "evaluations": cert.evaluations,
    }


def profile_to_json(path, profile) -> None:
    write_json(path, {
        "N": profile.N,
        "base_grid": {"origin": profile.x_nodes.origin,
                      "count": profile.x_nodes.count,
                      "spacing": profile.x_nodes.spacing},
        "certificate": certificate_dict(profile.certificate),
        "x": profile.x.tolist(),
        "cell_width": profile.cell_width.tolist(),
        "sup": profile.sup_values.tolist(),
        "t_star": profile.argmax_times.tolist(),
    })


def collection_to_json(path, coll) -> None:
    write_json(path, collection_dict(coll))


def collection_dict(coll) -> dict:
    return {
        "scale": {"N": coll.scale.N, "alpha": coll.scale.alpha, "eta": coll.scale.eta},
        "rects": [
            {
                "x": list(r.x_interval),
                "t": list(r.t_interval),
                "witness_x": r.witness_x,
                "witness_t": r.witness_t,
                "witness_value": r.witness_value,
            }
            for r in coll.rects
        ],
    }


def collection_from_json(path):
    from .evaluate import WeylScale
    from .rectangles import OneDimCollection, Rect

    obj = json.loads(Path(path).read_text())
    scale = WeylScale(**obj["scale"])
    rects = tuple(
        Rect(
            x_interval=tuple(r["x"]),
            t_interval=tuple(r["t"]),
            scale=scale,
            witness_x=r["witness_x"],
            witness_t=r["witness_t"],
            witness_value=r["witness_value"],
        )
        for r in obj["rects"]
    )
    return OneDimCollection(rects, scale)


def partition_to_json(path, part) -> None:
    write_json(path, {
        "classes": {
            str(q): [list(r.x_interval) + list(r.t_interval) for r in rects]
            for q, rects in sorted(part.classes.items())
        },
        "unassigned": [list(r.x_interval) + list(r.t_interval) for r in part.unassigned],
        "ambiguous_count": len(part.ambiguous),
    })


def levelset_to_csv(path, report) -> None:
    rows = ((repr(lo), repr(hi), repr(hi - lo)) for lo, hi in report.intervals)
    write_csv(path, ["lo", "hi", "width"], rows)
