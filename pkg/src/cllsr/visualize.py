"""Consensus heatmaps (as binary PGM images) and convergence series files."""
import os
from typing import Tuple

import numpy as np

from .aqp import ConvergenceTrace
from .errors import WriteFailure

HEATMAP_THRESHOLD = 1e-4
RESCALE_GUARD = 1e-6


def heatmap_transform(C, threshold: float = HEATMAP_THRESHOLD) -> np.ndarray:
    """Map a consensus matrix to [0, 1] for display.

    Entries below `threshold` become 0.  Each kept entry x is replaced by
    log_x(max), the logarithm of the largest kept entry to base x, which is
    1 at the maximum and increases with x.  If the maximum is not below 1
    all kept entries are first divided by ``max * (1 + 1e-6)`` so that every
    base lies in (0, 1).
    """
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("heatmap input must be a square matrix")
    kept = C >= threshold
    kept &= C > 0
    out = np.zeros_like(C)
    if not kept.any():
        return out
    vals = C[kept]
    top = vals.max()
    if top >= 1.0:
        vals = vals / (top * (1.0 + RESCALE_GUARD))
        top = vals.max()
    out[kept] = np.log(top) / np.log(vals)
    return out


def write_pgm(path, image):
    """8-bit binary PGM (P5); values in [0, 1] map to round(255 * v)."""
    pix = np.round(255.0 * np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)).astype(np.uint8)
    h, w = pix.shape
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
            fh.write(pix.tobytes())
    except OSError as exc:
        raise WriteFailure(f"cannot write {path}: {exc}") from exc


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos].decode("ascii"))
    if tokens[0] != "P5":
        raise ValueError("not a binary PGM file")
    w, h = int(tokens[1]), int(tokens[2])
    pos += 1
    return np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)


def emit_heatmap(C_star, threshold: float, path) -> np.ndarray:
    """Write the transformed consensus matrix as a PGM image and return it."""
    image = heatmap_transform(C_star, threshold)
    write_pgm(path, image)
    return image


def emit_convergence(trace: ConvergenceTrace, directory) -> Tuple[str, str]:
    """Write ``pof.csv`` (penalty objective after every sweep) and ``oef.csv``
    (view/consensus gap at the end of each outer iteration, from the second
    one on)."""
    if not len(trace):
        raise ValueError("empty trace")
    pof = os.path.join(directory, "pof.csv")
    oef = os.path.join(directory, "oef.csv")
    try:
        os.makedirs(directory, exist_ok=True)
        with open(pof, "w", encoding="utf-8") as fh:
            fh.write("sweep,k,l,sigma,q\n")
            for i, r in enumerate(trace.records):
                fh.write(f"{i},{r.k},{r.l},{r.sigma:.17g},{r.q:.17g}\n")
        with open(oef, "w", encoding="utf-8") as fh:
            fh.write("k,gap\n")
            for k, gap in enumerate(trace.outer_gaps()):
                if k >= 1:
                    fh.write(f"{k},{gap:.17g}\n")
    except OSError as exc:
        raise WriteFailure(str(exc)) from exc
    return pof, oef


def read_series(path) -> dict:
    """Parse a series file back into ``{column: ndarray}``."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    cols = {}
    for j, name in enumerate(header):
        raw = [r[j] for r in rows]
        if name in ("sweep", "k", "l"):
            cols[name] = np.array([int(x) for x in raw], dtype=np.int64)
        else:
            cols[name] = np.array([float(x) for x in raw])
    return cols
