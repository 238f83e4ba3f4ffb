"""File formats: OFF meshes, spectrum CSV + JSON sidecar, eigen CSV,
Matrix Market, tables with a JSON metadata header, plot data, certificates.

Floats are written with ``repr`` so every file round-trips bit-exactly.
"""
from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path
from typing import Iterable, Optional, TextIO

import numpy as np
import scipy.io

from .errors import DomainError
from .mesh import TriMesh
from .spectra import Spectrum

OUT_DIR_ENV = "SPECTRAL_DUMBBELL_OUT"


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "."))


# --- OFF -------------------------------------------------------------------

def dump_off(mesh: TriMesh, stream: TextIO) -> None:
    stream.write("OFF\n")
    stream.write(f"{mesh.n_vertices} {mesh.n_triangles} 0\n")
    for v in mesh.vertices:
        stream.write(" ".join(repr(float(c)) for c in v) + "\n")
    for t in mesh.triangles:
        stream.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def write_off(mesh: TriMesh, path) -> None:
    with open(path, "w", newline="\n") as f:
        dump_off(mesh, f)


def parse_off(text: str) -> TriMesh:
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            tokens.append(line.split())
    if not tokens or tokens[0][0] != "OFF":
        raise DomainError("not an OFF file: missing 'OFF' header")
    head = tokens[0][1:] if len(tokens[0]) > 1 else None
    rest = tokens[1:]
    if head is None:
        head, rest = rest[0], rest[1:]
    nv, nf = int(head[0]), int(head[1])
    if len(rest) < nv + nf:
        raise DomainError(f"OFF file truncated: expected {nv} vertices and {nf} faces")
    verts = np.array([[float(c) for c in row[:3]] for row in rest[:nv]])
    faces = []
    for row in rest[nv:nv + nf]:
        if int(row[0]) != 3:
            raise DomainError(f"only triangular faces are supported, got a {row[0]}-gon")
        faces.append([int(row[1]), int(row[2]), int(row[3])])
    return TriMesh(verts.reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))


def read_off(path) -> TriMesh:
    return parse_off(Path(path).read_text())


# --- spectra ---------------------------------------------------------------

def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def dump_spectrum_csv(s: Spectrum, stream: TextIO) -> None:
    stream.write("index,eigenvalue\n")
    for i, v in enumerate(s.values):
        stream.write(f"{i},{fmt(v)}\n")


def write_spectrum(s: Spectrum, path) -> None:
    with open(path, "w", newline="\n") as f:
        dump_spectrum_csv(s, f)
    write_json({"dim": s.dim, "volume": s.volume, "label": s.label}, sidecar_path(path))


def read_spectrum(path) -> Spectrum:
    meta = json.loads(sidecar_path(path).read_text())
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows or "eigenvalue" not in rows[0]:
        raise DomainError(f"{path}: expected header 'index,eigenvalue'")
    rows.sort(key=lambda r: int(r["index"]))
    return Spectrum(int(meta["dim"]), [float(r["eigenvalue"]) for r in rows],
                    float(meta["volume"]), meta.get("label", ""))


def write_eig_csv(values, residuals, path) -> None:
    with open(path, "w", newline="\n") as f:
        f.write("index,eigenvalue,residual\n")
        for i, (v, r) in enumerate(zip(values, residuals)):
            f.write(f"{i},{fmt(v)},{fmt(r)}\n")


def write_matrix_market(A, path, comment: str = "") -> None:
    scipy.io.mmwrite(str(path), A.tocoo(), comment=comment, symmetry="symmetric")


# --- tables, plot data, JSON ----------------------------------------------

def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def dump_table(header: list[str], rows: Iterable, metadata: Optional[dict], stream: TextIO) -> None:
    """CSV preceded by one ``# {json}`` metadata line."""
    if metadata is not None:
        stream.write("# " + json.dumps(metadata, sort_keys=True) + "\n")
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(fmt(x) for x in row) + "\n")


def write_table(path, header, rows, metadata=None) -> None:
    with open(path, "w", newline="\n") as f:
        dump_table(header, rows, metadata, f)


def read_table(path) -> tuple[dict, list[dict]]:
    text = Path(path).read_text()
    meta = {}
    lines = text.splitlines()
    while lines and lines[0].startswith("#"):
        meta.update(json.loads(lines.pop(0)[1:].strip()))
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    return meta, rows


def write_plot_data(path, x, y, xname: str = "x", yname: str = "y") -> None:
    write_table(path, [xname, yname], zip(x, y))


def read_f_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column ``x,fx`` CSV describing a piecewise-linear function."""
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows or not {"x", "fx"} <= set(rows[0]):
        raise DomainError(f"{path}: expected header 'x,fx'")
    x = np.array([float(r["x"]) for r in rows])
    y = np.array([float(r["fx"]) for r in rows])
    return x, y
