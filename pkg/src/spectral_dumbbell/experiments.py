"""Experiment drivers: thin-neck dumbbell convergence and the sphere Weyl ratio."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .closed_forms import segment_dirichlet_spectrum, sphere_spectrum
from .errors import DomainError, MeshError, SolverError
from .fem import mesh_spectrum
from .mesh import IsoReport, glue_dumbbell, isoperimetric_ratio
from .planner import check_isoperimetric_bound, weyl_threshold
from .spectra import Spectrum, merge_spectra

log = logging.getLogger(__name__)


@dataclass
class DumbbellRow:
    delta: float
    values: Optional[np.ndarray] = None
    iso: Optional[IsoReport] = None
    n_vertices: int = 0
    iso_bound_max_ratio: float = math.nan
    error: str = ""
    error_kind: str = ""  # "mesh" | "solver" | ""

    @property
    def ok(self) -> bool:
        return not self.error


@dataclass
class DumbbellTable:
    h: float
    level: int
    m: int
    rows: list
    two_spheres: Spectrum
    segment: Spectrum
    with_segment: Spectrum
    limit_iso: IsoReport
    metadata: dict = field(default_factory=dict)

    @property
    def failed(self) -> list:
        return [r for r in self.rows if not r.ok]

    def header(self) -> list[str]:
        return (["row", "delta"] + [f"lambda_{i}" for i in range(self.m)]
                + ["area", "enclosed", "ratio", "vertices", "iso_bound_max_ratio", "status"])

    def records(self) -> list[list]:
        out = []
        nan = [math.nan] * self.m
        for r in self.rows:
            vals = list(r.values) if r.ok else nan
            iso = [r.iso.area, r.iso.enclosed, r.iso.ratio] if r.ok else [math.nan] * 3
            out.append(["dumbbell", r.delta] + vals + iso
                       + [r.n_vertices, r.iso_bound_max_ratio, "ok" if r.ok else r.error])
        li = self.limit_iso
        limits = [("limit_two_spheres", self.two_spheres, [li.area, li.enclosed, li.ratio]),
                  ("limit_with_segment", self.with_segment, [li.area, li.enclosed, li.ratio]),
                  ("segment_dirichlet", self.segment, [math.nan] * 3)]
        for name, s, iso in limits:
            vals = list(s.values[: self.m]) + [math.nan] * max(0, self.m - len(s))
            out.append([name, 0.0] + vals + iso + [0, math.nan, "limit"])
        return out


def two_sphere_limit_iso() -> IsoReport:
    area = 8 * math.pi
    vol = 8 * math.pi / 3
    return IsoReport(area, vol, area / vol ** (2.0 / 3.0))


def _dumbbell_point(delta, h, level, m, tol, seed, rings, segs) -> DumbbellRow:
    row = DumbbellRow(delta)
    try:
        mesh = glue_dumbbell(delta, h, level, rings=rings, segs=segs)
        row.n_vertices = mesh.n_vertices
        row.iso = isoperimetric_ratio(mesh)
        s = mesh_spectrum(mesh, m, tol=tol, seed=seed, label=f"dumbbell delta={delta:g}")
        row.values = s.values.copy()
        row.iso_bound_max_ratio = check_isoperimetric_bound(s, row.iso, m - 1).max_ratio
    except (MeshError, DomainError) as exc:
        row.error, row.error_kind = f"mesh: {exc}", "mesh"
    except SolverError as exc:
        row.error, row.error_kind = f"solver: {exc}", "solver"
    return row


def run_dumbbell_convergence(h: float, deltas: Sequence[float], level: int = 4, m: int = 8,
                             tol: float = 1e-9, seed: int = 0, threads: Optional[int] = None,
                             rings: Optional[int] = None, segs: Optional[int] = None) -> DumbbellTable:
    """Spectrum and isoperimetric ratio of the glued dumbbell for each neck radius.

    ``deltas`` must be strictly decreasing. Failed points are kept as rows
    carrying their error; limit rows give the two-sphere union spectrum, the
    Dirichlet spectrum of [-h, h], and their merge.
    """
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise DomainError("deltas must not be empty")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise DomainError(f"deltas must be strictly decreasing, got {deltas}")
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    if m < 2:
        raise DomainError(f"need at least 2 eigenvalues, got {m}")

    def work(d):
        return _dumbbell_point(d, h, level, m, tol, seed, rings, segs)

    if threads == 1 or len(deltas) == 1:
        rows = [work(d) for d in deltas]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, deltas))

    sphere = sphere_spectrum(2, m)
    two = merge_spectra(sphere, sphere).merged.head(m)
    seg = segment_dirichlet_spectrum(h, m)
    # segment is one-dimensional; merge its values by hand into the surface list
    with_seg = Spectrum(2, np.sort(np.concatenate([two.values, seg.values]))[:m], two.volume,
                        "two spheres + segment")
    meta = {"experiment": "dumbbell", "h": h, "deltas": deltas, "level": level, "m": m,
            "tol": tol, "seed": seed, "limit_ratio": two_sphere_limit_iso().ratio,
            "segment_lambda_1": float(seg.values[0])}
    return DumbbellTable(h, level, m, rows, two, seg, with_seg, two_sphere_limit_iso(), meta)


@dataclass
class WeylTable:
    n: int
    k: np.ndarray
    lam_prev: np.ndarray  # lambda_{k-1}(S^n)
    ratio: np.ndarray
    k1: int

    def header(self) -> list[str]:
        return ["k", "lambda_k_minus_1", "weyl_ratio", "k1_mark"]

    def records(self):
        for k, lam, r in zip(self.k, self.lam_prev, self.ratio):
            yield [int(k), float(lam), float(r), 1 if k == self.k1 else 0]


def run_weyl_experiment(n: int, k_max: int) -> WeylTable:
    """Weyl ratio of S^n for k = 1..k_max, with the threshold after which it stays above 1/2."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if k_max < 1:
        raise DomainError(f"k_max must be >= 1, got {k_max}")
    k1, lam, ratio = weyl_threshold(n, k_max)
    return WeylTable(n, np.arange(1, k_max + 1), lam, ratio, k1)
