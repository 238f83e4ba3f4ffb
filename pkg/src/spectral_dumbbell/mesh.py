"""Closed triangle meshes: generation, validation and measurement.

Meshes are plain vertex/triangle arrays. Triangles are counter-clockwise
seen from outside, so the divergence-theorem volume is positive for a
correctly oriented closed surface.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, MeshError

DEGENERATE_AREA_FACTOR = 1e-14
MAX_ICOSPHERE_LEVEL = 8
MAX_GLUE_DELTA = 0.3


@dataclass
class TriMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    tags: Optional[np.ndarray] = None  # per-triangle region label

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.tags is not None:
            self.tags = np.asarray(self.tags, dtype=object)
            if self.tags.shape != (len(self.triangles),):
                raise MeshError("tags must hold one label per triangle")
        if self.triangles.size and (self.triangles.min() < 0
                                    or self.triangles.max() >= len(self.vertices)):
            raise MeshError("triangle index out of range")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def copy(self) -> "TriMesh":
        return TriMesh(self.vertices.copy(), self.triangles.copy(),
                       None if self.tags is None else self.tags.copy())

    def flipped(self) -> "TriMesh":
        """Same surface with every triangle's orientation reversed."""
        return TriMesh(self.vertices.copy(), self.triangles[:, ::-1].copy(),
                       None if self.tags is None else self.tags.copy())

    def translated(self, offset) -> "TriMesh":
        return TriMesh(self.vertices + np.asarray(offset, dtype=float), self.triangles.copy(),
                       None if self.tags is None else self.tags.copy())

    def select(self, tag: str) -> "TriMesh":
        """Sub-mesh of the triangles carrying ``tag`` (vertices are not compacted)."""
        if self.tags is None:
            raise MeshError("mesh has no tags")
        keep = self.tags == tag
        return TriMesh(self.vertices, self.triangles[keep], self.tags[keep])


# ---------------------------------------------------------------------------
# measurement

def triangle_areas(mesh: TriMesh) -> np.ndarray:
    v = mesh.vertices[mesh.triangles]
    return 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)


def area(mesh: TriMesh) -> float:
    return float(np.sum(triangle_areas(mesh)))


def signed_volume(mesh: TriMesh) -> float:
    """(1/6) sum of a . (b x c) over triangles; positive for outward orientation.

    Coordinates are taken relative to the vertex centroid, which leaves the
    result unchanged for closed meshes and avoids cancellation far from the origin.
    """
    v = (mesh.vertices - mesh.vertices.mean(axis=0))[mesh.triangles]
    return float(np.sum(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])))) / 6.0


def enclosed_volume(mesh: TriMesh) -> float:
    """Volume bounded by a closed oriented mesh (absolute value of the signed volume)."""
    report = validate(mesh)
    if not (report.closed and report.oriented):
        raise MeshError("enclosed volume needs a closed, oriented mesh: " + "; ".join(report.messages))
    return abs(signed_volume(mesh))


def mean_edge_length(mesh: TriMesh) -> float:
    e = _undirected_edges(mesh)
    return float(np.mean(np.linalg.norm(mesh.vertices[e[:, 0]] - mesh.vertices[e[:, 1]], axis=1)))


@dataclass(frozen=True)
class IsoReport:
    area: float
    enclosed: float
    ratio: float

    def as_dict(self) -> dict:
        return {"area": self.area, "enclosed": self.enclosed, "ratio": self.ratio}


def isoperimetric_ratio(*meshes: TriMesh) -> IsoReport:
    """I = area / enclosed^(2/3) of a disjoint union of closed surfaces.

    Areas and enclosed volumes both add over the components; the meshes are
    assumed not to intersect.
    """
    if not meshes:
        raise DomainError("need at least one mesh")
    total_area = sum(area(m) for m in meshes)
    total_vol = sum(enclosed_volume(m) for m in meshes)
    return IsoReport(total_area, total_vol, total_area / total_vol ** (2.0 / 3.0))


def sphere_iso_ratio() -> float:
    """Isoperimetric ratio of a round sphere in R^3, 4 pi / (4 pi / 3)^(2/3)."""
    return 4 * math.pi / (4 * math.pi / 3) ** (2.0 / 3.0)


def scale_mesh(mesh: TriMesh, c: float) -> TriMesh:
    if not c > 0:
        raise DomainError(f"scale factor must be positive, got {c}")
    return TriMesh(mesh.vertices * c, mesh.triangles.copy(),
                   None if mesh.tags is None else mesh.tags.copy())


def scale_to_area(mesh: TriMesh, target_area: float) -> TriMesh:
    if not target_area > 0:
        raise DomainError(f"target area must be positive, got {target_area}")
    return scale_mesh(mesh, math.sqrt(target_area / area(mesh)))


def disjoint_union(*meshes: TriMesh) -> TriMesh:
    """Concatenate meshes into one vertex/triangle set (components stay separate)."""
    verts, tris, tags = [], [], []
    offset = 0
    for m in meshes:
        verts.append(m.vertices)
        tris.append(m.triangles + offset)
        tags.append(m.tags if m.tags is not None else np.full(m.n_triangles, "", dtype=object))
        offset += m.n_vertices
    return TriMesh(np.vstack(verts), np.vstack(tris), np.concatenate(tags))


# ---------------------------------------------------------------------------
# topology and validation

def _directed_edges(mesh: TriMesh) -> np.ndarray:
    t = mesh.triangles
    return np.stack([t[:, [0, 1, 2]].ravel(), t[:, [1, 2, 0]].ravel()], axis=1)


def _undirected_edges(mesh: TriMesh) -> np.ndarray:
    return np.unique(np.sort(_directed_edges(mesh), axis=1), axis=0)


def boundary_loops(mesh: TriMesh) -> list[list[int]]:
    """Boundary loops as vertex lists following the mesh's own edge direction.

    A boundary edge is a directed edge whose reverse is not used by any triangle.
    """
    d = _directed_edges(mesh)
    nv = mesh.n_vertices
    key = d[:, 0] * nv + d[:, 1]
    rkey = d[:, 1] * nv + d[:, 0]
    bnd = d[~np.isin(key, rkey)]
    nxt: dict[int, int] = {}
    for a, b in bnd:
        if int(a) in nxt:
            raise MeshError(f"boundary pinches at vertex {int(a)}")
        nxt[int(a)] = int(b)
    loops = []
    seen: set[int] = set()
    for start in sorted(nxt):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        cur = nxt[start]
        while cur != start:
            if cur in seen or cur not in nxt:
                raise MeshError(f"boundary walk broken at vertex {cur}")
            loop.append(cur)
            seen.add(cur)
            cur = nxt[cur]
        loops.append(loop)
    return loops


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)  # name -> bool
    messages: list = field(default_factory=list)
    n_vertices: int = 0
    n_edges: int = 0
    n_triangles: int = 0
    euler: int = 0
    components: int = 0
    boundary_loops: int = 0
    genus: Optional[int] = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def closed(self) -> bool:
        return self.checks.get("closed", False)

    @property
    def oriented(self) -> bool:
        return self.checks.get("oriented", False)

    def as_dict(self) -> dict:
        return {
            "ok": self.ok, "checks": dict(self.checks), "messages": list(self.messages),
            "vertices": self.n_vertices, "edges": self.n_edges, "triangles": self.n_triangles,
            "euler": self.euler, "components": self.components,
            "boundary_loops": self.boundary_loops, "genus": self.genus,
        }


def validate(mesh: TriMesh) -> ValidationReport:
    """Check closedness, consistent orientation, manifold edges and triangle quality."""
    rep = ValidationReport(n_vertices=mesh.n_vertices, n_triangles=mesh.n_triangles)
    if mesh.n_triangles == 0:
        rep.checks["nonempty"] = False
        rep.messages.append("mesh has no triangles")
        return rep
    nv = mesh.n_vertices
    d = _directed_edges(mesh)
    und = np.sort(d, axis=1)
    ukeys, ucounts = np.unique(und[:, 0] * nv + und[:, 1], return_counts=True)
    dkeys, dcounts = np.unique(d[:, 0] * nv + d[:, 1], return_counts=True)
    rep.n_edges = len(ukeys)

    nonmanifold = int(np.count_nonzero(ucounts > 2))
    rep.checks["manifold_edges"] = nonmanifold == 0
    if nonmanifold:
        rep.messages.append(f"non-manifold: {nonmanifold} edges with more than 2 triangles")

    n_boundary = int(np.count_nonzero(ucounts == 1))
    rep.checks["closed"] = n_boundary == 0
    if n_boundary:
        try:
            rep.boundary_loops = len(boundary_loops(mesh))
        except MeshError:
            rep.boundary_loops = -1
        rep.messages.append(f"open: {rep.boundary_loops} boundary loops" if rep.boundary_loops >= 0
                            else f"open: {n_boundary} boundary edges (pinched)")

    dup = int(np.count_nonzero(dcounts > 1))
    rep.checks["oriented"] = dup == 0 and nonmanifold == 0
    if dup:
        rep.messages.append(f"orientation: {dup} directed edges used twice")

    used = np.unique(mesh.triangles)
    rep.checks["no_isolated_vertices"] = len(used) == nv
    if len(used) != nv:
        rep.messages.append(f"{nv - len(used)} unreferenced vertices")

    diag2 = float(np.sum((mesh.vertices.max(axis=0) - mesh.vertices.min(axis=0)) ** 2))
    bad = np.flatnonzero(triangle_areas(mesh) < DEGENERATE_AREA_FACTOR * diag2)
    rep.checks["nondegenerate"] = bad.size == 0
    if bad.size:
        rep.messages.append(f"degenerate triangles: {bad[:10].tolist()}")

    adj = coo_matrix((np.ones(len(d)), (d[:, 0], d[:, 1])), shape=(nv, nv))
    rep.components = int(connected_components(adj, directed=False)[0]) - (nv - len(used))
    rep.euler = len(used) - rep.n_edges + mesh.n_triangles
    if rep.closed and rep.oriented:
        g2 = 2 * rep.components - rep.euler
        rep.genus = g2 // 2
    return rep


def require_valid(mesh: TriMesh) -> ValidationReport:
    rep = validate(mesh)
    if not rep.ok:
        raise MeshError("invalid mesh: " + "; ".join(rep.messages))
    return rep


# ---------------------------------------------------------------------------
# generators

_PHI = (1.0 + math.sqrt(5.0)) / 2.0
_ICO_VERTS = np.array([
    [-1, _PHI, 0], [1, _PHI, 0], [-1, -_PHI, 0], [1, -_PHI, 0],
    [0, -1, _PHI], [0, 1, _PHI], [0, -1, -_PHI], [0, 1, -_PHI],
    [_PHI, 0, -1], [_PHI, 0, 1], [-_PHI, 0, -1], [-_PHI, 0, 1],
], dtype=float)
_ICO_FACES = np.array([
    [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
    [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
    [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
    [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
], dtype=np.int64)


def gen_icosphere(level: int, radius: float = 1.0, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Icosahedron subdivided ``level`` times with vertices pushed to the sphere."""
    if int(level) != level or level < 0:
        raise DomainError(f"level must be a nonnegative integer, got {level!r}")
    if level > MAX_ICOSPHERE_LEVEL:
        raise DomainError(f"level {level} exceeds size limit {MAX_ICOSPHERE_LEVEL}")
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    verts = _ICO_VERTS / np.linalg.norm(_ICO_VERTS, axis=1, keepdims=True)
    faces = _ICO_FACES.copy()
    for _ in range(int(level)):
        nv = len(verts)
        e = np.stack([faces[:, [0, 1, 2]], faces[:, [1, 2, 0]]], axis=2).reshape(-1, 2)
        uniq, inv = np.unique(np.sort(e, axis=1), axis=0, return_inverse=True)
        mid = verts[uniq[:, 0]] + verts[uniq[:, 1]]
        mid /= np.linalg.norm(mid, axis=1, keepdims=True)
        verts = np.vstack([verts, mid])
        m = (nv + inv.ravel()).reshape(-1, 3)  # midpoints of edges 01, 12, 20
        a, b, c = faces[:, 0], faces[:, 1], faces[:, 2]
        faces = np.concatenate([
            np.stack([a, m[:, 0], m[:, 2]], axis=1),
            np.stack([b, m[:, 1], m[:, 0]], axis=1),
            np.stack([c, m[:, 2], m[:, 1]], axis=1),
            m,
        ])
    mesh = TriMesh(verts * radius + np.asarray(center, dtype=float), faces)
    return mesh


def _axis_frame(axis) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    a = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(a)
    if norm == 0:
        raise DomainError("pole direction must be nonzero")
    a = a / norm
    helper = np.array([1.0, 0.0, 0.0]) if abs(a[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(a, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    return a, e1, e2


def smoothstep5(t):
    """Quintic smoothstep 6t^5 - 15t^4 + 10t^3 on [0, 1], clamped outside."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def flatten_cap(mesh: TriMesh, pole, disc_radius: float, center=None) -> TriMesh:
    """Flatten a sphere-like mesh around ``pole`` into its tangent plane.

    Vertices on the pole side whose distance to the axis is below
    ``disc_radius`` are moved into the tangent plane at the pole; between
    ``disc_radius`` and ``2 * disc_radius`` the height above the plane is
    blended back to the original surface with a quintic smoothstep.
    """
    c = mesh.vertices.mean(axis=0) if center is None else np.asarray(center, dtype=float)
    rel = mesh.vertices - c
    radius = float(np.mean(np.linalg.norm(rel, axis=1)))
    if not disc_radius > 0:
        raise DomainError(f"disc radius must be positive, got {disc_radius}")
    if disc_radius > 0.3 * radius * (1 + 1e-9):
        raise DomainError(f"disc radius {disc_radius} too large for mesh radius {radius:.4g} "
                          "(must be <= 0.3 * radius)")
    a, _, _ = _axis_frame(pole)
    t = rel @ a
    rho = np.linalg.norm(rel - np.outer(t, a), axis=1)
    sel = (t > 0) & (rho < 2.0 * disc_radius)
    w = smoothstep5((rho[sel] - disc_radius) / disc_radius)
    t_new = radius - w * (radius - t[sel])
    out = mesh.copy()
    out.vertices[sel] += np.outer(t_new - t[sel], a)
    return out


@dataclass(frozen=True)
class TubeProfile:
    """Radius profile of the connecting tube along the axis, z in [-h, h].

    ``smoothstep``: radius delta/2 on [-h/2, h/2], rising by a quintic
    smoothstep to delta at |z| = h (even in z). ``constant``: radius delta.
    """

    delta: float
    h: float
    kind: str = "smoothstep"

    def __post_init__(self):
        if not (self.delta > 0 and self.h > 0):
            raise DomainError(f"degenerate tube profile: delta={self.delta}, h={self.h}")
        if self.kind not in ("smoothstep", "constant"):
            raise DomainError(f"unknown profile kind {self.kind!r}")

    def radius(self, z):
        z = np.asarray(z, dtype=float)
        if self.kind == "constant":
            return np.full_like(z, self.delta)
        s = smoothstep5((np.abs(z) - 0.5 * self.h) / (0.5 * self.h))
        return 0.5 * self.delta * (1.0 + s)

    def samples(self, count: int) -> np.ndarray:
        """(z, radius) pairs at ``count`` equally spaced stations on [-h, h]."""
        z = np.linspace(-self.h, self.h, count)
        return np.stack([z, self.radius(z)], axis=1)


def gen_revolution_tube(profile: TubeProfile, rings: int, segs: int) -> TriMesh:
    """Open tube x^2 + y^2 = radius(z)^2 over z in [-h, h], normals pointing outward.

    Vertex ``r * segs + j`` sits on station ``r`` (0 .. rings) at angle
    ``2 pi j / segs``; stations 0 and ``rings`` are the boundary circles at
    z = -h and z = +h.
    """
    if rings < 4 or segs < 8:
        raise DomainError(f"tube needs rings >= 4 and segs >= 8, got {rings}, {segs}")
    z = np.linspace(-profile.h, profile.h, rings + 1)
    z[0], z[-1] = -profile.h, profile.h
    r = profile.radius(z)
    theta = 2.0 * np.pi * np.arange(segs) / segs
    ct, st = np.cos(theta), np.sin(theta)
    verts = np.stack([np.outer(r, ct), np.outer(r, st), np.repeat(z[:, None], segs, axis=1)],
                     axis=2).reshape(-1, 3)
    ri, j = np.meshgrid(np.arange(rings), np.arange(segs), indexing="ij")
    ri, j = ri.ravel(), j.ravel()
    jn = (j + 1) % segs
    v00, v01 = ri * segs + j, ri * segs + jn
    v10, v11 = (ri + 1) * segs + j, (ri + 1) * segs + jn
    tris = np.concatenate([np.stack([v00, v01, v11], axis=1), np.stack([v00, v11, v10], axis=1)])
    return TriMesh(verts, tris, np.full(len(tris), "tube", dtype=object))


def _remove_triangles(mesh: TriMesh, drop: np.ndarray) -> TriMesh:
    """Drop triangles, then peel triangles off any boundary pinch until the hole is a disc."""
    drop = drop.copy()
    while True:
        sub = TriMesh(mesh.vertices, mesh.triangles[~drop])
        d = _directed_edges(sub)
        nv = sub.n_vertices
        key = d[:, 0] * nv + d[:, 1]
        bnd = d[~np.isin(key, d[:, 1] * nv + d[:, 0])]
        starts, counts = np.unique(bnd[:, 0], return_counts=True)
        pinched = starts[counts > 1]
        if pinched.size == 0:
            break
        drop |= np.isin(mesh.triangles, pinched).any(axis=1)
    keep_t = mesh.triangles[~drop]
    used = np.unique(keep_t)
    remap = -np.ones(mesh.n_vertices, dtype=np.int64)
    remap[used] = np.arange(len(used))
    tags = None if mesh.tags is None else mesh.tags[~drop]
    return TriMesh(mesh.vertices[used], remap[keep_t], tags)


def _angles_about(points: np.ndarray, center, axis) -> np.ndarray:
    a, e1, e2 = _axis_frame(axis)
    rel = points - np.asarray(center, dtype=float)
    return np.arctan2(rel @ e2, rel @ e1)


def _ccw_loop(loop: list[int], ang: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reorder a loop to increasing angle, starting at the smallest angle; unwrap."""
    idx = np.asarray(loop)
    a = ang[idx]
    turn = np.sum(np.angle(np.exp(1j * (np.roll(a, -1) - a))))
    if turn < 0:
        idx, a = idx[::-1], a[::-1]
    s = int(np.argmin(np.mod(a, 2 * np.pi)))
    idx, a = np.roll(idx, -s), np.mod(np.roll(a, -s), 2 * np.pi)
    if np.any(np.diff(a) <= 0):
        raise MeshError("boundary loop is not star-shaped about the axis; cannot zip")
    return idx, a


def zip_loops(vertices: np.ndarray, loop_a: list[int], loop_b: list[int],
              center, axis) -> np.ndarray:
    """Triangulate the band between two boundary loops around a common axis.

    Both loops are given in the direction their existing triangles traverse
    them; each new triangle uses its loop edge reversed, which makes the
    stitched surface consistently oriented.
    """
    ang = np.zeros(len(vertices))
    both = np.concatenate([loop_a, loop_b])
    ang[both] = _angles_about(vertices[both], center, axis)
    need = {}  # undirected loop edge -> required direction
    for loop in (loop_a, loop_b):
        for i, v in enumerate(loop):
            w = loop[(i + 1) % len(loop)]
            need[(min(v, w), max(v, w))] = (w, v)
    A, angA = _ccw_loop(loop_a, ang)
    B, angB = _ccw_loop(loop_b, ang)
    p, q = len(A), len(B)
    angA = np.append(angA, angA[0] + 2 * np.pi)
    angB = np.append(angB, angB[0] + 2 * np.pi)
    tris = []
    i = j = 0
    while i < p or j < q:
        if j == q or (i < p and angA[i + 1] <= angB[j + 1]):
            x, y, o = A[i], A[(i + 1) % p], B[j % q]
            i += 1
        else:
            x, y, o = B[j], B[(j + 1) % q], A[i % p]
            j += 1
        first, second = need[(min(x, y), max(x, y))]
        tris.append((first, second, o))
    return np.array(tris, dtype=np.int64)


def _holed_sphere(level: int, center, pole, delta: float, cut_radius: float) -> TriMesh:
    s = gen_icosphere(level, 1.0, center)
    s = flatten_cap(s, pole, delta, center=center)
    a = np.asarray(pole, dtype=float)
    rel = s.vertices - np.asarray(center, dtype=float)
    t = rel @ a
    rho = np.linalg.norm(rel - np.outer(t, a), axis=1)
    cut = (t > 0) & (rho < cut_radius)
    drop = np.isin(s.triangles, np.flatnonzero(cut)).any(axis=1)
    return _remove_triangles(s, drop)


def default_tube_resolution(delta: float, h: float, level: int) -> tuple[int, int]:
    """Segments matching the sphere's edge length at the attachment circle
    (and at least 16, so the neck edge stays below delta/4), and rings giving
    near-square cells at the neck."""
    edge = 2.0 * math.sin(math.atan(2.0) / 2.0) / 2**level  # icosphere edge length, unit radius
    segs = max(16, int(round(2 * math.pi * delta / edge)))
    rings = max(4, int(math.ceil(2 * h / (math.pi * delta / segs))))
    return rings, segs


def glue_dumbbell(delta: float, h: float, level: int, rings: Optional[int] = None,
                  segs: Optional[int] = None) -> TriMesh:
    """Two unit spheres joined by a thin revolution tube along the z axis.

    The spheres are centred at (0, 0, +-(1 + h)) so their facing poles sit at
    z = +-h. Each is flattened around that pole with flat radius ``delta`` and
    a hole is opened there; the tube's end circles of radius ``delta`` at
    z = +-h are zipped to the hole boundaries. Tags: ``sphere1``, ``sphere2``,
    ``tube`` and ``cap`` (the stitching bands).
    """
    if not 0 < delta <= MAX_GLUE_DELTA:
        raise DomainError(f"delta out of range (0, {MAX_GLUE_DELTA}]: {delta}")
    if not h > 0:
        raise DomainError(f"h must be positive, got {h}")
    d_rings, d_segs = default_tube_resolution(delta, h, level)
    rings = d_rings if rings is None else rings
    segs = d_segs if segs is None else segs

    edge = 2.0 * math.sin(math.atan(2.0) / 2.0) / 2**level
    cut_radius = delta + 0.5 * edge
    top_c, bot_c = np.array([0.0, 0.0, 1.0 + h]), np.array([0.0, 0.0, -1.0 - h])
    top = _holed_sphere(level, top_c, (0.0, 0.0, -1.0), delta, cut_radius)
    bot = _holed_sphere(level, bot_c, (0.0, 0.0, 1.0), delta, cut_radius)
    top.tags = np.full(top.n_triangles, "sphere1", dtype=object)
    bot.tags = np.full(bot.n_triangles, "sphere2", dtype=object)
    tube = gen_revolution_tube(TubeProfile(delta, h), rings, segs)

    parts = disjoint_union(top, tube, bot)
    off_tube = top.n_vertices
    off_bot = off_tube + tube.n_vertices
    tube_top = [off_tube + rings * segs + j for j in range(segs)]
    tube_bot = [off_tube + j for j in range(segs)]
    loops = boundary_loops(parts)
    if len(loops) != 4:
        raise MeshError(f"expected 4 boundary loops before stitching, found {len(loops)}")

    def loop_with(vs):
        for lp in loops:
            if vs[0] in lp:
                return lp
        raise MeshError("tube boundary loop not found")

    top_hole = [lp for lp in loops if lp[0] < off_tube]
    bot_hole = [lp for lp in loops if lp[0] >= off_bot]
    if len(top_hole) != 1 or len(bot_hole) != 1:
        raise MeshError("each sphere must have exactly one hole")
    axis = (0.0, 0.0, 1.0)
    band_top = zip_loops(parts.vertices, top_hole[0], loop_with(tube_top), (0, 0, h), axis)
    band_bot = zip_loops(parts.vertices, bot_hole[0], loop_with(tube_bot), (0, 0, -h), axis)
    tris = np.vstack([parts.triangles, band_top, band_bot])
    tags = np.concatenate([parts.tags, np.full(len(band_top) + len(band_bot), "cap", dtype=object)])
    mesh = TriMesh(parts.vertices, tris, tags)
    rep = validate(mesh)
    if not rep.ok or rep.euler != 2 or rep.components != 1:
        raise MeshError(f"dumbbell failed validation (chi={rep.euler}): " + "; ".join(rep.messages))
    return mesh
