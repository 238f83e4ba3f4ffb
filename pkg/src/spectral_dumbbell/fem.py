"""Piecewise-linear Laplace-Beltrami eigenproblems on triangle meshes.

Stiffness and mass matrices are ``scipy.sparse.csr_matrix`` (full symmetric
storage). The lowest eigenpairs of ``K u = lambda M u`` come from a
restarted block Krylov iteration on the shift-inverted operator
``(K - sigma M)^{-1} M`` with full M-orthogonalization and a Rayleigh-Ritz
step on ``K``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import splu

from .errors import DomainError, QualityError, SolverError
from .mesh import TriMesh, area, require_valid, triangle_areas
from .spectra import Spectrum

log = logging.getLogger(__name__)

MAX_COT = 1e8
ZERO_RELATIVE = 1e-8


def cotangents(mesh: TriMesh) -> np.ndarray:
    """(F, 3) cotangent of the angle at each corner of each triangle."""
    v = mesh.vertices[mesh.triangles]
    cots = np.empty((mesh.n_triangles, 3))
    for c in range(3):
        a = v[:, (c + 1) % 3] - v[:, c]
        b = v[:, (c + 2) % 3] - v[:, c]
        cross = np.linalg.norm(np.cross(a, b), axis=1)
        dot = np.einsum("ij,ij->i", a, b)
        with np.errstate(divide="ignore", invalid="ignore"):
            cots[:, c] = dot / cross
    bad = ~np.isfinite(cots) | (np.abs(cots) > MAX_COT)
    if bad.any():
        t = int(np.flatnonzero(bad.any(axis=1))[0])
        raise QualityError(f"triangle {t} {mesh.triangles[t].tolist()} is degenerate "
                           f"(|cot| > {MAX_COT:g})")
    return cots


def assemble_stiffness(mesh: TriMesh) -> sp.csr_matrix:
    """Cotangent stiffness: K_ij = -(cot a_ij + cot b_ij)/2, rows summing to zero."""
    cots = cotangents(mesh)
    t = mesh.triangles
    rows, cols, vals = [], [], []
    for c in range(3):
        i, j = t[:, (c + 1) % 3], t[:, (c + 2) % 3]  # edge opposite corner c
        w = -0.5 * cots[:, c]
        rows += [i, j]
        cols += [j, i]
        vals += [w, w]
    n = mesh.n_vertices
    off = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(n, n)).tocsr()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    K = (off + sp.diags(diag)).tocsr()
    K.sum_duplicates()
    K.sort_indices()
    return K


def assemble_mass(mesh: TriMesh, lumped: bool = True) -> sp.csr_matrix:
    """Lumped (diagonal, one third of incident areas) or consistent P1 mass matrix."""
    a = triangle_areas(mesh)
    t = mesh.triangles
    n = mesh.n_vertices
    if lumped:
        d = np.bincount(t.ravel(), weights=np.repeat(a / 3.0, 3), minlength=n)
        return sp.diags(d).tocsr()
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    local = np.array([[2, 1, 1], [1, 2, 1], [1, 1, 2]], dtype=float).ravel()
    vals = (a[:, None] / 12.0 * local[None, :]).ravel()
    M = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    M.sum_duplicates()
    M.sort_indices()
    return M


@dataclass
class EigResult:
    values: np.ndarray
    vectors: np.ndarray  # M-orthonormal columns
    residuals: np.ndarray  # ||K u - lambda M u||_{M^-1} with ||u||_M = 1
    iterations: int
    converged: bool
    shift: float


def _is_diagonal(A: sp.spmatrix) -> bool:
    return A.nnz == np.count_nonzero(A.diagonal()) and (A - sp.diags(A.diagonal())).nnz == 0


def _factor_shifted(K, M, sigma):
    for attempt in range(2):
        try:
            lu = splu((K - sigma * M).tocsc())
            x = lu.solve(np.ones(K.shape[0]))
            if np.all(np.isfinite(x)):
                return lu, sigma
        except RuntimeError as exc:
            log.debug("factorization at shift %g failed: %s", sigma, exc)
        sigma = sigma / 10.0
    raise SolverError(f"cannot factorize K - sigma M (last shift {sigma * 10:g})")


def _m_orthonormalize(W, basis, M):
    """M-orthonormalize the columns of W against ``basis`` and each other (CGS2)."""
    for _ in range(2):
        if basis is not None and basis.shape[1]:
            W = W - basis @ (basis.T @ (M @ W))
    G = W.T @ (M @ W)
    G = 0.5 * (G + G.T)
    s, Q = np.linalg.eigh(G)
    keep = s > 1e-24 * max(s.max(), 1e-300)
    W = W @ (Q[:, keep] / np.sqrt(s[keep]))
    if basis is not None and basis.shape[1]:
        W = W - basis @ (basis.T @ (M @ W))
    G = W.T @ (M @ W)
    s, Q = np.linalg.eigh(0.5 * (G + G.T))
    keep = s > 1e-24 * max(s.max(), 1e-300)
    return W @ (Q[:, keep] / np.sqrt(s[keep]))


def solve_lowest(K, M, m: int, tol: float = 1e-9, seed: int = 0, *, block: int | None = None,
                 depth: int = 3, max_iter: int = 200) -> EigResult:
    """Lowest ``m`` eigenpairs of the pencil (K, M).

    Convergence: every returned pair satisfies
    ``||K u - lambda M u||_{M^-1} <= tol * max(1, lambda)`` with ``||u||_M = 1``.
    A run that exhausts ``max_iter`` returns the current Ritz pairs with
    ``converged = False``.
    """
    n = K.shape[0]
    if m < 1 or m > n // 4:
        raise DomainError(f"m must lie in [1, {n // 4}] for dimension {n}, got {m}")
    if tol < 1e-12:
        raise DomainError(f"tol must be >= 1e-12, got {tol}")
    K = sp.csr_matrix(K)
    M = sp.csr_matrix(M)
    diag_mass = _is_diagonal(M)
    mdiag = M.diagonal()
    if diag_mass:
        def minv_norms(R):
            return np.sqrt(np.sum(R * R / mdiag[:, None], axis=0))
    else:
        mlu = splu(M.tocsc())

        def minv_norms(R):
            return np.sqrt(np.maximum(np.sum(R * mlu.solve(R), axis=0), 0.0))

    sigma = -1e-8 * K.diagonal().sum() / n
    lu, sigma = _factor_shifted(K, M, sigma)
    b = block if block is not None else max(2 * m, m + 8)
    b = min(b, n // 4 if n // 4 >= m else m)

    rng = np.random.default_rng(seed)
    X = _m_orthonormalize(rng.standard_normal((n, b)), None, M)
    it = 0
    while True:
        it += 1
        blocks = [X]
        V = X
        for _ in range(depth - 1):
            W = lu.solve(M @ blocks[-1])
            W = _m_orthonormalize(W, V, M)
            if W.shape[1] == 0:
                break
            blocks.append(W)
            V = np.hstack([V, W])
        H = V.T @ (K @ V)
        theta, Y = eigh(0.5 * (H + H.T))
        U = V @ Y[:, :b]
        lam = theta[:m]
        R = K @ U[:, :m] - (M @ U[:, :m]) * lam
        res = minv_norms(R)
        done = bool(np.all(res <= tol * np.maximum(1.0, np.abs(lam))))
        if done or it >= max_iter:
            if not done:
                log.warning("solve_lowest: no convergence after %d iterations (max residual %.3g)",
                            it, res.max())
            return EigResult(lam.copy(), U[:, :m].copy(), res, it, done, sigma)
        X = U


def clean_zeros(values: np.ndarray) -> np.ndarray:
    """Snap eigenvalues below 1e-8 times the mean nonzero value to exactly 0."""
    v = np.sort(np.asarray(values, dtype=float))
    big = np.abs(v) > 1e-6 * max(np.abs(v).max(), 1e-300)
    scale = np.abs(v[big]).mean() if big.any() else 1.0
    v[np.abs(v) < ZERO_RELATIVE * scale] = 0.0
    if v[0] < 0:
        raise SolverError(f"negative eigenvalue {v[0]:g} beyond the zero threshold")
    return v


def mesh_eigs(mesh: TriMesh, m: int, tol: float = 1e-9, seed: int = 0,
              lumped: bool = True) -> EigResult:
    require_valid(mesh)
    K = assemble_stiffness(mesh)
    M = assemble_mass(mesh, lumped=lumped)
    return solve_lowest(K, M, m, tol=tol, seed=seed)


def mesh_spectrum(mesh: TriMesh, m: int, tol: float = 1e-9, seed: int = 0,
                  lumped: bool = True, label: str = "mesh") -> Spectrum:
    """Lowest ``m`` discrete Laplace-Beltrami eigenvalues as a Spectrum (volume = area)."""
    res = mesh_eigs(mesh, m, tol=tol, seed=seed, lumped=lumped)
    if not res.converged:
        raise SolverError(f"eigensolver did not converge (max residual {res.residuals.max():.3g})")
    return Spectrum(2, clean_zeros(res.values), area(mesh), label)
