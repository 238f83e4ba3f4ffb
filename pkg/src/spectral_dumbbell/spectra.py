"""Spectrum values and the algebra of disjoint unions.

A :class:`Spectrum` is a flat, nondecreasing array of Laplacian eigenvalues
(multiplicities expanded) together with the dimension and volume of the
underlying manifold, so that ``values[k]`` is the k-th eigenvalue.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

# relative tolerance for eigenvalue identity checks on non-shared inputs
LEMMA_RTOL = 1e-12


@dataclass(frozen=True)
class Spectrum:
    dim: int
    values: np.ndarray
    volume: float
    label: str = ""

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).ravel()
        if self.dim < 1:
            raise DomainError(f"dimension must be >= 1, got {self.dim}")
        if not self.volume > 0:
            raise DomainError(f"volume must be positive, got {self.volume}")
        if vals.size == 0:
            raise DomainError("a spectrum needs at least one value")
        if vals[0] < 0:
            raise DomainError(f"eigenvalues must be nonnegative, got {vals[0]}")
        if np.any(np.diff(vals) < 0):
            raise DomainError("eigenvalues must be nondecreasing")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "volume", float(self.volume))

    def __len__(self):
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]

    @property
    def zero_count(self) -> int:
        return int(np.count_nonzero(self.values == 0.0))

    @property
    def looks_connected(self) -> bool:
        """Single zero eigenvalue; expected for a connected closed manifold."""
        return self.zero_count == 1

    def scaled(self, c: float) -> "Spectrum":
        """Spectrum of the manifold dilated by ``c``."""
        if not c > 0:
            raise DomainError(f"scale factor must be positive, got {c}")
        return Spectrum(self.dim, self.values / c**2, self.volume * c**self.dim,
                        f"{self.label}*{c:g}" if self.label else "")

    def head(self, count: int) -> "Spectrum":
        return Spectrum(self.dim, self.values[:count], self.volume, self.label)


@dataclass(frozen=True)
class UnionSpectrum:
    """Spectrum of a disjoint union, keeping the parts it was built from."""

    parts: tuple
    merged: Spectrum
    origin: np.ndarray = field(repr=False)  # part index of each merged entry

    @property
    def total_volume(self) -> float:
        return self.merged.volume


def merge_spectra(a: Spectrum, b: Spectrum, *more: Spectrum) -> UnionSpectrum:
    """Multiset union of spectra of the same dimension.

    Ties keep the order of the arguments: a value from ``a`` precedes an equal
    value from ``b``. Volumes add.
    """
    parts = (a, b) + more
    dims = {p.dim for p in parts}
    if len(dims) != 1:
        raise DomainError(f"cannot merge spectra of dimensions {sorted(dims)}")
    vals = np.concatenate([p.values for p in parts])
    origin = np.concatenate([np.full(len(p), i) for i, p in enumerate(parts)])
    order = np.argsort(vals, kind="stable")
    label = " + ".join(p.label or "?" for p in parts)
    merged = Spectrum(a.dim, vals[order], sum(p.volume for p in parts), label)
    return UnionSpectrum(parts, merged, origin[order])


@dataclass
class ShiftLemmaReport:
    """Outcome of checking the index shift of a union spectrum.

    ``hypothesis_ok`` records whether sigma's first positive eigenvalue clears
    ``sphere[k] + 1``; ``holds`` records whether the conclusion was observed,
    independently of the hypothesis.
    """

    k: int
    hypothesis_ok: bool
    holds: bool
    checked: list = field(default_factory=list)  # (j, merged_j, sphere_{j-1}, ok)
    messages: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if not self.hypothesis_ok:
            return "hypothesis-failure"
        return "pass" if self.holds else "lemma-failure"

    def holds_through(self, last: int) -> bool:
        """Whether the shift holds for every checked j <= last (e.g. last=k)."""
        return all(ok for j, _, _, ok in self.checked if j <= last)

    def __bool__(self):
        return self.status == "pass"


def _same(x: float, y: float) -> bool:
    return x == y or abs(x - y) <= LEMMA_RTOL * max(1.0, abs(y))


def verify_shift_lemma(sigma: Spectrum, sphere: Spectrum, k: int) -> ShiftLemmaReport:
    """Check that the union with ``sigma`` shifts the sphere spectrum by one index.

    The union must have two zeros followed by ``sphere[j-1]`` at positions
    ``j = 2 .. k+1``.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if len(sphere) < k + 1:
        raise DomainError(f"sphere spectrum has {len(sphere)} values, need {k + 1}")
    if len(sigma) < 2:
        raise DomainError("sigma spectrum needs at least two values")

    threshold = sphere[k] + 1.0
    report = ShiftLemmaReport(k=k, hypothesis_ok=bool(sigma[1] >= threshold), holds=True)
    if not report.hypothesis_ok:
        report.messages.append(
            f"hypothesis violated: sigma[1] = {sigma[1]!r} < sphere[{k}] + 1 = {threshold!r}")

    merged = merge_spectra(sigma, sphere).merged
    for j in (0, 1):
        if merged[j] != 0.0:
            report.holds = False
            report.messages.append(f"merged[{j}] = {merged[j]!r}, expected 0")
    for j in range(2, k + 2):
        got, want = merged[j], sphere[j - 1]
        ok = _same(got, want)
        report.checked.append((j, float(got), float(want), ok))
        if not ok:
            report.holds = False
            if got == 0.0:
                report.messages.append(f"extra zero at index {j}")
            else:
                report.messages.append(f"merged[{j}] = {got!r} != sphere[{j - 1}] = {want!r}")
    return report


def counting_function(s: Spectrum, lam: float) -> int:
    """Number of eigenvalues (with multiplicity) that are <= ``lam``."""
    return int(np.searchsorted(s.values, lam, side="right"))


def spectral_functional(s: Spectrum, k: int) -> float:
    """The scale-invariant quantity ``lambda_k * volume**(2/n)``."""
    if not 0 <= k < len(s):
        raise DomainError(f"index {k} out of range for spectrum of length {len(s)}")
    return float(s.values[k] * s.volume ** (2.0 / s.dim))
