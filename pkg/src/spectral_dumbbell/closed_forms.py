"""Closed-form constants and spectra: unit balls, Weyl's constant, the
isoperimetric bound constant, round spheres and Dirichlet segments."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .spectra import Spectrum


def _check_dim(n: int) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {n!r}")


@lru_cache(maxsize=None)
def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n, by omega_n = omega_{n-2} * 2*pi/n."""
    _check_dim(n)
    if n == 1:
        return 2.0
    if n == 2:
        return math.pi
    return unit_ball_volume(n - 2) * 2.0 * math.pi / n


def log_unit_ball_volume(n: int) -> float:
    """Natural log of omega_n via lgamma; stays finite where omega_n underflows."""
    _check_dim(n)
    return 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0)


def sphere_volume(n: int) -> float:
    """n-volume of the round unit sphere S^n, equal to (n+1) * omega_{n+1}.

    Evaluated as 2*pi*omega_{n-1} (omega_0 = 1), which is the same number but
    exact for n = 2.
    """
    _check_dim(n)
    return 2.0 * math.pi * (1.0 if n == 1 else unit_ball_volume(n - 1))


def weyl_constant(n: int) -> float:
    """W(n) = (2 pi)^2 / omega_n^(2/n)."""
    _check_dim(n)
    return (2.0 * math.pi) ** 2 / unit_ball_volume(n) ** (2.0 / n)


def gamma_log2(n: int) -> float:
    """log2 of the isoperimetric bound constant 2^(10n+18+8/n)/(n+1) * omega_{n+1}^(1/(n+1))."""
    _check_dim(n)
    return (10 * n + 18 + 8.0 / n - math.log2(n + 1)
            + log_unit_ball_volume(n + 1) / ((n + 1) * math.log(2.0)))


def gamma_constant(n: int) -> float:
    """Linear value of the bound constant; ``inf`` once it leaves double range."""
    lg = gamma_log2(n)
    if lg >= 1024:
        return math.inf
    return 2.0 ** lg


@dataclass(frozen=True)
class DimConstants:
    n: int
    omega_n: float
    weyl_W: float
    gamma_n: float
    gamma_log2: float


def dim_constants(n: int) -> DimConstants:
    return DimConstants(n, unit_ball_volume(n), weyl_constant(n), gamma_constant(n), gamma_log2(n))


def sphere_multiplicity(n: int, level: int) -> int:
    """Multiplicity of l(l+n-1) on S^n: C(n+l, n) - C(n+l-2, n), exact integer."""
    _check_dim(n)
    if level < 0:
        raise DomainError(f"level must be >= 0, got {level}")
    lower = math.comb(n + level - 2, n) if level >= 2 else 0
    return math.comb(n + level, n) - lower


def sphere_levels(n: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct eigenvalue levels l = 0, 1, ... and multiplicities covering ``count`` entries.

    The last multiplicity is truncated so the multiplicities sum to ``count``.
    Eigenvalues are returned as exact Python-int-valued int64 where they fit.
    """
    _check_dim(n)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    levels, mults = [], []
    total, l = 0, 0
    while total < count:
        m = sphere_multiplicity(n, l)
        take = min(m, count - total)
        levels.append(l)
        mults.append(take)
        total += take
        l += 1
    return np.array(levels, dtype=np.int64), np.array(mults, dtype=np.int64)


def sphere_spectrum(n: int, count: int, radius: float = 1.0) -> Spectrum:
    """First ``count`` eigenvalues of the round sphere S^n of the given radius."""
    if not radius > 0:
        raise DomainError(f"radius must be positive, got {radius}")
    levels, mults = sphere_levels(n, count)
    eig = (levels * (levels + n - 1)).astype(float)
    values = np.repeat(eig, mults)
    if radius != 1.0:
        values = values / radius**2
    return Spectrum(n, values, sphere_volume(n) * radius**n, f"S^{n}")


def segment_dirichlet_spectrum(h: float, count: int) -> Spectrum:
    """Dirichlet eigenvalues (j pi / 2h)^2, j = 1..count, of the segment [-h, h]."""
    if not h > 0:
        raise DomainError(f"half-length h must be positive, got {h}")
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    j = np.arange(1, count + 1, dtype=float)
    return Spectrum(1, (j * math.pi / (2.0 * h)) ** 2, 2.0 * h, f"segment[-{h:g},{h:g}]")


def weyl_ratio(s: Spectrum, k: int) -> float:
    """lambda_{k-1} * vol^(2/n) / (W(n) * k^(2/n)); tends to 1 by Weyl's law.

    The index shift (lambda_{k-1} rather than lambda_k) is the one produced by
    adjoining a second component to the sphere.
    """
    if not 1 <= k <= len(s):
        raise DomainError(f"k must lie in [1, {len(s)}], got {k}")
    n = s.dim
    e = 2.0 / n
    return float(s.values[k - 1] * s.volume**e / (weyl_constant(n) * float(k) ** e))


def weyl_ratios(s: Spectrum) -> np.ndarray:
    """Vectorized weyl_ratio for k = 1 .. len(s)."""
    n = s.dim
    e = 2.0 / n
    k = np.arange(1, len(s) + 1, dtype=float)
    return s.values * s.volume**e / (weyl_constant(n) * k**e)
