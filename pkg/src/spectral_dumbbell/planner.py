"""Certificate arithmetic for the disconnected counterexample and its gluing.

Given n, A and a continuous f (as a piecewise-linear table), the planner
normalizes the large component, bounds the isoperimetric ratio of the union
independently of k, and finds the thresholds k1 (sphere Weyl ratio stays
above 1/2), k2 (A k^(2/n) beats f on the isoperimetric interval) and
k0 = max(k1, k2). ``verify_certificate`` recomputes all of it along a second
code path.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import mpmath
import numpy as np

from .closed_forms import (segment_dirichlet_spectrum, sphere_levels, sphere_spectrum,
                           sphere_volume, unit_ball_volume, weyl_constant, weyl_ratios,
                           gamma_log2)
from .errors import DomainError
from .mesh import IsoReport
from .spectra import Spectrum, UnionSpectrum, counting_function

HALF_GUARD = 1e-9  # float ratios this close to 1/2 are re-decided in high precision


@dataclass(frozen=True)
class PiecewiseLinear:
    """Continuous function given by sorted breakpoints, linear in between."""

    x: tuple
    y: tuple

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if len(x) < 2 or len(x) != len(y):
            raise DomainError("need at least two (x, f(x)) breakpoints of equal count")
        if any(b <= a for a, b in zip(x, x[1:])):
            raise DomainError("breakpoints must be strictly increasing")
        if not all(math.isfinite(v) for v in x + y):
            raise DomainError("breakpoints must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def constant(cls, c: float, lo: float, hi: float) -> "PiecewiseLinear":
        return cls((lo, hi), (c, c))

    def __call__(self, t: float) -> float:
        if not self.x[0] <= t <= self.x[-1]:
            raise DomainError(f"f evaluated at {t} outside its table [{self.x[0]}, {self.x[-1]}]")
        for i in range(len(self.x) - 1):
            a, b = self.x[i], self.x[i + 1]
            if t <= b:
                w = (t - a) / (b - a)
                return self.y[i] + w * (self.y[i + 1] - self.y[i])
        return self.y[-1]

    def covers(self, lo: float, hi: float) -> bool:
        return self.x[0] <= lo and hi <= self.x[-1]

    def max_on(self, lo: float, hi: float) -> float:
        """Exact maximum on [lo, hi]: attained at an endpoint or a breakpoint."""
        if not self.covers(lo, hi):
            raise DomainError(f"f table covers [{self.x[0]}, {self.x[-1]}] but the interval "
                              f"[{lo!r}, {hi!r}] is needed")
        cands = [self(lo), self(hi)] + [yv for xv, yv in zip(self.x, self.y) if lo < xv < hi]
        return max(cands)


def iso_interval(n: int, A: float) -> tuple[float, float]:
    """k-independent bounds on the isoperimetric ratio of the normalized union.

    Lower: the round sphere. Upper: (n+1)^(n/(n+1)) ((4A/W)^(n/2) + 1) Vol(S^n)^(1/(n+1)).
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not A > 0:
        raise DomainError(f"A must be positive, got {A}")
    vs = sphere_volume(n)
    low = vs / unit_ball_volume(n + 1) ** (n / (n + 1))
    high = (n + 1) ** (n / (n + 1)) * ((4 * A / weyl_constant(n)) ** (n / 2) + 1) * vs ** (1 / (n + 1))
    return low, high


def iso_high_alt(n: int, A: float) -> float:
    """Upper bound with the exponent placed outside: ((4A/W) + 1)^(n/2); comparison only."""
    vs = sphere_volume(n)
    return (n + 1) ** (n / (n + 1)) * ((4 * A / weyl_constant(n)) + 1) ** (n / 2) * vs ** (1 / (n + 1))


def _sphere_ratio_constant_mp(n: int):
    """Vol(S^n)^(2/n) / W(n) in high precision."""
    with mpmath.workdps(50):
        omega = lambda d: mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2 + 1)
        vol = (n + 1) * omega(n + 1)
        W = (2 * mpmath.pi) ** 2 / omega(n) ** (mpmath.mpf(2) / n)
        return vol ** (mpmath.mpf(2) / n) / W


def sphere_ratio_exceeds_half(n: int, lam: np.ndarray, k: np.ndarray, ratio: np.ndarray) -> np.ndarray:
    """Strict test ratio > 1/2 for sphere eigenvalues (integers l(l+n-1)).

    Ratios within HALF_GUARD of 1/2 are re-evaluated at 50 digits; an exact
    tie (e.g. n = 2, k = 4) counts as not exceeding.
    """
    out = ratio > 0.5
    close = np.flatnonzero(np.abs(ratio - 0.5) <= HALF_GUARD)
    if close.size:
        C = _sphere_ratio_constant_mp(n)
        with mpmath.workdps(50):
            for i in close:
                r = mpmath.mpf(int(round(lam[i]))) * C / mpmath.mpf(int(k[i])) ** (mpmath.mpf(2) / n)
                out[i] = (r - mpmath.mpf(1) / 2) > mpmath.mpf(10) ** -40
    return out


def weyl_threshold(n: int, limit: int) -> tuple[int, np.ndarray, np.ndarray]:
    """Least k1 such that the sphere Weyl ratio exceeds 1/2 for every k in [k1, limit].

    Returns (k1, lambda_{k-1} array, ratio array) for k = 1..limit. k1 = limit + 1
    when the ratio does not exceed 1/2 at ``limit`` itself.
    """
    s = sphere_spectrum(n, limit)
    ratio = weyl_ratios(s)
    k = np.arange(1, limit + 1)
    ok = sphere_ratio_exceeds_half(n, s.values, k, ratio)
    bad = np.flatnonzero(~ok)
    k1 = 1 if bad.size == 0 else int(bad[-1]) + 2
    return k1, s.values, ratio


def _beats(A: float, k: int, n: int, fmax: float) -> bool:
    """A k^(2/n) > fmax, strictly; near-ties decided at 50 digits."""
    v = A * k ** (2.0 / n)
    if abs(v - fmax) > HALF_GUARD * max(1.0, abs(fmax)):
        return v > fmax
    with mpmath.workdps(50):
        d = mpmath.mpf(A) * mpmath.mpf(k) ** (mpmath.mpf(2) / n) - mpmath.mpf(fmax)
        return d > mpmath.mpf(10) ** -40


def _k2_for(fmax: float, A: float, n: int) -> int:
    """Least k >= 1 with A k^(2/n) > fmax."""
    if _beats(A, 1, n, fmax):
        return 1
    k = int(math.floor((fmax / A) ** (n / 2.0))) + 1
    while k > 1 and _beats(A, k - 1, n, fmax):
        k -= 1
    while not _beats(A, k, n, fmax):
        k += 1
    return k


def sphere_dip(n: int, level: int) -> float:
    """Weyl ratio at the last index of eigenvalue level ``level`` (its block minimum)."""
    N = sum(_mult_exact(n, l) for l in range(level + 1))
    lam = level * (level + n - 1)
    return lam * sphere_volume(n) ** (2 / n) / (weyl_constant(n) * N ** (2 / n))


def _mult_exact(n, l):
    lower = math.comb(n + l - 2, n) if l >= 2 else 0
    return math.comb(n + l, n) - lower


@dataclass
class PlanCertificate:
    n: int
    A: float
    f_x: list
    f_y: list
    sphere_volume: float
    weyl_W: float
    vol_target: float  # Vol(Sigma_k)^(2/n)
    sigma_volume: float  # Vol(Sigma_k)
    union_volume: float  # Vol(Sigma_k) + Vol(S^n)
    iso_low: float
    iso_high: float
    iso_high_alt: float
    f_max: float
    k1: int
    k2: int
    k0: int
    horizon: int
    scan_limit: int
    lambda1_threshold_k0: float  # lambda_{k0}(S^n) + 1
    k1_certified: bool
    tail_certified: bool
    chain_holds: bool
    chain_min_margin: float
    chain_checked: list = field(default_factory=list)  # [first k, last k]
    notes: list = field(default_factory=list)

    def lambda1_threshold(self, k: int) -> float:
        """lambda_k(S^n) + 1: what the large component's first eigenvalue must clear."""
        return float(sphere_spectrum(self.n, k + 1).values[k]) + 1.0

    @property
    def f(self) -> PiecewiseLinear:
        return PiecewiseLinear(tuple(self.f_x), tuple(self.f_y))

    def as_dict(self) -> dict:
        return asdict(self)


def _chain(n, A, fmax, union_volume, lam_prev, k):
    """Margins of lambda_{k-1}(S^n) Vol(union)^(2/n) > 2A k^(2/n) > fmax + A k^(2/n)."""
    e = 2.0 / n
    kk = np.asarray(k, dtype=float) ** e
    lhs = lam_prev * union_volume ** e
    mid = 2.0 * A * kk
    rhs = fmax + A * kk
    return lhs - mid, mid - rhs


def plan_counterexample(n: int, A: float, f: PiecewiseLinear, horizon: int = 10**6) -> PlanCertificate:
    """Instantiate every threshold of the disconnected counterexample for (n, A, f).

    The Weyl-ratio condition is certified by exact scan up to ``scan_limit`` =
    max(horizon, k0); the final inequality chain is checked for every k in
    [k0, scan_limit].
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if not A > 0:
        raise DomainError(f"A must be positive, got {A}")
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    low, high = iso_interval(n, A)
    if not f.covers(low, high):
        raise DomainError(f"f table covers [{f.x[0]!r}, {f.x[-1]!r}] but [{low!r}, {high!r}] "
                          "is required")
    fmax = f.max_on(low, high)
    W = weyl_constant(n)
    vs = sphere_volume(n)
    vol_target = 4 * A * vs ** (2 / n) / W
    sigma_volume = (4 * A / W) ** (n / 2) * vs

    k2 = _k2_for(fmax, A, n)
    limit = horizon
    while True:
        k1, lam, _ = weyl_threshold(n, limit)
        k0 = max(k1, k2)
        if k0 <= limit:
            break
        limit = k0
    k1_certified = k1 <= limit

    ks = np.arange(k0, limit + 1)
    m1, m2 = _chain(n, A, fmax, sigma_volume + vs, lam[ks - 1], ks)
    chain_ok = bool(np.all(m1 > 0) and np.all(m2 > 0))
    margin = float(min(m1.min(), m2.min())) if ks.size else math.nan

    notes = ["large component is abstract: only its volume and the lower bound on its "
             "first eigenvalue enter the certificate"]
    tail = False
    if n == 2:
        tail = True
        notes.append("tail: block minima of the S^2 ratio are l/(l+1) > 1/2 for every l >= 2")
    elif n == 3:
        last = int(sphere_levels(n, limit)[0][-1])
        dips = [sphere_dip(3, l) for l in range(max(2, last - 2), last + 50)]
        tail = all(b > a for a, b in zip(dips, dips[1:])) and dips[0] > 0.5
        notes.append("tail: S^3 block minima increasing past the scan limit (checked 50 levels)")

    return PlanCertificate(
        n=n, A=float(A), f_x=list(f.x), f_y=list(f.y), sphere_volume=vs, weyl_W=W,
        vol_target=vol_target, sigma_volume=sigma_volume, union_volume=sigma_volume + vs,
        iso_low=low, iso_high=high, iso_high_alt=iso_high_alt(n, A), f_max=fmax,
        k1=k1, k2=k2, k0=k0, horizon=horizon, scan_limit=limit,
        lambda1_threshold_k0=float(lam[k0] if k0 < lam.size else
                                   sphere_spectrum(n, k0 + 1).values[k0]) + 1.0,
        k1_certified=k1_certified, tail_certified=tail, chain_holds=chain_ok,
        chain_min_margin=margin, chain_checked=[int(k0), int(limit)], notes=notes)


# --- independent re-verification -------------------------------------------

@dataclass
class Reverification:
    k1: int
    k2: int
    k0: int
    matches: bool
    chain_holds: bool
    messages: list = field(default_factory=list)


def _levels_table(n: int, limit: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct sphere eigenvalues and cumulative counts, enough to pass ``limit``."""
    vals, cum = [], []
    total, l = 0, 0
    while total < limit:
        total += _mult_exact(n, l)
        vals.append(l * (l + n - 1))
        cum.append(total)
        l += 1
    return np.array(vals, dtype=float), np.array(cum, dtype=np.int64)


def verify_certificate(cert: PlanCertificate) -> Reverification:
    """Recompute k1, k2, k0 and the chain without the flat spectrum array.

    lambda_{k-1}(S^n) is recovered by inverting the counting function on the
    level table, the Weyl condition is rearranged to
    (2 lambda)^(n/2) Vol(S^n) omega_n / (2 pi)^n > k and evaluated in high
    precision near ties, and max f comes from numpy interpolation.
    """
    n, A, limit = cert.n, cert.A, cert.scan_limit
    msgs = []
    vals, cum = _levels_table(n, limit)
    level_spec = Spectrum(n, vals, sphere_volume(n), "levels")
    k = np.arange(1, limit + 1)
    lam = vals[np.searchsorted(cum, k, side="left")]
    # spot-check the inversion against the counting function
    for kk in np.unique(np.linspace(1, limit, 25).astype(int)):
        lv = lam[kk - 1]
        idx = counting_function(level_spec, lv) - 1
        below = cum[idx - 1] if idx > 0 else 0
        if not below < kk <= cum[idx]:
            msgs.append(f"counting-function inversion failed at k={kk}")

    c = sphere_volume(n) * unit_ball_volume(n) / (2 * math.pi) ** n
    lhs = (2 * lam) ** (n / 2) * c
    ok = lhs > k
    close = np.flatnonzero(np.abs(lhs - k) <= 1e-9 * k)
    if close.size:
        with mpmath.workdps(50):
            om = lambda d: mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2 + 1)
            cmp = (n + 1) * om(n + 1) * om(n) / (2 * mpmath.pi) ** n
            for i in close:
                v = (2 * mpmath.mpf(int(lam[i]))) ** (mpmath.mpf(n) / 2) * cmp
                ok[i] = v - int(k[i]) > mpmath.mpf(10) ** -40
    bad = np.flatnonzero(~ok)
    k1 = 1 if bad.size == 0 else int(bad[-1]) + 2

    lo, hi = iso_interval(n, A)
    xs = np.array(cert.f_x)
    ys = np.array(cert.f_y)
    pts = np.concatenate([[lo, hi], xs[(xs > lo) & (xs < hi)]])
    fmax = float(np.max(np.interp(pts, xs, ys)))
    if abs(fmax - cert.f_max) > 1e-12 * max(1.0, abs(fmax)):
        msgs.append(f"f max differs: {fmax!r} vs {cert.f_max!r}")
    if fmax < A:
        k2 = 1
    else:
        with mpmath.workdps(40):
            t = (mpmath.mpf(fmax) / mpmath.mpf(A)) ** (mpmath.mpf(n) / 2)
            k2 = int(mpmath.floor(t)) + 1
    k0 = max(k1, k2)

    ks = np.arange(k0, limit + 1)
    chain = True
    if ks.size:
        e = 2.0 / n
        a = lam[ks - 1] * cert.union_volume ** e
        b = 2 * A * ks.astype(float) ** e
        cc = fmax + A * ks.astype(float) ** e
        chain = bool(np.all(a > b) and np.all(b > cc))
    matches = (k1, k2, k0) == (cert.k1, cert.k2, cert.k0)
    if not matches:
        msgs.append(f"thresholds differ: recomputed {(k1, k2, k0)} vs {(cert.k1, cert.k2, cert.k0)}")
    return Reverification(k1, k2, k0, matches and not msgs, chain, msgs)


# --- isoperimetric bound check and gluing parameters ------------------------

@dataclass
class BoundReport:
    n: int
    gamma_log2: float
    ratios: np.ndarray  # lhs / bound per k (0 at k = 0)
    passes: bool

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))


def check_isoperimetric_bound(spectrum: Spectrum, iso: IsoReport, k_max: int) -> BoundReport:
    """Check lambda_k Vol^(2/n) <= gamma(n) I^(1+2/n) k^(2/n) for k = 0..k_max.

    Evaluated in log space so the constant never overflows.
    """
    n = spectrum.dim
    top = min(k_max, len(spectrum) - 1)
    e = 2.0 / n
    lg = gamma_log2(n)
    ratios = np.zeros(top + 1)
    for k in range(1, top + 1):
        lhs = spectrum.values[k] * spectrum.volume ** e
        if lhs == 0:
            continue
        log2_bound = lg + (1 + e) * math.log2(iso.ratio) + e * math.log2(k)
        ratios[k] = 2.0 ** (math.log2(lhs) - log2_bound)
    return BoundReport(n, lg, ratios, bool(np.all(ratios <= 1.0)))


@dataclass(frozen=True)
class GlueParams:
    epsilon: float
    N: int
    delta: float
    h: float

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be positive, got {self.epsilon}")
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if not (self.delta > 0 and self.h > 0):
            raise DomainError("delta and h must be positive")


def select_h(union: Spectrum | UnionSpectrum, N: int) -> float:
    """Largest double h whose Dirichlet ground state (pi/(2h))^2 exceeds lambda_N(union) + 1.

    The test uses the same floating-point expression as the segment spectrum.
    """
    s = union.merged if isinstance(union, UnionSpectrum) else union
    if not 0 <= N < len(s):
        raise DomainError(f"N={N} out of range for a union spectrum of length {len(s)}")
    target = float(s.values[N]) + 1.0
    h = math.pi / (2.0 * math.sqrt(target))
    def ok(x):
        return (math.pi / (2.0 * x)) ** 2 > target

    while not ok(h):
        h = math.nextafter(h, 0.0)
    while ok(math.nextafter(h, math.inf)):
        h = math.nextafter(h, math.inf)
    return h


def plan_glue(union: Spectrum | UnionSpectrum, N: int, epsilon: float, delta: float,
              h: Optional[float] = None) -> GlueParams:
    if h is None:
        h = select_h(union, N)
    return GlueParams(epsilon, N, delta, h)


def neck_segment_gap(params: GlueParams) -> float:
    """Lowest Dirichlet eigenvalue of [-h, h] for the chosen parameters."""
    return float(segment_dirichlet_spectrum(params.h, 1).values[0])

