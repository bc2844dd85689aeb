"""Normalizations, asymptotic constants and limit extraction.

``tau(s, d, N)`` is ``N^{s/d}`` for ``s > d`` and ``N log N`` (natural log)
for ``s = d``.  The constant ``sigma_{s,1} = 2 (2^s - 1) zeta(s)`` is exact;
for ``d = 2`` only a conjectured value built on the Epstein zeta function of
the unit-covolume triangular lattice is available and it always travels
with a conjecture flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import InvalidArgumentError, UnavailableConstantError
from .kernel import KernelSpec, WeightSpec
from .potential import Configuration, PolarizationEstimate, period_region, polarization

PROVED = "proved-constant"
CONJECTURED = "conjectured-constant"

# nearest-vector length of the triangular lattice with unit co-volume
TRIANGULAR_A = math.sqrt(2.0 / math.sqrt(3.0))


def tau(s: float, d: int, N: float) -> float:
    if s < d:
        raise InvalidArgumentError("tau needs s >= d; use chebyshev_ratio_series for s < d")
    if N < 2:
        raise InvalidArgumentError("tau needs N >= 2")
    if s == d:
        return N * math.log(N)
    return N ** (s / d)


def _borwein_coefficients(n: int) -> np.ndarray:
    """Partial sums d_k of Borwein's eta acceleration (algorithm 2)."""
    d = np.empty(n + 1)
    acc = 0.0
    for i in range(n + 1):
        acc += n * math.factorial(n + i - 1) * 4.0**i / (math.factorial(n - i) * math.factorial(2 * i))
        d[i] = acc
    return d


_BORWEIN_N = 40
_BORWEIN_D = _borwein_coefficients(_BORWEIN_N)


def riemann_zeta(s: float) -> float:
    """zeta(s) for real s > 1 through the alternating eta series with Borwein acceleration.

    The acceleration error is below ``3 / (3 + sqrt 8)^40 ~ 1e-30`` relative,
    so the result is accurate to rounding.
    """
    if not s > 1:
        raise InvalidArgumentError("zeta is evaluated for s > 1 only")
    n = _BORWEIN_N
    dn = _BORWEIN_D[n]
    k = np.arange(n)
    terms = (-1.0) ** k * (_BORWEIN_D[k] - dn) / (k + 1.0) ** s
    eta = -terms.sum() / dn
    # 1 - 2^{1-s} loses digits near s = 1; expm1 keeps them
    return float(eta / -math.expm1((1.0 - s) * math.log(2.0)))


def sigma_1d_exact(s: float) -> float:
    """``2 (2^s - 1) zeta(s)``."""
    if not s > 1:
        raise InvalidArgumentError("sigma_{s,1} needs s > 1")
    return 2.0 * math.expm1(s * math.log(2.0)) * riemann_zeta(s)


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


# ---------------------------------------------------------------------------
# Epstein zeta of the triangular lattice


def _triangular_norms_sq(R: float) -> np.ndarray:
    """Squared lengths of nonzero lattice vectors of length <= R, sorted."""
    a2 = TRIANGULAR_A**2
    # |v|^2 = a^2 (m^2 + m n + n^2) >= (3/4) a^2 m^2
    mmax = int(math.floor(R / (TRIANGULAR_A * math.sqrt(0.75)))) + 1
    chunks = []
    r2 = R * R / a2
    for m in range(-mmax, mmax + 1):
        # solve n^2 + m n + m^2 <= r2 for n
        disc = 4 * r2 - 3 * m * m
        if disc < 0:
            continue
        root = math.sqrt(disc)
        n = np.arange(math.floor((-m - root) / 2), math.ceil((-m + root) / 2) + 1, dtype=np.int64)
        q = n * n + m * n + m * m
        q = q[(q > 0) & (q <= r2 * (1 + 1e-15))]
        chunks.append(q)
    q = np.sort(np.concatenate(chunks)).astype(float)
    return a2 * q


@dataclass
class LatticeSum:
    value: float
    radius: float
    previous: float
    converged: bool
    tail_corrected: bool

    @property
    def rel_change(self) -> float:
        return abs(self.value - self.previous) / abs(self.value)


def epstein_partial(s: float, R: float, tail: bool = True) -> float:
    """Sum of ``|v|^{-s}`` over nonzero lattice vectors with ``|v| <= R``.

    With ``tail`` the continuum remainder ``2 pi R^{2-s} / (s - 2)`` (unit
    co-volume) is added.
    """
    if not s > 2:
        raise InvalidArgumentError("the Epstein zeta series diverges for s <= 2")
    q = _triangular_norms_sq(R)
    val = float(np.sum(q[::-1] ** (-s / 2)))
    if tail:
        val += 2 * math.pi * R ** (2 - s) / (s - 2)
    return val


def epstein_zeta_detail(s: float, rtol: float = 1e-10, r0: float = 8.0, r_max: float = 2048.0,
                        tail: bool = True) -> LatticeSum:
    """Shell summation with radius doubling until the relative change drops below ``rtol``."""
    if not s > 2:
        raise InvalidArgumentError("the Epstein zeta series diverges for s <= 2")
    R = r0
    prev = epstein_partial(s, R, tail)
    while True:
        R *= 2
        cur = epstein_partial(s, R, tail)
        done = abs(cur - prev) <= rtol * abs(cur)
        if done or R >= r_max:
            return LatticeSum(cur, R, prev, done, tail)
        prev = cur


def epstein_zeta_triangular(s: float, rtol: float = 1e-10) -> float:
    return epstein_zeta_detail(s, rtol).value


@dataclass(frozen=True)
class Constant:
    """A numeric constant together with where it comes from."""

    value: float
    provenance: str
    name: str = ""

    def to_dict(self) -> dict:
        return {"value": self.value, "provenance": self.provenance, "name": self.name}


def conjectured_sigma_2(s: float) -> Constant:
    """``((3^{s/2} - 1) / 2) * zeta_Lambda(s)``; a conjecture, flagged as such."""
    if not s > 2:
        raise InvalidArgumentError("the conjectured sigma_{s,2} needs s > 2")
    val = 0.5 * math.expm1(0.5 * s * math.log(3.0)) * epstein_zeta_triangular(s)
    return Constant(val, CONJECTURED, f"sigma_{{{s:g},2}}")


def sigma_constant(s: float, d: int) -> Constant:
    if s < d:
        raise InvalidArgumentError("sigma_{s,d} is defined for s >= d")
    if s == d:
        return Constant(unit_ball_volume(d), PROVED, f"Vol(B^{d})")
    if d == 1:
        return Constant(sigma_1d_exact(s), PROVED, f"sigma_{{{s:g},1}}")
    if d == 2:
        return conjectured_sigma_2(s)
    raise UnavailableConstantError(f"no value of sigma_{{s,d}} is known for d = {d} and s > d")


@dataclass(frozen=True)
class LimitPrediction:
    value: float
    provenance: str
    sigma: float
    weighted_measure: float
    s: float
    d: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def predicted_limit(set_: geo.SetDescriptor, weight: WeightSpec | None, s: float) -> LimitPrediction:
    """``sigma_{s,d} / H_d^{s,w}(A)^{s/d}``, the limit of ``P / tau`` for s >= d."""
    from .distribution import weighted_hausdorff

    d = set_.hausdorff_dim
    sig = sigma_constant(s, d)
    H = weighted_hausdorff(set_, weight, s)
    return LimitPrediction(sig.value / H ** (s / d), sig.provenance, sig.value, H, s, d)


# ---------------------------------------------------------------------------
# ratio series and limit extraction


@dataclass
class RatioEntry:
    N: int
    value: float
    ratio: float
    lower: float = math.nan
    upper: float = math.nan
    tau: float = math.nan


@dataclass
class RatioSeries:
    entries: list
    s: float
    d: int
    normalization: str = "tau"

    def __post_init__(self):
        Ns = [e.N for e in self.entries]
        if any(b <= a for a, b in zip(Ns, Ns[1:])):
            raise InvalidArgumentError("N must be strictly increasing in a ratio series")

    @property
    def Ns(self) -> np.ndarray:
        return np.array([e.N for e in self.entries], dtype=float)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([e.ratio for e in self.entries])

    @classmethod
    def from_values(cls, Ns, values, s: float, d: int) -> "RatioSeries":
        entries = []
        for N, v in zip(Ns, values):
            t = tau(s, d, N)
            entries.append(RatioEntry(int(N), float(v), float(v) / t, tau=t))
        return cls(entries, s, d)

    def to_rows(self) -> list[dict]:
        return [e.__dict__.copy() for e in self.entries]


@dataclass
class SigmaEstimate:
    value: float
    uncertainty: float
    low_confidence: bool
    meta: dict = field(default_factory=dict)


def estimate_limit(series: RatioSeries) -> SigmaEstimate:
    """Least-squares fit of ``c + b N^{-1/d}`` on the last half of the series; returns ``c``.

    The uncertainty is the distance between the fitted ``c`` and the plain
    last ratio.
    """
    n = len(series.entries)
    if n < 4:
        raise InvalidArgumentError("estimate_limit needs at least 4 entries")
    Ns, r = series.Ns, series.ratios
    tail = slice(n - max(2, n // 2), n)
    x = Ns[tail] ** (-1.0 / series.d)
    X = np.column_stack([np.ones_like(x), x])
    (c, b), *_ = np.linalg.lstsq(X, r[tail], rcond=None)
    unc = abs(c - r[-1])
    steps = np.diff(r)
    monotone = bool(np.all(steps >= 0) or np.all(steps <= 0))
    osc = float((r.max() - r.min()) / abs(np.median(r))) if np.median(r) != 0 else math.inf
    return SigmaEstimate(
        float(c), float(unc), (not monotone) and osc > 0.5,
        {"model": "c + b*N^(-1/d)", "slope": float(b), "tail_entries": int(x.size),
         "monotone": monotone, "relative_oscillation": osc, "last_ratio": float(r[-1])},
    )


def ratios_bounded(series: RatioSeries, factor: float = 10.0) -> bool:
    """Sanity gate: every ratio is at most ``factor`` times the tail median."""
    r = series.ratios
    med = float(np.median(r[len(r) // 2:]))
    return bool(np.all(r <= factor * med))


def equally_spaced_circle(N: int, radius: float = 1.0, phase: float = 0.0) -> Configuration:
    c = geo.circle(radius)
    return Configuration(c.point_at(phase + 2 * math.pi * np.arange(N) / N), c)


def symmetric_circle_polarization(N: int, kernel: KernelSpec, radius: float = 1.0, **kw) -> PolarizationEstimate:
    """Certified bracket for N equally spaced points, searching one period arc only."""
    cfg = equally_spaced_circle(N, radius)
    return polarization(cfg, kernel, period_region(cfg.set, N), **kw)


def circle_ratio_series(Ns, kernel: KernelSpec, radius: float = 1.0, **kw) -> RatioSeries:
    """``P / tau`` for equally spaced points on a circle, with certified brackets."""
    entries = []
    for N in Ns:
        est = symmetric_circle_polarization(int(N), kernel, radius, **kw)
        t = tau(kernel.s, 1, N)
        entries.append(RatioEntry(int(N), est.upper, est.upper / t, est.lower, est.upper, t))
    return RatioSeries(entries, kernel.s, 1)


def chebyshev_ratio_series(set_: geo.SetDescriptor, kernel: KernelSpec, Ns, configs=None, **kw) -> RatioSeries:
    """Diagnostic ``P(omega_N) / N`` for s < d (no limit value is asserted).

    Configurations default to the deterministic seed for the set.
    """
    from .solver import default_seed_style, seed_configuration

    if not kernel.is_log and kernel.s >= set_.hausdorff_dim:
        raise InvalidArgumentError("the Chebyshev ratio series is meant for s < d")
    entries = []
    for i, N in enumerate(Ns):
        cfg = configs[i] if configs is not None else seed_configuration(set_, int(N), default_seed_style(set_, int(N)))
        if isinstance(set_, geo.Arc) and set_.is_full and configs is None:
            est = polarization(cfg, kernel, period_region(set_, int(N), set_.theta0), **kw)
        else:
            est = polarization(cfg, kernel, **kw)
        entries.append(RatioEntry(int(N), est.upper, est.upper / N, est.lower, est.upper, float(N)))
    return RatioSeries(entries, kernel.s, set_.hausdorff_dim, normalization="N")
