"""Interaction kernels: Riesz s-kernel, logarithmic kernel and weighted Riesz kernels.

Weights are functions ``w(y, x)`` of a *target* point ``y`` (where the
potential is read) and a *source* point ``x``.  The separable built-in
``separable(u, v)`` is ``u(x) / v(y)``: sources of strength ``u`` and a
dosage requirement scaled by ``v`` at the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CPDViolationError, InvalidArgumentError
from . import geometry as geo


@dataclass(frozen=True)
class Modulation:
    """Affine test function ``offset + slope * x[axis]`` (e.g. ``2 + cos(theta)`` on the unit circle)."""

    offset: float = 1.0
    slope: float = 0.0
    axis: int = 0

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.offset + self.slope * x[..., self.axis]

    def gradient(self, p: int) -> np.ndarray:
        g = np.zeros(p)
        g[self.axis] = self.slope
        return g

    def range_on(self, set_: geo.SetDescriptor) -> tuple[float, float]:
        lo, hi = coordinate_range(set_, self.axis)
        a, b = self.offset + self.slope * lo, self.offset + self.slope * hi
        return min(a, b), max(a, b)

    def to_dict(self) -> dict:
        return {"offset": self.offset, "slope": self.slope, "axis": self.axis}


def coordinate_range(set_: geo.SetDescriptor, axis: int) -> tuple[float, float]:
    """Conservative range of coordinate ``axis`` over the set."""
    lo, hi = math.inf, -math.inf
    for m in set_.parts():
        if isinstance(m, geo.Interval):
            a, b = m.a, m.b
        elif isinstance(m, geo.Box):
            a, b = m.lo[axis], m.hi[axis]
        elif isinstance(m, (geo.Arc, geo.Sphere, geo.Ball)):
            a, b = m.center[axis] - m.radius, m.center[axis] + m.radius
        else:
            t = np.linspace(*m._param_range(), 4097)
            vals = m.point_at(t)[:, axis]
            pad = m.measure / 4096
            a, b = vals.min() - pad, vals.max() + pad
        lo, hi = min(lo, a), max(hi, b)
    return lo, hi


@dataclass(frozen=True)
class WeightBounds:
    """Numeric bounds of a weight over ``A x A`` used by the certificates."""

    lo: float
    hi: float
    lip_target: float


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """A CPD weight.

    ``kind`` is one of ``constant``, ``separable`` or ``custom``.  A custom
    weight supplies ``func(y, x)`` (broadcasting over leading axes) together
    with declared bounds, since nothing about it can be derived.
    """

    kind: str
    c: float = 1.0
    u: Modulation | None = None
    v: Modulation | None = None
    w_min: float | None = None
    func: Callable | None = None
    declared: WeightBounds | None = None

    def __post_init__(self):
        if self.kind == "constant":
            if not self.c > 0:
                raise InvalidArgumentError("constant weight must be positive")
        elif self.kind == "separable":
            object.__setattr__(self, "u", self.u or Modulation())
            object.__setattr__(self, "v", self.v or Modulation())
        elif self.kind == "custom":
            if self.func is None or self.declared is None or self.w_min is None:
                raise InvalidArgumentError("custom weights need func, declared bounds and w_min")
        else:
            raise InvalidArgumentError(f"unknown weight kind {self.kind!r}")
        if self.w_min is not None and not self.w_min > 0:
            raise InvalidArgumentError("w_min must be positive")

    def __call__(self, y, x) -> np.ndarray:
        if self.kind == "constant":
            y = np.asarray(y, dtype=float)
            x = np.asarray(x, dtype=float)
            return np.full(np.broadcast_shapes(y.shape[:-1], x.shape[:-1]), self.c)
        if self.kind == "separable":
            return self.u(x) / self.v(y)
        return np.asarray(self.func(np.asarray(y, dtype=float), np.asarray(x, dtype=float)), dtype=float)

    def grad_source(self, y, x) -> np.ndarray:
        """Gradient of ``w(y, x)`` with respect to the source ``x``."""
        y = np.asarray(y, dtype=float)
        x = np.asarray(x, dtype=float)
        shape = np.broadcast_shapes(y.shape, x.shape)
        if self.kind == "constant":
            return np.zeros(shape)
        if self.kind == "separable":
            gu = self.u.gradient(shape[-1])
            return (1.0 / self.v(y))[..., None] * gu
        return _fd_grad(lambda xx: self(y, xx), x, shape)

    def diagonal(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self(x, x)

    def bounds(self, set_: geo.SetDescriptor) -> WeightBounds:
        if self.kind == "constant":
            return WeightBounds(self.c, self.c, 0.0)
        if self.kind == "separable":
            ulo, uhi = self.u.range_on(set_)
            vlo, vhi = self.v.range_on(set_)
            if ulo <= 0 or vlo <= 0:
                raise CPDViolationError("separable weight factors must stay positive on the set")
            return WeightBounds(ulo / vhi, uhi / vlo, uhi * abs(self.v.slope) / vlo**2)
        return self.declared

    def lower_diag_bound(self, set_: geo.SetDescriptor) -> float:
        if self.w_min is not None:
            return self.w_min
        return self.bounds(set_).lo

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "c": self.c}
        if self.kind == "separable":
            return {"kind": "separable", "u": self.u.to_dict(), "v": self.v.to_dict()}
        return {"kind": "custom"}


def _fd_grad(f, x, shape, h=1e-7):
    g = np.zeros(shape)
    for k in range(shape[-1]):
        e = np.zeros(shape[-1])
        e[k] = h
        g[..., k] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def constant_weight(c: float) -> WeightSpec:
    return WeightSpec("constant", c=float(c))


def separable_weight(u: Modulation | None = None, v: Modulation | None = None) -> WeightSpec:
    """``w(y, x) = u(x) / v(y)``."""
    return WeightSpec("separable", u=u, v=v)


def custom_weight(func, w_min: float, lo: float, hi: float, lip_target: float) -> WeightSpec:
    return WeightSpec("custom", func=func, w_min=w_min, declared=WeightBounds(lo, hi, lip_target))


def audit_weight(weight: WeightSpec, set_: geo.SetDescriptor, n: int = 10_000, seed: int = 0) -> WeightBounds:
    """Spot-check the CPD lower bound on ``n`` uniform samples and return numeric bounds."""
    pts = geo.sample_uniform(set_, n, seed)
    diag = weight.diagonal(pts)
    w_min = weight.lower_diag_bound(set_)
    if not np.all(np.isfinite(diag)) or diag.min() < w_min * (1 - 1e-12):
        raise CPDViolationError(f"w(x,x) = {diag.min():.6g} falls below the declared bound {w_min:.6g}")
    b = weight.bounds(set_)
    if not b.lo > 0:
        raise CPDViolationError("weight must be bounded away from zero for certified brackets")
    return b


@dataclass(frozen=True, eq=False)
class KernelSpec:
    """``w(y, x) / max(|y - x|, eps)^s`` (Riesz kinds) or ``-log max(|y - x|, eps)``.

    ``eps=None`` means "unset": exact evaluation here, and ``1e-12 * diam(A)``
    inside the optimizers, which need finite gradients.
    """

    kind: str
    s: float = 0.0
    weight: WeightSpec | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.kind in ("riesz", "weighted-riesz"):
            if not self.s > 0:
                raise InvalidArgumentError("Riesz kernels need s > 0")
        elif self.kind == "log":
            if self.weight is not None:
                raise InvalidArgumentError("the logarithmic kernel takes no weight")
        else:
            raise InvalidArgumentError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "weighted-riesz" and self.weight is None:
            raise InvalidArgumentError("weighted-riesz needs a weight")
        if self.eps is not None and self.eps < 0:
            raise InvalidArgumentError("eps must be >= 0")

    @property
    def is_log(self) -> bool:
        return self.kind == "log"

    @property
    def is_weighted(self) -> bool:
        return self.weight is not None and self.weight.kind != "constant"

    @property
    def scale(self) -> float:
        """Constant factor of an unweighted or constant-weight kernel."""
        if self.weight is None:
            return 1.0
        return self.weight.c if self.weight.kind == "constant" else math.nan

    def with_eps(self, eps: float | None) -> "KernelSpec":
        return KernelSpec(self.kind, self.s, self.weight, eps)

    def effective_eps(self, set_: geo.SetDescriptor | None = None) -> float:
        if self.eps is not None:
            return self.eps
        return 0.0 if set_ is None else 1e-12 * set_.diameter()

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        if self.kind != "log":
            out["s"] = self.s
        if self.weight is not None:
            out["weight"] = self.weight.to_dict()
        if self.eps is not None:
            out["eps"] = self.eps
        return out


def riesz(s: float, eps: float | None = None) -> KernelSpec:
    return KernelSpec("riesz", float(s), None, eps)


def log_kernel(eps: float | None = None) -> KernelSpec:
    return KernelSpec("log", 0.0, None, eps)


def weighted_riesz(s: float, weight: WeightSpec, eps: float | None = None) -> KernelSpec:
    return KernelSpec("weighted-riesz", float(s), weight, eps)


def eval(kernel: KernelSpec, x, y) -> np.ndarray | float:  # noqa: A001 - mirrors the operation name
    """Kernel value ``K(x, y)``; ``x`` is the target and ``y`` the source for weighted kinds.

    Broadcasts over leading axes.  With ``eps == 0`` coincident points give ``+inf``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if y.ndim == 0:
        y = y.reshape(1)
    d = np.sqrt(np.sum((x - y) ** 2, axis=-1))
    eps = kernel.effective_eps()
    d = np.maximum(d, eps)
    with np.errstate(divide="ignore"):
        if kernel.is_log:
            out = -np.log(d)
        else:
            out = d ** (-kernel.s)
            if kernel.weight is not None:
                out = kernel.weight(x, y) * out
    return float(out) if np.ndim(out) == 0 else out


def diagonal_weight(weight: WeightSpec, x) -> float | np.ndarray:
    """``w(x, x)``, checked against the declared CPD lower bound when one is declared."""
    val = weight.diagonal(x)
    if weight.w_min is not None and np.any(val < weight.w_min):
        raise CPDViolationError(f"w(x,x) = {np.min(val):.6g} < w_min = {weight.w_min:.6g}")
    if np.any(~(val > 0)):
        raise CPDViolationError("w(x,x) must be positive")
    return float(val) if np.ndim(val) == 0 else val
