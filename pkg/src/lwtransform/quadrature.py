"""Integration engine: tensor Gauss-Legendre boxes, vertical line integrals,
log-uniform sample grids and a doubling refinement driver.

All node sets are deterministic, and every reduction is a fixed-order numpy
sum, so results do not depend on how callers schedule the work.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, ContourTruncationError, DomainError

__all__ = [
    "ContourSpec",
    "GridFunction",
    "QuadratureRule",
    "default_threads",
    "gauss_legendre",
    "integrate_box",
    "integrate_line",
    "parallel_map",
    "refine_until",
    "smooth_bump",
]


def default_threads():
    """Worker count from ``WHITTAKER_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("WHITTAKER_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(func, items, threads=None):
    """Ordered map over ``items``; the output order never depends on scheduling."""
    items = list(items)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


@lru_cache(maxsize=64)
def _leggauss(degree):
    x, w = np.polynomial.legendre.leggauss(degree)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(degree, lo=-1.0, hi=1.0):
    """Gauss-Legendre nodes and weights of ``degree`` points on [lo, hi]."""
    x, w = _leggauss(int(degree))
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre: ``panels`` equal panels of ``degree`` points."""

    panels: int = 1
    degree: int = 16

    def __post_init__(self):
        if self.panels < 1:
            raise DomainError("panels must be >= 1")
        if not 4 <= self.degree <= 64:
            raise DomainError("degree must lie in [4, 64]")

    def nodes(self, lo, hi):
        edges = np.linspace(lo, hi, self.panels + 1)
        xs, ws = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            x, w = gauss_legendre(self.degree, a, b)
            xs.append(x)
            ws.append(w)
        return np.concatenate(xs), np.concatenate(ws)

    def refined(self):
        return QuadratureRule(self.panels * 2, self.degree)


@dataclass(frozen=True)
class ContourSpec:
    """Discretisation of vertical lines ``Re s = c``, ``|Im s| <= height``.

    ``real_parts`` holds one abscissa per integration variable. Nodes are
    equally spaced with ``nodes_per_unit`` points per unit of ``Im s``.
    """

    real_parts: tuple = (2.0,)
    height: float = 60.0
    nodes_per_unit: int = 10

    def __post_init__(self):
        object.__setattr__(self, "real_parts", tuple(float(c) for c in self.real_parts))
        if self.height <= 0:
            raise DomainError("contour height must be positive")
        if self.nodes_per_unit < 4:
            raise DomainError("nodes_per_unit must be >= 4")
        if self.height * self.nodes_per_unit < 64:
            raise DomainError("contour needs at least 64 nodes per line")

    @property
    def step(self):
        return 1.0 / self.nodes_per_unit

    def heights(self):
        """Trapezoid abscissae tau in [-height, height] (symmetric)."""
        m = int(round(self.height * self.nodes_per_unit))
        return self.step * np.arange(-m, m + 1)

    def points(self, axis=0):
        return self.real_parts[axis] + 1j * self.heights()

    def with_height(self, height):
        return ContourSpec(self.real_parts, height, self.nodes_per_unit)

    def refined(self):
        return ContourSpec(self.real_parts, self.height, 2 * self.nodes_per_unit)


def _box_nodes(box, rule, log_space):
    axes, weights = [], []
    for lo, hi in box:
        if log_space:
            if lo <= 0 or hi <= lo:
                raise DomainError(f"invalid log-space interval [{lo}, {hi}]")
            u, w = rule.nodes(math.log(lo), math.log(hi))
            y = np.exp(u)
            axes.append(y)
            weights.append(w * y)  # dy = y du
        else:
            if hi <= lo:
                raise DomainError(f"invalid interval [{lo}, {hi}]")
            x, w = rule.nodes(lo, hi)
            axes.append(x)
            weights.append(w)
    return axes, weights


def integrate_box(f, rule, box, log_space=True):
    """Tensor Gauss-Legendre estimate of ``int_box f``.

    ``f`` is either a vectorised callable ``f(y1, ..., yd)`` evaluated on the
    tensor mesh, or a :class:`GridFunction` (then its own lattice is used and
    ``rule``/``box`` are ignored). With ``log_space`` the nodes are placed
    uniformly in ``u = log y`` and the Jacobian ``dy = y du`` is applied, so
    the integral is still with respect to ``dy``.
    """
    if isinstance(f, GridFunction):
        return f.integrate()
    axes, weights = _box_nodes(box, rule, log_space)
    mesh = np.meshgrid(*axes, indexing="ij")
    vals = np.asarray(f(*mesh))
    w = weights[0]
    for wk in weights[1:]:
        w = np.multiply.outer(w, wk)
    return complex(np.sum(vals * w))


def integrate_line(g, spec, axis=0, budget=None, tail=None, rule=None):
    """``1/(2 pi i) int g(s) ds`` over ``Re s = c``, truncated at ``|Im s| = T``.

    The trapezoid rule on the nodes of ``spec`` is used by default
    (spectrally accurate for analytic integrands that are negligible at
    ``|Im s| = T``). Passing a :class:`QuadratureRule` as ``rule`` switches to
    composite Gauss-Legendre on [-T, T], which has no endpoint error and is
    the right choice when a ``tail`` correction continues the integral.

    The truncation tail is estimated as ``T * (|g(c+iT)| + |g(c-iT)|) /
    (2 pi)``, which bounds the tail for integrands decaying at least like
    1/|Im s|^2. If ``tail`` is supplied it is called as ``tail(c, T)`` and
    must return ``(correction, error_bound)``; the correction is added and
    its error bound replaces the crude estimate.

    Returns ``(value, tail_estimate)``; raises ContourTruncationError when
    ``budget`` is given and the tail estimate exceeds it.
    """
    c = spec.real_parts[axis]
    T = spec.height
    if rule is None:
        s = c + 1j * spec.heights()
        vals = np.asarray(g(s), dtype=complex)
        value = spec.step * np.sum(vals) / (2.0 * math.pi)
        ends = (vals[0], vals[-1])
    else:
        tau, w = rule.nodes(-T, T)
        value = np.sum(w * np.asarray(g(c + 1j * tau), dtype=complex)) / (2.0 * math.pi)
        ends = np.asarray(g(np.array([c - 1j * T, c + 1j * T])), dtype=complex)
    if tail is None:
        est = T * (abs(ends[0]) + abs(ends[1])) / (2.0 * math.pi)
    else:
        corr, est = tail(c, spec.height)
        value = value + corr
    if budget is not None and est > budget:
        raise ContourTruncationError(
            f"line tail estimate {est:.3e} exceeds budget {budget:.3e} at T={spec.height}"
        )
    return complex(value), float(est)


def refine_until(f, tol, start=1, max_level=12):
    """Evaluate ``f(level)`` for increasing resolution until successive
    estimates differ by less than ``tol``.

    ``f`` receives an integer resolution level (doubled each step) and returns
    a number or array. Returns ``(value, achieved_error)`` where
    ``achieved_error`` is the last successive difference (max norm).
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    level = start
    prev = np.asarray(f(level))
    diff = float("inf")
    for _ in range(max_level):
        level *= 2
        cur = np.asarray(f(level))
        diff = float(np.max(np.abs(cur - prev)))
        if diff < tol:
            return (cur[()] if cur.ndim == 0 else cur), diff
        prev = cur
    raise BudgetExceeded(
        f"refinement stalled at difference {diff:.3e} > tol {tol:.3e}",
        value=prev,
        achieved_error=diff,
    )


def _smooth_step(x):
    # C-infinity step: 0 for x <= 0, 1 for x >= 1
    x = np.clip(x, 0.0, 1.0)
    a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
    b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def smooth_bump(u, center=0.0, half_width=math.log(2.0), sigma=0.12, plateau=0.8):
    """Gaussian in ``u`` times a C-infinity cutoff supported in ``|u - center| < half_width``.

    The cutoff equals one on ``|u - center| <= plateau * half_width``, so
    the function is smooth and compactly supported while its spectrum decays
    essentially like the Gaussian's.
    """
    d = np.abs(np.asarray(u, dtype=float) - center)
    inner = plateau * half_width
    cut = _smooth_step((half_width - d) / (half_width - inner))
    return np.exp(-0.5 * ((d) / sigma) ** 2) * cut


@dataclass
class GridFunction:
    """Samples of a function on a log-uniform lattice in ``R_+^{n-1}``.

    ``box`` lists ``(lo, hi)`` per coordinate; ``counts`` the lattice size per
    axis. Integration uses the trapezoid rule in ``u = log y``, which is
    spectrally accurate for smooth functions vanishing at the box ends.
    """

    n: int
    box: tuple
    counts: tuple
    samples: np.ndarray
    label: str = ""
    _axes: list = field(init=False, repr=False)

    def __post_init__(self):
        self.box = tuple((float(lo), float(hi)) for lo, hi in self.box)
        self.counts = tuple(int(c) for c in self.counts)
        if len(self.box) != self.n - 1 or len(self.counts) != self.n - 1:
            raise DomainError("box and counts need n - 1 entries")
        for (lo, hi), c in zip(self.box, self.counts):
            if not 0 < lo < hi:
                raise DomainError(f"invalid box interval [{lo}, {hi}]")
            if c < 8:
                raise DomainError("GridFunction needs at least 8 nodes per axis")
        self.samples = np.asarray(self.samples)
        if self.samples.shape != self.counts:
            raise DomainError(f"samples shape {self.samples.shape} != counts {self.counts}")
        self._axes = [
            np.linspace(math.log(lo), math.log(hi), c) for (lo, hi), c in zip(self.box, self.counts)
        ]

    @classmethod
    def from_callable(cls, n, box, counts, func, label=""):
        """Sample ``func(y1, ..., y_{n-1})`` (vectorised) on the lattice."""
        axes = [np.exp(np.linspace(math.log(lo), math.log(hi), c)) for (lo, hi), c in zip(box, counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return cls(n, box, counts, np.asarray(func(*mesh)), label)

    @property
    def log_axes(self):
        return list(self._axes)

    @property
    def axes(self):
        return [np.exp(u) for u in self._axes]

    def mesh(self):
        return np.meshgrid(*self.axes, indexing="ij")

    def points(self):
        """All lattice points as an array of shape (N, n - 1)."""
        return np.stack([m.ravel() for m in self.mesh()], axis=-1)

    def log_weights(self):
        """Per-axis trapezoid weights in ``u``."""
        out = []
        for u in self._axes:
            h = u[1] - u[0]
            w = np.full(u.size, h)
            w[0] = w[-1] = 0.5 * h
            out.append(w)
        return out

    def du_weights(self):
        """Tensor trapezoid weights for ``du_1 ... du_{n-1}``."""
        ws = self.log_weights()
        w = ws[0]
        for wk in ws[1:]:
            w = np.multiply.outer(w, wk)
        return w

    def integrate(self, weight=None):
        """``int f dy`` (or ``int f * weight dy`` with ``weight`` on the lattice)."""
        vals = self.samples if weight is None else self.samples * weight
        jac = np.ones(self.counts)
        for m in self.mesh():
            jac = jac * m
        return complex(np.sum(vals * jac * self.du_weights()))
