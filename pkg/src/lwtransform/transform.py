"""Lebedev-Whittaker transform, its inverse, the c-function and the
Plancherel density.

The forward transform is ``f#(t) = int f(y) W_{it}(y) d^x y``. The inverse is

    f(y) = kappa_n int f#(t) W_{-it}(y) rho(t) dt,
    rho(t) = 1 / prod_{k<l} |Gamma((alpha_k - alpha_l)/2)|^2,

with ``kappa_2 = 1/(4 pi)`` and ``kappa_3 = 1/(8 pi^2)``. These constants are
fixed by requiring the roundtrip and the Plancherel identity to hold with the
Whittaker normalisation used in :mod:`lwtransform.whittaker`; the constant
``1/pi^(n-1)`` is available as ``normalization="literal"`` for comparison.

Both ``f#`` and ``rho`` are invariant under the Weyl group acting on t, so the
t-integral runs over one chamber (``0 <= t_j <= T``) and is multiplied by the
group order n!. At n = 3 the chamber images have unit Jacobian.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateParameters, DomainError, TailBudgetExceeded
from .quadrature import ContourSpec, parallel_map
from .specfun import log_gamma
from .spectral import DEGENERATE_TOL, alpha_from_t, haar_weight
from .whittaker import (
    Method,
    default_gl3_contour,
    mb_coupling,
    mb_kernel_factors,
    whittaker_gl2,
)

__all__ = [
    "TransformReport",
    "c_function",
    "chamber_nodes",
    "forward",
    "forward_table",
    "inner_product_t",
    "inner_product_y",
    "inverse",
    "inverse_constant",
    "inverse_from_table",
    "plancherel_density",
    "plancherel_density_t",
    "roundtrip",
]

_CALIBRATED = {2: 1.0 / (4.0 * math.pi), 3: 1.0 / (8.0 * math.pi ** 2)}


def inverse_constant(n, normalization="calibrated"):
    """Overall constant kappa_n of the inverse transform."""
    if normalization == "literal":
        return 1.0 / math.pi ** (n - 1)
    if normalization != "calibrated":
        raise DomainError(f"unknown normalization {normalization!r}")
    if n not in _CALIBRATED:
        raise DomainError(f"no calibrated inverse constant for n = {n}")
    return _CALIBRATED[n]


def _pair_gaps(alpha):
    alpha = np.asarray(alpha, dtype=complex)
    n = alpha.shape[-1]
    i, j = np.triu_indices(n, 1)
    return (alpha[..., i] - alpha[..., j]) / 2.0


def c_function(p):
    """Harish-Chandra c-function prod_{k<l} Gamma((alpha_k - alpha_l)/2)."""
    if p.degenerate:
        raise DegenerateParameters(f"coincident alpha entries at t = {p.t}")
    return complex(np.exp(np.sum(log_gamma(_pair_gaps(p.alpha)))))


def _log_density(alpha):
    # 1/Gamma(g) = g/Gamma(1 + g) stays finite as a gap g -> 0
    gaps = _pair_gaps(alpha)
    degenerate = np.any(np.abs(gaps) < DEGENERATE_TOL / 2, axis=-1)
    mod = np.where(degenerate[..., None], 1.0, np.abs(gaps))
    logd = np.sum(2.0 * np.log(mod) - 2.0 * log_gamma(1.0 + gaps).real, axis=-1)
    return np.where(degenerate, -np.inf, logd)


def plancherel_density(p):
    """1 / prod_{k<l} |Gamma((alpha_k - alpha_l)/2)|^2, exactly 0 when degenerate.

    The density grows like exp(pi sum_{k<l} |alpha_k - alpha_l| / 2); the
    transform values it multiplies decay faster.
    """
    return float(np.exp(_log_density(p.alpha)))


def plancherel_density_t(n, t):
    """Vectorised density for an array of t rows (shape (m, n-1))."""
    t = np.asarray(t, dtype=float).reshape(-1, n - 1)
    return np.exp(_log_density(_alpha_rows(n, t)))


def _alpha_rows(n, t):
    t = np.asarray(t, dtype=float).reshape(-1, n - 1)
    if n == 2:
        return np.stack([1j * t[:, 0], -1j * t[:, 0]], axis=-1)
    if n == 3:
        t1, t2 = t[:, 0], t[:, 1]
        return np.stack([1j * (2 * t1 + t2), 1j * (t2 - t1), -1j * (t1 + 2 * t2)], axis=-1)
    return np.array([alpha_from_t(n, row) for row in t])


def chamber_nodes(n, T, rule, symmetric=True):
    """Quadrature nodes and weights for the t-integral.

    With ``symmetric`` the nodes cover the chamber [0, T]^{n-1} and the weights
    include the factor n!; otherwise the full box [-T, T]^{n-1} is used.
    """
    if n not in (2, 3):
        raise DomainError("t-space quadrature is implemented for n = 2, 3")
    lo = 0.0 if symmetric else -T
    x, w = rule.nodes(lo, T)
    if n == 2:
        nodes, weights = x[:, None], w.copy()
    else:
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        nodes = np.stack([X1.ravel(), X2.ravel()], axis=-1)
        weights = np.outer(w, w).ravel()
    if symmetric:
        weights = weights * math.factorial(n)
    return nodes, weights


def _lattice_weights(f):
    # d^x y in log coordinates: haar(y) * prod y_k (Jacobian) * du
    pts = f.points()
    jac = np.prod(pts, axis=-1)
    w = haar_weight(f.n, pts) * jac
    return w.reshape(f.counts) * f.du_weights()


# ---------------------------------------------------------------- forward

def forward(f, W, t=None):
    """f#(t) = int f(y) W_{it}(y) d^x y on the lattice of ``f``."""
    if W.n != f.n:
        raise DomainError("evaluator rank does not match the grid function")
    if t is not None:
        W = W.with_t(t)
    if not np.any(f.samples):
        return 0j
    vals = W.grid(f.axes)
    return complex(np.sum(f.samples * vals * _lattice_weights(f)))


def _gl3_mellin_matrix(f, contour):
    # M_ab = D(s1_a + s2_b) * int f y1^{-s1} y2^{-s2} y1 y2 d^x y
    s1, s2, D = mb_coupling(contour)
    u1, u2 = f.log_axes
    w1, w2 = f.log_weights()
    E1 = np.exp(-u1[:, None] * (1.0 + s1[None, :]))
    E2 = np.exp(-u2[:, None] * (1.0 + s2[None, :]))
    Ft = E1.T @ (f.samples * np.outer(w1, w2)) @ E2
    return D * Ft


def _transform_contour(n, T, contour):
    if n != 3:
        return None
    need = default_gl3_contour(height=math.ceil(3 * T + 30), nodes_per_unit=10)
    if contour is None:
        return need
    if contour.height < need.height:
        return ContourSpec(contour.real_parts, need.height, contour.nodes_per_unit)
    return contour


def forward_table(f, nodes, contour=None, threads=None, chunk=256):
    """f# at every row of ``nodes`` (shape (m, n-1)).

    For n = 3 the Mellin-Barnes factorisation is used: one matrix for f,
    then a bilinear form per t.
    """
    nodes = np.asarray(nodes, dtype=float).reshape(-1, f.n - 1)
    if f.n == 2:
        w = f.samples * _lattice_weights(f)
        y = f.axes[0]
        return np.array(parallel_map(lambda tt: np.sum(w * whittaker_gl2(tt[0], y)),
                                     list(nodes), threads), dtype=complex)
    if f.n != 3:
        raise DomainError("forward_table supports n = 2, 3")
    tmax = float(np.max(np.abs(nodes))) if nodes.size else 0.0
    contour = _transform_contour(3, tmax, contour)
    M = _gl3_mellin_matrix(f, contour)
    s1, s2, _ = mb_coupling(contour)
    alphas = _alpha_rows(3, nodes)

    def block(i):
        A, B = mb_kernel_factors(alphas[i:i + chunk], s1, s2)
        return np.einsum("ia,ia->i", A @ M, B)

    parts = parallel_map(block, range(0, len(nodes), chunk), threads)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


# ---------------------------------------------------------------- inverse

def inverse_from_table(n, Fvals, nodes, weights, y, contour=None, normalization="calibrated",
                       tail_budget=None, T=None, threads=None, chunk=256):
    """Reconstruct f at the rows of ``y`` from f# sampled at t-``nodes``.

    Returns ``(values, tail)``. ``tail`` bounds the contribution of the outer
    10% shell of the t-region: max over y of sum |kappa f# rho w W_{-it}(y)|
    over shell nodes (at most 16 y rows are sampled for n = 3).
    """
    y = np.asarray(y, dtype=float).reshape(-1, n - 1)
    nodes = np.asarray(nodes, dtype=float).reshape(-1, n - 1)
    kappa = inverse_constant(n, normalization)
    rho = plancherel_density_t(n, nodes)
    c = kappa * np.asarray(Fvals, dtype=complex) * rho * weights
    T = float(np.max(np.abs(nodes))) if T is None else T
    shell = _tail_shell(nodes, T)
    if n == 2:
        # W_{-it} = W_{it} for GL(2)
        cols = np.array(parallel_map(lambda k: whittaker_gl2(nodes[k, 0], y[:, 0]),
                                     range(len(nodes)), threads))
        tail = float(np.max(np.abs(c[shell]) @ np.abs(cols[shell]))) if shell.any() else 0.0
        _check_tail(tail, tail_budget)
        return c @ cols, tail
    contour = _transform_contour(3, T, contour)
    s1, s2, D = mb_coupling(contour)
    neg = -_alpha_rows(3, nodes)
    E1 = np.exp(-np.log(y[:, 0])[:, None] * s1[None, :])
    E2 = np.exp(-np.log(y[:, 1])[:, None] * s2[None, :])
    tail = _gl3_shell_bound(c[shell], neg[shell], y, E1, E2, D, s1, s2, chunk)
    _check_tail(tail, tail_budget)

    def block(i):
        A, B = mb_kernel_factors(neg[i:i + chunk], s1, s2)
        return A.T @ (c[i:i + chunk, None] * B)

    K = np.zeros((s1.size, s2.size), dtype=complex)
    for part in parallel_map(block, range(0, len(nodes), chunk), threads):
        K += part  # fixed order
    K *= D
    vals = y[:, 0] * y[:, 1] * np.einsum("ib,ib->i", E1 @ K, E2)
    return vals, tail


def _tail_shell(nodes, T, frac=0.1):
    return np.max(np.abs(nodes), axis=-1) >= (1.0 - frac) * T


def _check_tail(tail, budget):
    if budget is not None and tail > budget:
        raise TailBudgetExceeded(
            f"inverse tail bound {tail:.3e} exceeds budget {budget:.3e}; enlarge the t-box",
            tail_bound=tail,
        )


def _gl3_shell_bound(c, alphas, y, E1, E2, D, s1, s2, chunk, max_points=16):
    if c.size == 0:
        return 0.0
    idx = np.unique(np.linspace(0, len(y) - 1, min(len(y), max_points)).astype(int))
    acc = np.zeros(idx.size)
    for i in range(0, len(c), chunk):
        A, B = mb_kernel_factors(alphas[i:i + chunk], s1, s2)
        for m, k in enumerate(idx):
            Wk = y[k, 0] * y[k, 1] * np.einsum("ia,ia->i", (A * E1[k]) @ D, B * E2[k])
            acc[m] += np.sum(np.abs(c[i:i + chunk] * Wk))
    return float(np.max(acc))


def inverse(F, W, y, t_box, rule, normalization="calibrated", tail_budget=None,
            symmetric=True, threads=None):
    """kappa_n int F(t) W_{-it}(y) rho(t) dt over the t-region of half-width ``t_box``.

    ``F`` maps an array of t rows (m, n-1) to m values. ``y`` is one point or
    an array of points. Returns the reconstructed value(s).
    """
    n = W.n
    nodes, weights = chamber_nodes(n, float(t_box), rule, symmetric)
    Fvals = np.asarray(F(nodes), dtype=complex).reshape(-1)
    y_arr = np.asarray(y, dtype=float)
    single = y_arr.ndim <= 1 and y_arr.size == n - 1
    contour = W.contour if W.method is Method.MellinBarnesGL3 else None
    vals, _ = inverse_from_table(n, Fvals, nodes, weights, y_arr, contour, normalization,
                                 tail_budget, float(t_box), threads)
    return complex(vals[0]) if single else vals


# ---------------------------------------------------------------- inner products

def inner_product_y(f1, f2):
    """<f1, f2> = int f1 conj(f2) d^x y on a common lattice."""
    if f1.box != f2.box or f1.counts != f2.counts:
        raise DomainError("inner_product_y needs both functions on the same lattice")
    return complex(np.sum(f1.samples * np.conj(f2.samples) * _lattice_weights(f1)))


def inner_product_t(F1, F2, t_box, rule, n=2, normalization="calibrated", symmetric=True):
    """kappa_n int F1 conj(F2) rho dt; F1, F2 are callables on t rows."""
    nodes, weights = chamber_nodes(n, float(t_box), rule, symmetric)
    v1 = np.asarray(F1(nodes), dtype=complex).reshape(-1)
    v2 = np.asarray(F2(nodes), dtype=complex).reshape(-1)
    rho = plancherel_density_t(n, nodes)
    return complex(inverse_constant(n, normalization) * np.sum(v1 * np.conj(v2) * rho * weights))


# ---------------------------------------------------------------- roundtrip

@dataclass
class TransformReport:
    """Forward values, reconstruction and error summary of one roundtrip."""

    n: int
    forward_values: dict
    roundtrip_values: dict
    f_true: dict
    max_abs_error: float
    max_rel_error: float
    tail_bound: float
    timings: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_abs_error < 0 or self.max_rel_error < 0:
            raise DomainError("errors must be non-negative")

    def to_dict(self):
        def rows(d):
            return [{"node": list(k), "re": complex(v).real, "im": complex(v).imag}
                    for k, v in d.items()]

        return {
            "n": self.n,
            "forward_values": rows(self.forward_values),
            "roundtrip_values": rows(self.roundtrip_values),
            "max_abs_error": self.max_abs_error,
            "max_rel_error": self.max_rel_error,
            "tail_bound": self.tail_bound,
            "timings": self.timings,
            "params": self.params,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), default=float)

    def forward_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"t{i + 1}" for i in range(self.n - 1)] + ["re", "im", "est_error"])
        for k, v in self.forward_values.items():
            w.writerow([_fmt(x) for x in k] + [_fmt(v.real), _fmt(v.imag), _fmt(self.tail_bound)])
        return buf.getvalue()

    def roundtrip_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"y{i + 1}" for i in range(self.n - 1)] + ["f_true", "f_reconstructed", "abs_err"])
        for k, v in self.roundtrip_values.items():
            ft = self.f_true[k]
            w.writerow([_fmt(x) for x in k] + [_fmt(ft), _fmt(v.real), _fmt(abs(v - ft))])
        return buf.getvalue()


def _fmt(x):
    return format(float(x), ".17g")


def roundtrip(f, T, rule, points=None, interior=None, normalization="calibrated",
              contour=None, tail_budget=None, threads=None, reference=None):
    """Forward then inverse transform of ``f``; errors relative to max |f|.

    ``points`` selects reconstruction points (default: all lattice nodes).
    ``interior`` is a boolean mask over those points restricting the error
    measurement. ``reference`` overrides the exact values at ``points``
    (needed when the points are off-lattice).
    """
    timings = {}
    t0 = time.perf_counter()
    nodes, weights = chamber_nodes(f.n, float(T), rule)
    Fvals = forward_table(f, nodes, contour=contour, threads=threads)
    timings["forward"] = time.perf_counter() - t0
    if points is None:
        points = f.points()
        truth = np.real(f.samples).ravel()
    else:
        points = np.asarray(points, dtype=float).reshape(-1, f.n - 1)
        if reference is None:
            raise DomainError("off-lattice points need reference values")
        truth = np.asarray(reference, dtype=float).reshape(-1)
    if reference is not None:
        truth = np.asarray(reference, dtype=float).reshape(-1)
    t1 = time.perf_counter()
    rec, tail = inverse_from_table(f.n, Fvals, nodes, weights, points, contour,
                                   normalization, tail_budget, float(T), threads)
    timings["inverse"] = time.perf_counter() - t1
    mask = np.ones(len(points), bool) if interior is None else np.asarray(interior, bool)
    err = np.abs(rec - truth)
    peak = float(np.max(np.abs(f.samples)))
    max_abs = float(np.max(err[mask]))
    return TransformReport(
        n=f.n,
        forward_values={tuple(map(float, k)): complex(v) for k, v in zip(nodes, Fvals)},
        roundtrip_values={tuple(map(float, k)): complex(v) for k, v in zip(points, rec)},
        f_true={tuple(map(float, k)): float(v) for k, v in zip(points, truth)},
        max_abs_error=max_abs,
        max_rel_error=max_abs / peak if peak > 0 else float("inf"),
        tail_bound=tail,
        timings=timings,
        params={"T": float(T), "panels": rule.panels, "degree": rule.degree,
                "normalization": normalization},
    )
