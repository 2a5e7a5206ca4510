"""Completed Jacquet-Whittaker functions for GL(2) and GL(3).

GL(2) uses the Bessel closed form ``2 sqrt(y) K_{it}(2 pi y)``. GL(3) uses
a double Mellin-Barnes integral

    W(y1, y2) = y1 y2 / (2 pi i)^2  int int  G(s1, s2) y1^{-s1} y2^{-s2} ds1 ds2,

    G = pi^{-s1-s2} / 4 * prod_j Gamma((s1 - a_j)/2) Gamma((s2 + a_j)/2)
        / Gamma((s1 + s2)/2),

on the lines Re s1 = Re s2 = 1/2. The kernel factors as A(s1) B(s2) D(s1+s2),
so a whole grid of y values costs two matrix products.

``jacquet_oracle`` integrates the defining unipotent integral directly. The
power of the quadratic forms in the integrand is written with Schwinger's
parametrisation ``Q^{-c} = Gamma(c)^{-1} int lambda^{c-1} e^{-lambda Q}``,
which makes the unipotent variables Gaussian; the remaining integrals are
smooth and decay double-exponentially in the log of each parameter.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import ContourTruncationError, ConvergenceError, DomainError
from .quadrature import ContourSpec, parallel_map
from .specfun import bessel_k_imag_order, log_gamma
from .spectral import SpectralPoint, b_matrix, v_jk

__all__ = [
    "GL2_CONSTANT",
    "GL3_CONSTANT",
    "Method",
    "WhittakerEvaluator",
    "default_gl3_contour",
    "i_nu",
    "jacquet_oracle",
    "mb_coupling",
    "mb_kernel_factors",
    "whittaker_gl2",
    "whittaker_gl3",
    "whittaker_gl3_grid",
]

GL2_CONSTANT = 2.0
GL3_CONSTANT = 0.25
_LOG_PI = math.log(math.pi)


class Method(str, enum.Enum):
    ClosedFormGL2 = "ClosedFormGL2"
    MellinBarnesGL3 = "MellinBarnesGL3"
    JacquetOracle = "JacquetOracle"


def i_nu(p, y):
    """I_nu(y) = prod_i y_i^{sum_j b_ij nu_j}."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != p.n - 1:
        raise DomainError(f"rank {p.n} needs {p.n - 1} coordinates")
    if not np.all(y > 0):
        raise DomainError("I_nu needs positive coordinates")
    expo = b_matrix(p.n) @ p.nu
    return np.exp(np.sum(np.log(y) * expo, axis=-1))


def whittaker_gl2(t, y):
    """Completed GL(2) Whittaker function ``2 sqrt(y) K_{it}(2 pi y)``.

    ``y`` may be an array. The constant 2 is the one produced by the
    Jacquet integral with its Gamma prefactor.
    """
    scalar = np.isscalar(y)
    y = np.asarray(y, dtype=float)
    if not np.all(y > 0):
        raise DomainError("whittaker_gl2 needs y > 0")
    k = bessel_k_imag_order(t, 2.0 * math.pi * np.atleast_1d(y))
    out = GL2_CONSTANT * np.sqrt(np.atleast_1d(y)) * k
    return float(out[0]) if scalar else out.reshape(y.shape)


# ---------------------------------------------------------------- GL(3) MB

def default_gl3_contour(alpha=None, height=None, nodes_per_unit=20):
    """Lines Re s = 1/2 cut at ``max |Im alpha| + 30`` unless ``height`` is given.

    Beyond the spread of alpha the kernel decays like exp(-pi |tau| / 2), so
    the extra 30 units push the tail below 1e-20 of the peak.
    """
    if height is None:
        amax = 0.0 if alpha is None else float(np.max(np.abs(np.imag(alpha))))
        height = math.ceil(amax + 30.0)
    return ContourSpec((0.5, 0.5), height, nodes_per_unit)


@lru_cache(maxsize=8)
def _coupling(c1, c2, height, npu):
    spec = ContourSpec((c1, c2), height, npu)
    s1 = spec.points(0)
    s2 = spec.points(1)
    S = s1[:, None] + s2[None, :]
    h = spec.step
    logD = -log_gamma(S / 2.0) - S * _LOG_PI
    D = GL3_CONSTANT * (h / (2.0 * math.pi)) ** 2 * np.exp(logD)
    D.flags.writeable = False
    s1.flags.writeable = False
    s2.flags.writeable = False
    return s1, s2, D


def mb_coupling(contour):
    """Nodes (s1, s2) and the weighted coupling matrix D(s1 + s2)."""
    return _coupling(contour.real_parts[0], contour.real_parts[-1], float(contour.height),
                     int(contour.nodes_per_unit))


def mb_kernel_factors(alpha, s1, s2):
    """A(s1) = prod Gamma((s1 - a_j)/2) and B(s2) = prod Gamma((s2 + a_j)/2).

    ``alpha`` may have shape (3,) or (m, 3); results then gain a leading axis.
    """
    alpha = np.asarray(alpha, dtype=complex)
    a = alpha[..., :, None]
    lA = np.sum(log_gamma((s1 - a) / 2.0), axis=-2)
    lB = np.sum(log_gamma((s2 + a) / 2.0), axis=-2)
    return np.exp(lA), np.exp(lB)


def _mb_tail(A, B, D, h, y1, y2, c1, c2):
    # boundary rows/columns of |G|, continued by exp(-pi tau / 2) decay
    G = np.abs(A)[:, None] * np.abs(D) * np.abs(B)[None, :]
    edge = G[0].sum() + G[-1].sum() + G[:, 0].sum() + G[:, -1].sum()
    scale = max(np.max(y1 ** (1 - c1)), 1e-300) * max(np.max(y2 ** (1 - c2)), 1e-300)
    return float(edge / h * (2.0 / math.pi) * scale)


def whittaker_gl3_grid(alpha, y1, y2, contour=None, accuracy=1e-8):
    """W on the tensor grid ``y1 x y2`` for one alpha. Returns (values, tail estimate)."""
    y1 = np.atleast_1d(np.asarray(y1, dtype=float))
    y2 = np.atleast_1d(np.asarray(y2, dtype=float))
    if not (np.all(y1 > 0) and np.all(y2 > 0)):
        raise DomainError("whittaker_gl3 needs positive coordinates")
    contour = contour or default_gl3_contour(alpha)
    s1, s2, D = mb_coupling(contour)
    A, B = mb_kernel_factors(alpha, s1, s2)
    tail = _mb_tail(A, B, D, contour.step, y1, y2, contour.real_parts[0], contour.real_parts[-1])
    if tail > accuracy:
        raise ContourTruncationError(
            f"Mellin-Barnes tail estimate {tail:.3e} exceeds accuracy {accuracy:.3e}"
        )
    E1 = np.exp(-np.log(y1)[:, None] * s1[None, :]) * A[None, :]
    E2 = np.exp(-np.log(y2)[:, None] * s2[None, :]) * B[None, :]
    W = (y1[:, None] * y2[None, :]) * ((E1 @ D) @ E2.T)
    return W, tail


def _whittaker_gl3_points(alpha, pts, contour, accuracy):
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    y1, y2 = pts[:, 0], pts[:, 1]
    if not np.all(pts > 0):
        raise DomainError("whittaker_gl3 needs positive coordinates")
    s1, s2, D = mb_coupling(contour)
    A, B = mb_kernel_factors(alpha, s1, s2)
    tail = _mb_tail(A, B, D, contour.step, y1, y2, contour.real_parts[0], contour.real_parts[-1])
    if tail > accuracy:
        raise ContourTruncationError(
            f"Mellin-Barnes tail estimate {tail:.3e} exceeds accuracy {accuracy:.3e}"
        )
    E1 = np.exp(-np.log(y1)[:, None] * s1[None, :]) * A[None, :]
    E2 = np.exp(-np.log(y2)[:, None] * s2[None, :]) * B[None, :]
    W = y1 * y2 * np.einsum("ib,ib->i", E1 @ D, E2)
    # the same sum on every other node (step 2h) measures discretisation error
    W2 = 4.0 * y1 * y2 * np.einsum("ib,ib->i", E1[:, ::2] @ D[::2, ::2], E2[:, ::2])
    err = max(tail, float(np.max(np.abs(W - W2))))
    return W, err


def whittaker_gl3(t1, t2, y1, y2, contour=None, accuracy=1e-8):
    """Completed GL(3) Whittaker value W_{i t1, i t2}(y1, y2) (complex).

    The value is real only up to a small imaginary part: conjugation maps
    W(t1, t2; y1, y2) to W(t1, t2; y2, y1), so W is real on y1 = y2 only.
    """
    alpha = SpectralPoint(3, (t1, t2)).alpha
    contour = contour or default_gl3_contour(alpha)
    W, _ = _whittaker_gl3_points(alpha, [[y1, y2]], contour, accuracy)
    return complex(W[0])


# ---------------------------------------------------------------- oracle

def _gamma_prefactor(p):
    n = p.n
    total = 0j
    for k in range(1, n):
        for j in range(1, k + 1):
            v = v_jk(p, j, k)
            total += -(0.5 + v) * _LOG_PI + log_gamma(0.5 + v)
    return total


def _log_grid(lo, hi, h):
    m = int(math.ceil((hi - lo) / h))
    return lo + h * np.arange(m + 1)


def _oracle_gl2(p, y, h=0.05):
    # int (1 + x^2)^{-nu} e^{2 pi i y x} dx = Gamma(nu)^{-1} int lam^{nu - 1} e^{-lam}
    #     sqrt(pi / lam) exp(-pi^2 y^2 / lam) dlam,   lam = e^a
    nu = p.nu[0]
    lo = math.log(math.pi ** 2 * y * y / 200.0)
    a = _log_grid(lo, math.log(60.0), h)
    lam = np.exp(a)
    f = np.exp(nu * a - lam - math.pi ** 2 * y * y / lam) * math.sqrt(math.pi) / np.sqrt(lam)
    tail = float(abs(f[0]) + abs(f[-1]))
    J = h * np.sum(f) / np.exp(log_gamma(nu))
    W = np.exp(_gamma_prefactor(p)) * y ** (1.0 - nu) * J
    return complex(W), tail


def _oracle_gl3(p, y1, y2, h=0.1, nr=600, ratio=2e4, rmax=6.5):
    # After u1 = y1 p1, u2 = y2 p2, u3 = y1 y2 p3 the integrand is
    # y1^{-b} y2^{-a} (1 + p2^2 + p3^2)^{-3 nu2/2} (1 + p1^2 + (p3 - p1 p2)^2)^{-3 nu1/2}
    # times the character. One Schwinger parameter per factor makes (p1, p3)
    # Gaussian; p2 is left as a cosine transform on a scaled trapezoid grid.
    nu1, nu2 = p.nu
    a = nu1 + 2 * nu2
    b = 2 * nu1 + nu2
    c1, c2 = 1.5 * nu1, 1.5 * nu2
    la = _log_grid(math.log(math.pi ** 2 * y2 ** 2 / ratio), math.log(48.0), h)
    mb = _log_grid(math.log(math.pi ** 2 * y1 ** 2 / ratio), math.log(48.0), h)
    lam = np.exp(la)
    mu = np.exp(mb)
    r = np.linspace(0.0, rmax, nr)
    wr = np.full(nr, rmax / (nr - 1))
    wr[0] *= 0.5
    wr[-1] *= 0.5
    er = np.exp(-r * r) * wr
    M = mu[:, None]
    rr = r[None, :]
    wmu = np.exp(c1 * mb - mu)
    rows = np.empty(lam.size, dtype=complex)
    for i, (L, A) in enumerate(zip(lam, la)):
        den = M + L + rr * rr
        g = np.cos(2 * math.pi * y2 * rr / math.sqrt(L)) / np.sqrt(M * den) \
            * np.exp(-math.pi ** 2 * y1 ** 2 * (L + M) / (M * den))
        phi = 2 * math.pi * (g @ er) / math.sqrt(L)
        terms = wmu * phi
        rows[i] = np.exp(c2 * A - L) * np.sum(terms)
        if i == 0:
            first_mu_edge = 0.0
        first_mu_edge += abs(np.exp(c2 * A - L)) * (abs(terms[0]) + abs(terms[-1]))
    norm = h * h / np.exp(log_gamma(c1) + log_gamma(c2))
    J = np.sum(rows) * norm
    pref = np.exp(_gamma_prefactor(p)) * y1 ** (2 - b) * y2 ** (2 - a)
    # the r cut sits at exp(-rmax^2), far below the other truncations
    edge = (abs(rows[0]) + abs(rows[-1])) / h + first_mu_edge / h
    tail = float(abs(pref) * edge * abs(norm))
    return complex(pref * J), tail


def jacquet_oracle(n, t, y, tail_budget=1e-6):
    """Direct evaluation of the Jacquet integral with its Gamma prefactor.

    Supports n in {2, 3} and moderate y (each coordinate in [0.2, 5]).
    Raises ConvergenceError if the truncation-tail estimate exceeds
    ``tail_budget``.
    """
    p = SpectralPoint(n, tuple(np.atleast_1d(t)))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.size != n - 1 or not np.all(y > 0):
        raise DomainError(f"rank {n} needs {n - 1} positive coordinates")
    if n == 2:
        val, tail = _oracle_gl2(p, float(y[0]))
    elif n == 3:
        val, tail = _oracle_gl3(p, float(y[0]), float(y[1]))
    else:
        raise DomainError("jacquet_oracle supports n = 2 and n = 3")
    if not tail <= tail_budget:
        raise ConvergenceError(f"oracle tail estimate {tail:.3e} exceeds {tail_budget:.1e}")
    return val


# ---------------------------------------------------------------- evaluator

@dataclass(frozen=True)
class WhittakerEvaluator:
    """Immutable evaluation recipe for W_{it} at a fixed spectral point."""

    point: SpectralPoint
    method: Method = None
    contour: ContourSpec = None
    accuracy: float = 1e-8

    def __post_init__(self):
        method = self.method
        if method is None:
            method = Method.ClosedFormGL2 if self.point.n == 2 else Method.MellinBarnesGL3
        method = Method(method)
        object.__setattr__(self, "method", method)
        if not self.accuracy > 0:
            raise DomainError("accuracy must be positive")
        if method is Method.ClosedFormGL2 and self.point.n != 2:
            raise DomainError("ClosedFormGL2 requires n = 2")
        if method is Method.MellinBarnesGL3 and self.point.n != 3:
            raise DomainError("MellinBarnesGL3 requires n = 3")
        if method is Method.MellinBarnesGL3 and self.contour is None:
            object.__setattr__(self, "contour", default_gl3_contour(self.point.alpha))

    @classmethod
    def for_t(cls, n, t, **kw):
        return cls(SpectralPoint(n, tuple(np.atleast_1d(t))), **kw)

    def with_t(self, t):
        p = SpectralPoint(self.point.n, tuple(np.atleast_1d(t)))
        contour = self.contour
        if self.method is Method.MellinBarnesGL3:
            need = default_gl3_contour(p.alpha, nodes_per_unit=contour.nodes_per_unit)
            if need.height > contour.height:
                contour = need
        return replace(self, point=p, contour=contour)

    @property
    def n(self):
        return self.point.n

    def evaluate_points(self, pts, threads=None):
        """W at each row of ``pts`` (shape (m, n-1)). Returns (values, est_error)."""
        pts = np.asarray(pts, dtype=float).reshape(-1, self.n - 1)
        if self.method is Method.ClosedFormGL2:
            return whittaker_gl2(self.point.t[0], pts[:, 0]).astype(float), 1e-12
        if self.method is Method.MellinBarnesGL3:
            return _whittaker_gl3_points(self.point.alpha, pts, self.contour, self.accuracy)
        vals = parallel_map(lambda q: jacquet_oracle(self.n, self.point.t, q), list(pts), threads)
        return np.array(vals, dtype=complex), 1e-6

    def __call__(self, y):
        vals, _ = self.evaluate_points(np.atleast_1d(y))
        return vals[0]

    def grid(self, axes):
        """W on the tensor grid spanned by ``axes`` (one array per coordinate)."""
        if self.method is Method.MellinBarnesGL3:
            return whittaker_gl3_grid(self.point.alpha, axes[0], axes[1], self.contour,
                                      self.accuracy)[0]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        vals, _ = self.evaluate_points(pts)
        return vals.reshape(mesh[0].shape)

    def table(self, pts, threads=None):
        """Rows (t..., y..., W, est_error, method, seconds) for CSV export."""
        pts = np.asarray(pts, dtype=float).reshape(-1, self.n - 1)
        rows = []

        def one(q):
            t0 = time.perf_counter()
            v, err = self.evaluate_points(q[None, :], threads=1)
            return complex(v[0]), float(err), time.perf_counter() - t0

        for q, (v, err, sec) in zip(pts, parallel_map(one, list(pts), threads)):
            rows.append((self.point.t, tuple(q), v, err, self.method.value, sec))
        return rows
