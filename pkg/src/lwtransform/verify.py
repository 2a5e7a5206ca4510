"""Numerical checks of the identities behind the transform: Stade's formula
for GL(2) and GL(3), the R_{1,1} residue limit and the one-variable Mellin identities.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryError, DomainError, TailBudgetExceeded
from .quadrature import (
    ContourSpec,
    GridFunction,
    QuadratureRule,
    integrate_line,
    smooth_bump,
)
from .specfun import log_gamma
from .spectral import SecondSpectralPoint, SpectralPoint
from .transform import (
    chamber_nodes,
    forward_table,
    inner_product_y,
    inverse_constant,
    plancherel_density_t,
    roundtrip,
)
from .whittaker import default_gl3_contour, whittaker_gl2, whittaker_gl3_grid

__all__ = [
    "THRESHOLDS",
    "IdentityReport",
    "mellin_forward",
    "mellin_inverse",
    "mellin_kernel",
    "mellin_plancherel",
    "mellin_roundtrip",
    "plancherel_equality",
    "residue_limit",
    "residue_r11",
    "stade_check",
    "stade_lhs",
    "stade_rhs",
    "symmetric_test_function",
    "verify_all",
]

THRESHOLDS = {
    "StadeN2": 1e-6,
    "StadeN3": 1e-3,
    "ResidueR11": 1e-3,
    "MellinKernel": 1e-8,
    "MellinRoundtrip": 1e-8,
    "MellinPlancherel": 1e-6,
    "PlancherelEquality": 1e-3,
    "RoundtripGL2": 1e-4,
}


@dataclass
class IdentityReport:
    """Both sides of one identity and their discrepancy."""

    identity: str
    lhs: complex
    rhs: complex
    abs_err: float = field(init=False)
    rel_err: float = field(init=False)
    params: dict = field(default_factory=dict)
    threshold: float = None
    absolute: bool = False

    def __post_init__(self):
        self.lhs = complex(self.lhs)
        self.rhs = complex(self.rhs)
        self.abs_err = abs(self.lhs - self.rhs)
        self.rel_err = self.abs_err / max(abs(self.lhs), abs(self.rhs), 1e-300)
        if self.threshold is None:
            self.threshold = THRESHOLDS.get(self.identity)

    @property
    def passed(self):
        err = self.abs_err if self.absolute else self.rel_err
        return self.threshold is None or err < self.threshold

    def to_dict(self):
        return {
            "identity": self.identity,
            "lhs": [self.lhs.real, self.lhs.imag],
            "rhs": [self.rhs.real, self.rhs.imag],
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "threshold": self.threshold,
            "absolute": self.absolute,
            "passed": self.passed,
            "params": self.params,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), default=_jsonable)


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    return str(x)


# ---------------------------------------------------------------- Stade

_STADE_CONST = {"calibrated": lambda n: 2.0 ** (1 - n), "literal": lambda n: 0.5}


def stade_rhs(n, p, q, s, normalization="calibrated"):
    """kappa / pi^{s n(n-1)/2} * prod_{j,k} Gamma((s + a_j + b_k)/2) / Gamma(ns/2).

    ``kappa = 2^{-(n-1)}`` by default; ``normalization="literal"`` uses 1/2,
    which agrees at n = 2 and is off by a factor 2 at n = 3.
    """
    s = complex(s)
    args = (s + p.alpha[:, None] + q.alpha[None, :]) / 2.0
    logv = np.sum(log_gamma(args.ravel())) - log_gamma(n * s / 2.0)
    logv -= s * n * (n - 1) / 2.0 * math.log(math.pi)
    return complex(_STADE_CONST[normalization](n) * np.exp(logv))


def _gl2_tail(s, lo, hi):
    # |W_it(y)| <= 2 sqrt(y) K_0(2 pi y); the integrand in u = log y is
    # ~ 4 K_0(2 pi y)^2 y^{Re s} near 0 and ~ y^{Re s - 1} e^{-4 pi y} / (2 pi) at infinity
    sr = s.real
    y0 = math.exp(lo)
    k0 = whittaker_gl2(0.0, y0) / (2 * math.sqrt(y0))
    low = 4 * k0 * k0 * y0 ** sr / sr * (1 + abs(math.log(y0)))
    y1 = math.exp(hi)
    high = y1 ** (sr - 1) * math.exp(-4 * math.pi * y1) / (4 * math.pi)
    return low + high


def stade_lhs(n, p, q, s, rule=None, box=None, tail_budget=None, contour=None):
    """int W_{it}(y) W_{iu}(y) prod_j y_j^{(n-j)s} d^x y by tensor quadrature in u = log y.

    The default box is [-30, 2.5] in u for n = 2. For n = 3 the box
    u1 in [-28/(2 Re s), 3], u2 in [-28/Re s, 3] keeps the small-y tail,
    which decays like y1^{2 Re s} y2^{Re s}, near e^{-28}.
    """
    s = complex(s)
    if s.real < 1:
        raise DomainError("Stade's formula needs Re s >= 1")
    if n == 2:
        lo, hi = box[0] if box else (-30.0, 2.5)
        rule = rule or QuadratureRule(48, 24)
        u, w = rule.nodes(lo, hi)
        y = np.exp(u)
        Wt = whittaker_gl2(p.t[0], y)
        Wu = Wt if q.t == p.t else whittaker_gl2(q.t[0], y)
        val = np.sum(w * Wt * Wu * np.exp((s - 1.0) * u))
        tail = _gl2_tail(s, lo, hi)
    elif n == 3:
        if box is None:
            box = [(-28.0 / (2 * s.real), 3.0), (-28.0 / s.real, 3.0)]
        rule1 = rule or QuadratureRule(8, 20)
        rule2 = rule or QuadratureRule(12, 20)
        u1, w1 = rule1.nodes(*box[0])
        u2, w2 = rule2.nodes(*box[1])
        y1, y2 = np.exp(u1), np.exp(u2)
        amax = max(np.max(np.abs(p.alpha.imag)), np.max(np.abs(q.alpha.imag)))
        contour = contour or default_gl3_contour(height=math.ceil(amax + 40), nodes_per_unit=20)
        Wa, _ = whittaker_gl3_grid(p.alpha, y1, y2, contour, accuracy=1.0)
        Wb = Wa if q.t == p.t else whittaker_gl3_grid(q.alpha, y1, y2, contour, accuracy=1.0)[0]
        integ = Wa * Wb * np.exp((2 * s - 2) * u1)[:, None] * np.exp((s - 2) * u2)[None, :]
        val = np.sum(w1[:, None] * w2[None, :] * integ)
        # low faces continued with the power decay y1^{2 Re s}, y2^{Re s}
        tail = float(np.sum(w2 * np.abs(integ[0])) / (2 * s.real)
                     + np.sum(w1 * np.abs(integ[:, 0])) / s.real)
    else:
        raise DomainError("Stade checks are implemented for n = 2, 3")
    if tail_budget is not None and tail > tail_budget:
        raise TailBudgetExceeded(f"Stade tail {tail:.3e} exceeds {tail_budget:.3e}", tail_bound=tail)
    return complex(val)


def stade_check(n, t, u, s, normalization="calibrated", **kw):
    p = SpectralPoint(n, tuple(np.atleast_1d(t)))
    q = SecondSpectralPoint(n, tuple(np.atleast_1d(u)))
    lhs = stade_lhs(n, p, q, s, **kw)
    rhs = stade_rhs(n, p, q, s, normalization)
    return IdentityReport(f"StadeN{n}", lhs, rhs,
                          params={"n": n, "t": list(p.t), "u": list(q.t), "s": complex(s),
                                  "normalization": normalization})


# ---------------------------------------------------------------- residue

def _alpha_c(t1, t2):
    # alpha at complex arguments (H must be evaluated off the real axis)
    return np.array([1j * (2 * t1 + t2), 1j * (t2 - t1), -1j * (t1 + 2 * t2)])


def residue_r11(H, t1, t2, eps):
    """The R_{1,1} residue expression at shift ``eps``.

    (1/(6 pi^{3 eps})) H((a1 - a2)/3i, (-3 eps + a1 + 2 a2)/3i)
      * Gamma((2a1 - a2)/2) Gamma((a1 + 2a2)/2)
      / [Gamma((-3 eps + 2a1 - a2)/2) Gamma((-3 eps + a1 + 2a2)/2)]
    """
    p = SpectralPoint(3, (t1, t2))
    if p.degenerate:
        raise DomainError("residue_r11 needs distinct alpha")
    a1, a2, _ = p.alpha
    h = H((a1 - a2) / 3j, (-3 * eps + a1 + 2 * a2) / 3j)
    num = log_gamma((2 * a1 - a2) / 2) + log_gamma((a1 + 2 * a2) / 2)
    den = log_gamma((-3 * eps + 2 * a1 - a2) / 2) + log_gamma((-3 * eps + a1 + 2 * a2) / 2)
    return complex(h * np.exp(num - den) / (6.0 * math.pi ** (3 * eps)))


def symmetric_test_function(coeffs):
    """H(t1, t2) = P(alpha) exp(-(t1^2 + t1 t2 + t2^2)) with P symmetric in alpha.

    P = c0 + c1 e2 + c2 e3 + c3 e2^2 in the elementary symmetric polynomials
    e2, e3 of alpha; t1^2 + t1 t2 + t2^2 = -sum(alpha^2)/6 is symmetric too,
    and H is entire, so any shift eps is inside its analyticity strip.
    """
    c = np.asarray(coeffs, dtype=float)

    def H(t1, t2):
        a = _alpha_c(t1, t2)
        e2 = a[0] * a[1] + a[0] * a[2] + a[1] * a[2]
        e3 = a[0] * a[1] * a[2]
        P = c[0] + c[1] * e2 + c[2] * e3 + c[3] * e2 * e2
        return P * np.exp(-(t1 * t1 + t1 * t2 + t2 * t2))

    return H


def residue_limit(H, t1, t2, ks=range(3, 11)):
    """Residue sequence at eps = 2^-k with its errors against H(t1, t2)/6.

    Returns a dict with the eps values, relative errors, successive error
    ratios (about 2 for first-order decay) and a Richardson estimate of the
    eps -> 0 limit built from the last two terms.
    """
    target = H(t1, t2) / 6.0
    eps = [2.0 ** -k for k in ks]
    vals = [residue_r11(H, t1, t2, e) for e in eps]
    errs = [abs(v - target) / abs(target) for v in vals]
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    limit = 2 * vals[-1] - vals[-2]
    return {"eps": eps, "values": vals, "rel_errors": errs, "ratios": ratios,
            "extrapolated": limit, "target": target}


# ---------------------------------------------------------------- Mellin

def mellin_forward(f, s):
    """int f(y) y^s dy/y on the lattice of a one-coordinate GridFunction."""
    if f.n != 2:
        raise DomainError("mellin_forward needs a one-coordinate GridFunction")
    u = f.log_axes[0]
    w = f.log_weights()[0] * f.samples
    s = np.asarray(s, dtype=complex)
    out = np.exp(np.multiply.outer(s, u)) @ w
    return complex(out) if out.ndim == 0 else out


def mellin_inverse(ft, x, spec=None):
    """h(x) = 1/(2 pi i) int_{(c)} ft(s) x^{-s} ds (default c = 2)."""
    if not x > 0:
        raise DomainError("mellin_inverse needs x > 0")
    spec = spec or ContourSpec((2.0,), 80.0, 8)
    lx = math.log(x)
    val, _ = integrate_line(lambda s: ft(s) * np.exp(-s * lx), spec)
    return val


def _kernel_tail(L):
    # upper tail int_{s0}^{c + i inf} e^{sL} s^{-1} ds = -e^{s0 L} sum_k k!/(L s0)^{k+1}
    def upper(s0):
        total, term, k = 0j, 1.0 / (L * s0), 0
        best = abs(term)
        while True:
            total += term
            k += 1
            nxt = term * k / (L * s0)
            if abs(nxt) >= best or abs(nxt) < 1e-18 * abs(total):
                return -np.exp(s0 * L) * total, float(abs(np.exp(s0 * L) * nxt))
            best = abs(nxt)
            term = nxt

    def tail(c, T):
        u1, e1 = upper(c + 1j * T)
        u2, e2 = upper(c + 1.0 + 1j * T)
        U = u1 - math.exp(-L) * u2
        # the lower tail is minus the conjugate of the upper one (real x)
        return U.imag / math.pi, (e1 + math.exp(-L) * e2) / math.pi

    return tail


def mellin_kernel(x, spec=None):
    """1/(2 pi i) int_{(2)} x^s ds / (s(s+1)), numerically.

    Gauss-Legendre on |Im s| <= T plus the asymptotic series of the two
    oscillatory tails. Raises BoundaryError at x = 1.
    """
    if not x > 0:
        raise DomainError("mellin_kernel needs x > 0")
    if x == 1.0:
        raise BoundaryError("the kernel jumps at x = 1")
    spec = spec or ContourSpec((2.0,), 60.0, 4)
    L = math.log(x)
    # the tail series converges like k!/(L T)^k, so keep |L| T >= 40
    if abs(L) * spec.height < 40.0:
        spec = spec.with_height(40.0 / abs(L))
    panels = max(16, int(math.ceil(spec.height * max(1.0, abs(L)))))
    val, _ = integrate_line(lambda s: np.exp(s * L) / (s * (s + 1.0)), spec,
                            tail=_kernel_tail(L), rule=QuadratureRule(panels, 16))
    return val.real


def _bump_function(lo=0.5, hi=2.0, count=128, center=None, sigma=0.12, plateau=0.8):
    a, b = math.log(lo), math.log(hi)
    c = 0.5 * (a + b) if center is None else center
    hw = 0.5 * (b - a)

    def f(y):
        return smooth_bump(np.log(y), center=c, half_width=hw, sigma=sigma, plateau=plateau)

    return GridFunction.from_callable(2, [(lo, hi)], (count,), f), f


def mellin_roundtrip(points=20, spec=None):
    """Mellin transform and inverse of a smooth bump on [1/2, 2] at interior points.

    The report holds the worst point and is judged on absolute error (the
    bump is near 0 close to the box ends, where relative error is noise).
    """
    grid, f = _bump_function(count=256, sigma=0.1)
    spec = spec or ContourSpec((2.0,), 150.0, 8)
    xs = np.exp(np.linspace(math.log(0.5), math.log(2.0), points + 2)[1:-1])
    h = np.array([mellin_inverse(lambda s: mellin_forward(grid, s), x, spec) for x in xs])
    err = np.abs(h - f(xs))
    k = int(np.argmax(err))
    return IdentityReport("MellinRoundtrip", h[k], f(xs[k]),
                          params={"x": xs.tolist(), "max_abs_err": float(err.max())},
                          threshold=THRESHOLDS["MellinRoundtrip"], absolute=True), err


def mellin_plancherel(spec=None):
    """int f1 conj(f2) dy/y against 1/(2 pi) int f1~(i tau) conj(f2~(i tau)) dtau."""
    g1, _ = _bump_function(count=256, sigma=0.1)
    g2, _ = _bump_function(count=256, center=0.15, sigma=0.08)
    lhs = np.sum(g1.samples * np.conj(g2.samples) * g1.log_weights()[0])
    spec = spec or ContourSpec((0.0,), 150.0, 8)
    rhs, _ = integrate_line(lambda s: mellin_forward(g1, s) * np.conj(mellin_forward(g2, s)), spec)
    return IdentityReport("MellinPlancherel", lhs, rhs, params={"line": 0.0, "T": spec.height})


# ---------------------------------------------------------------- Plancherel

def plancherel_equality(T=30.0, rule=None, count=64, threads=None):
    """<f1, f2> in y-space against the Plancherel pairing of f1#, f2# (GL(2))."""
    f1 = GridFunction.from_callable(2, [(0.5, 2.0)], (count,),
                                    lambda y: smooth_bump(np.log(y), sigma=0.12))
    f2 = GridFunction.from_callable(2, [(0.5, 2.0)], (count,),
                                    lambda y: smooth_bump(np.log(y), center=0.12, sigma=0.1,
                                                          half_width=math.log(2) - 0.12))
    rule = rule or QuadratureRule(max(4, int(T / 4)), 32)
    nodes, weights = chamber_nodes(2, T, rule)
    F1 = forward_table(f1, nodes, threads=threads)
    F2 = forward_table(f2, nodes, threads=threads)
    rho = plancherel_density_t(2, nodes)
    rhs = inverse_constant(2) * np.sum(F1 * np.conj(F2) * rho * weights)
    lhs = inner_product_y(f1, f2)
    return IdentityReport("PlancherelEquality", lhs, rhs, params={"T": T})


# ---------------------------------------------------------------- suite

def verify_all(seed=2024, roundtrip_T=40.0, threads=None, include_gl3=True):
    """Run every identity check; returns (reports, roundtrip_report)."""
    rng = np.random.default_rng(seed)
    reports = [stade_check(2, 0.0, 0.0, 1.0)]
    for s in (1.0, 1.5):
        t, u = rng.uniform(-3, 3, 2)
        reports.append(stade_check(2, t, u, s))
    if include_gl3:
        reports.append(stade_check(3, (0.0, 0.0), (0.0, 0.0), 1.0))
        t = tuple(rng.uniform(-1, 1, 2))
        u = tuple(rng.uniform(-1, 1, 2))
        reports.append(stade_check(3, t, u, 1.0))
    for _ in range(3):
        t1, t2 = rng.uniform(-2, 2, 2)
        H = symmetric_test_function(rng.normal(size=4))
        lim = residue_limit(H, t1, t2)
        reports.append(IdentityReport(
            "ResidueR11", lim["extrapolated"], lim["target"],
            params={"t": [t1, t2], "final_eps": lim["eps"][-1],
                    "final_rel_err": lim["rel_errors"][-1], "ratios": lim["ratios"],
                    "lhs": "Richardson limit from eps = 2^-9, 2^-10"}))
    for x, exact in ((2.0, 0.5), (0.5, 0.0), (math.e, 1 - 1 / math.e)):
        # absolute comparison: the exact value may be 0
        reports.append(IdentityReport("MellinKernel", mellin_kernel(x), exact, params={"x": x},
                                      absolute=True))
    reports.append(mellin_roundtrip()[0])
    reports.append(mellin_plancherel())
    reports.append(plancherel_equality(threads=threads))
    f = GridFunction.from_callable(2, [(0.5, 2.0)], (64,), lambda y: smooth_bump(np.log(y)))
    interior = np.abs(f.log_axes[0]) <= 0.5 * math.log(2.0)
    rt = roundtrip(f, roundtrip_T, QuadratureRule(max(4, int(roundtrip_T / 4)), 32),
                   interior=interior, threads=threads)
    return reports, rt
