"""Spectral-parameter bookkeeping: nu, alpha, the b matrix, v_{j,k}, Weyl
orbits and the Haar weight on the diagonal coordinates.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedRank

__all__ = [
    "DEGENERATE_TOL",
    "SecondSpectralPoint",
    "SpectralPoint",
    "alpha_from_t",
    "b_matrix",
    "haar_weight",
    "v_jk",
    "weyl_orbit",
]

DEGENERATE_TOL = 1e-12


def b_matrix(n):
    """The (n-1)x(n-1) integer matrix b_ij = ij (i+j <= n), (n-i)(n-j) otherwise."""
    if n < 2:
        raise DomainError("rank n must be >= 2")
    b = np.empty((n - 1, n - 1), dtype=int)
    for i in range(1, n):
        for j in range(1, n):
            b[i - 1, j - 1] = i * j if i + j <= n else (n - i) * (n - j)
    return b


def _alpha_general(n, t):
    # Triangular recipe with the undefined symbol read as n:
    #   k(n-k)/2 + sum_{l <= n-k} alpha_l / 2 = sum_l b_{kl} nu_l,   k = 1..n-1
    # At n = 2 and n = 3 this yields exactly twice the calibrated values.
    nu = 1.0 / n + 1j * np.asarray(t, dtype=float)
    rhs = b_matrix(n) @ nu
    partial = np.empty(n - 1, dtype=complex)  # partial[m-1] = alpha_1 + ... + alpha_m
    for k in range(1, n):
        m = n - k
        partial[m - 1] = 2.0 * (rhs[k - 1] - k * (n - k) / 2.0)
    alpha = np.empty(n, dtype=complex)
    alpha[0] = partial[0]
    alpha[1:n - 1] = np.diff(partial)
    # tempered input gives purely imaginary entries; drop roundoff in Re
    alpha[:n - 1] = 1j * alpha[:n - 1].imag
    alpha[n - 1] = -np.sum(alpha[:n - 1])
    return alpha


def alpha_from_t(n, t, uncalibrated=False):
    """Alpha vector (summing to zero) for tempered parameters t.

    Calibrated closed forms exist for n = 2, ``(it, -it)``, and n = 3,
    ``(2it1 + it2, -it1 + it2, -it1 - 2it2)``. Any other rank raises
    UnsupportedRank unless ``uncalibrated=True`` selects the raw triangular
    recipe (which is twice the calibrated value where both exist).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (n - 1,):
        raise DomainError(f"rank {n} needs {n - 1} spectral parameters, got {t.size}")
    if uncalibrated:
        return _alpha_general(n, t)
    if n == 2:
        return np.array([1j * t[0], -1j * t[0]])
    if n == 3:
        t1, t2 = t
        a1 = 1j * (2 * t1 + t2)
        a2 = 1j * (-t1 + t2)
        return np.array([a1, a2, -(a1 + a2)])
    raise UnsupportedRank(f"no calibrated alpha for n = {n}; pass uncalibrated=True")


@dataclass(frozen=True)
class SpectralPoint:
    """Tempered spectral point: rank ``n`` and real parameters ``t``.

    ``nu`` and ``alpha`` are derived on construction and never taken from input.
    """

    n: int
    t: tuple
    nu: np.ndarray = field(init=False, repr=False, compare=False)
    alpha: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("rank n must be an integer >= 2")
        t = tuple(float(x) for x in np.atleast_1d(self.t))
        if len(t) != self.n - 1:
            raise DomainError(f"rank {self.n} needs {self.n - 1} parameters, got {len(t)}")
        if not all(np.isfinite(t)):
            raise DomainError("spectral parameters must be finite reals")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "nu", 1.0 / self.n + 1j * np.array(t))
        object.__setattr__(self, "alpha", alpha_from_t(self.n, t))

    @property
    def degenerate(self):
        """True when two alpha entries coincide."""
        a = self.alpha
        gaps = np.abs(a[:, None] - a[None, :])[np.triu_indices(self.n, 1)]
        return bool(np.any(gaps < DEGENERATE_TOL))

    def negated(self):
        return type(self)(self.n, tuple(-x for x in self.t))

    def to_dict(self):
        return {"n": self.n, "t": list(self.t)}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["n"]), tuple(d["t"]))

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))


class SecondSpectralPoint(SpectralPoint):
    """The second parameter set (u, beta) in two-point identities."""

    @property
    def u(self):
        return self.t

    @property
    def beta(self):
        return self.alpha


def v_jk(p, j, k):
    """v_{j,k} = sum_{i=0}^{j-1} (n nu_{n-k+i} - 1)/2 for 1 <= j <= k <= n-1."""
    n = p.n
    if not 1 <= j <= k <= n - 1:
        raise IndexError(f"need 1 <= j <= k <= {n - 1}, got j={j}, k={k}")
    total = 0j
    for i in range(j):
        idx = n - k + i
        total += (n * p.nu[idx - 1] - 1.0) / 2.0
    return total


def weyl_orbit(alpha, tol=DEGENERATE_TOL):
    """Distinct permutations of ``alpha`` (coincident entries deduplicated)."""
    alpha = np.asarray(alpha, dtype=complex)
    out = []
    for perm in itertools.permutations(range(alpha.size)):
        cand = alpha[list(perm)]
        if not any(np.max(np.abs(cand - o)) < tol for o in out):
            out.append(cand)
    return out


def haar_weight(n, y):
    """Density of d^x y against dy_1...dy_{n-1}: prod_k y_k^{-k(n-k)-1}.

    ``y`` may carry extra leading axes; the last axis indexes coordinates.
    """
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != n - 1:
        raise DomainError(f"rank {n} needs {n - 1} coordinates")
    if not np.all(y > 0):
        raise DomainError("Haar weight needs positive coordinates")
    k = np.arange(1, n)
    w = np.prod(y ** (-(k * (n - k)) - 1.0), axis=-1)
    return float(w) if w.ndim == 0 else w
