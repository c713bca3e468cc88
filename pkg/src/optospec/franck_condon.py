"""Displaced-oscillator overlaps and the associated Laguerre recurrence.

The matrix element <m|D(beta_0)|n> between a Fock state and a displaced
Fock state (a Franck-Condon amplitude for a displaced harmonic
oscillator) is

    <m|n~> = sqrt(m!/n!) e^{-beta_0^2/2} (-beta_0)^{n-m} L_m^{n-m}(beta_0^2),  n >= m
    <m|n~> = sqrt(n!/m!) e^{-beta_0^2/2} (+beta_0)^{m-n} L_n^{m-n}(beta_0^2),  m > n

with L_r^s the associated Laguerre polynomial.  The polynomial is
evaluated with the three-term recurrence in its degree, which is stable
for the non-negative arguments used here, and the factorial ratio goes
through log-gamma differences so indices up to a few hundred stay in
normal double range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import LaguerreRangeError, ParameterError

__all__ = ["laguerre_assoc", "overlap", "overlap_matrix", "OverlapMatrix"]


def laguerre_assoc(n: int, s: int, x: float) -> float:
    """Associated Laguerre polynomial L_n^s(x) for integer n, s >= 0 and x >= 0.

    Uses the degree recurrence

        (k+1) L_{k+1}^s = (2k+1+s-x) L_k^s - (k+s) L_{k-1}^s

    starting from L_0^s = 1 and L_1^s = 1+s-x.  Supported (tested) up to
    n + s <= 512; larger indices work while the intermediate values stay
    finite.

    Raises:
        ParameterError: for negative or non-integer n, s or negative x.
        LaguerreRangeError: if an intermediate value overflows.
    """
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ParameterError(f"Laguerre degree n must be an integer >= 0, got {n!r}")
    if not isinstance(s, (int, np.integer)) or s < 0:
        raise ParameterError(f"Laguerre order s must be an integer >= 0, got {s!r}")
    if not (math.isfinite(x) and x >= 0.0):
        raise ParameterError(f"Laguerre argument x must be >= 0, got {x!r}")
    if n == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + s - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + s - x) * cur - (k + s) * prev) / (k + 1)
    if not math.isfinite(cur):
        raise LaguerreRangeError(n, s, x)
    return cur


def overlap(m: int, n: int, beta_0: float) -> float:
    """Overlap <m|n~> between Fock state m and the displaced Fock state n.

    beta_0 is the (non-negative, real) displacement; at beta_0 = 0 the
    displaced basis coincides with the Fock basis and the overlap is
    delta_{mn}.
    """
    if not isinstance(m, (int, np.integer)) or m < 0:
        raise ParameterError(f"index m must be an integer >= 0, got {m!r}")
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ParameterError(f"index n must be an integer >= 0, got {n!r}")
    if not (math.isfinite(beta_0) and beta_0 >= 0.0):
        raise ParameterError(f"beta_0 must be >= 0, got {beta_0!r}")
    if beta_0 == 0.0:
        return 1.0 if m == n else 0.0
    lo, hi = (m, n) if m <= n else (n, m)
    d = hi - lo
    x = beta_0 * beta_0
    lag = laguerre_assoc(int(lo), int(d), x)
    log_pref = (
        0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) + d * math.log(beta_0) - 0.5 * x
    )
    value = math.exp(log_pref) * lag
    if n >= m and d % 2 == 1:
        value = -value
    return value


@dataclass(frozen=True)
class OverlapMatrix:
    """Dense table O[m, n] = <m|n~> for 0 <= m, n < dim.

    The displacement operator is orthogonal, so columns (and rows) are
    orthonormal up to the truncation tail; ``column_defect`` records the
    worst orthonormality defect over the leading half of the columns,
    where the truncation tail is negligible for any reasonable dim.
    """

    beta_0: float
    dim: int
    entries: np.ndarray
    column_defect: float

    def __post_init__(self):
        self.entries.flags.writeable = False

    def orthonormality_defect(self, n_max: int) -> float:
        """max |(O^T O - 1)[n, n']| over columns n, n' <= n_max."""
        block = self.entries[:, : n_max + 1]
        gram = block.T @ block
        return float(np.max(np.abs(gram - np.eye(n_max + 1))))


def overlap_matrix(dim: int, beta_0: float) -> OverlapMatrix:
    """Build the dim x dim overlap table, filled diagonal by diagonal.

    Each diagonal m - n = const shares one Laguerre recurrence and one
    vector of log-gamma prefactors, so the build is O(dim^2).
    """
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise ParameterError(f"dim must be an integer >= 1, got {dim!r}")
    if not (math.isfinite(beta_0) and beta_0 >= 0.0):
        raise ParameterError(f"beta_0 must be >= 0, got {beta_0!r}")
    dim = int(dim)
    if beta_0 == 0.0:
        entries = np.eye(dim)
        matrix = OverlapMatrix(0.0, dim, entries, 0.0)
        return matrix

    x = beta_0 * beta_0
    log_b = math.log(beta_0)
    entries = np.empty((dim, dim))
    for d in range(dim):
        count = dim - d
        lag = np.empty(count)
        lag[0] = 1.0
        if count > 1:
            lag[1] = 1.0 + d - x
        for j in range(1, count - 1):
            lag[j + 1] = ((2 * j + 1 + d - x) * lag[j] - (j + d) * lag[j - 1]) / (j + 1)
        j = np.arange(count)
        log_pref = 0.5 * (gammaln(j + 1) - gammaln(j + d + 1)) + d * log_b - 0.5 * x
        values = np.exp(log_pref) * lag
        if not np.all(np.isfinite(values)):
            raise LaguerreRangeError(count - 1, d, x)
        sign = -1.0 if d % 2 == 1 else 1.0
        entries[j, j + d] = sign * values
        if d > 0:
            entries[j + d, j] = values

    half = max(0, dim // 2 - 1)
    block = entries[:, : half + 1]
    gram = block.T @ block
    defect = float(np.max(np.abs(gram - np.eye(half + 1))))
    return OverlapMatrix(float(beta_0), dim, entries, defect)
