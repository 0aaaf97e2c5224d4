"""Cycle-weight sequences and their generating function.

A weight sequence assigns a nonnegative weight theta_k to every cycle
length k.  Three families are supported:

* ``polynomial(alpha)``: theta_k = k**alpha with alpha > 0, the main case.
* ``ewens(vartheta)``: constant weights, used as a closed-form oracle.
* ``table(values)``: explicit finite table, extended past its last entry
  by power-law extrapolation fitted to the last two entries.

The generating function g(t) = sum_k (theta_k / k) t^k has radius of
convergence 1 for these families; partial sums come with a certified
geometric tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

POLYNOMIAL = "polynomial"
EWENS = "ewens"
TABLE = "table"

# above this index k**alpha is formed from exp(alpha*log k) to dodge
# pow() overflow paths for large alpha
_LOG_SPACE_CUTOFF = 10**6


@dataclass(frozen=True)
class WeightSequence:
    family: str
    alpha: Optional[float] = None
    vartheta: Optional[float] = None
    values: Optional[Tuple[float, ...]] = None
    _fit_alpha: Optional[float] = field(default=None, repr=False)

    def __post_init__(self):
        if self.family == POLYNOMIAL:
            if self.alpha is None or self.alpha <= 0:
                raise ValueError("polynomial family needs alpha > 0")
        elif self.family == EWENS:
            if self.vartheta is None or self.vartheta <= 0:
                raise ValueError("ewens family needs vartheta > 0")
        elif self.family == TABLE:
            if not self.values or any(v < 0 for v in self.values):
                raise ValueError("table family needs nonnegative values")
            if len(self.values) >= 2 and self.values[-2] > 0 and self.values[-1] > 0:
                k0 = len(self.values)
                fit = (math.log(self.values[-1] / self.values[-2])
                       / math.log(k0 / (k0 - 1)))
            else:
                fit = 0.0
            object.__setattr__(self, "_fit_alpha", fit)
        else:
            raise ValueError(f"unknown weight family {self.family!r}")

    # exponent used in tail-bound dominance arguments
    @property
    def growth_alpha(self) -> float:
        if self.family == POLYNOMIAL:
            return self.alpha
        if self.family == EWENS:
            return 0.0
        return max(self._fit_alpha, 0.0)


def polynomial(alpha: float) -> WeightSequence:
    return WeightSequence(POLYNOMIAL, alpha=alpha)


def ewens(vartheta: float) -> WeightSequence:
    return WeightSequence(EWENS, vartheta=vartheta)


def table(values: Sequence[float]) -> WeightSequence:
    return WeightSequence(TABLE, values=tuple(float(v) for v in values))


def theta_log(w: WeightSequence, k: int) -> float:
    """ln theta_k, -inf when theta_k = 0."""
    if k < 1:
        raise ValueError(f"cycle length must be >= 1, got {k}")
    if w.family == POLYNOMIAL:
        return w.alpha * math.log(k)
    if w.family == EWENS:
        return math.log(w.vartheta)
    if k <= len(w.values):
        v = w.values[k - 1]
        return math.log(v) if v > 0 else -math.inf
    k0 = len(w.values)
    v0 = w.values[-1]
    if v0 == 0:
        return -math.inf
    return math.log(v0) + w._fit_alpha * math.log(k / k0)


def theta_eval(w: WeightSequence, k: int) -> Tuple[float, float]:
    """(theta_k, ln theta_k); the value saturates to inf past double range."""
    lg = theta_log(w, k)
    if w.family == POLYNOMIAL and k <= _LOG_SPACE_CUTOFF:
        return float(k) ** w.alpha, lg
    if lg == -math.inf:
        return 0.0, lg
    return math.exp(lg) if lg < 709.0 else math.inf, lg


def theta_array(w: WeightSequence, k_max: int) -> np.ndarray:
    """theta_1..theta_k_max as a float array (index 0 unused, set to 0)."""
    out = np.zeros(k_max + 1)
    k = np.arange(1, k_max + 1, dtype=np.float64)
    if w.family == POLYNOMIAL:
        out[1:] = k ** w.alpha
    elif w.family == EWENS:
        out[1:] = w.vartheta
    else:
        m = min(k_max, len(w.values))
        out[1:m + 1] = w.values[:m]
        if k_max > m:
            out[m + 1:] = w.values[-1] * (k[m:] / len(w.values)) ** w._fit_alpha
    return out


def theta_log_array(w: WeightSequence, k_max: int) -> np.ndarray:
    """ln theta_1..ln theta_k_max (index 0 unused, set to -inf)."""
    out = np.full(k_max + 1, -np.inf)
    k = np.arange(1, k_max + 1, dtype=np.float64)
    if w.family == POLYNOMIAL:
        out[1:] = w.alpha * np.log(k)
    else:
        with np.errstate(divide="ignore"):
            out[1:] = np.log(theta_array(w, k_max)[1:])
    return out


def g_theta_partial(w: WeightSequence, t: float, eps: float) -> Tuple[float, int, float]:
    """Partial sum of g(t) = sum (theta_k/k) t^k with a certified tail bound.

    Returns (value, K, tail_bound) where the dropped tail beyond K is at
    most tail_bound <= eps.  Stops at the first K where the geometric ratio
    bound a_{K} * q/(1-q), q = ((K+1)/K)^a * t, certifies the remainder.
    """
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t must be in [0, 1), got {t}")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if t == 0.0:
        return 0.0, 0, 0.0
    a = w.growth_alpha
    total = 0.0
    comp = 0.0  # Kahan compensation
    k = 0
    term = 0.0
    block = 256
    while True:
        ks = np.arange(k + 1, k + block + 1, dtype=np.float64)
        terms = theta_array_shifted(w, k + 1, k + block) / ks * t ** ks
        for x in terms:
            y = x - comp
            s = total + y
            comp = (s - total) - y
            total = s
        k += block
        term = float(terms[-1])
        q = ((k + 1) / k) ** a * t
        if q < 1.0:
            tail = term * q / (1.0 - q)
            if tail <= eps:
                # trim back to the minimal K inside this block
                # (cheap second pass over the block)
                for j in range(block):
                    kk = k - block + 1 + j
                    qq = ((kk + 1) / kk) ** a * t
                    if qq < 1.0 and terms[j] * qq / (1.0 - qq) <= eps:
                        extra = float(np.sum(terms[j + 1:]))
                        return total - extra, kk, float(terms[j] * qq / (1.0 - qq))
                return total, k, tail
        if k > 10**8:
            raise RuntimeError("g_theta_partial failed to certify tail")


def theta_array_shifted(w: WeightSequence, k_lo: int, k_hi: int) -> np.ndarray:
    """theta_k for k in [k_lo, k_hi] as a dense array."""
    k = np.arange(k_lo, k_hi + 1, dtype=np.float64)
    if w.family == POLYNOMIAL:
        return k ** w.alpha
    if w.family == EWENS:
        return np.full(len(k), w.vartheta)
    full = theta_array(w, k_hi)
    return full[k_lo:k_hi + 1]
