"""Exact ground truth at small-to-moderate sizes.

Everything here is exact up to floating round-off: enumeration over integer
partitions, the normalization constants h_n via their recurrence

    n * h_n = sum_{k=1}^{n} theta_k * h_{n-k},        h_0 = 1,

truncated power-series exponentiation for moment generating functions, and
the positive-coefficient series bound used as a cross-check of the
saddle-point machinery.  All series coefficients are ScaledReal-backed since
they span hundreds of binary orders of magnitude already by degree 200.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

import numpy as np

from .scaled import (ScaledReal, normalize_arrays, scaled_array_from_logs,
                     scaled_dot)
from .weights import WeightSequence, theta_array, theta_log

DEFAULT_ENUMERATION_CAP = 60
SERIES_CAP = 220

_MAGIC = b"CWHT"
_CACHE_VERSION = 1
_FAMILY_TAGS = {"polynomial": 0, "ewens": 1, "table": 2}


class CapacityError(ValueError):
    """Requested size exceeds an enumeration or table capacity."""


@dataclass(frozen=True)
class CycleType:
    """Multiset of cycle lengths stored as counts; sum of m*C_m equals n."""

    counts: Tuple[Tuple[int, int], ...]  # sorted ((m, C_m), ...), C_m >= 1
    n: int

    @classmethod
    def from_dict(cls, counts: Dict[int, int], n: int) -> "CycleType":
        items = tuple(sorted((m, c) for m, c in counts.items() if c > 0))
        total = sum(m * c for m, c in items)
        if total != n:
            raise ValueError(f"cycle counts sum to {total}, expected {n}")
        return cls(items, n)

    def count(self, m: int) -> int:
        for mm, c in self.counts:
            if mm == m:
                return c
        return 0

    def lengths_desc(self) -> List[int]:
        out: List[int] = []
        for m, c in reversed(self.counts):
            out.extend([m] * c)
        return out

    def num_cycles(self) -> int:
        return sum(c for _, c in self.counts)

    def tail_count(self, x: float) -> int:
        """Number of cycles of length >= x."""
        return sum(c for m, c in self.counts if m >= x)


def partitions(n: int) -> Iterator[Tuple[int, ...]]:
    """All partitions of n as descending tuples, largest part first."""
    if n == 0:
        yield ()
        return
    parts: List[int] = []

    def rec(remaining: int, max_part: int):
        if remaining == 0:
            yield tuple(parts)
            return
        for p in range(min(remaining, max_part), 0, -1):
            parts.append(p)
            yield from rec(remaining - p, p)
            parts.pop()

    yield from rec(n, n)


def _log_type_weight(w: WeightSequence, counts: Dict[int, int]) -> float:
    """ln of prod theta_m^{C_m} / prod (m^{C_m} C_m!)."""
    total = 0.0
    for m, c in counts.items():
        lt = theta_log(w, m)
        if lt == -math.inf:
            return -math.inf
        total += c * lt - c * math.log(m) - math.lgamma(c + 1)
    return total


def h_exact(w: WeightSequence, n: int,
            cap: int = DEFAULT_ENUMERATION_CAP) -> ScaledReal:
    """h_n as the sum over all partitions of the per-type weights."""
    if n > cap:
        raise CapacityError(f"n={n} exceeds enumeration cap {cap}")
    acc = ScaledReal()
    for part in partitions(n):
        counts: Dict[int, int] = {}
        for p in part:
            counts[p] = counts.get(p, 0) + 1
        acc = acc + ScaledReal.from_log(_log_type_weight(w, counts))
    return acc


def enumerate_cycle_types(w: WeightSequence, n: int,
                          cap: int = DEFAULT_ENUMERATION_CAP
                          ) -> List[Tuple[CycleType, float]]:
    """All cycle types of size n with their exact probabilities.

    Ordered lexicographically by partition with largest part descending.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > cap:
        raise CapacityError(f"n={n} exceeds enumeration cap {cap}")
    entries = []
    acc = ScaledReal()
    for part in partitions(n):
        counts: Dict[int, int] = {}
        for p in part:
            counts[p] = counts.get(p, 0) + 1
        lw = _log_type_weight(w, counts)
        entries.append((CycleType.from_dict(counts, n), lw))
        acc = acc + ScaledReal.from_log(lw)
    log_h = acc.log()
    return [(ct, math.exp(lw - log_h)) for ct, lw in entries]


@dataclass
class HTable:
    """Normalization constants h_0..h_n_max for one weight sequence."""

    weight: WeightSequence
    n_max: int
    mant: np.ndarray  # float64, mantissas in [1,2) (or 0)
    expo: np.ndarray  # int64

    def value(self, n: int) -> ScaledReal:
        if not 0 <= n <= self.n_max:
            raise CapacityError(f"n={n} outside table range 0..{self.n_max}")
        out = ScaledReal()
        out.mantissa = float(self.mant[n])
        out.exponent = int(self.expo[n])
        return out

    def log_array(self) -> np.ndarray:
        """Natural logs of h_0..h_n_max."""
        return np.log(self.mant) + self.expo * math.log(2.0)

    def recurrence_residual(self, n: int, theta: np.ndarray = None) -> float:
        """Relative residual of n*h_n against the convolution sum."""
        if theta is None:
            theta = theta_array(self.weight, self.n_max)
        tm, te = normalize_arrays(theta[1:n + 1], np.zeros(n, dtype=np.int64))
        # h_{n-k} for k=1..n is self[n-1], self[n-2], ..., self[0]
        rhs = scaled_dot(tm, te, self.mant[:n][::-1], self.expo[:n][::-1])
        lhs = self.value(n) * float(n)
        return abs(math.expm1(rhs.log() - lhs.log()))

    def save(self, path: str) -> None:
        tag = _FAMILY_TAGS[self.weight.family]
        if self.weight.family == "polynomial":
            param = self.weight.alpha
        elif self.weight.family == "ewens":
            param = self.weight.vartheta
        else:
            param = 0.0
        with open(path, "wb") as f:
            f.write(_MAGIC)
            f.write(struct.pack("<I", _CACHE_VERSION))
            f.write(struct.pack("<B", tag))
            f.write(struct.pack("<d", param))
            f.write(struct.pack("<Q", self.n_max))
            pairs = np.empty(self.n_max + 1,
                             dtype=np.dtype([("m", "<f8"), ("e", "<i8")]))
            pairs["m"] = self.mant
            pairs["e"] = self.expo
            pairs.tofile(f)

    @classmethod
    def load(cls, path: str, weight: WeightSequence,
             validate: bool = True, rng_seed: int = 0) -> "HTable":
        with open(path, "rb") as f:
            if f.read(4) != _MAGIC:
                raise ValueError(f"{path}: bad magic, not an HTable cache")
            (version,) = struct.unpack("<I", f.read(4))
            if version != _CACHE_VERSION:
                raise ValueError(f"{path}: unsupported cache version {version}")
            (tag,) = struct.unpack("<B", f.read(1))
            (param,) = struct.unpack("<d", f.read(8))
            (n_max,) = struct.unpack("<Q", f.read(8))
            if tag != _FAMILY_TAGS[weight.family]:
                raise ValueError(f"{path}: cached family tag {tag} does not "
                                 f"match {weight.family}")
            expected = (weight.alpha if weight.family == "polynomial"
                        else weight.vartheta if weight.family == "ewens" else 0.0)
            if expected is not None and abs(param - expected) > 1e-15:
                raise ValueError(f"{path}: cached parameter {param} does not "
                                 f"match {expected}")
            pairs = np.fromfile(f, dtype=np.dtype([("m", "<f8"), ("e", "<i8")]),
                                count=n_max + 1)
        tab = cls(weight=weight, n_max=int(n_max),
                  mant=pairs["m"].copy(), expo=pairs["e"].copy())
        if validate:
            rng = np.random.default_rng(rng_seed)
            k = max(1, (tab.n_max) // 100)
            theta = theta_array(weight, tab.n_max)
            for n in rng.choice(np.arange(1, tab.n_max + 1),
                                size=min(k, tab.n_max), replace=False):
                if tab.recurrence_residual(int(n), theta) > 1e-9:
                    raise ValueError(f"{path}: recurrence residual check "
                                     f"failed at n={n}")
        return tab


def exp_series(coeff_mant: np.ndarray, coeff_expo: np.ndarray, n_max: int):
    """Coefficients of exp(A(t)) to degree n_max.

    The input arrays hold k*a_k for k=0..n_max (entry 0 ignored) where
    A(t) = sum a_k t^k with a_0 = 0 and a_k >= 0.  Uses the recurrence
    n*b_n = sum_{k=1}^n (k a_k) b_{n-k} with scaled arithmetic throughout.
    """
    bm = np.zeros(n_max + 1)
    be = np.zeros(n_max + 1, dtype=np.int64)
    bm[0] = 1.0
    for n in range(1, n_max + 1):
        s = scaled_dot(coeff_mant[1:n + 1], coeff_expo[1:n + 1],
                       bm[:n][::-1], be[:n][::-1])
        s = s / float(n)
        bm[n] = s.mantissa
        be[n] = s.exponent
    return bm, be


def build_h_table(w: WeightSequence, n_max: int) -> HTable:
    """HTable from the recurrence; O(n_max^2) scaled multiply-adds."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    theta = theta_array(w, max(n_max, 1))
    with np.errstate(divide="ignore"):
        tlog = np.where(theta > 0, np.log(theta), -np.inf)
    tm, te = scaled_array_from_logs(tlog)
    hm, he = exp_series(tm, te, n_max)
    return HTable(weight=w, n_max=n_max, mant=hm, expo=he)


def series_multiply(am, ae, bm, be, n_max: int):
    """Product of two nonnegative-coefficient series, truncated at n_max."""
    cm = np.zeros(n_max + 1)
    ce = np.zeros(n_max + 1, dtype=np.int64)
    for n in range(n_max + 1):
        s = scaled_dot(am[:n + 1], ae[:n + 1], bm[n::-1], be[n::-1])
        cm[n] = s.mantissa
        ce[n] = s.exponent
    return cm, ce


def exact_statistic_pmf(w: WeightSequence, n: int, statistic: str,
                        x: float = None,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> Dict[int, float]:
    """Exact pmf of a cycle-type statistic by full enumeration.

    statistic is one of "L1" (longest cycle), "tail_count" (number of
    cycles of length >= x) or "total_cycles".
    """
    if statistic == "tail_count" and x is None:
        raise ValueError("tail_count needs the threshold x")
    pmf: Dict[int, float] = {}
    for ct, p in enumerate_cycle_types(w, n, cap):
        if statistic == "L1":
            v = ct.counts[-1][0] if ct.counts else 0
        elif statistic == "tail_count":
            v = ct.tail_count(x)
        elif statistic == "total_cycles":
            v = ct.num_cycles()
        else:
            raise ValueError(f"unknown statistic {statistic!r}")
        pmf[v] = pmf.get(v, 0.0) + p
    return pmf


def mgf_series(w: WeightSequence, n: int, x: float, s: float,
               cap: int = SERIES_CAP) -> float:
    """E[exp(s * #cycles of length >= x)] via truncated series extraction.

    Extracts [t^n] exp((e^s - 1) * sum_{x<=k<=n} (theta_k/k) t^k + g(t))
    and divides by h_n, both as degree-n truncated series.
    """
    if n > cap:
        raise CapacityError(f"n={n} exceeds series cap {cap}")
    if x < 0:
        raise ValueError("x must be >= 0")
    theta = theta_array(w, n)
    factor = np.ones(n + 1)
    k = np.arange(n + 1)
    lo = max(1, math.ceil(x))
    factor[k >= lo] = math.exp(s)  # 1 + (e^s - 1)
    coeff = theta * factor  # k * a_k
    with np.errstate(divide="ignore"):
        clog = np.where(coeff > 0, np.log(coeff), -np.inf)
    cm, ce = scaled_array_from_logs(clog)
    num_m, num_e = exp_series(cm, ce, n)
    h = build_h_table(w, n)
    num = ScaledReal(float(num_m[n]), int(num_e[n]))
    den = h.value(n)
    return (num / den).to_float()


def corollary_bound_check(w: WeightSequence, n: int, u: float, v: float,
                          cap: int = SERIES_CAP):
    """Positive-coefficient series bound diagnostic.

    Builds F(t) = sum over the window x_{n,v} <= k < x_{n,u} of
    (theta_k/k) t^k, forms f = F^2 (1+F)^2, and compares
    lhs = [t^n] f(t) exp(g(t)) against rhs = 2 f(r_n) [t^n] exp(g(t)).
    Advisory below the (unknown) size where the bound provably kicks in.
    """
    from .asymptotics import solve_saddle, threshold_x

    if not 0 <= u < v:
        raise ValueError("need 0 <= u < v")
    if n > cap:
        raise CapacityError(f"n={n} exceeds series cap {cap}")
    sd = solve_saddle(w, n)
    x_hi = threshold_x(sd, u)  # larger threshold (smaller y)
    x_lo = threshold_x(sd, v)
    theta = theta_array(w, n)
    k = np.arange(n + 1, dtype=np.float64)
    window = (k >= max(1.0, math.ceil(x_lo))) & (k < x_hi)
    fcoef = np.zeros(n + 1)
    fcoef[window] = theta[window] / k[window]
    with np.errstate(divide="ignore"):
        flog = np.where(fcoef > 0, np.log(fcoef), -np.inf)
    fm, fe = scaled_array_from_logs(flog)
    # G = F + F^2 = F(1+F); f = G^2
    f2m, f2e = series_multiply(fm, fe, fm, fe, n)
    gm = np.zeros(n + 1)
    ge = np.zeros(n + 1, dtype=np.int64)
    for i in range(n + 1):
        s = ScaledReal(float(fm[i]), int(fe[i])) + ScaledReal(float(f2m[i]), int(f2e[i]))
        gm[i] = s.mantissa
        ge[i] = s.exponent
    fm2, fe2 = series_multiply(gm, ge, gm, ge, n)
    h = build_h_table(w, n)
    lhs_sr = scaled_dot(fm2, fe2, h.mant[n::-1], h.expo[n::-1])
    r = sd.r_n
    ks = np.arange(1, n + 1)
    Fr = float(np.sum(fcoef[1:] * r ** ks))
    f_at_r = (Fr * (1.0 + Fr)) ** 2
    rhs_sr = h.value(n) * (2.0 * f_at_r)
    lhs = lhs_sr.to_float()
    rhs = rhs_sr.to_float()
    return lhs, rhs, lhs <= rhs
