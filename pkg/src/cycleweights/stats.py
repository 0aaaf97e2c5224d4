"""Observable extraction and statistical verification of the limit laws.

Turns sampled cycle types into the observables of interest (ordered longest
cycles, the threshold-counting step process, tail counts) and runs the
Monte Carlo checks: Poisson increments over a y-grid, the Gumbel law of the
rescaled longest cycle, the cumulative-count profile against its direct-sum
prediction, and the frequency of the rare event that any cycle exceeds the
cap 2 n* ell_n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import SaddleData, expected_tail_count, solve_saddle, threshold_x
from .oracle import CycleType
from .weights import WeightSequence


@dataclass(frozen=True)
class ProcessSample:
    """Sorted cycle lengths of one sample, longest first, with multiplicity."""

    cycle_lengths_desc: Tuple[int, ...]
    n: int

    @classmethod
    def from_cycle_type(cls, ct: CycleType) -> "ProcessSample":
        return cls(tuple(ct.lengths_desc()), ct.n)

    def tail_count(self, x: float) -> int:
        lengths = np.asarray(self.cycle_lengths_desc)
        return int(np.sum(lengths >= x))


@dataclass
class Check:
    name: str
    observed: float
    target: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"name": self.name, "observed": self.observed,
                "target": self.target, "tol": self.tol, "pass": self.passed}


@dataclass
class VerificationReport:
    experiment: str
    config: dict
    checks: List[Check] = field(default_factory=list)
    distances: Dict[str, float] = field(default_factory=dict)

    def add(self, name: str, observed: float, target: float, tol: float,
            larger_ok: bool = False) -> None:
        passed = abs(observed - target) <= tol
        self.checks.append(Check(name, float(observed), float(target),
                                 float(tol), bool(passed)))

    def add_bound(self, name: str, observed: float, bound: float) -> None:
        """Pass iff observed <= bound (recorded as target 0, tol bound)."""
        self.checks.append(Check(name, float(observed), 0.0, float(bound),
                                 bool(observed <= bound)))

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "config": self.config,
                "checks": [c.to_dict() for c in self.checks],
                "distances": self.distances}

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


# ---------------------------------------------------------------------------
# distances

def tv_distance(p: Dict[int, float], q: Dict[int, float]) -> float:
    """Total variation 0.5 * sum |p_i - q_i| between discrete pmfs."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def ks_distance(samples: Sequence[float], cdf: Callable[[float], float]) -> float:
    """One-sample KS: sup over sample points of |F_emp - F|."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    F = np.array([cdf(x) for x in xs])
    lo = np.abs(F - np.arange(n) / n)
    hi = np.abs(F - np.arange(1, n + 1) / n)
    return float(max(lo.max(), hi.max()))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sample KS statistic over the merged sample points."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty sample")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def poisson_pmf(mean: float, k_max: int) -> Dict[int, float]:
    if mean == 0.0:
        return {0: 1.0}
    out = {}
    logs = -mean + np.arange(k_max + 1) * math.log(mean) \
        - np.array([math.lgamma(k + 1) for k in range(k_max + 1)])
    for k, lp in enumerate(logs):
        out[k] = math.exp(lp)
    return out


def gumbel_cdf(x: float) -> float:
    return math.exp(-math.exp(-x))


# ---------------------------------------------------------------------------
# observables

def longest_cycles(ct: CycleType, K: int) -> Tuple[List[int], bool]:
    """Lengths of the K longest cycles (with multiplicity), longest first.

    Entries past the actual cycle count are 0; the flag reports whether any
    padding happened.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    lengths = ct.lengths_desc()
    padded = len(lengths) < K
    out = lengths[:K] + [0] * max(0, K - len(lengths))
    return out, padded


def longest_via_tail_counts(ct: CycleType, j: int) -> int:
    """L_j as max{m : #cycles of length >= m is >= j}; 0 if fewer cycles."""
    best = 0
    for m in range(1, ct.n + 1):
        if ct.tail_count(m) >= j:
            best = m
    return best


@dataclass
class ProcessPath:
    """Step-function view y -> P_y of one sample's long cycles."""

    sample: ProcessSample
    sd: SaddleData
    alpha: float
    jump_times: Tuple[float, ...]  # y_j for the j-th longest cycle, clamped

    def evaluate(self, y: float) -> int:
        """P_y = number of cycles of length >= x_n(y)."""
        return self.sample.tail_count(threshold_x(self.sd, y))


def process_path(ct: CycleType, sd: SaddleData, alpha: float) -> ProcessPath:
    sample = ProcessSample.from_cycle_type(ct)
    cap = 2.0 * sd.n_star * sd.ell_n
    jumps = []
    for L in sample.cycle_lengths_desc:
        eff = min(float(L), cap)  # lengths past the cap clamp to y = e^{-ell}
        jumps.append(math.exp(sd.ell_n - eff / sd.n_star))
    return ProcessPath(sample=sample, sd=sd, alpha=alpha,
                       jump_times=tuple(jumps))


# ---------------------------------------------------------------------------
# verification experiments

DEFAULT_TOLERANCES = {
    "increment_mean_rel": 0.15,
    "var_mean_lo": 0.8,
    "var_mean_hi": 1.2,
    "correlation": 0.1,
    "poisson_tv": 0.08,
    "gumbel_ks_1": 0.10,
    "gumbel_ks_j": 0.12,
    "profile_rel": 0.10,
    "bn_freq": 0.05,
}


def _tol(overrides: Optional[dict], key: str) -> float:
    if overrides and key in overrides:
        return overrides[key]
    return DEFAULT_TOLERANCES[key]


def _collect(batch: Iterable) -> List[ProcessSample]:
    out = []
    for item in batch:
        if isinstance(item, CycleType):
            item = ProcessSample.from_cycle_type(item)
        out.append(item)
    if not out:
        raise ValueError("empty batch")
    return out


def verify_poisson_increments(batch: Iterable, sd: SaddleData,
                              y_grid: Sequence[float],
                              alpha: Optional[float] = None,
                              tolerances: Optional[dict] = None
                              ) -> VerificationReport:
    """Increments of P_y over the grid vs independent Poisson targets."""
    samples = _collect(batch)
    if alpha is None:
        alpha = sd.alpha
    ys = list(y_grid)
    if any(b < a for a, b in zip(ys, ys[1:])):
        raise ValueError("y_grid must be nondecreasing")
    thresholds = [threshold_x(sd, y) for y in ys]
    counts = np.array([[s.tail_count(x) for x in thresholds] for s in samples])
    incs = np.diff(np.concatenate(
        [np.zeros((len(samples), 1), dtype=counts.dtype), counts], axis=1), axis=1)
    targets = np.diff([0.0] + ys)
    rep = VerificationReport(
        "poisson_increments",
        {"n": sd.n, "alpha": alpha, "num_samples": len(samples),
         "y_grid": ys})
    mean_tol = _tol(tolerances, "increment_mean_rel")
    vm_lo = _tol(tolerances, "var_mean_lo")
    vm_hi = _tol(tolerances, "var_mean_hi")
    tv_tol = _tol(tolerances, "poisson_tv")
    for j, target in enumerate(targets):
        col = incs[:, j]
        mean = float(np.mean(col))
        rep.add(f"mean_inc_{j}", mean, float(target),
                mean_tol * max(target, 1e-12))
        if target > 0 and mean > 0:
            vm = float(np.var(col)) / mean
            mid = 0.5 * (vm_lo + vm_hi)
            rep.add(f"var_mean_inc_{j}", vm, mid, vm_hi - mid)
        emp: Dict[int, float] = {}
        for v in col:
            emp[int(v)] = emp.get(int(v), 0.0) + 1.0 / len(col)
        k_max = max(int(col.max()), int(10 * max(target, 0.1)) + 10)
        tv = tv_distance(emp, poisson_pmf(float(target), k_max))
        rep.distances[f"tv_inc_{j}"] = tv
        rep.add_bound(f"tv_inc_{j}", tv, tv_tol)
    corr_tol = _tol(tolerances, "correlation")
    for a in range(len(targets)):
        for b in range(a + 1, len(targets)):
            ca, cb = incs[:, a], incs[:, b]
            if np.std(ca) == 0 or np.std(cb) == 0:
                corr = 0.0
            else:
                corr = float(np.corrcoef(ca, cb)[0, 1])
            rep.add_bound(f"abs_corr_{a}_{b}", abs(corr), corr_tol)
    return rep


def exponential_partial_sum_reference(j: int, size: int,
                                      seed: int = 20240917) -> np.ndarray:
    """-log(E_1 + ... + E_j) for iid standard exponentials, fixed seed."""
    rng = np.random.default_rng(seed + j)
    sums = rng.standard_exponential(size=(size, j)).sum(axis=1)
    return -np.log(sums)


def verify_gumbel(batch: Iterable, sd: SaddleData, K: int,
                  tolerances: Optional[dict] = None) -> VerificationReport:
    """Rescaled longest cycles vs the Gumbel / exponential-partial-sum laws."""
    if K < 1:
        raise ValueError("K must be >= 1")
    samples = _collect(batch)
    rep = VerificationReport(
        "gumbel_longest_cycles",
        {"n": sd.n, "num_samples": len(samples), "K": K})
    rescaled = np.full((len(samples), K), -np.inf)
    jump_violations = 0
    for i, s in enumerate(samples):
        lengths = s.cycle_lengths_desc[:K]
        vals = [(L - sd.n_star * sd.ell_n) / sd.n_star for L in lengths]
        rescaled[i, :len(vals)] = vals
        # jump times y_j = exp(ell - L_j/n*) must be nondecreasing in j
        ys = [math.exp(sd.ell_n - L / sd.n_star) for L in lengths]
        if any(b < a for a, b in zip(ys, ys[1:])):
            jump_violations += 1
    ks1 = ks_distance(rescaled[:, 0], gumbel_cdf)
    rep.distances["ks_L1_gumbel"] = ks1
    rep.add_bound("ks_L1_gumbel", ks1, _tol(tolerances, "gumbel_ks_1"))
    for j in range(2, K + 1):
        ref = exponential_partial_sum_reference(j, len(samples))
        ksj = ks_two_sample(rescaled[:, j - 1], ref)
        rep.distances[f"ks_L{j}_ref"] = ksj
        rep.add_bound(f"ks_L{j}_ref", ksj, _tol(tolerances, "gumbel_ks_j"))
    rep.add_bound("jump_time_violations", jump_violations, 0)
    return rep


def cumulative_profile(batch: Iterable, alpha: float,
                       x_grid: Sequence[float],
                       w: Optional[WeightSequence] = None,
                       tolerances: Optional[dict] = None
                       ) -> VerificationReport:
    """Mean cumulative counts above x * n^{1/(1+alpha)} vs the direct-sum
    prediction at the saddle radius."""
    from . import weights as weights_mod

    samples = _collect(batch)
    n = samples[0].n
    if w is None:
        w = weights_mod.polynomial(alpha)
    sd = solve_saddle(w, n)
    scale = n ** (1.0 / (1.0 + alpha))
    rep = VerificationReport(
        "cumulative_profile",
        {"n": n, "alpha": alpha, "num_samples": len(samples),
         "x_grid": list(x_grid)})
    rel_tol = _tol(tolerances, "profile_rel")
    for x in x_grid:
        thr = max(1.0, x * scale)
        emp = float(np.mean([s.tail_count(thr) for s in samples]))
        pred = expected_tail_count(w, sd, thr)
        rep.add(f"w_n({x})", emp, pred, rel_tol * max(pred, 1e-12))
    return rep


def bn_event_frequency(batch: Iterable, sd: SaddleData,
                       w: Optional[WeightSequence] = None,
                       tolerances: Optional[dict] = None
                       ) -> VerificationReport:
    """Frequency of any cycle exceeding the cap 2 n* ell_n vs its
    Markov-type bound 2 * sum_{k > cap} (theta_k/k) e^{-k v_n}."""
    from . import weights as weights_mod

    samples = _collect(batch)
    if w is None:
        w = sd.weight or weights_mod.polynomial(sd.alpha)
    cap = 2.0 * sd.n_star * sd.ell_n
    freq = float(np.mean([1.0 if s.tail_count(math.floor(cap) + 1) >= 1
                          else 0.0 for s in samples]))
    bound = 2.0 * expected_tail_count(w, sd, math.floor(cap) + 1)
    limit = max(3.0 * bound, 5.0 / math.sqrt(len(samples)))
    rep = VerificationReport(
        "bn_event",
        {"n": sd.n, "num_samples": len(samples), "cap": cap})
    rep.distances["markov_bound"] = bound
    rep.add_bound("bn_frequency", freq,
                  min(_tol(tolerances, "bn_freq"), limit)
                  if tolerances and "bn_freq" in tolerances else limit)
    rep.add_bound("bn_frequency_abs", freq, _tol(tolerances, "bn_freq"))
    return rep
