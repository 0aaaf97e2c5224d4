"""Saddle-point analysis for the weighted cycle measure.

Solves sum_k theta_k e^{-k v} = n for the saddle parameter v_n, evaluates
the derived scales n* = 1/v_n and ell_n, the polylog-style expansions used
to approximate these sums, and the saddle-point estimate of the coefficient
[t^n] exp(g(t)), together with numeric admissibility diagnostics (saddle
residual, width of convergence, monotonicity scan on the saddle circle).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import mpmath
import numpy as np

from .scaled import ScaledReal
from .weights import WeightSequence, g_theta_partial, theta_array_shifted

# truncation rule for all infinite sums: smallest K with K*v >= TAIL_DECADES,
# leaving tails below e^-60 times a polynomial factor
TAIL_DECADES = 60.0

_MAX_NEWTON_ITERS = 200


class SaddleError(RuntimeError):
    """Saddle equation solver failed to converge."""


@dataclass
class SaddleData:
    """Solved saddle quantities for one size n."""

    n: int
    v_n: float
    n_star: float
    ell_n: float
    r_n: float
    a_n: float
    b_n: float
    truncation_K: int
    residual: float
    weight: Optional[WeightSequence] = None

    @property
    def alpha(self) -> float:
        return self.weight.growth_alpha if self.weight is not None else 1.0


def truncation_K(v: float) -> int:
    return max(8, int(math.ceil(TAIL_DECADES / v)))


def _weighted_exp_sums(w: WeightSequence, v: float) -> Tuple[float, float, int]:
    """(sum theta_k e^{-kv}, sum k theta_k e^{-kv}, K) truncated at K."""
    K = truncation_K(v)
    k = np.arange(1, K + 1, dtype=np.float64)
    # evaluate in log space so k^alpha * e^{-kv} never overflows mid-product
    theta = theta_array_shifted(w, 1, K)
    with np.errstate(divide="ignore"):
        logs = np.where(theta > 0, np.log(theta), -np.inf) - k * v
    terms = np.exp(logs)
    return float(np.sum(terms)), float(np.sum(k * terms)), K


def ell_n(n_star: float, alpha: float) -> float:
    """Centering scale alpha*log(n*) + (alpha-1)*log(alpha*log(n*))."""
    core = alpha * math.log(n_star)
    if core <= 0:
        raise ValueError(f"alpha*log(n*) must be positive, got {core}")
    return core + (alpha - 1.0) * math.log(core)


def solve_saddle(w: WeightSequence, n: int) -> SaddleData:
    """Solve sum theta_k e^{-kv} = n by safeguarded Newton iteration.

    The map v -> sum theta_k e^{-kv} is strictly decreasing, so a bisection
    bracket around the asymptotic initial guess keeps Newton safe.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if w.family == "ewens":
        # theta_k = const: closed form v = log(1 + vartheta/n)
        v = math.log1p(w.vartheta / n)
    else:
        alpha = w.growth_alpha
        v0 = (n / math.gamma(alpha + 1.0)) ** (-1.0 / (1.0 + alpha))
        lo, hi = v0 / 10.0, 10.0 * v0
        v = v0
        converged = False
        for _ in range(_MAX_NEWTON_ITERS):
            s, sk, _ = _weighted_exp_sums(w, v)
            f = s - n
            if abs(f) <= 1e-12 * n:
                converged = True
                break
            if f > 0:
                lo = max(lo, v)
            else:
                hi = min(hi, v)
            step = f / sk  # f' = -sk
            v_new = v + step
            if not (lo < v_new < hi):
                v_new = 0.5 * (lo + hi)
            if abs(v_new - v) <= 1e-15 * v:
                v = v_new
                converged = True
                break
            v = v_new
        if not converged:
            raise SaddleError(
                f"saddle equation did not converge for n={n}: "
                f"v={v}, bracket=({lo}, {hi})")
    s, sk, K = _weighted_exp_sums(w, v)
    alpha = w.growth_alpha
    n_star = 1.0 / v
    try:
        ell = ell_n(n_star, alpha) if alpha > 0 else math.nan
    except ValueError:
        ell = math.nan
    return SaddleData(n=n, v_n=v, n_star=n_star, ell_n=ell,
                      r_n=math.exp(-v), a_n=s, b_n=sk,
                      truncation_K=K, residual=abs(s - n) / n, weight=w)


def zeta(s: float) -> float:
    """Riemann zeta at a real argument (excluding the pole at 1)."""
    if s == 1.0:
        raise ValueError("zeta has a pole at 1")
    return float(mpmath.zeta(s))


def polylog_asymp(delta: float, v: float) -> Tuple[float, float, float]:
    """Compare sum_k k^delta e^{-kv} with Gamma(delta+1) v^{-delta-1} + zeta(-delta).

    Returns (approx, direct, abs_error).  The direct sum is truncated with a
    certified tail below 1e-14 of its value.
    """
    if delta == round(delta) and delta <= -1:
        raise ValueError(f"delta={delta} is an excluded negative integer")
    if not 0.0 < v < 1.0:
        raise ValueError("v must be in (0, 1)")
    K = truncation_K(v)
    k = np.arange(1, K + 1, dtype=np.float64)
    direct = float(np.sum(np.exp(delta * np.log(k) - k * v)))
    approx = math.gamma(delta + 1.0) * v ** (-delta - 1.0) + zeta(-delta)
    return approx, direct, abs(direct - approx)


def falling_factorial(delta: float, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= delta - i
    return out


# Euler-Maclaurin boundary constant for sum_{k>=x} f(k) vs the integral;
# measured as f(x)/2 on the geometric closed forms (see the delta=0 case).
BOUNDARY_C0 = 0.5


def partial_sum_asymp(delta: float, v: float, x: float,
                      n_terms: int = 3) -> Tuple[float, float, float, bool]:
    """Tail sum sum_{k>=x} k^delta e^{-kv} vs its integral expansion.

    Returns (integral_part, correction, direct, in_regime).  The expansion
    is the repeated-integration-by-parts series with falling-factorial
    coefficients; correction is the boundary term BOUNDARY_C0 * f(x).
    in_regime is False when x*v < 5, where the expansion degrades.
    """
    if v <= 0 or x <= 0:
        raise ValueError("v and x must be positive")
    in_regime = x * v >= 5.0
    xc = float(math.ceil(x))
    f_x = xc ** delta * math.exp(-xc * v)
    series = sum(falling_factorial(delta, j) / (xc * v) ** j
                 for j in range(n_terms + 1))
    integral_part = f_x / v * series
    correction = BOUNDARY_C0 * f_x
    K = truncation_K(v) + int(xc)
    k = np.arange(int(xc), K + 1, dtype=np.float64)
    direct = float(np.sum(np.exp(delta * np.log(k) - k * v)))
    return integral_part, correction, direct, in_regime


def g_at_radius(w: WeightSequence, r: float, eps: float = 1e-13) -> float:
    """g(r) = sum (theta_k/k) r^k at the saddle radius."""
    value, _, _ = g_theta_partial(w, r, eps)
    return value


def saddle_h_estimate(w: WeightSequence, n: int) -> Tuple[ScaledReal, SaddleData]:
    """Saddle-point estimate of h_n = [t^n] exp(g(t)).

    estimate = (2 pi)^{-1/2} r^{-n} b_n^{-1/2} exp(g(r)) at r = r_n.
    """
    if n < 10:
        raise ValueError("saddle estimate needs n >= 10")
    sd = solve_saddle(w, n)
    g_r = g_at_radius(w, sd.r_n)
    log_est = (-0.5 * math.log(2.0 * math.pi)
               + n * sd.v_n
               - 0.5 * math.log(sd.b_n)
               + g_r)
    return ScaledReal.from_log(log_est), sd


def threshold_x(sd: SaddleData, y: float) -> float:
    """Cycle-length threshold x_n(y) = n*(ell_n + min(-log y, ell_n)).

    y = 0 maps to the cap 2 n* ell_n; larger y lowers the threshold.
    """
    if y < 0:
        raise ValueError("y must be >= 0")
    if y == 0.0:
        return 2.0 * sd.n_star * sd.ell_n
    return sd.n_star * (sd.ell_n + min(-math.log(y), sd.ell_n))


def expected_tail_count(w: WeightSequence, sd: SaddleData, x: float) -> float:
    """sum_{k >= max(x,1)} (theta_k/k) e^{-k v_n}, truncated with K*v >= 60."""
    if x < 0:
        raise ValueError("x must be >= 0")
    lo = max(1, int(math.ceil(x)))
    K = truncation_K(sd.v_n) + lo
    k = np.arange(lo, K + 1, dtype=np.float64)
    theta = theta_array_shifted(w, lo, K)
    with np.errstate(divide="ignore"):
        logs = np.where(theta > 0, np.log(theta), -np.inf) \
            - np.log(k) - k * sd.v_n
    return float(np.sum(np.exp(logs)))


def default_xi(alpha: float) -> float:
    """Width exponent inside the admissible open interval; biased to the
    upper end: (alpha+2)/2 - 0.1."""
    return (alpha + 2.0) / 2.0 - 0.1


@dataclass
class AdmissibilityReport:
    residual: float
    width: float
    monotonicity_violations: int
    bn_ratio: float

    def to_json(self) -> str:
        return json.dumps({
            "residual": self.residual,
            "width": self.width,
            "monotonicity_violations": self.monotonicity_violations,
            "bn_ratio": self.bn_ratio,
        })


def admissibility_diagnostics(w: WeightSequence, n: int, s: float, y: float,
                              xi: Optional[float] = None,
                              phi_points: int = 1000) -> AdmissibilityReport:
    """Numeric admissibility diagnostics for the tilted generating function.

    Works on g_{n,s}(t) = (e^s - 1) * sum_{k >= x_n(y)} (theta_k/k) t^k + g(t):
    reports the normalized saddle residual, the width-of-convergence
    quantity delta^2 b - log b with delta = v^xi, the number of grid points
    where Re g on the saddle circle exceeds its value at phi = delta, and
    the ratio of b to its predicted leading term.
    """
    if n < 100:
        raise ValueError("diagnostics need n >= 100")
    if y <= 0:
        raise ValueError("y must be > 0")
    alpha = w.growth_alpha
    sd = solve_saddle(w, n)
    if xi is None:
        xi = default_xi(alpha)
    x_n = threshold_x(sd, y)
    K = truncation_K(sd.v_n)
    k = np.arange(1, K + 1, dtype=np.float64)
    theta = theta_array_shifted(w, 1, K)
    with np.errstate(divide="ignore"):
        log_gk = np.where(theta > 0, np.log(theta), -np.inf) \
            - np.log(k) - k * sd.v_n
    gk_r = np.exp(log_gk)  # (theta_k/k) r^k
    tilt = np.where(k >= math.ceil(x_n), math.expm1(s), 0.0)
    ck_r = gk_r * (1.0 + tilt)
    a_n = float(np.sum(k * ck_r))
    b_n = float(np.sum(k * k * ck_r))
    residual = abs(a_n - n) / math.sqrt(b_n)
    delta = sd.v_n ** xi
    width = delta * delta * b_n - math.log(b_n)
    bn_ratio = b_n / (math.gamma(alpha + 2.0) * sd.n_star ** (alpha + 2.0))
    # monotonicity: Re g_{n,s}(r e^{i phi}) <= value at phi = delta
    phis = np.linspace(delta, math.pi, phi_points)
    ref = float(np.sum(ck_r * np.cos(k * delta)))
    violations = 0
    chunk = 64
    tol = 1e-12 * max(1.0, abs(ref))
    for i in range(0, len(phis), chunk):
        block = phis[i:i + chunk]
        vals = np.cos(np.outer(block, k)) @ ck_r
        violations += int(np.sum(vals > ref + tol))
    return AdmissibilityReport(residual=residual, width=width,
                               monotonicity_violations=violations,
                               bn_ratio=bn_ratio)
