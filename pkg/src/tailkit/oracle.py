"""Ground truth at desk scale.

Adaptive quadrature of any distribution's PDF plus closed reference CDFs
(erfc-based Gaussian, incomplete-beta beta prime, Poisson-weighted
gamma-series non-central chi-squared).  Everything the acceptance tests
compare bounds against comes from here, through code paths independent
of the jet engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import DomainError, ToleranceNotMet

_MAX_SUBDIVISIONS = 10_000


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    subdivisions: int


@lru_cache(maxsize=8)
def _rule(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel(f, a: float, b: float) -> tuple[float, float]:
    # embedded-rule difference: 21-point Gauss vs 10-point Gauss
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x10, w10 = _rule(10)
    x21, w21 = _rule(21)
    f21 = [f(mid + half * xi) for xi in x21]
    i21 = half * sum(wi * fi for wi, fi in zip(w21, f21))
    i10 = half * sum(wi * f(mid + half * xi) for wi, xi in zip(w10, x10))
    return i21, abs(i21 - i10)


def _adaptive(f, a: float, b: float, tol: float) -> QuadratureResult:
    import heapq

    val, err = _panel(f, a, b)
    heap = [(-err, a, b, val, err)]
    total_val, total_err = val, err
    n_sub = 1
    while total_err > tol:
        if n_sub >= _MAX_SUBDIVISIONS:
            raise ToleranceNotMet(
                f"quadrature error {total_err:.3e} > tol {tol:.3e} after {n_sub} panels"
            )
        _, pa, pb, pval, perr = heapq.heappop(heap)
        pm = 0.5 * (pa + pb)
        lv, le = _panel(f, pa, pm)
        rv, re = _panel(f, pm, pb)
        total_val += lv + rv - pval
        total_err += le + re - perr
        heapq.heappush(heap, (-le, pa, pm, lv, le))
        heapq.heappush(heap, (-re, pm, pb, rv, re))
        n_sub += 1
    return QuadratureResult(total_val, total_err, n_sub)


def tail_by_quadrature(dist, x: float, side, tol: float = 1e-12) -> QuadratureResult:
    """Pr{X >= x} (side Right) or Pr{X <= x} (side Left) by adaptive
    integration of dist's PDF; unbounded ends are mapped through
    u = 1/(1 + |x - c|)."""
    if tol < 1e-13:
        raise DomainError("tail_by_quadrature supports tol >= 1e-13")
    support = dist.support
    if not (support.lower < x < support.upper):
        raise DomainError(f"x={x} outside open support ({support.lower}, {support.upper})")

    def pdf(t: float) -> float:
        return dist.pdf_jet(t, 0).value

    side_name = getattr(side, "name", str(side)).lower()
    if side_name.startswith("right"):
        if math.isinf(support.upper):
            # t in (0,1]: x(t) = x + (1-t)/t, dx = dt/t^2
            return _adaptive(lambda t: pdf(x + (1.0 - t) / t) / (t * t), 0.0, 1.0, tol)
        return _adaptive(pdf, x, support.upper, tol)
    if math.isinf(support.lower):
        return _adaptive(lambda t: pdf(x - (1.0 - t) / t) / (t * t), 0.0, 1.0, tol)
    return _adaptive(pdf, support.lower, x, tol)


# ---------------------------------------------------------------------------
# Closed reference CDFs


def gaussian_cdf(mu: float, sigma: float, x: float) -> float:
    return 0.5 * specfun.erfc(-(x - mu) / (sigma * math.sqrt(2.0)))


def gaussian_tail(mu: float, sigma: float, x: float) -> float:
    return 0.5 * specfun.erfc((x - mu) / (sigma * math.sqrt(2.0)))


def beta_prime_cdf(alpha: float, beta: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    return specfun.reg_inc_beta(x / (x + 1.0), alpha, beta)


def ncchi2_cdf_log(k: float, s: float, x: float, tol: float = 1e-12) -> float:
    """ln of the non-central chi-squared CDF, as the Poisson-weighted
    gamma-P series accumulated in log space.

    The gamma terms decrease in the Poisson index, so the remainder
    after j terms is bounded by (remaining Poisson mass) * (last gamma
    term); truncation stops when that bound drops below tol relative to
    the accumulated value (and always by the standard sub-exponential
    Poisson cap j_max = s/2 + 40 sqrt(s/2+1) + 50).
    """
    if k <= 0.0 or s < 0.0 or x < 0.0:
        raise DomainError("ncchi2_cdf_log needs k > 0, s >= 0, x >= 0")
    if x == 0.0:
        return -math.inf
    if s == 0.0:
        return specfun.log_reg_inc_gamma_P(0.5 * k, 0.5 * x)
    half_s = 0.5 * s
    j_max = int(half_s + 40.0 * math.sqrt(half_s + 1.0) + 50.0)
    acc = -math.inf
    pois_mass = 0.0
    for j in range(j_max + 1):
        lw = -half_s + j * math.log(half_s) - math.lgamma(j + 1.0)
        lp = specfun.log_reg_inc_gamma_P(0.5 * k + j, 0.5 * x)
        term = lw + lp
        acc = max(acc, term) + math.log1p(math.exp(-abs(acc - term))) if math.isfinite(acc) else term
        pois_mass += math.exp(lw)
        rem = 1.0 - pois_mass
        if rem <= 0.0 or (math.isfinite(acc) and math.log(max(rem, 1e-320)) + lp <= math.log(tol) + acc):
            return min(0.0, acc)
    raise ToleranceNotMet(
        f"series remainder above tol {tol:.3e} at j={j_max} (k={k}, s={s}, x={x})"
    )


def ncchi2_cdf_series(k: float, s: float, x: float, tol: float = 1e-12) -> float:
    """Non-central chi-squared CDF as the Poisson-weighted central-chi^2
    series (probability scale)."""
    logv = ncchi2_cdf_log(k, s, x, tol)
    return math.exp(logv) if math.isfinite(logv) else 0.0


def oracle_cdf(dist, x: float) -> float:
    """Closed-form CDF for the catalog distributions."""
    p = dist.params
    if dist.name == "gaussian":
        return gaussian_cdf(p["mu"], p["sigma"], x)
    if dist.name == "beta_prime":
        return beta_prime_cdf(p["alpha"], p["beta"], x)
    if dist.name == "noncentral_chi2":
        return ncchi2_cdf_series(p["k"], p["s"], x)
    raise DomainError(f"no closed CDF for {dist.name!r}")


def oracle_tail(dist, x: float) -> float:
    """Closed-form right tail for the catalog distributions."""
    if dist.name == "gaussian":
        p = dist.params
        return gaussian_tail(p["mu"], p["sigma"], x)
    return 1.0 - oracle_cdf(dist, x)


def normalization(dist, tol: float = 1e-10) -> float:
    """Integral of the PDF over the support (should be 1)."""
    support = dist.support
    if math.isfinite(support.lower) and math.isfinite(support.upper):
        mid = 0.5 * (support.lower + support.upper)
    elif math.isfinite(support.lower):
        mid = support.lower + 1.0
    elif math.isfinite(support.upper):
        mid = support.upper - 1.0
    else:
        mid = 0.0
    from .engine import TailSide

    left = tail_by_quadrature(dist, mid, TailSide.LEFT, tol)
    right = tail_by_quadrature(dist, mid, TailSide.RIGHT, tol)
    return left.value + right.value
