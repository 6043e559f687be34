"""Finite-blocklength AWGN converse bounds.

The converse rate at blocklength n, SNR Omega and error rate eps is
sandwiched between closed-form expressions built from the seed and
first-iterate bounds on two non-central chi-squared tails:

  missed detection: right tail of ncx2(n, n/Omega) at n*lambda,
  false alarm:      left tail of ncx2(n, n(1+Omega)/Omega)
                    at n*lambda/(1+Omega),

with lambda solved from "MD bound = eps".  Everything is assembled in
log space from exponentially scaled Bessel values; raw probabilities
like the false-alarm left tail underflow doubles already at n ~ 10^3,
while the log forms stay exact up to n ~ 10^7.

Also provides the closed-form asymptotic rate (Lambert-W lambda), the
normal approximation, and the Debye-side quantities the asymptotics are
derived from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import jet as J
from . import oracle, specfun
from .errors import BracketFailed, DomainError, OutOfValidity, ParamError, PoleEncountered
from .jet import jet_var

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class AwgnConfig:
    n: int
    omega: float
    eps: float

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 2):
            raise ParamError("blocklength n must be an integer >= 2")
        if not (self.omega > 0.0 and math.isfinite(self.omega)):
            raise ParamError("omega must be finite and > 0")
        if not 0.0 < self.eps < 1.0:
            raise ParamError("eps must be in (0, 1)")


@dataclass(frozen=True)
class AwgnPoint:
    config: AwgnConfig
    lambda_p0: float
    lambda_p1: float
    lambda_asym: float
    r_lower: float
    r_upper: float
    r_asym: float
    r_na: float
    capacity: float


def lambda0(omega: float) -> float:
    """Asymptotic threshold 1 + 1/Omega the solved lambda concentrates at."""
    return 1.0 + 1.0 / omega


def capacity(omega: float) -> float:
    """Infinite-blocklength capacity 0.5 log2(1 + Omega), bits/use."""
    return 0.5 * math.log2(1.0 + omega)


# ---------------------------------------------------------------------------
# Seed and first-iterate bounds on the two ncx2 tails, in log space


def _md_args(cfg: AwgnConfig, lam: float) -> tuple[float, float, float]:
    return float(cfg.n), cfg.n / cfg.omega, cfg.n * lam


def _fa_args(cfg: AwgnConfig, lam: float) -> tuple[float, float, float]:
    return float(cfg.n), cfg.n * (1.0 + cfg.omega) / cfg.omega, cfg.n * lam / (1.0 + cfg.omega)


def _log_seed(k: float, s: float, x: float, right: bool) -> float:
    """ln of the ncx2 seed bound 2 x f(x) / bracket, with
    bracket = x - k + 2 - u I-ratio (right tail, g = f) or
              k - x + u I-ratio     (left tail, g = x f)."""
    if x <= 0.0:
        raise OutOfValidity(f"argument x={x} not positive")
    u = math.sqrt(s * x)
    pair = specfun.log_bessel_i_scaled(0.5 * k, u)
    ur = u * pair.ratio
    bracket = (x - k + 2.0 - ur) if right else (k - x + ur)
    if bracket <= 0.0:
        raise OutOfValidity(f"seed denominator sign wrong at x={x} (bracket={bracket:.3e})")
    ln_f = (
        -_LN2
        - 0.5 * (x + s)
        + (0.25 * k - 0.5) * math.log(x / s)
        + u
        + pair.log_scaled_lower
    )
    return _LN2 + math.log(x) + ln_f - math.log(bracket)


def _log_first_iterate(k: float, s: float, x: float, right: bool) -> float:
    """ln of the first iterate f * P0/P0' (sign per side): ln f at x minus
    ln of -+(ln P0)', with the derivative taken through order-1 jets of
    the log quantities."""
    if x <= 0.0:
        raise OutOfValidity(f"argument x={x} not positive")
    xj = jet_var(x, 1)
    u = J.sqrt(s * xj)
    log_lower, log_upper = specfun.log_bessel_i_jet(0.5 * k, u)
    ln_f = -_LN2 - 0.5 * (xj + s) + (0.25 * k - 0.5) * (J.ln(xj) - math.log(s)) + u + log_lower
    ratio = J.exp(log_upper - log_lower)
    ur = u * ratio
    bracket = (xj - k + 2.0 - ur) if right else (k - xj + ur)
    if bracket.value <= 0.0:
        raise OutOfValidity(f"seed denominator sign wrong at x={x}")
    lp0 = _LN2 + J.ln(xj) + ln_f - J.ln(bracket)
    dlp0 = lp0.coeffs[1]
    sign = -1.0 if right else 1.0
    if sign * dlp0 <= 0.0:
        raise PoleEncountered(f"P0' has the wrong sign at x={x}")
    return ln_f.value - math.log(sign * dlp0)


def log_p0_md(cfg: AwgnConfig, lam: float) -> float:
    return _log_seed(*_md_args(cfg, lam), right=True)


def log_p1_md(cfg: AwgnConfig, lam: float) -> float:
    return _log_first_iterate(*_md_args(cfg, lam), right=True)


def log_p0_fa(cfg: AwgnConfig, lam: float) -> float:
    return _log_seed(*_fa_args(cfg, lam), right=False)


def log_p1_fa(cfg: AwgnConfig, lam: float) -> float:
    return _log_first_iterate(*_fa_args(cfg, lam), right=False)


def _as_probability(logv: float, what: str) -> float:
    if logv >= 0.0:
        raise OutOfValidity(f"{what} >= 1 (ln = {logv:.3e}); n below n0 or lambda at threshold")
    return math.exp(logv)


def p0_md(cfg: AwgnConfig, lam: float) -> float:
    """Upper bound on the missed-detection right tail at n*lambda."""
    return _as_probability(log_p0_md(cfg, lam), "P0,MD")


def p1_md(cfg: AwgnConfig, lam: float) -> float:
    """Lower bound on the missed-detection right tail at n*lambda."""
    return _as_probability(log_p1_md(cfg, lam), "P1,MD")


def p0_fa(cfg: AwgnConfig, lam: float) -> float:
    """Upper bound on the false-alarm left tail at n*lambda/(1+Omega)."""
    return _as_probability(log_p0_fa(cfg, lam), "P0,FA")


def p1_fa(cfg: AwgnConfig, lam: float) -> float:
    """Lower bound on the false-alarm left tail at n*lambda/(1+Omega)."""
    return _as_probability(log_p1_fa(cfg, lam), "P1,FA")


# ---------------------------------------------------------------------------
# Asymptotics


def lambda_asymptotic(cfg: AwgnConfig) -> float:
    """Two-term large-n solution of the MD equation, via Lambert W."""
    w = specfun.lambert_w0(1.0 / (2.0 * math.pi * cfg.eps * cfg.eps))
    return lambda0(cfg.omega) + math.sqrt(2.0 * (cfg.omega + 2.0) / cfg.omega * w / cfg.n)


def rate_formula(omega: float, lam: float) -> float:
    """The closed-form rate expression at a given lambda; equals the
    capacity exactly at lam = lambda0 (both correction terms vanish)."""
    root = math.sqrt(1.0 + 4.0 * lam / omega)
    return (
        capacity(omega)
        - 0.5 * math.log2(2.0 * lam / (1.0 + root))
        + (1.0 + 1.0 / omega + lam / (1.0 + omega) - root) / (2.0 * _LN2)
    )


def rate_asymptotic(cfg: AwgnConfig) -> float:
    """Closed-form asymptotic converse rate, bits/use."""
    return rate_formula(cfg.omega, lambda_asymptotic(cfg))


def normal_approximation(cfg: AwgnConfig) -> float:
    """Gaussian-dispersion rate approximation, bits/use."""
    om, n = cfg.omega, cfg.n
    log2e = 1.0 / _LN2
    v = om * (om + 2.0) / (2.0 * (om + 1.0) ** 2) * log2e * log2e
    return (
        capacity(om)
        - math.sqrt(v / n) * specfun.gaussian_q_inverse(cfg.eps)
        + math.log2(n) / (2.0 * n)
    )


# ---------------------------------------------------------------------------
# Solving the missed-detection equation for lambda


def solve_lambda(cfg: AwgnConfig, which: str = "p0") -> float:
    """lambda with bound(n*lambda) = eps, by bisection on the log bound.

    The bracket is seeded from the asymptotic correction; both endpoints
    are pushed until they straddle ln(eps).  The bound decreases in
    lambda and blows up at the validity threshold just above
    lambda0 = 1 + 1/Omega, so the low endpoint always reaches a value
    above eps when n >= n0.
    """
    if which not in ("p0", "p1"):
        raise DomainError("which must be 'p0' or 'p1'")
    log_bound = log_p0_md if which == "p0" else log_p1_md
    target = math.log(cfg.eps)
    lam_0 = lambda0(cfg.omega)
    corr = lambda_asymptotic(cfg) - lam_0

    def eval_log(lam: float) -> float | None:
        try:
            return log_bound(cfg, lam)
        except (OutOfValidity, PoleEncountered):
            return None

    lo = lam_0 + corr / 50.0
    v_lo = eval_log(lo)
    for _ in range(200):
        if v_lo is not None and v_lo >= target:
            break
        if v_lo is None:
            lo = lam_0 + (lo - lam_0) * 1.5  # below validity: move up
        else:
            lo = lam_0 + (lo - lam_0) * 0.25  # above target already: move toward the pole
        if lo - lam_0 > 1e12 * corr or lo - lam_0 < 1e-14 * lam_0:
            raise BracketFailed(f"no valid low bracket endpoint for {which} at n={cfg.n}")
        v_lo = eval_log(lo)
    else:
        raise BracketFailed(f"eps unreachable from below for {which} at n={cfg.n}")

    hi = lam_0 + 20.0 * corr
    v_hi = eval_log(hi)
    for _ in range(60):
        if v_hi is not None and v_hi <= target:
            break
        hi = lam_0 + (hi - lam_0) * 2.0
        v_hi = eval_log(hi)
    else:
        raise BracketFailed(f"eps unreachable from above for {which} at n={cfg.n}")

    if hi <= lo:
        raise BracketFailed(f"degenerate bracket for {which} at n={cfg.n}")

    best, best_err = lo, abs(v_lo - target)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket at ulp width
            break
        v = eval_log(mid)
        if v is None:
            lo = mid
            continue
        err = abs(v - target)
        if err < best_err:
            best, best_err = mid, err
        if err <= 1e-10:
            return mid
        if v > target:
            lo = mid
        else:
            hi = mid
    return best


def oracle_converse(cfg: AwgnConfig, tol: float = 1e-11) -> float:
    """Exact converse rate from the series CDF oracle (costly; meant for
    n up to a few thousand): solve 1 - F_MD(n lambda) = eps, then
    -(1/n) log2 F_FA(n lambda/(1+Omega))."""
    n, om, eps = cfg.n, cfg.omega, cfg.eps
    s_md = n / om

    def md_tail(lam: float) -> float:
        return 1.0 - oracle.ncchi2_cdf_series(n, s_md, n * lam, tol)

    lam_0 = lambda0(om)
    corr = lambda_asymptotic(cfg) - lam_0
    lo, hi = lam_0 + corr * 1e-3, lam_0 + 30.0 * corr
    for _ in range(40):
        if md_tail(lo) > eps:
            break
        lo = lam_0 + (lo - lam_0) * 0.25
    else:
        raise BracketFailed(f"oracle MD tail below eps all the way to lambda0 at n={n}")
    for _ in range(40):
        if md_tail(hi) < eps:
            break
        hi = lam_0 + (hi - lam_0) * 2.0
    else:
        raise BracketFailed(f"oracle MD tail above eps on the whole bracket at n={n}")
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if md_tail(mid) > eps:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    s_fa = n * (1.0 + om) / om
    ln_f_fa = oracle.ncchi2_cdf_log(n, s_fa, n * lam / (1.0 + om), tol)
    return -ln_f_fa / (n * _LN2)


def converse_bounds(cfg: AwgnConfig) -> AwgnPoint:
    """Both converse bounds plus the closed-form approximations.

    r_lower uses P0 on both sides (lambda from P0,MD = eps into P0,FA),
    r_upper uses P1 on both sides, per the published pairing.
    """
    lam_p0 = solve_lambda(cfg, "p0")
    lam_p1 = solve_lambda(cfg, "p1")
    r_lower = -log_p0_fa(cfg, lam_p0) / (cfg.n * _LN2)
    r_upper = -log_p1_fa(cfg, lam_p1) / (cfg.n * _LN2)
    return AwgnPoint(
        config=cfg,
        lambda_p0=lam_p0,
        lambda_p1=lam_p1,
        lambda_asym=lambda_asymptotic(cfg),
        r_lower=r_lower,
        r_upper=r_upper,
        r_asym=rate_asymptotic(cfg),
        r_na=normal_approximation(cfg),
        capacity=capacity(cfg.omega),
    )


# ---------------------------------------------------------------------------
# Debye-side quantities behind the asymptotics


def debye_eta(z: float) -> float:
    """eta(z) = sqrt(1+z^2) + ln(z/(1+sqrt(1+z^2)))."""
    if z <= 0.0:
        raise DomainError("eta needs z > 0")
    w = math.sqrt(1.0 + z * z)
    return w + math.log(z / (1.0 + w))


def _phi(omega: float, lam: float) -> float:
    return (
        -(1.0 + lam * omega) / (2.0 * omega)
        + 0.25 * math.log(lam * omega)
        + 0.5 * debye_eta(2.0 * math.sqrt(lam / omega))
    )


def _phi_prime(omega: float, lam: float) -> float:
    s = math.sqrt(1.0 + 4.0 * lam / omega)
    return -0.5 + 1.0 / (4.0 * lam) + s / (4.0 * lam)


def _phi_second(omega: float, lam: float) -> float:
    s = math.sqrt(1.0 + 4.0 * lam / omega)
    return -(1.0 + s) / (4.0 * lam * lam) + 1.0 / (2.0 * lam * omega * s)


def _j_prime(omega: float, lam: float) -> float:
    s = math.sqrt(1.0 + 4.0 * lam / omega)
    return -1.0 + (2.0 / omega) / (1.0 + s) - (2.0 * lam / omega) * (2.0 / (omega * s)) / (1.0 + s) ** 2


def debye_internals(omega: float, lam: float | None = None, z: float | None = None) -> dict:
    """The quantities the asymptotic lambda derivation is built from,
    evaluated for test consumption.

    eps_balance is the scaled-displacement equation: eps as a function
    of u = sqrt(n)(lambda - lambda0).
    """
    if omega <= 0.0:
        raise DomainError("omega must be > 0")
    if lam is None and z is None:
        lam = lambda0(omega)
    if z is None:
        z = 2.0 * math.sqrt(lam / omega)
    if lam is None:
        lam = 0.25 * z * z * omega
    lam_0 = lambda0(omega)
    a = omega / (4.0 * (omega + 2.0))

    def eps_balance(u: float) -> float:
        return math.sqrt((omega + 2.0) / (math.pi * omega)) * math.exp(-a * u * u) / u

    return {
        "lambda0": lam_0,
        "eta": debye_eta(z),
        "phi": _phi(omega, lam),
        "phi_prime": _phi_prime(omega, lam),
        "phi2_at_lambda0": _phi_second(omega, lam_0),
        "jprime_at_lambda0": _j_prime(omega, lam_0),
        "eps_balance": eps_balance,
    }


# ---------------------------------------------------------------------------
# n0 detection

_N0_CACHE: dict[tuple[float, float, str], int] = {}


def find_n0(omega: float, eps: float, which: str = "p0") -> int:
    """Smallest even blocklength where the MD bound is valid and below
    one at the asymptotic lambda (the bound 'goes beyond one' for
    smaller n).  Cached per (omega, eps, which)."""
    key = (omega, eps, which)
    cached = _N0_CACHE.get(key)
    if cached is not None:
        return cached
    log_bound = log_p0_md if which == "p0" else log_p1_md

    def valid(n: int) -> bool:
        cfg = AwgnConfig(n, omega, eps)
        try:
            return log_bound(cfg, lambda_asymptotic(cfg)) < 0.0
        except (OutOfValidity, PoleEncountered):
            return False

    n = 2
    while not valid(n):
        n *= 2
        if n > 1 << 30:
            raise BracketFailed(f"no valid n found for omega={omega}, eps={eps}")
    lo = n // 2
    hi = n
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if valid(mid):
            hi = mid
        else:
            lo = mid
    _N0_CACHE[key] = hi
    return hi
