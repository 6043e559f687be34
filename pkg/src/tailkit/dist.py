"""Distribution catalog: Gaussian, beta prime, non-central chi-squared.

Each catalog entry exposes a jet-valued PDF (built from jet elementary
operations so the engine can differentiate it to any order), support
metadata, and hardcoded closed-form iterates for cross-validation of
the engine.

PDF jets are assembled in log space and exponentiated at the end; the
log-jet builder itself is kept on the spec (``log_pdf_jet``) because the
engine's iterates are formed from log quantities to stay finite far out
in the tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import jet as J
from . import specfun
from .errors import DomainError, ParamError
from .jet import Jet, jet_const, jet_var

_LN_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

#: x2/x3 validity edge of the printed Gaussian P2/P3 formulas, in units
#: of sigma above the mean (P2's denominator root and P3's positivity
#: root coincide at sqrt(sqrt(2)-1)).
GAUSSIAN_X2_SIGMA = math.sqrt(math.sqrt(2.0) - 1.0)


@dataclass(frozen=True)
class SupportInterval:
    lower: float
    upper: float
    lower_open: bool = True
    upper_open: bool = True

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ParamError(f"empty support [{self.lower}, {self.upper}]")

    def contains_open(self, x: float) -> bool:
        return self.lower < x < self.upper


@dataclass(frozen=True)
class DistributionSpec:
    name: str
    params: dict
    support: SupportInterval
    pdf_jet: Callable[[float, int], Jet]
    log_pdf: Optional[Callable[[float], float]] = None
    log_pdf_jet: Optional[Callable[[float, int], Jet]] = field(default=None, repr=False)


def _spec_from_log_jet(name, params, support, log_jet):
    def pdf_jet(anchor: float, order: int) -> Jet:
        return J.exp(log_jet(anchor, order))

    def log_pdf(x: float) -> float:
        return log_jet(x, 0).value

    return DistributionSpec(name, params, support, pdf_jet, log_pdf, log_jet)


def make_gaussian(mu: float, sigma: float) -> DistributionSpec:
    if not (sigma > 0.0 and math.isfinite(sigma) and math.isfinite(mu)):
        raise ParamError("gaussian needs finite mu and sigma > 0")

    ln_norm = math.log(sigma) + _LN_SQRT_2PI

    def log_jet(anchor: float, order: int) -> Jet:
        x = jet_var(anchor, order)
        y = (x - mu) * (1.0 / sigma)
        return -0.5 * (y * y) - ln_norm

    support = SupportInterval(-math.inf, math.inf)
    return _spec_from_log_jet("gaussian", {"mu": mu, "sigma": sigma}, support, log_jet)


def make_beta_prime(alpha: float, beta: float) -> DistributionSpec:
    if not (alpha > 0.0 and beta > 0.0):
        raise ParamError("beta prime needs alpha, beta > 0")

    ln_b = specfun.log_beta(alpha, beta)

    def log_jet(anchor: float, order: int) -> Jet:
        if anchor <= 0.0:
            raise DomainError("beta prime PDF jet needs anchor > 0")
        x = jet_var(anchor, order)
        return (alpha - 1.0) * J.ln(x) - (alpha + beta) * J.ln(1.0 + x) - ln_b

    support = SupportInterval(0.0, math.inf)
    return _spec_from_log_jet("beta_prime", {"alpha": alpha, "beta": beta}, support, log_jet)


def make_noncentral_chi2(k: float, s: float) -> DistributionSpec:
    """Non-central chi-squared with k degrees of freedom, non-centrality s.

    The Bessel order of the PDF is k/2-1; for k >= 4 the PDF jet goes
    through the scaled Bessel jets (order >= 1 contract), below that it
    falls back to the Poisson-mixture series of central chi-squared
    densities.
    """
    if not (k > 0.0 and s >= 0.0):
        raise ParamError("noncentral chi2 needs k > 0, s >= 0")

    support = SupportInterval(0.0, math.inf)
    params = {"k": k, "s": s}

    if s == 0.0:
        ln_norm = 0.5 * k * math.log(2.0) + math.lgamma(0.5 * k)

        def log_jet0(anchor: float, order: int) -> Jet:
            if anchor <= 0.0:
                raise DomainError("chi2 PDF jet needs anchor > 0")
            x = jet_var(anchor, order)
            return (0.5 * k - 1.0) * J.ln(x) - 0.5 * x - ln_norm

        return _spec_from_log_jet("noncentral_chi2", params, support, log_jet0)

    if k >= 4.0:

        def log_jet(anchor: float, order: int) -> Jet:
            if anchor <= 0.0:
                raise DomainError("noncentral chi2 PDF jet needs anchor > 0")
            x = jet_var(anchor, order)
            u = J.sqrt(s * x)
            log_lower, _ = specfun.log_bessel_i_jet(0.5 * k, u)
            # ln f = -ln2 - (x+s)/2 + (k/4 - 1/2) ln(x/s) + u + ln Ie_{k/2-1}
            return (
                -math.log(2.0)
                - 0.5 * (x + s)
                + (0.25 * k - 0.5) * (J.ln(x) - math.log(s))
                + u
                + log_lower
            )

        return _spec_from_log_jet("noncentral_chi2", params, support, log_jet)

    # k < 4: Poisson mixture of central chi-squared densities
    half_s = 0.5 * s
    j_cap = int(half_s + 40.0 * math.sqrt(half_s + 1.0) + 60.0)

    def pdf_jet(anchor: float, order: int) -> Jet:
        if anchor <= 0.0:
            raise DomainError("noncentral chi2 PDF jet needs anchor > 0")
        x = jet_var(anchor, order)
        expo = J.exp(-0.5 * x)
        total = jet_const(0.0, anchor, order)
        pois_mass = 0.0
        for j in range(j_cap + 1):
            lw = -half_s + j * math.log(half_s) - math.lgamma(j + 1.0)
            dof = 0.5 * k + j
            c = math.exp(lw - dof * math.log(2.0) - math.lgamma(dof))
            if c > 0.0:
                total = total + c * J.powj(x, dof - 1.0)
            pois_mass += math.exp(lw)
            if 1.0 - pois_mass < 1e-17:
                break
        return total * expo

    def log_pdf(x: float) -> float:
        v = pdf_jet(x, 0).value
        if v <= 0.0:
            raise DomainError("log of vanished mixture PDF")
        return math.log(v)

    def log_jet_mix(anchor: float, order: int) -> Jet:
        return J.ln(pdf_jet(anchor, order))

    return DistributionSpec("noncentral_chi2", params, support, pdf_jet, log_pdf, log_jet_mix)


# ---------------------------------------------------------------------------
# Printed closed-form iterates (cross-validation targets for the engine)

# Standard-case rational factors q_i(y) with P_i(x) = phi(y) q_i(y),
# y = (x-mu)/sigma; q_{i+1} = q_i/(y q_i - q_i') reproduces the printed
# P_0..P_3 exactly.
def _gauss_q(i: int, y: float) -> float:
    if i == 0:
        return 1.0 / y
    if i == 1:
        return y / (1.0 + y * y)
    y2 = y * y
    if i == 2:
        return (y2 * y + y) / (y2 * y2 + 2.0 * y2 - 1.0)
    if i == 3:
        num = y * (y2 ** 3 + 3.0 * y2 ** 2 + y2 - 1.0)
        den = (1.0 + y2 * y2) * (1.0 + 4.0 * y2 + y2 * y2)
        return num / den
    raise DomainError("gaussian closed iterates printed only for i in 0..3")


def gaussian_closed_iterates(mu: float, sigma: float, i: int, x: float) -> float:
    """The printed Gaussian right-tail iterates P_0..P_3."""
    if sigma <= 0.0:
        raise ParamError("sigma must be > 0")
    if i not in (0, 1, 2, 3):
        raise DomainError("i must be in 0..3")
    y = (x - mu) / sigma
    threshold = 0.0 if i <= 1 else GAUSSIAN_X2_SIGMA
    if y <= threshold:
        raise DomainError(f"P_{i} formula invalid at x={x} (needs (x-mu)/sigma > {threshold})")
    phi = math.exp(-0.5 * y * y) / math.sqrt(2.0 * math.pi)
    return phi * _gauss_q(i, y)


def beta_prime_closed_iterates(alpha: float, beta: float, i: int, x: float) -> float:
    """The printed beta prime right-tail iterates P_0 and P_1 (log-space)."""
    if alpha <= 0.0 or beta <= 0.0:
        raise ParamError("alpha, beta must be > 0")
    if i not in (0, 1):
        raise DomainError("i must be 0 or 1")
    if x <= alpha / beta:
        raise DomainError(f"formula invalid at x={x} (needs x > alpha/beta)")
    ln_core = alpha * math.log(x) + (1.0 - alpha - beta) * math.log1p(x) - specfun.log_beta(alpha, beta)
    edge = beta * x - alpha
    if i == 0:
        return math.exp(ln_core - math.log(edge))
    den = alpha * alpha + beta * beta * x * x + x * (alpha + beta - 2.0 * alpha * beta)
    return math.exp(ln_core + math.log(edge) - math.log(den))


def ncchi2_left_closed_p0(k: float, s: float, x: float) -> float:
    """Closed-form left-tail seed for the non-central chi-squared
    (g = x f), evaluated in log space.

    P0(x) = e^{-(s+x)/2} sqrt(sx) (x/s)^{k/4} I_{k/2-1}(u)^2
            / ((k - x) I_{k/2-1}(u) + u I_{k/2}(u)),  u = sqrt(sx).
    """
    if k < 4.0 or s <= 0.0:
        raise ParamError("closed-form left seed needs k >= 4 and s > 0")
    if x <= 0.0:
        raise DomainError("needs x > 0")
    u = math.sqrt(s * x)
    pair = specfun.log_bessel_i_scaled(0.5 * k, u)
    bracket = (k - x) + u * pair.ratio
    if bracket <= 0.0:
        raise DomainError(f"left seed pole/out of validity at x={x}")
    ln_p0 = (
        -0.5 * (s + x)
        + 0.5 * math.log(s * x)
        + 0.25 * k * math.log(x / s)
        + u
        + pair.log_scaled_lower
        - math.log(bracket)
    )
    return math.exp(ln_p0)
