"""Truncated Taylor-series ("jet") arithmetic.

A jet stores the normalized Taylor coefficients of a scalar function at
an anchor point: coeffs[k] = F^(k)(x)/k!.  All higher-order derivatives
that the bound iteration needs are obtained by composing jets, never by
symbolic algebra or repeated numeric differentiation.

Coefficient recurrences live in a kernel module with two interchangeable
implementations: a compiled extension (tailkit._kernels, built from
_kernels.pyx) and a pure-Python fallback (_kernels_py).  The compiled one
is preferred when importable; set TAILKIT_PURE_PYTHON=1 to force the
fallback.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .errors import DivisionByZeroJet, DomainError, OrderExhausted

if os.environ.get("TAILKIT_PURE_PYTHON"):
    from . import _kernels_py as _k
else:
    try:
        from . import _kernels as _k  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _k

#: Which kernel backend is active ("c" or "python").
KERNEL_BACKEND = _k.BACKEND

#: Hard cap on the jet order; iteration depth <= 8 and each engine
#: iteration consumes one order, so 16 leaves ample headroom.
MAX_ORDER = 16

#: Default floor on |divisor leading coefficient| below which division
#: signals a pole instead of producing garbage.
DIV_FLOOR = 1e-300


@dataclass(frozen=True)
class Jet:
    """Immutable truncated Taylor expansion at ``anchor``.

    coeffs[k] is the k-th derivative divided by k!; the order is
    len(coeffs) - 1.
    """

    anchor: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise DomainError("jet needs at least one coefficient")
        if len(self.coeffs) - 1 > MAX_ORDER:
            raise DomainError(f"jet order {len(self.coeffs) - 1} exceeds cap {MAX_ORDER}")
        for c in self.coeffs:
            if not math.isfinite(c):
                raise DomainError("non-finite jet coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> float:
        """Order-0 truncation: plain function evaluation."""
        return self.coeffs[0]

    def derivative(self, k: int = 1) -> float:
        """k-th derivative at the anchor (k <= order)."""
        if k > self.order:
            raise OrderExhausted(f"derivative {k} of an order-{self.order} jet")
        return self.coeffs[k] * math.factorial(k)

    # Operator sugar; scalars are promoted to constant jets.
    def __add__(self, other):
        return jet_arith(self, _promote(other, self), "add")

    __radd__ = __add__

    def __sub__(self, other):
        return jet_arith(self, _promote(other, self), "sub")

    def __rsub__(self, other):
        return jet_arith(_promote(other, self), self, "sub")

    def __mul__(self, other):
        return jet_arith(self, _promote(other, self), "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return jet_arith(self, _promote(other, self), "div")

    def __rtruediv__(self, other):
        return jet_arith(_promote(other, self), self, "div")

    def __neg__(self):
        return Jet(self.anchor, _k.scale(self.coeffs, -1.0))


def _promote(x, like: Jet) -> Jet:
    if isinstance(x, Jet):
        return x
    return jet_const(float(x), like.anchor, like.order)


def jet_const(c: float, anchor: float, order: int) -> Jet:
    """Jet of the constant function c."""
    if order < 0:
        raise DomainError("order must be >= 0")
    return Jet(anchor, (float(c),) + (0.0,) * order)


def jet_var(anchor: float, order: int) -> Jet:
    """Jet of the identity F(x) = x."""
    if order < 0:
        raise DomainError("order must be >= 0")
    if order == 0:
        return Jet(anchor, (float(anchor),))
    return Jet(anchor, (float(anchor), 1.0) + (0.0,) * (order - 1))


def _check_compatible(a: Jet, b: Jet):
    if a.anchor != b.anchor:
        raise DomainError(f"jet anchors differ: {a.anchor} vs {b.anchor}")
    if a.order != b.order:
        raise DomainError(f"jet orders differ: {a.order} vs {b.order}")


def jet_arith(a: Jet, b: Jet, op: str, div_floor: float = DIV_FLOOR) -> Jet:
    """Coefficient-wise arithmetic on two jets sharing anchor and order."""
    _check_compatible(a, b)
    if op == "add":
        return Jet(a.anchor, _k.add(a.coeffs, b.coeffs))
    if op == "sub":
        return Jet(a.anchor, _k.sub(a.coeffs, b.coeffs))
    if op == "mul":
        return Jet(a.anchor, _k.mul(a.coeffs, b.coeffs))
    if op == "div":
        if abs(b.coeffs[0]) < div_floor:
            raise DivisionByZeroJet(
                f"divisor leading coefficient {b.coeffs[0]!r} below floor at x={a.anchor!r}"
            )
        return Jet(a.anchor, _k.div(a.coeffs, b.coeffs))
    raise DomainError(f"unknown op {op!r}")


def jet_elementary(a: Jet, fn: str, p: float | None = None) -> Jet:
    """Compose an elementary function with a jet: exp, ln, sqrt or pow(p)."""
    if fn == "exp":
        if a.coeffs[0] > 709.0:  # exp overflow guard at the value level
            raise DomainError(f"exp of jet value {a.coeffs[0]} overflows")
        return Jet(a.anchor, _k.exp(a.coeffs))
    if fn == "ln":
        if a.coeffs[0] <= 0.0:
            raise DomainError(f"ln of non-positive jet value {a.coeffs[0]}")
        return Jet(a.anchor, _k.ln(a.coeffs))
    if fn == "sqrt":
        if a.coeffs[0] <= 0.0:
            raise DomainError(f"sqrt of non-positive jet value {a.coeffs[0]}")
        return Jet(a.anchor, _k.sqrt(a.coeffs))
    if fn == "pow":
        if p is None:
            raise DomainError("pow needs an exponent")
        if a.coeffs[0] <= 0.0:
            raise DomainError(f"pow of non-positive jet value {a.coeffs[0]}")
        return Jet(a.anchor, _k.powr(a.coeffs, float(p)))
    raise DomainError(f"unknown elementary function {fn!r}")


def jet_shift_derivative(a: Jet) -> Jet:
    """Jet of F' at the same anchor, one order lower."""
    if a.order == 0:
        raise OrderExhausted("cannot differentiate an order-0 jet")
    return Jet(a.anchor, tuple((k + 1) * a.coeffs[k + 1] for k in range(a.order)))


# Short aliases used heavily inside the library.
def exp(a: Jet) -> Jet:
    return jet_elementary(a, "exp")


def ln(a: Jet) -> Jet:
    return jet_elementary(a, "ln")


def sqrt(a: Jet) -> Jet:
    return jet_elementary(a, "sqrt")


def powj(a: Jet, p: float) -> Jet:
    return jet_elementary(a, "pow", p)
