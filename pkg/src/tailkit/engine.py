"""Seed construction, bound iteration, and numeric classification.

The seed P0 = -+ f g/g' (sign - for the right tail, + for the left) and
every iterate P_{i+1} = -+ f P_i/P_i' are represented as jets of ln P_i:
the iteration only ever needs (ln P_i)' and ln f, so the log form stays
finite arbitrarily far into the tails where raw PDF values underflow.

Classification is numeric and honest about it: the conditions
("for all x > x0") are verified on a dense grid over a stated window,
each sign change is refined by bisection, and the result is reported as
"numerically verified on [a, b] with tolerance tol".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import jet as J
from .dist import DistributionSpec
from .errors import (
    DivisionByZeroJet,
    DomainError,
    OrderExhausted,
    PoleEncountered,
    SeedIncompatible,
    SeedInvalid,
    WindowTooSmall,
)
from .jet import MAX_ORDER, Jet, jet_shift_derivative, jet_var


#: Default absolute tolerance on condition residuals (they are products
#: of PDFs and decay fast; an absolute floor avoids relative blowup
#: where f ~ 0).
DEFAULT_TOL = 1e-12


class TailSide(Enum):
    RIGHT = "right"
    LEFT = "left"


class SeedKind(Enum):
    PDF = "pdf"                  # g = f
    SHIFTED_PDF = "shifted-pdf"  # g = (x - l) f
    DIRECT_H = "direct-h"        # user h(x), Corollary-style candidate
    CUSTOM_G = "custom-g"        # user jet evaluator for g


class Verdict(Enum):
    UPPER = "U"
    LOWER = "L"
    INVALID = "X"
    EXACT = "E"


@dataclass(frozen=True)
class GridSpec:
    points: int = 512
    spacing: str = "geometric"  # or "linear"

    def __post_init__(self):
        if self.points < 64:
            raise DomainError("grid needs at least 64 points")
        if self.spacing not in ("geometric", "linear"):
            raise DomainError(f"unknown spacing {self.spacing!r}")


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    threshold: float
    tightness_ok: Optional[bool]
    residuals: tuple[float, ...]
    limit_ok: bool
    window: tuple[float, float]
    tol: float

    def describe(self) -> str:
        a, b = self.window
        return (
            f"{self.verdict.name} from x={self.threshold:.12g}, numerically verified "
            f"on [{a:.6g}, {b:.6g}] with tolerance {self.tol:g}"
        )


@dataclass(frozen=True, eq=False)
class BoundIterate:
    """One member of the iterative bound sequence.

    ``evaluator`` returns the jet of P_i itself (may under/overflow far
    out in the tails); ``log_evaluator`` returns the jet of ln P_i and
    is what the engine uses internally.
    """

    index: int
    side: TailSide
    evaluator: Callable[[float, int], Jet]
    log_evaluator: Callable[[float, int], Jet]
    dist: DistributionSpec
    seed: SeedKind
    prev: Optional["BoundIterate"] = None

    def value(self, x: float) -> float:
        return self.evaluator(x, 0).value


def _log_pdf_jet(dist: DistributionSpec, anchor: float, order: int) -> Jet:
    if dist.log_pdf_jet is not None:
        return dist.log_pdf_jet(anchor, order)
    return J.ln(dist.pdf_jet(anchor, order))


def _truncate(j: Jet, order: int) -> Jet:
    return Jet(j.anchor, j.coeffs[: order + 1])


def _as_pole(exc: Exception, where: str) -> PoleEncountered:
    return PoleEncountered(f"{where}: {exc}")


def make_seed(
    dist: DistributionSpec,
    seed: SeedKind,
    side: TailSide,
    g_jet: Callable[[float, int], Jet] | None = None,
    h_jet: Callable[[float, int], Jet] | None = None,
) -> BoundIterate:
    """Assemble the seed iterate P0 from the chosen g (no classification
    yet)."""
    sign = -1.0 if side is TailSide.RIGHT else 1.0

    if seed is SeedKind.SHIFTED_PDF:
        lo = dist.support.lower
        if not math.isfinite(lo):
            raise SeedIncompatible(
                f"shifted-pdf seed needs a finite lower support endpoint, got {lo}"
            )
    if seed is SeedKind.CUSTOM_G and g_jet is None:
        raise SeedIncompatible("custom-g seed needs a g jet evaluator")
    if seed is SeedKind.DIRECT_H and h_jet is None:
        raise SeedIncompatible("direct-h seed needs an h jet evaluator")

    def log_eval(anchor: float, order: int) -> Jet:
        try:
            if seed is SeedKind.DIRECT_H:
                return J.ln(h_jet(anchor, order))
            if seed is SeedKind.PDF:
                lf = _log_pdf_jet(dist, anchor, order + 1)
                lfd = jet_shift_derivative(lf)
                if sign * lfd.value <= 0.0:
                    raise PoleEncountered(
                        f"pdf seed needs f {'decreasing' if sign < 0 else 'increasing'} at x={anchor}"
                    )
                return _truncate(lf, order) - J.ln(sign * lfd)
            if seed is SeedKind.SHIFTED_PDF:
                lo = dist.support.lower
                if anchor <= lo:
                    raise PoleEncountered(f"anchor {anchor} at/below support endpoint {lo}")
                lf = _log_pdf_jet(dist, anchor, order + 1)
                lfd = jet_shift_derivative(lf)
                x = jet_var(anchor, order)
                t = 1.0 + (x - lo) * _truncate(lfd, order)
                if sign * t.value <= 0.0:
                    raise PoleEncountered(f"shifted seed denominator sign at x={anchor}")
                return J.ln(x - lo) + _truncate(lf, order) - J.ln(sign * t)
            # CUSTOM_G
            g = g_jet(anchor, order + 1)
            gd = jet_shift_derivative(g)
            if sign * gd.value <= 0.0:
                raise PoleEncountered(f"custom g not strictly {'decreasing' if sign < 0 else 'increasing'} at x={anchor}")
            lf = _log_pdf_jet(dist, anchor, order)
            return lf + J.ln(_truncate(g, order)) - J.ln(sign * gd)
        except PoleEncountered:
            raise
        except (DomainError, DivisionByZeroJet, OrderExhausted, OverflowError, ValueError) as exc:
            raise _as_pole(exc, f"seed at x={anchor}") from exc

    def evaluator(anchor: float, order: int) -> Jet:
        return J.exp(log_eval(anchor, order))

    return BoundIterate(0, side, evaluator, log_eval, dist, seed)


def iterate(prev: BoundIterate) -> BoundIterate:
    """P_{i+1} = -+ f P_i/P_i' as a fresh iterate (one derivative shift
    and a division, done on the log jets: ln P_{i+1} = ln f - ln(-+ (ln P_i)'))."""
    new_index = prev.index + 1
    sign = -1.0 if prev.side is TailSide.RIGHT else 1.0

    def log_eval(anchor: float, order: int) -> Jet:
        if order + new_index + 1 > MAX_ORDER:
            raise DomainError(
                f"order {order} at iterate {new_index} exceeds the jet cap {MAX_ORDER}"
            )
        lp_prev = prev.log_evaluator(anchor, order + 1)
        lpd = jet_shift_derivative(lp_prev)
        if sign * lpd.value <= 0.0:
            raise PoleEncountered(
                f"P_{prev.index}' has the wrong sign at x={anchor} (iterate pole)"
            )
        try:
            lf = _log_pdf_jet(prev.dist, anchor, order)
            return lf - J.ln(sign * lpd)
        except (DomainError, DivisionByZeroJet, OverflowError, ValueError) as exc:
            raise _as_pole(exc, f"iterate {new_index} at x={anchor}") from exc

    def evaluator(anchor: float, order: int) -> Jet:
        return J.exp(log_eval(anchor, order))

    return BoundIterate(new_index, prev.side, evaluator, log_eval, prev.dist, prev.seed, prev)


# ---------------------------------------------------------------------------
# Grid classification


def grid_points(window: tuple[float, float], grid: GridSpec, side: TailSide) -> np.ndarray:
    """Evaluation grid on [a, b], geometric spacing clustered toward the
    threshold end (window start for the right tail, window end for the
    left)."""
    a, b = window
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise DomainError(f"bad window ({a}, {b})")
    n = grid.points
    if grid.spacing == "linear":
        return np.linspace(a, b, n)
    offs = np.geomspace(1e-6, 1.0, n) * (b - a)
    if side is TailSide.RIGHT:
        return a + offs
    return b - offs[::-1]


@dataclass
class _PointEval:
    defined: bool
    mono_ok: bool = False
    up_ok: bool = False
    lo_ok: bool = False
    value: float = math.nan
    residual: float = math.nan


def _safe_exp(x: float) -> float:
    if x > 700.0:
        return math.exp(700.0)
    if x < -745.0:
        return 0.0
    return math.exp(x)


def _eval_conditions(it: BoundIterate, x: float, tol: float) -> _PointEval:
    """Positivity, monotonicity, and the governing sign condition at one
    grid point."""
    sign = -1.0 if it.side is TailSide.RIGHT else 1.0
    try:
        lp = it.log_evaluator(x, 1)
        lf = _log_pdf_jet(it.dist, x, 0)
    except PoleEncountered:
        return _PointEval(False)
    lpd = lp.coeffs[1]
    p = _safe_exp(lp.coeffs[0])
    f = _safe_exp(lf.coeffs[0])
    dp = p * lpd
    # monotonicity: P' < 0 (right) / P' > 0 (left)
    mono = (lpd < 0.0) if it.side is TailSide.RIGHT else (lpd > 0.0)
    if it.side is TailSide.RIGHT:
        resid = dp + f       # <= tol for upper, >= -tol for lower
        up = resid <= tol
        lo = resid >= -tol
    else:
        resid = dp - f       # >= -tol for upper, <= tol for lower
        up = resid >= -tol
        lo = resid <= tol
    return _PointEval(True, mono, up, lo, p, resid)


def _refine_boundary(pred, x_bad: float, x_good: float, tol_x: float) -> float:
    """Bisect the predicate boundary between a failing and a passing
    abscissa."""
    for _ in range(200):
        if abs(x_good - x_bad) <= tol_x:
            break
        mid = 0.5 * (x_bad + x_good)
        if pred(mid):
            x_good = mid
        else:
            x_bad = mid
    return x_good


def classify(
    it: BoundIterate,
    window: tuple[float, float],
    grid: GridSpec = GridSpec(),
    tol: float = DEFAULT_TOL,
    limit_tol: float = 1e-3,
) -> Classification:
    """Verdict, validity threshold, and diagnostics for one iterate.

    The conditions are evaluated on the grid; the verified region is the
    maximal contiguous run touching the support-edge end of the window
    (the bounds hold from a threshold onward), and its boundary is
    refined by bisection to 1e-10 window-relative.
    """
    a, b = window
    if not it.dist.support.contains_open(a) or not it.dist.support.contains_open(b):
        raise DomainError(f"window ({a}, {b}) not inside the open support")
    xs = grid_points(window, grid, it.side)
    evals = [_eval_conditions(it, float(x), tol) for x in xs]

    # the bound verdict needs positivity (implied by the log evaluator
    # being defined) and the governing sign; monotonicity of P_i gates
    # only the construction of the NEXT iterate and is checked by the
    # algorithm loop, not here
    ok_base = [e.defined for e in evals]
    if not any(ok_base):
        raise WindowTooSmall(
            f"iterate {it.index} satisfies no base condition anywhere on [{a}, {b}]"
        )
    up_all = [base and e.up_ok for base, e in zip(ok_base, evals)]
    lo_all = [base and e.lo_ok for base, e in zip(ok_base, evals)]

    right = it.side is TailSide.RIGHT

    def verified_run(mask: list[bool]) -> int:
        """Number of passing points in the maximal run touching the
        relevant end (right: suffix, left: prefix)."""
        cnt = 0
        seq = reversed(mask) if right else iter(mask)
        for m in seq:
            if not m:
                break
            cnt += 1
        return cnt

    run_up = verified_run(up_all)
    run_lo = verified_run(lo_all)
    if run_up == 0 and run_lo == 0:
        verdict = Verdict.INVALID
        run = 0
    elif run_up == run_lo:
        # both governing signs hold within tol on the same region
        verdict = Verdict.EXACT
        run = run_up
    elif run_up > run_lo:
        verdict = Verdict.UPPER
        run = run_up
    else:
        verdict = Verdict.LOWER
        run = run_lo

    n = len(xs)
    tol_x = 1e-10 * (b - a)
    if verdict is Verdict.INVALID:
        threshold = b if right else a
    else:

        def pred(x: float) -> bool:
            e = _eval_conditions(it, x, tol)
            if not e.defined:
                return False
            if verdict is Verdict.UPPER:
                return e.up_ok
            if verdict is Verdict.LOWER:
                return e.lo_ok
            return e.up_ok and e.lo_ok

        if run == n:
            threshold = a if right else b
        elif right:
            threshold = _refine_boundary(pred, float(xs[n - run - 1]), float(xs[n - run]), tol_x)
        else:
            threshold = _refine_boundary(pred, float(xs[run]), float(xs[run - 1]), tol_x)

    # numeric surrogate for the limit condition at the support-edge-most point
    edge = evals[-1 if right else 0]
    inner = evals[-2 if right else 1]
    limit_ok = bool(
        edge.defined
        and edge.value <= limit_tol
        and (not inner.defined or edge.value <= inner.value + tol)
    )

    step = max(1, len(evals) // 16)
    residuals = tuple(e.residual for e in evals[::step])

    tightness_ok = _tightness(it, xs, evals, verdict, tol) if it.prev is not None else None

    return Classification(verdict, threshold, tightness_ok, residuals, limit_ok, (a, b), tol)


def _tightness(it, xs, evals, verdict, tol) -> Optional[bool]:
    """Lemma-style tightness condition when the verdict flips from the
    predecessor: P'_{i+1} + P'_i +- 2f on the verified part of the grid."""
    if verdict not in (Verdict.UPPER, Verdict.LOWER):
        return None
    prev = it.prev
    right = it.side is TailSide.RIGHT
    flipped_to_lower = verdict is Verdict.LOWER
    ok = True
    checked = 0
    for x, e in zip(xs, evals):
        if not e.defined:
            continue
        try:
            lp_prev = prev.log_evaluator(float(x), 1)
            lp_cur = it.log_evaluator(float(x), 1)
            lf = _log_pdf_jet(it.dist, float(x), 0)
        except PoleEncountered:
            continue
        dp_prev = _safe_exp(lp_prev.coeffs[0]) * lp_prev.coeffs[1]
        dp_cur = _safe_exp(lp_cur.coeffs[0]) * lp_cur.coeffs[1]
        f = _safe_exp(lf.coeffs[0])
        if right:
            t = dp_cur + dp_prev + 2.0 * f
            cond = (t <= tol) if flipped_to_lower else (t >= -tol)
        else:
            t = dp_cur + dp_prev - 2.0 * f
            cond = (t >= -tol) if flipped_to_lower else (t <= tol)
        checked += 1
        ok = ok and cond
    return ok if checked else None


# ---------------------------------------------------------------------------
# The published iterative algorithm


@dataclass
class RunResult:
    iterates: list[tuple[BoundIterate, Classification]]
    p_l: Optional[BoundIterate]
    p_u: Optional[BoundIterate]
    stop_reason: str

    @property
    def verdicts(self) -> list[Verdict]:
        return [c.verdict for _, c in self.iterates]


def _holds_everywhere(it: BoundIterate, xs, tol: float):
    """Full-window condition booleans for the algorithm's 'for all
    x > x0' checks: the outer validity conjunction (positive and
    monotone) and the two governing signs, each over the whole grid.
    An undefined point (pole, sign violation in the chain) fails all
    three."""
    base = True
    up = True
    lo = True
    for x in xs:
        e = _eval_conditions(it, float(x), tol)
        if not e.defined:
            return False, False, False
        base = base and e.mono_ok
        up = up and e.up_ok
        lo = lo and e.lo_ok
        if not (base or up or lo):
            break
    return base, up, lo


def _tight_everywhere(cur: BoundIterate, nxt: BoundIterate, xs, tol: float, to_lower: bool) -> bool:
    right = cur.side is TailSide.RIGHT
    for x in xs:
        try:
            lp_c = cur.log_evaluator(float(x), 1)
            lp_n = nxt.log_evaluator(float(x), 1)
            lf = _log_pdf_jet(cur.dist, float(x), 0)
        except PoleEncountered:
            return False
        dp_c = _safe_exp(lp_c.coeffs[0]) * lp_c.coeffs[1]
        dp_n = _safe_exp(lp_n.coeffs[0]) * lp_n.coeffs[1]
        f = _safe_exp(lf.coeffs[0])
        if right:
            t = dp_n + dp_c + 2.0 * f
            cond = (t <= tol) if to_lower else (t >= -tol)
        else:
            t = dp_n + dp_c - 2.0 * f
            cond = (t >= -tol) if to_lower else (t <= tol)
        if not cond:
            return False
    return True


def run_algorithm(
    dist: DistributionSpec,
    seed: SeedKind,
    side: TailSide,
    x0: float,
    max_iter: int,
    window: tuple[float, float],
    grid: GridSpec = GridSpec(),
    tol: float = DEFAULT_TOL,
    g_jet=None,
    h_jet=None,
) -> RunResult:
    """The published iterative control flow, conditions checked on a grid
    over ``window`` (which must start at x0 for the right tail / end at
    x0 for the left).

    Returns every formed iterate with its classification plus the last
    stored lower/upper bounds; p_l/p_u stay None ("NaN") when no bound of
    that kind was produced.
    """
    a, b = window
    if side is TailSide.RIGHT and not math.isclose(a, x0):
        raise DomainError("right-tail window must start at x0")
    if side is TailSide.LEFT and not math.isclose(b, x0):
        raise DomainError("left-tail window must end at x0")

    xs = grid_points(window, grid, side)
    cur = make_seed(dist, seed, side, g_jet=g_jet, h_jet=h_jet)
    try:
        cls = classify(cur, window, grid, tol)
    except WindowTooSmall as exc:
        raise SeedInvalid(f"seed fails classification on ({a}, {b}): {exc}") from exc
    base0, up0, lo0 = _holds_everywhere(cur, xs, tol)
    if not base0 or not (up0 or lo0):
        raise SeedInvalid(f"seed classifies as {cls.verdict.name} on ({a}, {b}): {cls.describe()}")

    results = [(cur, cls)]
    p_l: Optional[BoundIterate] = None
    p_u: Optional[BoundIterate] = None
    stop = "max-iterations"
    cur_base, cur_up, cur_lo = base0, up0, lo0

    # each pass forms the next iterate first (the published loop does),
    # then applies the outer validity check to the current one; the
    # inner storage branches test only the governing sign and tightness
    # conditions of the new iterate -- its own monotonicity is examined
    # when it becomes the current one on the next pass
    for _ in range(max_iter):
        try:
            nxt = iterate(cur)
            nxt_cls = classify(nxt, window, grid, tol)
        except (PoleEncountered, WindowTooSmall) as exc:
            stop = f"iterate-failed: {exc}"
            break
        results.append((nxt, nxt_cls))
        nxt_base, nxt_up, nxt_lo = _holds_everywhere(nxt, xs, tol)

        if not cur_base:
            stop = "invalid-iterate"
            break
        if nxt_up and nxt_lo:
            # both conditions hold with equality within tol: exact tail
            p_u = nxt
            p_l = nxt
            stop = "exact"
            break
        if cur_up:
            if nxt_up:
                p_u = nxt
            elif nxt_lo and _tight_everywhere(cur, nxt, xs, tol, to_lower=True):
                p_l = nxt
            else:
                stop = "tightness-failed"
                break
        else:
            if nxt_up and _tight_everywhere(cur, nxt, xs, tol, to_lower=False):
                p_u = nxt
            elif nxt_lo:
                p_l = nxt
            else:
                stop = "tightness-failed"
                break
        cur = nxt
        cur_base, cur_up, cur_lo = nxt_base, nxt_up, nxt_lo

    return RunResult(results, p_l, p_u, stop)


# ---------------------------------------------------------------------------
# Rate of convergence


def convergence_rate(it, x: float) -> float:
    """|P_i/P_{i+1} - 1| in derivative form |-+P_i'/f - 1| (identical by
    construction of the next iterate, no need to form it).

    Accepts a bare iterate, an (iterate, next_iterate) pair, or an
    (iterate, classification) pair; the rate is always driven by the
    lower-indexed iterate's derivative.
    """
    if isinstance(it, tuple):
        first, second = it
        if isinstance(second, BoundIterate) and second.index < first.index:
            first = second
        it = first
    sign = -1.0 if it.side is TailSide.RIGHT else 1.0
    try:
        lp = it.log_evaluator(x, 1)
        lf = _log_pdf_jet(it.dist, x, 0)
    except PoleEncountered as exc:
        raise _as_pole(exc, f"rate at x={x}") from exc
    # P_i/P_{i+1} = -+P_i'/f = sign * (lnP)' * exp(lnP - lnf), stable in
    # the far tail where P and f underflow separately
    q = sign * lp.coeffs[1] * math.exp(lp.coeffs[0] - lf.coeffs[0])
    return abs(q - 1.0)


def convergence_rate_ratio_form(it: BoundIterate, x: float) -> float:
    """|P_i/P_{i+1} - 1| by explicitly forming the next iterate."""
    nxt = iterate(it)
    lp_i = it.log_evaluator(x, 0)
    lp_n = nxt.log_evaluator(x, 0)
    return abs(math.exp(lp_i.coeffs[0] - lp_n.coeffs[0]) - 1.0)


def figure_rate(it: BoundIterate, x: float) -> float:
    """|P_{i+1}/P_i - 1|, the quantity the reference figures plot (the
    reciprocal orientation of convergence_rate; both vanish together as
    the bounds converge)."""
    sign = -1.0 if it.side is TailSide.RIGHT else 1.0
    try:
        lp = it.log_evaluator(x, 1)
        lf = _log_pdf_jet(it.dist, x, 0)
    except PoleEncountered as exc:
        raise _as_pole(exc, f"rate at x={x}") from exc
    q = sign * lp.coeffs[1] * math.exp(lp.coeffs[0] - lf.coeffs[0])
    return abs(1.0 / q - 1.0)
