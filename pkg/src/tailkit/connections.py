"""Markov/Chernoff bridge.

Classifies arbitrary candidate bound functions h(x) by the same sign
test the engine applies to iterates (h' + f against the tolerance for
the right tail, h' - f for the left), and builds the concrete h
instances: the mean-over-x Markov form, its bounded-support variant,
and the grid-minimized Chernoff envelope.

Unlike engine iterates, an h candidate carries no monotonicity
requirement; only positivity, the governing sign, and the support-edge
limit are checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import engine as eng
from .dist import DistributionSpec
from .engine import Classification, GridSpec, TailSide, Verdict, grid_points
from .errors import DomainError, MgfDiverged, ParamError, PoleEncountered, WindowTooSmall
from .jet import Jet, jet_var


@dataclass(frozen=True)
class CandidateH:
    """A candidate bound function with a jet evaluator of order <= 1."""

    evaluator: Callable[[float, int], Jet]
    side: TailSide
    description: str = ""


def classify_h(
    dist: DistributionSpec,
    h: CandidateH,
    window: tuple[float, float],
    grid: GridSpec = GridSpec(),
    tol: float = eng.DEFAULT_TOL,
    limit_tol: float = 1e-3,
) -> Classification:
    """Upper/Lower/Invalid verdict for h on the window, with the same
    threshold search and bisection refinement as engine.classify."""
    a, b = window
    xs = grid_points(window, grid, h.side)
    right = h.side is TailSide.RIGHT

    def point(x: float):
        try:
            hj = h.evaluator(x, 1)
            f = dist.pdf_jet(x, 0).value
        except (PoleEncountered, DomainError, OverflowError, ValueError):
            return None
        if hj.coeffs[0] <= 0.0:
            return None
        resid = hj.coeffs[1] + f if right else hj.coeffs[1] - f
        up = resid <= tol if right else resid >= -tol
        lo = resid >= -tol if right else resid <= tol
        return hj.coeffs[0], resid, up, lo

    evals = [point(float(x)) for x in xs]
    if not any(e is not None for e in evals):
        raise WindowTooSmall(f"h undefined or non-positive everywhere on [{a}, {b}]")
    up_all = [e is not None and e[2] for e in evals]
    lo_all = [e is not None and e[3] for e in evals]

    def run(mask):
        cnt = 0
        seq = reversed(mask) if right else iter(mask)
        for m in seq:
            if not m:
                break
            cnt += 1
        return cnt

    run_up, run_lo = run(up_all), run(lo_all)
    if run_up == 0 and run_lo == 0:
        verdict = Verdict.INVALID
        threshold = b if right else a
    else:
        if run_up == run_lo:
            verdict = Verdict.EXACT
        elif run_up > run_lo:
            verdict = Verdict.UPPER
        else:
            verdict = Verdict.LOWER
        n = len(xs)
        run_len = max(run_up, run_lo)

        def pred(x: float) -> bool:
            e = point(x)
            if e is None:
                return False
            if verdict is Verdict.UPPER:
                return e[2]
            if verdict is Verdict.LOWER:
                return e[3]
            return e[2] and e[3]

        tol_x = 1e-10 * (b - a)
        if run_len == n:
            threshold = a if right else b
        elif right:
            threshold = eng._refine_boundary(pred, float(xs[n - run_len - 1]), float(xs[n - run_len]), tol_x)
        else:
            threshold = eng._refine_boundary(pred, float(xs[run_len]), float(xs[run_len - 1]), tol_x)

    edge = evals[-1 if right else 0]
    inner = evals[-2 if right else 1]
    limit_ok = bool(
        edge is not None
        and edge[0] <= limit_tol
        and (inner is None or edge[0] <= inner[0] + tol)
    )
    step = max(1, len(evals) // 16)
    residuals = tuple(math.nan if e is None else e[1] for e in evals[::step])
    return Classification(verdict, threshold, None, residuals, limit_ok, (a, b), tol)


def markov_h(mean: float, r: float = math.inf) -> CandidateH:
    """h(x) = E{X}/x, or E{X}/x - E{X}/r when the support is bounded on
    the right by r."""
    if not (mean > 0.0 and math.isfinite(mean)):
        raise ParamError("markov_h needs a finite positive mean")
    if not r > 0.0:
        raise ParamError("markov_h needs r > 0")
    shift = 0.0 if math.isinf(r) else mean / r

    def evaluator(anchor: float, order: int) -> Jet:
        if anchor <= 0.0:
            raise DomainError("markov_h needs x > 0")
        x = jet_var(anchor, order)
        return mean / x - shift

    desc = "E{X}/x" if math.isinf(r) else f"E{{X}}/x - E{{X}}/{r:g}"
    return CandidateH(evaluator, TailSide.RIGHT, desc)


def chernoff_h(
    mgf: Callable[[float], float],
    t_grid: list[float],
    r: float = math.inf,
    refine: bool = True,
) -> CandidateH:
    """h(x) = min over t of M(t) e^{-tx} (minus M(t) e^{-tr} when r is
    finite), minimized by a grid scan with optional golden-section
    refinement between the bracketing grid points; ties break toward the
    smaller t.

    h'(x) is the envelope derivative -t* M(t*) e^{-t* x} of the active
    branch.
    """
    ts = sorted(float(t) for t in t_grid)
    if not ts or ts[0] <= 0.0:
        raise ParamError("chernoff_h needs a nonempty positive t grid")
    if not r > 0.0:
        raise ParamError("chernoff_h needs r > 0")

    def branch(t: float, x: float) -> float:
        m = mgf(t)
        if not math.isfinite(m):
            raise MgfDiverged(f"MGF non-finite at t={t}")
        v = m * math.exp(-t * x)
        if math.isfinite(r):
            v -= m * math.exp(-t * r)
        if not math.isfinite(v):
            raise MgfDiverged(f"Chernoff branch non-finite at t={t}, x={x}")
        return v

    invphi = (math.sqrt(5.0) - 1.0) / 2.0

    def minimize(x: float) -> tuple[float, float]:
        vals = [branch(t, x) for t in ts]
        j = min(range(len(ts)), key=lambda i: (vals[i], ts[i]))
        t_star, v_star = ts[j], vals[j]
        if refine and len(ts) > 1:
            lo = ts[j - 1] if j > 0 else ts[0]
            hi = ts[j + 1] if j + 1 < len(ts) else ts[-1]
            if hi > lo:
                c = hi - invphi * (hi - lo)
                d = lo + invphi * (hi - lo)
                fc, fd = branch(c, x), branch(d, x)
                for _ in range(120):
                    if hi - lo <= 1e-12 * (1.0 + abs(t_star)):
                        break
                    if fc < fd:
                        hi, d, fd = d, c, fc
                        c = hi - invphi * (hi - lo)
                        fc = branch(c, x)
                    else:
                        lo, c, fc = c, d, fd
                        d = lo + invphi * (hi - lo)
                        fd = branch(d, x)
                t_ref = 0.5 * (lo + hi)
                v_ref = branch(t_ref, x)
                if v_ref < v_star:
                    t_star, v_star = t_ref, v_ref
        return t_star, v_star

    def evaluator(anchor: float, order: int) -> Jet:
        t_star, v = minimize(anchor)
        if order == 0:
            return Jet(anchor, (v,))
        dv = -t_star * mgf(t_star) * math.exp(-t_star * anchor)
        return Jet(anchor, (v, dv) + (0.0,) * (order - 1))

    desc = "min_t M(t)e^{-tx}" + ("" if math.isinf(r) else " (bounded-support variant)")
    return CandidateH(evaluator, TailSide.RIGHT, desc)
