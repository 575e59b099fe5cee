"""Parameter-region inequalities, thresholds, and the singularity-region raster.

Decides, for probabilities summarized by p = max(p_minus, p_plus) and exponent
gamma, which inequalities hold: positivity of the endpoint Lyapunov exponents,
the mean-contraction condition, separation of the exit slivers, and the
closed-form dimension bound being < 1.  All root finding is plain bisection on
functions with a checked sign change, run down to machine precision (so any
requested tolerance is met with a large margin).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .core import lr_gamma_threshold, AMParams, ProbVector


class PreconditionError(ValueError):
    """A checked inequality required by a closed-form bound does not hold."""

    def __init__(self, failed: list[str]):
        self.failed = list(failed)
        super().__init__("precondition(s) failed: " + ", ".join(self.failed))


@dataclass(frozen=True)
class ExponentPair:
    """Endpoint Lyapunov exponents at 0 and 1, in nats per step."""

    lambda0: float
    lambda1: float
    positive: bool


@dataclass(frozen=True)
class RegionVerdict:
    """Per-cell outcome of the region inequalities.

    Without a slope ``a`` the flags answer "does some a in (0,1) work": lr_ok
    and dim_lt_one then mean the corresponding threshold is positive.  With a
    concrete ``a`` they are evaluated at that slope.  ``valid`` is False for
    cells outside the parameter domain; such cells never abort a raster.
    """

    p: float
    gamma: float
    valid: bool
    exponents_positive: bool
    contraction_ok: bool
    lr_ok: bool
    dim_lt_one: bool
    a_max_dim: float | None
    a_max_lr: float | None
    gamma_interval: tuple[float, float] | None


def _bisect(f, lo: float, hi: float, tol: float = 0.0) -> float:
    """Bisection for a sign change of f on [lo, hi], refined to machine precision.

    ``tol`` is accepted for interface symmetry; the loop always continues until
    the bracket cannot shrink, which satisfies any positive tolerance.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (flo > 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def endpoint_exponents(params: AMParams, probs: ProbVector) -> ExponentPair:
    """Endpoint exponents (p- - gamma*p+)*log a and (p+ - gamma*p-)*log a.

    The positivity flag is decided from the equivalent strict criterion
    gamma > max(p-/p+, p+/p-), so boundary cases like gamma == p+/p- are
    classified as not positive regardless of rounding in the products.
    """
    log_a = math.log(params.a)
    lam0 = (probs.p_minus - params.gamma * probs.p_plus) * log_a
    lam1 = (probs.p_plus - params.gamma * probs.p_minus) * log_a
    ratio = max(probs.p_minus / probs.p_plus, probs.p_plus / probs.p_minus)
    return ExponentPair(lam0, lam1, params.gamma > ratio)


def contraction_lhs(p: float, gamma: float) -> float:
    """(1+gamma) * p^2 * (p+gamma) / (gamma - p(1-p))."""
    den = gamma - p * (1.0 - p)
    if den <= 0.0:
        raise ValueError(f"gamma - p(1-p) must be positive, got {den}")
    return (1.0 + gamma) * p * p * (p + gamma) / den


def contraction_condition(p: float, gamma: float) -> tuple[bool, float]:
    """Mean-contraction inequality; returns (holds, lhs - 1)."""
    lhs = contraction_lhs(p, gamma)
    return lhs < 1.0, lhs - 1.0


def _g(p: float, gamma: float) -> float:
    """Numerator form of the contraction condition: negative iff it holds."""
    return (1.0 + gamma) * p * p * (p + gamma) - (gamma - p * (1.0 - p))


def gamma_interval(p: float, tol: float = 1e-10) -> tuple[float, float] | None:
    """Open interval of exponents in (p/(1-p), 3/2] where both region
    inequalities hold, or None when empty.

    g(gamma) is an upward quadratic in gamma, so the admissible set is the
    part of (p/(1-p), 3/2] between its roots; the vertex gives an exact
    bracket for bisection and rules out more than two sign changes.
    """
    if not (0.5 <= p < 1.0):
        raise ValueError(f"p must lie in [1/2, 1), got {p}")
    gamma_min = p / (1.0 - p)
    hi = 1.5
    if gamma_min >= hi:
        return None
    # vertex of g as a quadratic A*gamma^2 + B*gamma + C
    A = p * p
    B = p * p * (1.0 + p) - 1.0
    vertex = -B / (2.0 * A)
    mid = min(max(vertex, gamma_min), hi)
    if _g(p, mid) >= 0.0:
        return None
    f = lambda g: _g(p, g)
    lo_end = gamma_min if _g(p, gamma_min) < 0.0 else _bisect(f, gamma_min, mid, tol)
    hi_end = hi if _g(p, hi) < 0.0 else _bisect(f, mid, hi, tol)
    if not lo_end < hi_end:
        return None
    return (lo_end, hi_end)


_SEXTIC_COEFFS = (1.0, -2.0, 5.0, -6.0, -2.0, 0.0, 1.0)


def _sextic(p: float) -> float:
    """p^6 - 2p^5 + 5p^4 - 6p^3 - 2p^2 + 1 by Horner."""
    acc = 0.0
    for c in _SEXTIC_COEFFS:
        acc = acc * p + c
    return acc


def critical_p(tol: float = 1e-10) -> float:
    """Largest admissible p: the root of the sextic in [0.5, 0.6].

    Bisection runs to machine precision so the polynomial residual at the
    returned value is far below 1e-12 whatever ``tol`` is passed.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    return _bisect(_sextic, 0.5, 0.6, tol)


def a_max_dim(p: float, gamma: float) -> float:
    """Supremum of slopes a for which the closed-form dimension bound is < 1.

    Equals exp(H_signed / (1 - lhs)) with H_signed = p log p + (1-p) log(1-p);
    evaluated in base-2 logs so the dyadic symmetric case lands exactly on a
    power of two (p = 1/2, gamma = 1.25 gives 2**-64, and the strict cap in
    the bound check then rejects that boundary slope).  May underflow to 0.0
    as gamma approaches either end of the admissible interval.
    """
    holds, residual = contraction_condition(p, gamma)
    if not holds:
        raise ValueError(
            f"contraction condition fails at p={p}, gamma={gamma} (lhs-1={residual})"
        )
    h2 = p * math.log2(p) + (1.0 - p) * math.log2(1.0 - p)
    return 2.0 ** (h2 / (-residual))


# global maximum of lr_gamma_threshold over a in (0,1); above it every slope
# separates, refined lazily once by ternary search
_LR_PEAK: tuple[float, float] | None = None


def _lr_peak() -> tuple[float, float]:
    global _LR_PEAK
    if _LR_PEAK is None:
        lo, hi = 1e-6, 1.0 - 1e-6
        for _ in range(200):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if lr_gamma_threshold(m1) < lr_gamma_threshold(m2):
                lo = m1
            else:
                hi = m2
        a_pk = 0.5 * (lo + hi)
        _LR_PEAK = (a_pk, lr_gamma_threshold(a_pk))
    return _LR_PEAK


def a_max_lr(gamma: float, tol: float = 1e-10) -> float:
    """Largest slope threshold below which the exit slivers separate for all
    smaller slopes.

    The threshold curve rises from 1 at a=0 to a single interior maximum and
    falls back to 1 at a=1; for gamma above that maximum every a in (0,1)
    separates and 1.0 is returned.  The result is never below the sufficient
    slope 2**(1/(1-gamma)).
    """
    if not gamma > 1.0:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    a_pk, peak = _lr_peak()
    if gamma > peak:
        return 1.0
    # sufficient slope guarantees the threshold is below gamma at the left end
    a_suf = math.exp(math.log(2.0) / (1.0 - gamma))
    f = lambda a: (lr_gamma_threshold(a) if a > 0.0 else 1.0) - gamma
    return _bisect(f, max(a_suf, 0.0), a_pk, tol)


def dimension_bound_closed_form(p: float, gamma: float, a: float) -> float:
    """The closed-form dimension bound, with every precondition checked.

    Raises PreconditionError naming each failed inequality: the endpoint
    exponent condition, the contraction condition, sliver separation at
    (a, gamma), and the strict slope cap a < a_max_dim.
    """
    if not (0.5 <= p < 1.0):
        raise ValueError(f"p must lie in [1/2, 1), got {p}")
    if not (0.0 < a < 1.0):
        raise ValueError(f"a must lie in (0, 1), got {a}")
    failed = []
    if not gamma > p / (1.0 - p):
        failed.append("endpoint exponents not positive (gamma <= p/(1-p))")
        raise PreconditionError(failed)
    holds, _ = contraction_condition(p, gamma)
    if not holds:
        failed.append("contraction condition fails")
    if not gamma > lr_gamma_threshold(a):
        failed.append("exit slivers not separated at (a, gamma)")
    if holds and not a < a_max_dim(p, gamma):
        failed.append("a not strictly below a_max_dim")
    if failed:
        raise PreconditionError(failed)
    h_signed = p * math.log(p) + (1.0 - p) * math.log(1.0 - p)
    coeff = 1.0 - contraction_lhs(p, gamma)
    return h_signed / (coeff * math.log(a))


def dimension_bound_half(gamma: float, a: float) -> float:
    """Specialized p = 1/2 form (1-4g) log 2 / ((g-1)(3/2-g) log a)."""
    num = (1.0 - 4.0 * gamma) * math.log(2.0)
    den = (gamma - 1.0) * (1.5 - gamma) * math.log(a)
    return num / den


@lru_cache(maxsize=4096)
def _gamma_interval_cached(p: float) -> tuple[float, float] | None:
    return gamma_interval(p)


@lru_cache(maxsize=4096)
def _a_max_lr_cached(gamma: float) -> float:
    return a_max_lr(gamma)


def region_verdict(p: float, gamma: float, a: float | None = None) -> RegionVerdict:
    """Evaluate all region flags for one cell; invalid cells get all-False flags."""
    if not (0.5 <= p < 1.0) or not gamma > 1.0 or not math.isfinite(gamma):
        return RegionVerdict(p, gamma, False, False, False, False, False, None, None, None)
    if a is not None and not (0.0 < a < 1.0):
        return RegionVerdict(p, gamma, False, False, False, False, False, None, None, None)
    exp_pos = gamma > p / (1.0 - p)
    try:
        contraction, _ = contraction_condition(p, gamma)
    except ValueError:
        contraction = False
    lr_ok = gamma > lr_gamma_threshold(a) if a is not None else gamma > 1.0
    amd = a_max_dim(p, gamma) if contraction else None
    aml = _a_max_lr_cached(gamma)
    if a is None:
        dim = exp_pos and contraction and lr_ok and amd is not None and amd > 0.0
    else:
        dim = exp_pos and contraction and lr_ok and amd is not None and a < amd
    return RegionVerdict(
        p, gamma, True, exp_pos, contraction, lr_ok, dim, amd, aml,
        _gamma_interval_cached(p),
    )


def rasterize_region(
    p_range: tuple[float, float],
    gamma_range: tuple[float, float],
    grid: tuple[int, int],
) -> list[list[RegionVerdict]]:
    """Row-major grid of verdicts over [p_min, p_max] x [gamma_min, gamma_max].

    Rows vary p, columns vary gamma; each cell is evaluated independently and
    domain errors become invalid cells rather than aborting.  The admissible
    gamma interval is computed once per distinct p.
    """
    nx, ny = grid
    if nx < 2 or ny < 2:
        raise ValueError(f"grid dimensions must be >= 2, got {grid}")
    p_lo, p_hi = p_range
    g_lo, g_hi = gamma_range
    rows = []
    for i in range(nx):
        p = p_lo + (p_hi - p_lo) * i / (nx - 1)
        row = []
        for j in range(ny):
            g = g_lo + (g_hi - g_lo) * j / (ny - 1)
            try:
                v = region_verdict(p, g)
            except Exception:
                v = RegionVerdict(p, g, False, False, False, False, False, None, None, None)
            row.append(v)
        rows.append(row)
    return rows
