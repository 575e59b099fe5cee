"""Stationary-measure estimation, Lyapunov exponents, and dimension bounds.

Estimates come from one long orbit driven by the batched kernels; error bars
use batch means over 100 consecutive batches (orbit samples are autocorrelated,
so i.i.d. standard errors would be overconfident).  The uniform histogram over
[0,1] holds the middle-interval samples; tail mass is recorded per integer log
level instead, since for small slopes almost all spatial structure outside the
middle interval lives at log scale.  Interval masses are read through a CDF
that interpolates linearly in x inside bulk bins and linearly in the log
coordinate inside tail levels, each restricted to its occupied span.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AMSystem, ProbVector, MINUS, PLUS, apply_inverse
from .engine import OrbitAccumulators, accumulate_orbit
from .region import PreconditionError, endpoint_exponents, _bisect, contraction_lhs


class InconclusiveError(RuntimeError):
    """An empirical bound cannot be formed (e.g. the exponent estimate may be >= 0)."""


@dataclass(frozen=True)
class EstimateWithError:
    """Point estimate with a batch-means standard error."""

    value: float
    std_error: float
    n: int


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Histogram plus exact interval-mass counters from one orbit.

    ``bins`` counts the samples inside the middle interval (so it sums to
    ``mass_M``); tail samples are counted per integer log level in
    ``tail_histogram``, with the finer-grained cells (1/tail_resolution of a
    level) kept in ``tail_cells`` for interval arithmetic.  All counters are
    exact integers.
    """

    bins: np.ndarray
    tail_histogram: np.ndarray  # shape (2, levels): integer-floored log levels
    tail_cells: np.ndarray  # shape (2, levels*resolution): fine log cells
    tail_resolution: int
    mass_left: int
    mass_M: int
    mass_L: int
    mass_C: int
    mass_R: int
    mass_right: int
    total: int
    nbins: int


@dataclass(frozen=True)
class OrbitEstimate:
    """An EmpiricalMeasure together with the batch-level accumulators."""

    sys: AMSystem
    probs: ProbVector
    measure: EmpiricalMeasure
    acc: OrbitAccumulators

    @property
    def length(self) -> int:
        return self.acc.length


def _batch_se(batch_means: np.ndarray) -> float:
    valid = batch_means[np.isfinite(batch_means)]
    if valid.size < 2:
        return float("nan")
    return float(np.std(valid, ddof=1) / math.sqrt(valid.size))


def estimate_measure(
    sys: AMSystem,
    probs: ProbVector,
    seed: int = 0,
    burn_in: int = 10_000,
    length: int = 10_000_000,
    nbins: int = 4096,
    stream_id: int = 0,
    backend: str | None = None,
) -> OrbitEstimate:
    """Estimate the stationary measure by ergodic time averages.

    Requires positive endpoint exponents (otherwise the unique non-atomic
    stationary measure machinery is unavailable).  Deterministic per
    (seed, stream_id).
    """
    if not endpoint_exponents(sys.params, probs).positive:
        raise PreconditionError(["endpoint exponents not positive"])
    acc = accumulate_orbit(
        sys, probs, seed=seed, stream_id=stream_id, burn_in=burn_in,
        length=length, nbins=nbins, backend=backend,
    )
    cells = np.stack([acc.tail_hist_left, acc.tail_hist_right])
    res = acc.tail_resolution
    measure = EmpiricalMeasure(
        bins=acc.hist,
        tail_histogram=cells.reshape(2, -1, res).sum(axis=2),
        tail_cells=cells,
        tail_resolution=res,
        mass_left=int(acc.counts_left.sum()),
        mass_M=int(acc.counts_M.sum()),
        mass_L=int(acc.counts_L.sum()),
        mass_C=int(acc.counts_C.sum()),
        mass_R=int(acc.counts_R.sum()),
        mass_right=int(acc.counts_right.sum()),
        total=acc.length,
        nbins=acc.nbins,
    )
    return OrbitEstimate(sys, probs, measure, acc)


def mass_fraction(est: OrbitEstimate, which: str = "M") -> EstimateWithError:
    """Occupation fraction of an interval ('M', 'left', 'right', 'L', 'C', 'R')."""
    counts = getattr(est.acc, f"counts_{which}")
    total = counts.sum()
    fracs = counts / est.acc.batch_sizes
    return EstimateWithError(float(total / est.length), _batch_se(fracs), est.length)


def lyapunov_exponent(
    est: OrbitEstimate, method: str = "pointwise"
) -> EstimateWithError:
    """Lyapunov exponent estimate, in nats per step.

    ``pointwise`` averages p- log f'-(x) + p+ log f'+(x) along the orbit;
    ``interval-form`` combines the three interval occupation fractions with
    their drift coefficients.  Both estimate the same integral.
    """
    acc = est.acc
    sizes = acc.batch_sizes.astype(np.float64)
    if method == "pointwise":
        value = float(acc.integrand_sum.sum() / acc.length)
        per_batch = acc.integrand_sum / sizes
        return EstimateWithError(value, _batch_se(per_batch), acc.length)
    if method == "interval-form":
        gamma = est.sys.gamma
        la = est.sys.ln_a
        cl = est.probs.p_minus - gamma * est.probs.p_plus
        cr = est.probs.p_plus - gamma * est.probs.p_minus
        def chi(m, left, right, n):
            return (m / n + cl * (left / n) + cr * (right / n)) * la
        value = float(chi(
            acc.counts_M.sum(), acc.counts_left.sum(), acc.counts_right.sum(),
            float(acc.length),
        ))
        per_batch = (
            acc.counts_M / sizes + cl * (acc.counts_left / sizes)
            + cr * (acc.counts_right / sizes)
        ) * la
        return EstimateWithError(value, _batch_se(per_batch), acc.length)
    raise ValueError(f"unknown method {method!r}")


def dimension_bound_entropy_lyap(
    probs: ProbVector, chi: EstimateWithError
) -> EstimateWithError:
    """Upper dimension bound -H(p)/chi with first-order error propagation.

    Raises InconclusiveError unless the exponent is negative by a 3-sigma
    margin: the bound requires a strictly negative exponent.
    """
    if chi.value + 3.0 * chi.std_error >= 0.0:
        raise InconclusiveError(
            f"exponent estimate {chi.value} +- {chi.std_error} is not negative "
            "at the 3-sigma level"
        )
    h = probs.entropy
    value = -h / chi.value
    se = h * chi.std_error / (chi.value * chi.value)
    return EstimateWithError(value, se, chi.n)


def mu_M_lower_bound(p: float, gamma: float) -> float:
    """Closed-form lower bound (gamma(1-p) - p) / (gamma - p(1-p)) for the
    middle-interval mass; callers must ensure the exponent/separation
    preconditions."""
    num = gamma * (1.0 - p) - p
    if num <= 0.0:
        raise ValueError(f"gamma(1-p) must exceed p, got gamma={gamma}, p={p}")
    return num / (gamma - p * (1.0 - p))


def lyapunov_upper_bound(p: float, gamma: float) -> float:
    """Coefficient c in the bound chi <= c * log a (positive iff the
    contraction condition holds)."""
    return 1.0 - contraction_lhs(p, gamma)


def resonant_dimension(k: int, a: float) -> float:
    """Exact dimension log(eta)/log(a) for integer exponents: eta in (1/2, 1)
    solves eta^(k+1) - 2 eta + 1 = 0."""
    if int(k) != k or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k}")
    if not (0.0 < a < 1.0):
        raise ValueError(f"a must lie in (0, 1), got {a}")
    k = int(k)
    f = lambda e: e ** (k + 1) - 2.0 * e + 1.0
    eta = _bisect(f, 0.5, 1.0 - 1e-9)
    return math.log(eta) / math.log(a)


def empirical_cdf(measure: EmpiricalMeasure, sys: AMSystem):
    """Piecewise-linear CDF over [0,1] built from all three sample classes.

    Bulk bins interpolate linearly in x over their occupied span (clipped to
    the middle interval); tail levels interpolate linearly in the log
    coordinate over their occupied span.  Returns a callable F with F(0) = 0
    and F(1) = 1 up to rounding.
    """
    nbins = measure.nbins
    bins = measure.bins
    total = measure.total
    x_plus, x_minus = sys.x_plus, sys.x_minus
    ln_a, t_plus = sys.ln_a, sys.t_plus
    res = measure.tail_resolution
    left, right = measure.tail_cells[0], measure.tail_cells[1]
    cells = left.shape[0]
    cum_bulk = np.concatenate([[0.0], np.cumsum(bins, dtype=np.float64)])
    # suffix sums: left-tail samples in cell >= k
    suff_left = np.concatenate([np.cumsum(left[::-1], dtype=np.float64)[::-1], [0.0]])
    cum_right = np.concatenate([[0.0], np.cumsum(right, dtype=np.float64)])

    def cell_span(k: int) -> tuple[float, float]:
        # occupied log-coordinate span of one tail cell
        return max(k / res, t_plus), (k + 1) / res

    def tail_left_ge(t: float) -> float:
        """Count of left-tail samples with log coordinate >= t."""
        if t <= t_plus:
            return float(suff_left[0])
        k = min(int(math.floor(t * res)), cells - 1)
        lo, hi = cell_span(k)
        frac = min(max((hi - t) / (hi - lo), 0.0), 1.0) if hi > lo else 0.0
        return float(suff_left[k + 1]) + frac * float(left[k])

    def tail_right_le(t: float) -> float:
        """Count of right-tail samples with log coordinate <= t."""
        if t <= t_plus:
            return 0.0
        k = min(int(math.floor(t * res)), cells - 1)
        lo, hi = cell_span(k)
        frac = min(max((t - lo) / (hi - lo), 0.0), 1.0) if hi > lo else 1.0
        return float(cum_right[k]) + frac * float(right[k])

    def bulk_le(x: float) -> float:
        """Count of bulk samples with coordinate <= x."""
        if x < x_plus:
            return 0.0
        if x >= x_minus:
            return float(cum_bulk[nbins])
        pos = x * nbins
        j = min(int(pos), nbins - 1)
        lo = max(j / nbins, x_plus)
        hi = min((j + 1) / nbins, x_minus)
        frac = min(max((x - lo) / (hi - lo), 0.0), 1.0) if hi > lo else 1.0
        return float(cum_bulk[j]) + frac * float(bins[j])

    def cdf(x: float) -> float:
        if x <= 0.0:
            return 0.0
        if x >= 1.0:
            return 1.0
        acc = 0.0
        if x < x_plus:
            return tail_left_ge(math.log(x) / ln_a) / total
        acc = measure.mass_left + bulk_le(x)
        if x > x_minus:
            m = 1.0 - x
            if m <= 0.0:
                acc += measure.mass_right
            else:
                acc += tail_right_le(math.log(m) / ln_a)
        return acc / total

    return cdf


def stationarity_residual(
    measure: EmpiricalMeasure, sys: AMSystem, probs: ProbVector
) -> float:
    """Max over histogram bins A of |mu(A) - p- mu(f-^{-1}A) - p+ mu(f+^{-1}A)|.

    Preimage masses are read from the same empirical data through
    :func:`empirical_cdf` (preimages of bin edges rarely align with the grid,
    so boundary cells are interpolated).
    """
    nbins = measure.nbins
    cdf = empirical_cdf(measure, sys)
    edges = [j / nbins for j in range(nbins + 1)]
    f_at = [cdf(e) for e in edges]
    pre_m = [cdf(apply_inverse(sys, MINUS, e)) for e in edges]
    pre_p = [cdf(apply_inverse(sys, PLUS, e)) for e in edges]
    worst = 0.0
    for j in range(nbins):
        mu_a = f_at[j + 1] - f_at[j]
        resid = abs(
            mu_a
            - probs.p_minus * (pre_m[j + 1] - pre_m[j])
            - probs.p_plus * (pre_p[j + 1] - pre_p[j])
        )
        if resid > worst:
            worst = resid
    return worst


def kac_mean_return(est: OrbitEstimate) -> float:
    """Mean first-return time to M: every orbit step in M is one visit, and
    the (censored) final visit contributes no return sample."""
    visits = est.measure.mass_M
    if visits < 2:
        raise RuntimeError("orbit visited the middle interval fewer than twice")
    return (est.acc.kac_last - est.acc.kac_first) / (visits - 1)
