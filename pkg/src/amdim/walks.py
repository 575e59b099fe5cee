"""Stopping-time random walks, the exact DP oracle, and return-time statistics.

Outside the middle interval the dynamics is affine through the nearer fixed
endpoint, so in log coordinates an excursion is a random walk with increments
+1 (contracting symbol) and -gamma (expanding symbol).  The minus walk starts
with a forced contracting step and stops the first time the subsequent partial
sums reach -1 or below; the plus walk is its mirror.  Trials are censored at a
step cap and excluded from means, with the censored fraction reported and a
Hoeffding bound available for its probability.

Partial sums are integer lattice combinations u - gamma*v (u up-steps, v
down-steps); every implementation here (Monte Carlo kernels, the dynamic
program, the single-trial sampler) evaluates that same expression, so their
stopping decisions agree exactly even for resonant gamma.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import AMSystem, ProbVector, MINUS, PLUS
from .engine import (
    BULK,
    LEFT_TAIL,
    CHUNK,
    HybridPoint,
    RngStream,
    SymbolStream,
    step,
)
from .kernels import get_backend
from .measure import EstimateWithError, estimate_measure, kac_mean_return


@dataclass(frozen=True)
class WalkOutcome:
    """One stopping-time trial: stopping index n >= 2, terminal sum s, or censored."""

    n: int
    s: float
    censored: bool


@dataclass(frozen=True)
class ReturnOutcome:
    """First return to the middle interval under the actual maps."""

    n_return: int
    exit_side: str  # "stayed", "left-via-L", "right-via-R"
    censored: bool = False


@dataclass(frozen=True)
class WalkSummary:
    """Monte Carlo summary over many trials; means over uncensored trials only."""

    mean_n: EstimateWithError
    mean_s: EstimateWithError
    censored_fraction: float
    trials: int
    cap: int
    gamma: float
    p_up: float
    which: str
    batch_mean_n: np.ndarray
    batch_mean_s: np.ndarray


@dataclass(frozen=True)
class ExactWalkStats:
    """Dynamic-programming expectations with an explicit truncation certificate.

    ``truncation_bound`` is the Hoeffding bound on the mass of walks still
    running after ``depth`` draws; ``unstopped_mass`` is the exact live mass
    the DP left behind (always <= the bound, often far smaller).
    """

    e_n: float
    e_s: float
    truncation_bound: float
    unstopped_mass: float
    depth: int


def _p_up(probs, which: str) -> float:
    """Up-step probability for the chosen walk; accepts ProbVector or a raw p_minus."""
    p_minus = probs.p_minus if hasattr(probs, "p_minus") else float(probs)
    if not (0.0 <= p_minus <= 1.0):
        raise ValueError(f"p_minus must lie in [0, 1], got {p_minus}")
    if which == MINUS:
        return p_minus
    if which == PLUS:
        return 1.0 - p_minus
    raise ValueError(f"which must be '-' or '+', got {which!r}")


def _hoeffding(p_up: float, gamma: float, n: int) -> float:
    """Upper bound on P(walk not stopped after n draws); 1.0 when vacuous."""
    drift = p_up - gamma * (1.0 - p_up)
    t = -(1.0 + n * drift)
    if t <= 0.0:
        return 1.0
    return math.exp(-2.0 * t * t / (n * (gamma + 1.0) ** 2))


def hoeffding_tail(probs, gamma: float, n: int) -> float:
    """Tail bound for the minus walk: P(N > n+1) <= exp(-2(1+n*drift)^2 / (n(gamma+1)^2))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _hoeffding(_p_up(probs, MINUS), gamma, n)


def sample_walk(probs, gamma: float, stream: SymbolStream, cap: int, which: str = MINUS) -> WalkOutcome:
    """Simulate one stopping-time trial from a symbol stream.

    The first symbol of the excursion is forced (it defines the walk), so the
    stream drives the increments from the second symbol on: a symbol equal to
    ``which`` steps +1, the other symbol steps -gamma.  An immediate -gamma
    stops at n=2 with s=-gamma.
    """
    if gamma <= 1.0:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    cap = int(cap)
    if cap < 2:
        raise ValueError(f"cap must be >= 2, got {cap}")
    ups = 0
    downs = 0
    draws = 0
    while True:
        if stream.next() == which:
            ups += 1
        else:
            downs += 1
        draws += 1
        w = float(ups) - gamma * float(downs)
        if w <= -1.0:
            return WalkOutcome(draws + 1, w, False)
        if draws >= cap:
            return WalkOutcome(draws + 1, w, True)


def walk_summary(
    probs,
    gamma: float,
    seed: int,
    trials: int = 40_000,
    cap: int = 3_000,
    stream_id: int = 0,
    which: str = MINUS,
    backend: str | None = None,
) -> WalkSummary:
    """Monte Carlo walk statistics (defaults mirror the 40000 x 3000 protocol).

    Deterministic per (seed, stream_id); batch-means errors over 100
    trial batches.  In the kernels an up-step is drawn as uniform < p_up.
    """
    trials = int(trials)
    cap = int(cap)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if cap < 2:
        raise ValueError("cap must be >= 2")
    if gamma <= 1.0:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    p_up = _p_up(probs, which)
    kern = get_backend(backend)

    out_n = np.zeros(trials, dtype=np.int64)
    out_s = np.zeros(trials, dtype=np.float64)
    out_c = np.zeros(trials, dtype=np.uint8)
    wstate = np.zeros(4, dtype=np.int64)
    stream = RngStream(seed, stream_id)
    while wstate[0] < trials:
        kern.walk_chunk(stream.uniforms(CHUNK), gamma, p_up, cap, out_n, out_s, out_c, wstate)

    unc = out_c == 0
    censored_fraction = float((~unc).sum() / trials)
    if trials >= 200:
        n_batches = 100
    elif trials >= 20:
        n_batches = 10
    else:
        n_batches = 1
    bsz = trials // n_batches
    bidx = np.minimum(np.arange(trials) // bsz, n_batches - 1)
    cnt = np.bincount(bidx[unc], minlength=n_batches).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        bmean_n = np.bincount(bidx[unc], weights=out_n[unc], minlength=n_batches) / cnt
        bmean_s = np.bincount(bidx[unc], weights=out_s[unc], minlength=n_batches) / cnt

    def _se(means: np.ndarray) -> float:
        valid = means[np.isfinite(means)]
        if valid.size < 2:
            return float("nan")
        return float(np.std(valid, ddof=1) / math.sqrt(valid.size))

    n_unc = int(unc.sum())
    mean_n = EstimateWithError(
        float(out_n[unc].mean()) if n_unc else float("nan"), _se(bmean_n), n_unc
    )
    mean_s = EstimateWithError(
        float(out_s[unc].mean()) if n_unc else float("nan"), _se(bmean_s), n_unc
    )
    return WalkSummary(
        mean_n, mean_s, censored_fraction, trials, cap, gamma, p_up, which,
        bmean_n, bmean_s,
    )


def exact_walk_stats(p_minus, gamma: float, depth: int = 400, which: str = MINUS) -> ExactWalkStats:
    """Exact stopping-time expectations by dynamic programming.

    Propagates probability mass over the exact lattice of states (draws j,
    down-steps v), keeping only states with partial sum u - gamma*v > -1, and
    accumulates the stop contributions up to ``depth`` draws.  No rounding of
    gamma is involved: the state index is integer and the partial sum is
    evaluated with the same expression as the samplers.
    """
    depth = int(depth)
    if depth < 2:
        raise ValueError(f"depth must be >= 2, got {depth}")
    p_up = _p_up(p_minus, which)
    p_down = 1.0 - p_up
    drift = p_up - gamma * p_down
    if drift >= 0.0:
        raise ValueError(
            f"walk drift must be negative (gamma > p_up/(1-p_up)); got drift={drift}"
        )
    live = np.array([1.0])  # mass over v after 0 draws
    e_n = 0.0
    e_s = 0.0
    for m in range(1, depth + 1):
        nxt = np.zeros(m + 1)
        nxt[:m] += p_up * live
        nxt[1:] += p_down * live
        v = np.arange(m + 1)
        s = (m - v).astype(np.float64) - gamma * v.astype(np.float64)
        stopped = s <= -1.0
        q = nxt[stopped]
        if q.size:
            mass = float(q.sum())
            e_n += mass * (m + 1)
            e_s += float((q * s[stopped]).sum())
            nxt[stopped] = 0.0
        live = nxt
    unstopped = float(live.sum())
    return ExactWalkStats(e_n, e_s, _hoeffding(p_up, gamma, depth), unstopped, depth)


def enumerate_walk_stats(p_minus, gamma: float, depth: int, which: str = MINUS):
    """Brute-force oracle: enumerate every sign sequence of up to ``depth``
    draws and accumulate the stopped contributions.  Exponential cost; for
    cross-checking the DP at small depth only."""
    p_up = _p_up(p_minus, which)
    p_down = 1.0 - p_up
    e_n = 0.0
    e_s = 0.0
    stack = [(0, 0, 1.0)]  # (ups, downs, prob) of alive prefixes
    while stack:
        ups, downs, prob = stack.pop()
        if ups + downs >= depth:
            continue
        for up in (True, False):
            u2 = ups + (1 if up else 0)
            v2 = downs + (0 if up else 1)
            pr = prob * (p_up if up else p_down)
            w = float(u2) - gamma * float(v2)
            if w <= -1.0:
                e_n += pr * (u2 + v2 + 1)
                e_s += pr * w
            else:
                stack.append((u2, v2, pr))
    return e_n, e_s


def wald_residual(summary: WalkSummary, probs, gamma: float) -> float:
    """|mean_s - drift * (mean_n - 1)| for the summary's walk."""
    p_up = _p_up(probs, summary.which)
    drift = p_up - gamma * (1.0 - p_up)
    return abs(summary.mean_s.value - drift * (summary.mean_n.value - 1.0))


def wald_check(summary: WalkSummary, probs, gamma: float) -> tuple[float, float]:
    """(residual, propagated SE): the SE comes from batch-level residuals, so
    the n/s covariance is accounted for."""
    p_up = _p_up(probs, summary.which)
    drift = p_up - gamma * (1.0 - p_up)
    per_batch = summary.batch_mean_s - drift * (summary.batch_mean_n - 1.0)
    valid = per_batch[np.isfinite(per_batch)]
    se = float(np.std(valid, ddof=1) / math.sqrt(valid.size)) if valid.size >= 2 else float("nan")
    return wald_residual(summary, probs, gamma), se


def esn_sweep(
    p_minus,
    gamma_grid,
    seed: int,
    trials: int = 40_000,
    cap: int = 3_000,
    threads: int | None = None,
    backend: str | None = None,
) -> list[tuple[float, WalkSummary]]:
    """Terminal-sum expectation sweep over a gamma grid.

    Each grid cell runs on its own stream (stream_id = cell index), so the
    result is independent of the thread count and of scheduling order.
    """
    gammas = [float(g) for g in gamma_grid]

    def cell(i: int) -> WalkSummary:
        return walk_summary(
            p_minus, gammas[i], seed, trials=trials, cap=cap, stream_id=i,
            backend=backend,
        )

    if threads is None or threads <= 1 or len(gammas) <= 1:
        summaries = [cell(i) for i in range(len(gammas))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            summaries = list(pool.map(cell, range(len(gammas))))
    return list(zip(gammas, summaries))


def uniform_gamma_grid(lo: float, hi: float, points: int) -> list[float]:
    """Uniformly spaced interior points of (lo, hi), endpoints excluded."""
    if points < 1:
        raise ValueError("points must be >= 1")
    h = (hi - lo) / (points + 1)
    return [lo + (i + 1) * h for i in range(points)]


def mu_M_walk_bound(e_s: float, gamma: float) -> float:
    """Middle-interval mass bound (gamma-1)/(gamma-1-e_s) from the terminal-sum
    expectation, for the symmetric-probability case."""
    if gamma <= 1.0:
        raise ValueError(f"gamma must be > 1, got {gamma}")
    if e_s >= 0.0:
        raise ValueError(f"e_s must be negative, got {e_s}")
    return (gamma - 1.0) / (gamma - 1.0 - e_s)


def sample_return_time(
    sys: AMSystem,
    probs: ProbVector,
    stream: SymbolStream,
    start,
    cap: int = 100_000,
    first_symbol: str | None = None,
) -> ReturnOutcome:
    """First return time to the middle interval under the actual maps.

    ``start`` must lie in M (a float or a bulk HybridPoint).  The first symbol
    may be forced (for stream-matched comparisons against the walk sampler);
    otherwise it is drawn.  One-step exits can only occur from the minus map
    on L or the plus map on R.
    """
    if isinstance(start, HybridPoint):
        point = start
    else:
        point = HybridPoint.from_x(sys, float(start))
    if point.region != BULK:
        raise ValueError("start must lie in the middle interval")
    symbol = first_symbol if first_symbol is not None else stream.next()
    point = step(sys, point, symbol)
    if point.region == BULK:
        return ReturnOutcome(1, "stayed")
    exit_side = "left-via-L" if point.region == LEFT_TAIL else "right-via-R"
    n = 1
    while n < cap:
        point = step(sys, point, stream.next())
        n += 1
        if point.region == BULK:
            return ReturnOutcome(n, exit_side)
    return ReturnOutcome(n, exit_side, censored=True)


def kac_residual(sys: AMSystem, probs: ProbVector, seed: int, orbit_length: int,
                 burn_in: int = 10_000, backend: str | None = None) -> float:
    """|mean(n_M) * mu(M) - 1| from one long orbit.

    Every orbit step inside M counts as one visit; the mean return time is the
    span between the first and last visit divided by the number of completed
    returns, and mu(M) is the occupation fraction from the same orbit.
    """
    est = estimate_measure(
        sys, probs, seed=seed, burn_in=burn_in, length=orbit_length, backend=backend
    )
    frac_m = est.measure.mass_M / est.measure.total
    return abs(kac_mean_return(est) * frac_m - 1.0)
