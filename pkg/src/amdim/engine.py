"""Deterministic seeded randomness and underflow-safe orbit iteration.

Randomness comes from numpy's Philox counter-based generator keyed by
(seed, stream_id) through SeedSequence spawn keys: the same pair always yields
the same stream on every platform, and distinct stream ids give independent
streams, so parallel sweeps stay reproducible regardless of scheduling.

Orbit state is a hybrid representation.  Inside the middle interval
M = [x_plus, x_minus] the point is stored as a distance ``mag`` to the nearer
endpoint (``side`` 0 measures from 0, side 1 from 1), which keeps full
relative precision even when the breakpoints are within 1e-300 of the
endpoints.  Outside M the point is stored in log coordinates: an entry depth
plus an exact integer ledger of contracting/expanding steps, so a tail
excursion updates as t <- t + 1 or t <- t - gamma with no underflow for any
representable slope.  Exits recover the bulk coordinate through the affine
branch formulas.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .core import AMSystem, ProbVector, MINUS, PLUS, _check_symbol
from .kernels import get_backend

CHUNK = 1 << 16

BULK = "bulk"
LEFT_TAIL = "left-tail"
RIGHT_TAIL = "right-tail"


class RngStream:
    """Counter-based uniform stream addressed by (seed, stream_id)."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        key = SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self._gen = Generator(Philox(key))

    def uniforms(self, n: int) -> np.ndarray:
        return self._gen.random(int(n))

    def next_uniform(self) -> float:
        return float(self._gen.random())


class SymbolStream:
    """I.i.d. symbols: '-' with probability p_minus, '+' otherwise."""

    def __init__(self, source: RngStream, p_minus: float):
        if not (0.0 <= p_minus <= 1.0):
            raise ValueError(f"p_minus must lie in [0, 1], got {p_minus}")
        self.source = source
        self.p_minus = p_minus

    def next(self) -> str:
        return MINUS if self.source.next_uniform() < self.p_minus else PLUS


def next_symbol(stream: SymbolStream) -> str:
    """Draw one symbol, advancing the stream."""
    return stream.next()


@dataclass(frozen=True)
class HybridPoint:
    """Orbit state: bulk magnitude or log-coordinate tail ledger.

    In bulk, the coordinate is ``mag`` from endpoint 0 (side 0) or ``1 - mag``
    (side 1).  In a tail, the log depth above the entry threshold is
    ``depth + ups - gamma*downs``; ``ups``/``downs`` count contracting and
    expanding steps exactly, so pure-tail excursions accumulate no rounding
    beyond the single fused comparison per step.
    """

    region: str
    side: int = 0
    mag: float = 0.0
    depth: float = 0.0
    ups: int = 0
    downs: int = 0

    @property
    def bulk_x(self) -> float:
        if self.region != BULK:
            raise ValueError("bulk_x is only defined for bulk points")
        return self.mag if self.side == 0 else 1.0 - self.mag

    def tail_excess(self, sys: AMSystem) -> float:
        """Depth above the tail-entry threshold (positive while in a tail)."""
        if self.region == BULK:
            raise ValueError("tail_excess is only defined for tail points")
        w = float(self.ups) - sys.gamma * float(self.downs)
        return self.depth + w

    def tail_t(self, sys: AMSystem) -> float:
        """Log coordinate t = log_a(x) (left tail) or log_a(1-x) (right tail)."""
        return sys.t_plus + self.tail_excess(sys)

    def value(self, sys: AMSystem) -> float:
        """Coordinate as a plain double; deep tails round to 0.0 or 1.0."""
        if self.region == BULK:
            return self.bulk_x
        m = math.exp(self.tail_t(sys) * sys.ln_a)
        return m if self.region == LEFT_TAIL else 1.0 - m

    @staticmethod
    def from_x(sys: AMSystem, x: float) -> "HybridPoint":
        """Classify a plain coordinate; 0 and 1 are rejected (fixed points)."""
        if not (0.0 < x < 1.0):
            raise ValueError(f"x must lie strictly inside (0, 1), got {x}")
        if sys.x_plus <= x <= sys.x_minus:
            if x <= 0.5:
                return HybridPoint(BULK, 0, x)
            return HybridPoint(BULK, 1, 1.0 - x)
        if x < sys.x_plus:
            d = math.log(x) / sys.ln_a - sys.t_plus
            return HybridPoint(LEFT_TAIL, 0, 0.0, d, 0, 0)
        d = math.log(1.0 - x) / sys.ln_a - sys.t_plus
        return HybridPoint(RIGHT_TAIL, 1, 0.0, d, 0, 0)


def check_tail_feasible(sys: AMSystem) -> None:
    """Reject parameter combinations whose bulk products would underflow.

    The deepest bulk magnitude is about a**(1+gamma); keep it comfortably
    inside the normal double range.
    """
    if (1.0 + sys.gamma + 1.0) * (-sys.ln_a) > 700.0:
        raise ValueError(
            f"a={sys.a} with gamma={sys.gamma} is too extreme for the hybrid "
            "representation (bulk magnitudes would underflow)"
        )


def step(sys: AMSystem, point: HybridPoint, symbol: str) -> HybridPoint:
    """One application of f_symbol in the hybrid representation.

    Mirrors the kernel transition exactly: a tail-preserving step updates the
    integer ledger only, and crossing x_plus / x_minus re-derives the bulk
    coordinate from the affine branch through the fixed endpoint.
    """
    _check_symbol(symbol)
    minus = symbol == MINUS
    if point.region == BULK:
        if minus:
            xl = point.mag if point.side == 0 else 1.0 - point.mag
            nm = sys.a * xl
            if nm < sys.x_plus:
                d = (math.log(xl) / sys.ln_a - sys.t_plus) + 1.0
                return HybridPoint(LEFT_TAIL, 0, 0.0, d, 0, 0)
            return HybridPoint(BULK, 0, nm)
        xl = point.mag if point.side == 1 else 1.0 - point.mag
        nm = sys.a * xl
        if nm < sys.x_plus:
            d = (math.log(xl) / sys.ln_a - sys.t_plus) + 1.0
            return HybridPoint(RIGHT_TAIL, 1, 0.0, d, 0, 0)
        return HybridPoint(BULK, 1, nm)
    deeper = minus if point.region == LEFT_TAIL else not minus
    ups, downs = point.ups, point.downs
    if deeper:
        ups += 1
    else:
        downs += 1
    w = float(ups) - sys.gamma * float(downs)
    dd = point.depth + w
    if dd <= 0.0:
        # exit lands in M; it can overshoot almost to the far endpoint, so
        # store it from whichever endpoint it is nearer.  The far distance is
        # 1 - (1-far_gap)*a^(dd+gamma), evaluated without cancellation.
        mag = sys.x_plus * math.exp(dd * sys.ln_a)
        side = 0 if point.region == LEFT_TAIL else 1
        if mag > 0.5:
            dprev = dd + sys.gamma
            mag = -math.expm1(dprev * sys.ln_a) + sys.far_gap * math.exp(dprev * sys.ln_a)
            side = 1 - side
        return HybridPoint(BULK, side, mag)
    return HybridPoint(point.region, point.side, 0.0, point.depth, ups, downs)


def run_orbit(
    sys: AMSystem,
    probs: ProbVector,
    seed: int,
    stream_id: int,
    burn_in: int,
    length: int,
    observers: list,
):
    """Iterate from x0 = 1/2, discard burn_in steps, then feed every
    (coordinate, symbol) pair to each observer exactly once, in order.

    Observers implement ``observe(x, symbol)`` and ``result()``.  This is the
    reference path (one Python step per iteration); the estimators in
    :mod:`amdim.measure` use the batched kernels instead.  Deterministic per
    (seed, stream_id).  Set AMDIM_DEBUG_ORBIT=1 to assert, on every step, that
    the orbit never hops between the two tails without visiting the middle
    interval.
    """
    burn_in = int(burn_in)
    length = int(length)
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    if length < 1:
        raise ValueError("length must be >= 1")
    check_tail_feasible(sys)
    debug = os.environ.get("AMDIM_DEBUG_ORBIT", "") not in ("", "0")
    stream = SymbolStream(RngStream(seed, stream_id), probs.p_minus)
    point = HybridPoint(BULK, 0, 0.5)
    prev_region = point.region
    for i in range(burn_in + length):
        symbol = stream.next()
        if i >= burn_in:
            x = point.value(sys)
            for obs in observers:
                obs.observe(x, symbol)
        point = step(sys, point, symbol)
        if debug:
            if {prev_region, point.region} == {LEFT_TAIL, RIGHT_TAIL}:
                raise AssertionError("orbit jumped between tails without entering M")
            prev_region = point.region
    return [obs.result() for obs in observers]


@dataclass
class OrbitAccumulators:
    """Raw per-batch counts and histograms from one kernel-driven orbit."""

    sys: AMSystem
    probs: ProbVector
    seed: int
    stream_id: int
    burn_in: int
    length: int
    nbins: int
    counts_M: np.ndarray
    counts_left: np.ndarray
    counts_right: np.ndarray
    counts_L: np.ndarray
    counts_C: np.ndarray
    counts_R: np.ndarray
    integrand_sum: np.ndarray
    hist: np.ndarray
    tail_hist_left: np.ndarray
    tail_hist_right: np.ndarray
    tail_resolution: int
    kac_first: int
    kac_last: int
    batch_sizes: np.ndarray
    final_state: HybridPoint


def accumulate_orbit(
    sys: AMSystem,
    probs: ProbVector,
    seed: int = 0,
    stream_id: int = 0,
    burn_in: int = 10_000,
    length: int = 10_000_000,
    nbins: int = 4096,
    tail_levels: int = 512,
    tail_resolution: int = 64,
    backend: str | None = None,
) -> OrbitAccumulators:
    """Run one orbit through the selected kernel, accumulating the standard
    observers (interval counts, histogram, tail cells, integrand sums, and
    the first/last visit times to M) over 100 consecutive batches.

    Tail occupation is recorded in cells of width 1/tail_resolution in the log
    coordinate, up to ``tail_levels`` whole levels (deeper visits clamp into
    the last cell).
    """
    burn_in = int(burn_in)
    length = int(length)
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    if length < 100:
        raise ValueError("length must be >= 100 (batched estimation)")
    check_tail_feasible(sys)
    kern = get_backend(backend)

    a, gamma = sys.a, sys.gamma
    la = sys.ln_a
    lb = -gamma * la
    p_minus, p_plus = probs.p_minus, probs.p_plus
    integrand_left = p_minus * la + p_plus * lb
    integrand_right = p_minus * lb + p_plus * la
    integrand_bulk = la

    batch_len = length // 100
    batch_sizes = np.full(100, batch_len, dtype=np.int64)
    batch_sizes[99] += length - 100 * batch_len

    counts = [np.zeros(100, dtype=np.int64) for _ in range(6)]
    integrand_sum = np.zeros(100, dtype=np.float64)
    hist = np.zeros(nbins, dtype=np.int64)
    n_cells = tail_levels * tail_resolution
    t_left = np.zeros(n_cells, dtype=np.int64)
    t_right = np.zeros(n_cells, dtype=np.int64)
    kac = np.array([-1, -1], dtype=np.int64)

    fstate = np.array([0.5, 0.0], dtype=np.float64)  # start at x0 = 1/2
    istate = np.array([0, 0, 0, 0, 0, 0, batch_len], dtype=np.int64)

    stream = RngStream(seed, stream_id)
    remaining = burn_in + length
    while remaining > 0:
        n = min(CHUNK, remaining)
        kern.orbit_chunk(
            stream.uniforms(n), fstate, istate,
            a, gamma, p_minus,
            sys.x_plus, sys.partition.sup_L, sys.partition.inf_R,
            sys.partition.separated, la, sys.t_plus, sys.far_gap,
            tail_resolution,
            integrand_left, integrand_right, integrand_bulk,
            burn_in, batch_len,
            counts[0], counts[1], counts[2], counts[3], counts[4], counts[5],
            integrand_sum, hist, t_left, t_right, kac,
        )
        remaining -= n

    region = (BULK, LEFT_TAIL, RIGHT_TAIL)[int(istate[0])]
    if region == BULK:
        final = HybridPoint(BULK, int(istate[1]), float(fstate[0]))
    else:
        final = HybridPoint(
            region, int(istate[1]), 0.0, float(fstate[1]), int(istate[2]), int(istate[3])
        )
    return OrbitAccumulators(
        sys=sys, probs=probs, seed=seed, stream_id=stream_id,
        burn_in=burn_in, length=length, nbins=nbins,
        counts_M=counts[0], counts_left=counts[1], counts_right=counts[2],
        counts_L=counts[3], counts_C=counts[4], counts_R=counts[5],
        integrand_sum=integrand_sum, hist=hist,
        tail_hist_left=t_left, tail_hist_right=t_right,
        tail_resolution=tail_resolution,
        kac_first=int(kac[0]), kac_last=int(kac[1]),
        batch_sizes=batch_sizes, final_state=final,
    )
