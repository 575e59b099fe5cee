"""Symmetric two-slope AM interval systems: maps, inverses, breakpoint geometry.

The system is a pair of increasing piecewise-affine homeomorphisms of [0,1],
``f_minus`` and ``f_plus``, each fixing 0 and 1, parametrized by a contraction
slope ``a`` in (0,1) and an exponent ``gamma`` > 1 through the expansion slope
``b = a**(-gamma)``.  ``f_plus`` is the mirror image of ``f_minus`` under
``x -> 1 - x``.  Everything here is a pure function of the parameters; all
types are immutable and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MINUS = "-"
PLUS = "+"
SYMBOLS = (MINUS, PLUS)


def _check_symbol(symbol: str) -> None:
    if symbol not in SYMBOLS:
        raise ValueError(f"symbol must be '-' or '+', got {symbol!r}")


@dataclass(frozen=True)
class AMParams:
    """Slope parameters.  ``b`` is derived once as exp(-gamma*log(a))."""

    a: float
    gamma: float
    b: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ValueError(f"a must lie in (0, 1), got {self.a}")
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must be > 1, got {self.gamma}")
        object.__setattr__(self, "b", math.exp(-self.gamma * math.log(self.a)))


@dataclass(frozen=True)
class ProbVector:
    """Probabilities (p_minus, p_plus) with p_plus stored as 1 - p_minus."""

    p_minus: float
    p_plus: float = 0.0
    p: float = 0.0
    entropy: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.p_minus < 1.0):
            raise ValueError(f"p_minus must lie in (0, 1), got {self.p_minus}")
        p_plus = 1.0 - self.p_minus
        object.__setattr__(self, "p_plus", p_plus)
        object.__setattr__(self, "p", max(self.p_minus, p_plus))
        h = -self.p_minus * math.log(self.p_minus) - p_plus * math.log(p_plus)
        object.__setattr__(self, "entropy", h)


@dataclass(frozen=True)
class Branch:
    """One affine piece of a map: f(x) = slope*x + offset on its side of the breakpoint.

    Right branches pass through the fixed point 1, so they are evaluated as
    1 - slope*(1-x) (equivalent to slope*x + offset but without cancellation
    when the slope is large).
    """

    tag: str  # "left" or "right"
    slope: float
    offset: float

    def __call__(self, x: float) -> float:
        if self.tag == "right":
            return 1.0 - self.slope * (1.0 - x)
        return self.slope * x + self.offset


@dataclass(frozen=True)
class IntervalPartition:
    """Breakpoints and the middle-interval split.

    M = [x_plus, x_minus] is the middle interval.  L = [x_plus, sup_L) and
    R = (inf_R, x_minus] are the one-step exit slivers, with sup_L the
    preimage of x_plus under f_minus and inf_R its mirror.  C = [sup_L, inf_R]
    exists only when L and R have disjoint closures (``separated``).
    """

    x_minus: float
    x_plus: float
    sup_L: float
    inf_R: float
    separated: bool

    @property
    def M(self) -> tuple[float, float]:
        return (self.x_plus, self.x_minus)

    @property
    def L(self) -> tuple[float, float]:
        return (self.x_plus, self.sup_L)

    @property
    def R(self) -> tuple[float, float]:
        return (self.inf_R, self.x_minus)

    @property
    def C(self) -> tuple[float, float] | None:
        if not self.separated:
            return None
        return (self.sup_L, self.inf_R)


@dataclass(frozen=True)
class AMSystem:
    """Parameter bundle plus cached geometry used by the simulation kernels.

    ``x_plus`` is computed directly as (1-a)/(b-a) so that it stays accurate
    for very small ``a`` (it can be far below the spacing of doubles near 1);
    ``x_minus`` is then forced to 1 - x_plus, which keeps the mirror symmetry
    of the two breakpoints exact to rounding.
    """

    params: AMParams
    partition: IntervalPartition
    ln_a: float = 0.0
    t_plus: float = 0.0  # log_a(x_plus), the tail-entry threshold depth
    far_gap: float = 0.0  # f_minus(x_minus) = 1 - f_plus(x_plus), cancellation-free

    def __post_init__(self):
        object.__setattr__(self, "ln_a", math.log(self.params.a))
        object.__setattr__(
            self, "t_plus", math.log(self.partition.x_plus) / self.ln_a
        )
        a, b = self.params.a, self.params.b
        object.__setattr__(self, "far_gap", a * ((b - 1.0) / (b - a)))

    @classmethod
    def create(cls, a: float, gamma: float) -> "AMSystem":
        params = AMParams(a, gamma)
        x_plus = (1.0 - a) / (params.b - a)
        x_minus = 1.0 - x_plus
        sup_l = x_plus / a
        inf_r = 1.0 - sup_l
        separated = sup_l < inf_r
        part = IntervalPartition(x_minus, x_plus, sup_l, inf_r, separated)
        return cls(params, part)

    @property
    def a(self) -> float:
        return self.params.a

    @property
    def b(self) -> float:
        return self.params.b

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def x_minus(self) -> float:
        return self.partition.x_minus

    @property
    def x_plus(self) -> float:
        return self.partition.x_plus


def new_system(a: float, gamma: float, p_minus: float) -> tuple[AMSystem, ProbVector]:
    """Build a system and its probability vector, validating all parameters.

    The system object carries the slope parameters (``sys.params``) and the
    breakpoint partition (``sys.partition``); gamma <= 1 is rejected because
    x_plus < x_minus is no longer guaranteed there.
    """
    return AMSystem.create(a, gamma), ProbVector(p_minus)


def branches(sys: AMSystem, symbol: str) -> tuple[Branch, Branch]:
    """The two affine pieces of f_symbol, left of and right of its breakpoint."""
    _check_symbol(symbol)
    a, b = sys.a, sys.b
    if symbol == MINUS:
        return Branch("left", a, 0.0), Branch("right", b, 1.0 - b)
    return Branch("left", b, 0.0), Branch("right", a, 1.0 - a)


def apply_map(sys: AMSystem, symbol: str, x: float) -> float:
    """Evaluate f_minus or f_plus at x in [0, 1].

    Fixes 0 and 1 exactly and is strictly increasing; the breakpoint itself is
    evaluated on the left branch (the two branches agree there).
    """
    _check_symbol(symbol)
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if symbol == MINUS:
        if x <= sys.x_minus:
            return sys.a * x
        return 1.0 - sys.b * (1.0 - x)
    if x <= sys.x_plus:
        return sys.b * x
    return 1.0 - sys.a * (1.0 - x)


def apply_inverse(sys: AMSystem, symbol: str, y: float) -> float:
    """Inverse map: apply_map(sys, s, apply_inverse(sys, s, y)) == y to ~1e-12."""
    _check_symbol(symbol)
    if not (0.0 <= y <= 1.0):
        raise ValueError(f"y must lie in [0, 1], got {y}")
    if symbol == MINUS:
        # image of the breakpoint separates the two branches
        if y <= sys.a * sys.x_minus:
            return y / sys.a
        return 1.0 - (1.0 - y) / sys.b
    if y <= sys.b * sys.x_plus:
        return y / sys.b
    return 1.0 - (1.0 - y) / sys.a


def log_derivative(sys: AMSystem, symbol: str, x: float) -> float:
    """log f'_symbol(x) in nats; returns the left-branch slope at the breakpoint.

    The maps are non-differentiable exactly at their breakpoints (a null set
    for the measures of interest); taking the left branch there makes this a
    total function.
    """
    _check_symbol(symbol)
    log_a = sys.ln_a
    log_b = -sys.gamma * log_a
    if symbol == MINUS:
        return log_a if x <= sys.x_minus else log_b
    return log_b if x <= sys.x_plus else log_a


def is_disjoint_type(sys: AMSystem) -> bool:
    """True iff f_minus(x_minus) < f_plus(x_plus) (the breakpoint images do not cross)."""
    return apply_map(sys, MINUS, sys.x_minus) < apply_map(sys, PLUS, sys.x_plus)


def lr_gamma_threshold(a: float) -> float:
    """Smallest exponent above which the exit slivers L and R separate, for slope a."""
    if not (0.0 < a < 1.0):
        raise ValueError(f"a must lie in (0, 1), got {a}")
    return 1.0 - math.log(a * a - 2.0 * a + 2.0) / math.log(a)


def lr_separated(sys: AMSystem, criterion: str = "analytic") -> bool:
    """Decide whether closure(L) and closure(R) are disjoint.

    Three equivalent criteria are implemented and must agree:
    ``interval`` compares the interval endpoints directly, ``midpoint`` tests
    x_plus < f_minus(1/2), and ``analytic`` tests gamma against
    ``lr_gamma_threshold(a)``.
    """
    if criterion == "interval":
        return sys.partition.sup_L < sys.partition.inf_R
    if criterion == "midpoint":
        return sys.x_plus < apply_map(sys, MINUS, 0.5)
    if criterion == "analytic":
        return sys.gamma > lr_gamma_threshold(sys.a)
    raise ValueError(f"unknown criterion {criterion!r}")
