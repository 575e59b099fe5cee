"""Map definitions, breakpoint geometry, and the separation criteria.

Frozen expected values were computed independently with 40-digit mpmath
arithmetic from the defining formulas.
"""

import math

import numpy as np
import pytest

from amdim import core
from amdim.core import MINUS, PLUS, AMSystem, ProbVector, new_system


def random_systems(n, seed, a_range=(0.02, 0.95), g_range=(1.02, 3.0)):
    rng = np.random.RandomState(seed)
    out = []
    for _ in range(n):
        a = rng.uniform(*a_range)
        g = rng.uniform(*g_range)
        out.append(AMSystem.create(a, g))
    return out


class TestConstruction:
    def test_derived_breakpoints_frozen(self):
        # b = 10**1.2, x_minus = (b-1)/(b-a)
        sys_, probs = new_system(0.1, 1.2, 0.5)
        assert sys_.b == pytest.approx(15.848931924611135, rel=1e-14)
        assert sys_.x_minus == pytest.approx(0.9428532674908859, rel=1e-13)
        assert sys_.x_plus == pytest.approx(0.05714673250911410, rel=1e-13)

    @pytest.mark.parametrize(
        "a,gamma,p",
        [(0.5, 1.0, 0.5), (0.5, 0.8, 0.5), (0.0, 1.2, 0.5), (1.0, 1.2, 0.5),
         (0.5, 1.2, 0.0), (0.5, 1.2, 1.0), (-0.1, 1.2, 0.5)],
    )
    def test_rejects_out_of_range(self, a, gamma, p):
        with pytest.raises(ValueError):
            new_system(a, gamma, p)

    def test_breakpoints_sum_to_one(self):
        for sys_ in random_systems(200, 11):
            assert abs(sys_.x_plus + sys_.x_minus - 1.0) <= 1e-14
            assert sys_.x_plus < sys_.x_minus

    def test_prob_vector_fields(self):
        probs = ProbVector(0.3)
        assert probs.p_plus == 0.7
        assert probs.p == 0.7
        assert probs.entropy == pytest.approx(
            -0.3 * math.log(0.3) - 0.7 * math.log(0.7), rel=1e-15
        )
        assert ProbVector(0.5).entropy == pytest.approx(math.log(2.0), rel=1e-15)

    def test_far_gap_matches_breakpoint_image(self):
        for sys_ in random_systems(50, 12):
            assert sys_.far_gap == pytest.approx(
                core.apply_map(sys_, MINUS, sys_.x_minus), rel=1e-13
            )


class TestApplyMap:
    def test_endpoints_fixed_exactly(self):
        for sys_ in random_systems(50, 3):
            for sym in (MINUS, PLUS):
                assert core.apply_map(sys_, sym, 0.0) == 0.0
                assert core.apply_map(sys_, sym, 1.0) == 1.0

    def test_breakpoint_images_frozen(self):
        # b = 0.25**-1.25 = 5.656854249492380
        sys_ = AMSystem.create(0.25, 1.25)
        assert core.apply_map(sys_, MINUS, sys_.x_minus) == pytest.approx(
            0.21532179501276489, rel=1e-13
        )
        assert core.apply_map(sys_, PLUS, sys_.x_plus) == pytest.approx(
            0.78467820498723511, rel=1e-13
        )

    def test_domain_rejected(self):
        sys_ = AMSystem.create(0.3, 1.4)
        for bad in (-0.1, 1.1, math.nan):
            with pytest.raises(ValueError):
                core.apply_map(sys_, MINUS, bad)
        with pytest.raises(ValueError):
            core.apply_map(sys_, "x", 0.5)

    def test_strictly_increasing(self):
        rng = np.random.RandomState(5)
        for sys_ in random_systems(10, 6):
            xs = np.sort(rng.uniform(0.0, 1.0, 2000))
            for sym in (MINUS, PLUS):
                ys = [core.apply_map(sys_, sym, float(x)) for x in xs]
                assert all(y1 < y2 for y1, y2 in zip(ys, ys[1:]))

    def test_intermediate_inequality(self):
        # holds strictly away from the fixed endpoints (16-ulp exclusion)
        rng = np.random.RandomState(7)
        eps = 16 * math.ulp(1.0)
        for sys_ in random_systems(10, 8):
            for x in rng.uniform(eps, 1.0 - eps, 1000):
                x = float(x)
                assert core.apply_map(sys_, MINUS, x) < x < core.apply_map(sys_, PLUS, x)

    def test_mirror_conjugacy(self):
        rng = np.random.RandomState(9)
        for sys_ in random_systems(10, 10):
            for x in rng.uniform(0.0, 1.0, 1000):
                x = float(x)
                lhs = core.apply_map(sys_, PLUS, x)
                rhs = 1.0 - core.apply_map(sys_, MINUS, 1.0 - x)
                assert abs(lhs - rhs) <= 1e-14

    def test_branches_agree_at_breakpoint(self):
        for sys_ in random_systems(100, 13):
            left_p, right_p = core.branches(sys_, PLUS)
            assert abs(left_p(sys_.x_plus) - right_p(sys_.x_plus)) <= 1e-14
            # the minus map's continuity is the mirrored identity; evaluate the
            # steep branch through the accurately stored gap x_plus = 1 - x_minus
            left_m, right_m = core.branches(sys_, MINUS)
            assert abs(left_m(sys_.x_minus) - (1.0 - sys_.b * sys_.x_plus)) <= 1e-14
            assert {left_m.slope, right_m.slope} == {sys_.a, sys_.b}
            assert {left_p.slope, right_p.slope} == {sys_.a, sys_.b}


class TestInverse:
    def test_zero_fixed(self):
        sys_ = AMSystem.create(0.2, 1.5)
        assert core.apply_inverse(sys_, MINUS, 0.0) == 0.0

    def test_round_trip(self):
        rng = np.random.RandomState(21)
        for sys_ in random_systems(10, 22):
            for y in rng.uniform(0.0, 1.0, 1000):
                y = float(y)
                for sym in (MINUS, PLUS):
                    back = core.apply_map(sys_, sym, core.apply_inverse(sys_, sym, y))
                    assert abs(back - y) <= 1e-12

    def test_plus_preimage_of_x_minus_above_x_plus(self):
        # the middle interval meets its plus-map preimage
        sys_ = AMSystem.create(0.1, 1.3)
        assert core.apply_inverse(sys_, PLUS, sys_.x_minus) > sys_.x_plus
        for sys_ in random_systems(100, 23):
            assert core.apply_inverse(sys_, PLUS, sys_.x_minus) > sys_.x_plus

    def test_domain_rejected(self):
        sys_ = AMSystem.create(0.3, 1.4)
        with pytest.raises(ValueError):
            core.apply_inverse(sys_, PLUS, 1.5)


class TestLogDerivative:
    def test_branch_values(self):
        sys_ = AMSystem.create(0.2, 1.4)
        la = math.log(0.2)
        lb = -1.4 * la
        assert core.log_derivative(sys_, MINUS, 0.5 * sys_.x_minus) == la
        assert core.log_derivative(sys_, MINUS, 0.5 + 0.5 * sys_.x_minus) == lb
        assert core.log_derivative(sys_, PLUS, 0.5 * sys_.x_plus) == lb
        assert core.log_derivative(sys_, PLUS, 0.9) == la

    def test_left_branch_at_breakpoints(self):
        sys_ = AMSystem.create(0.2, 1.4)
        la = math.log(0.2)
        assert core.log_derivative(sys_, MINUS, sys_.x_minus) == la
        assert core.log_derivative(sys_, PLUS, sys_.x_plus) == -1.4 * la


class TestSeparationCriteria:
    def test_disjoint_type_frozen_example(self):
        assert core.is_disjoint_type(AMSystem.create(0.25, 1.25))

    def test_disjoint_type_below_half(self):
        for sys_ in random_systems(200, 31, a_range=(0.01, 0.4999)):
            assert core.is_disjoint_type(sys_)

    def test_disjoint_type_extreme_slope(self):
        # direct evaluation: f-(x-) = 0.499987 < 0.500013 = f+(x+)
        sys_ = AMSystem.create(0.99, 1.01)
        assert core.is_disjoint_type(sys_) == (
            core.apply_map(sys_, MINUS, sys_.x_minus)
            < core.apply_map(sys_, PLUS, sys_.x_plus)
        )
        assert core.is_disjoint_type(sys_)

    def test_lr_threshold_frozen(self):
        assert core.lr_gamma_threshold(0.1) == pytest.approx(
            1.2576785748691845, rel=1e-14
        )

    def test_criteria_agree(self):
        for sys_ in random_systems(10_000, 32):
            answers = {core.lr_separated(sys_, c) for c in ("interval", "midpoint", "analytic")}
            assert len(answers) == 1

    def test_sufficient_slope(self):
        # any a below 2**(1/(1-gamma)) separates
        rng = np.random.RandomState(33)
        for _ in range(200):
            g = rng.uniform(1.05, 3.0)
            a_cap = 2.0 ** (1.0 / (1.0 - g))
            a = rng.uniform(0.0, a_cap)
            if not 0.0 < a < 1.0:
                continue
            assert core.lr_separated(AMSystem.create(a, g), "analytic")

    def test_exit_structure(self):
        # one-step exits from M happen only from L (minus) or R (plus)
        rng = np.random.RandomState(34)
        for sys_ in random_systems(20, 35):
            part = sys_.partition
            xs = rng.uniform(part.x_plus, part.x_minus, 500)
            for x in xs:
                x = float(x)
                if core.apply_map(sys_, MINUS, x) < part.x_plus:
                    assert part.x_plus <= x < part.sup_L
                if core.apply_map(sys_, PLUS, x) > part.x_minus:
                    assert part.inf_R < x <= part.x_minus

    def test_partition_intervals(self):
        sys_ = AMSystem.create(0.1, 1.3)
        part = sys_.partition
        assert part.separated
        assert part.M == (part.x_plus, part.x_minus)
        assert part.L == (part.x_plus, part.sup_L)
        assert part.R == (part.inf_R, part.x_minus)
        assert part.C == (part.sup_L, part.inf_R)
        assert part.sup_L == pytest.approx(part.x_plus / 0.1, rel=1e-15)
        # unseparated system has no middle gap
        tight = AMSystem.create(0.45, 1.05)
        assert not core.lr_separated(tight, "interval")
        assert tight.partition.C is None
