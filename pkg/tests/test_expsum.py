import math

import numpy as np
import pytest
from scipy.optimize import brentq

import blkit
from blkit import expsum
from blkit.errors import DeltaOutOfRange, InputError, NotInterior

from conftest import example_instance


def tau_root() -> float:
    return brentq(lambda t: t**4 - t - 1.0, 1.0, 2.0, xtol=1e-15)


# minimum of the four-term family at a = b = 1 from the closed-form root:
# x* = -2 log(tau), y* = -log(tau)
def case4_value() -> float:
    tau = tau_root()
    return tau**2 + tau**-2 + 2.0 / tau


def random_instance(rng, max_dim=3, max_size=6, lattice=False):
    """Seeded instance; lattice=True draws small-integer exponents, which hit
    boundary configurations with decent probability (continuous draws almost
    never put the origin exactly on a hull face)."""
    dim = int(rng.integers(1, max_dim + 1))
    size = int(rng.integers(2, max_size + 1))
    if lattice:
        size = min(size, 5**dim - 1)  # distinct small-integer vectors exist
    while True:
        if lattice:
            u = rng.integers(-2, 3, size=(size, dim)).astype(float)
        else:
            u = rng.uniform(-2.0, 2.0, size=(size, dim))
        gaps = np.linalg.norm(u[:, None, :] - u[None, :, :], axis=2)
        np.fill_diagonal(gaps, np.inf)
        if gaps.min() > 1e-3:
            break
    coeffs = np.where(
        rng.random(size) < 0.25, 0.0, 10.0 ** rng.uniform(-4.0, math.log10(3.0), size)
    )
    return blkit.ExpSumInstance.create(dim, u, coeffs)


class TestEvaluate:
    def test_all_ones_at_origin(self):
        inst = example_instance(1.0, 1.0)
        assert blkit.evaluate(inst, [0.0, 0.0]) == pytest.approx(4.0, rel=1e-14)

    def test_vanished_coefficients_along_ray(self):
        inst = example_instance(0.0, 0.0)
        y = [math.log(2.0), 2.0 * math.log(2.0)]
        assert blkit.evaluate(inst, y) == pytest.approx(1.0, rel=1e-12)

    def test_zero_coefficients(self):
        inst = blkit.ExpSumInstance.create(2, [[1, 0], [0, 1]], [0.0, 0.0])
        assert blkit.evaluate(inst, [3.0, -7.0]) == 0.0

    def test_huge_exponents_stay_finite_objects(self):
        decay = blkit.ExpSumInstance.create(1, [[1.0]], [1.0])
        assert blkit.evaluate(decay, [-1e6]) == 0.0
        cosh = blkit.ExpSumInstance.create(1, [[1.0], [-1.0]], [1.0, 1.0])
        assert blkit.evaluate(cosh, [1e6]) == math.inf

    def test_duplicate_exponents_rejected(self):
        with pytest.raises(InputError):
            blkit.ExpSumInstance.create(1, [[1.0], [1.0]], [1.0, 1.0])


class TestConstants:
    def test_example_family(self):
        consts = expsum.constants(example_instance(1.0, 1.0))
        assert consts.C0 == pytest.approx(math.sqrt(2.0), rel=1e-12)
        # interior radius and separation margin of this family are both 1/sqrt(5)
        assert consts.c0 == pytest.approx(5**-0.5, rel=1e-6)
        assert consts.c1 == pytest.approx(5**-0.5, rel=1e-6)
        assert consts.C1 == pytest.approx(
            4 * consts.C0 / (consts.c0 * consts.c1), rel=1e-12
        )
        assert consts.N == pytest.approx(
            (16 * consts.C0**2 / (consts.c0 * consts.c1)) ** 5, rel=1e-9
        )
        assert consts.delta0 == pytest.approx(0.2, rel=1e-12)

    def test_single_exponent(self):
        inst = blkit.ExpSumInstance.create(2, [[1.0, 0.0]], [1.0])
        consts = expsum.constants(inst)
        assert consts.c1 == pytest.approx(1.0, abs=1e-8)

    def test_opposite_pair_interior_radius(self):
        inst = blkit.ExpSumInstance.create(2, [[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0])
        consts = expsum.constants(inst)
        assert consts.c0 == pytest.approx(1.0, abs=1e-8)

    def test_budget(self):
        rng = np.random.default_rng(0)
        u = rng.standard_normal((15, 2))
        inst = blkit.ExpSumInstance.create(2, u, np.ones(15))
        with pytest.raises(blkit.errors.SubsetBudgetExceeded):
            expsum.constants(inst)


class TestHullClassify:
    def test_full_family_interior(self):
        res = blkit.hull_classify(example_instance(1, 1), [0, 1, 2, 3])
        assert res.tag == "InteriorMin"
        assert res.face == (0, 1, 2, 3)
        assert res.separator is None

    def test_segment_outside(self):
        res = blkit.hull_classify(example_instance(1, 1), [1, 2])
        assert res.tag == "OutsideZero"
        assert res.face == ()
        assert res.margin > 0
        # separator certifies: positive inner product with both exponents
        u = np.array([[-1.0, 0.0], [1.0, -1.0]])
        assert np.all(u @ res.separator >= res.margin - 1e-12)

    def test_boundary_face_and_separator(self):
        res = blkit.hull_classify(example_instance(1, 1), [0, 1, 2])
        assert res.tag == "BoundaryInf"
        assert res.face == (0, 1)
        np.testing.assert_allclose(res.separator, [0.0, -1.0], atol=1e-9)
        assert res.margin == pytest.approx(1.0, rel=1e-9)

    def test_coefficients_do_not_matter(self):
        res0 = blkit.hull_classify(example_instance(0, 0), [0, 1, 2])
        res1 = blkit.hull_classify(example_instance(1, 1), [0, 1, 2])
        assert res0.tag == res1.tag == "BoundaryInf"


class TestMinimiseInterior:
    def test_cosh(self):
        inst = blkit.ExpSumInstance.create(1, [[1.0], [-1.0]], [1.0, 1.0])
        y, value = blkit.minimise_interior(inst, [0, 1])
        assert np.linalg.norm(y) <= 1e-10
        assert value == pytest.approx(2.0, rel=1e-12)

    def test_weighted_cosh_closed_form(self):
        inst = blkit.ExpSumInstance.create(1, [[1.0], [-1.0]], [4.0, 1.0])
        y, value = blkit.minimise_interior(inst, [0, 1])
        # a e^y + b e^-y has minimum 2 sqrt(ab) at y = log(b/a)/2
        assert value == pytest.approx(4.0, rel=1e-12)
        assert y[0] == pytest.approx(0.5 * math.log(1 / 4), rel=1e-9)

    def test_example_case4_root_formula(self):
        inst = example_instance(1.0, 1.0)
        tau = tau_root()
        y, value = blkit.minimise_interior(inst, [0, 1, 2, 3])
        assert value == pytest.approx(case4_value(), rel=1e-12)
        assert math.exp(y[0]) == pytest.approx(tau**-2, rel=1e-9)
        assert math.exp(y[1]) == pytest.approx(tau**-1, rel=1e-9)

    def test_not_interior_raises(self):
        with pytest.raises(NotInterior):
            blkit.minimise_interior(example_instance(1, 1), [1, 2])

    def test_radius_certificate(self):
        # |y| <= (1/c0) log(|I| / Delta) with max-normalised coefficients
        rng = np.random.default_rng(31)
        for _ in range(40):
            inst = random_instance(rng)
            support = inst.support
            if not support:
                continue
            cls = blkit.hull_classify(inst, support)
            if cls.tag != "InteriorMin":
                continue
            y, _ = blkit.minimise_interior(inst, support)
            consts = expsum.constants(inst)
            d = inst.coeffs[list(support)]
            delta_min = float(d.min() / d.max())
            bound = math.log(len(support) / delta_min) / consts.c0
            assert np.linalg.norm(y) <= bound + 1e-9


class TestInfimum:
    def test_case1_zero_not_attained(self):
        assert blkit.infimum(example_instance(0.0, 0.0)) == (0.0, False)

    def test_case2_face_value(self):
        value, attained = blkit.infimum(example_instance(0.25, 0.0))
        assert value == pytest.approx(1.0, abs=1e-12)
        assert not attained

    def test_case4_attained(self):
        value, attained = blkit.infimum(example_instance(1.0, 1.0))
        assert value == pytest.approx(case4_value(), rel=1e-9)
        assert attained

    def test_empty_support_attains_zero(self):
        inst = blkit.ExpSumInstance.create(1, [[1.0], [2.0]], [0.0, 0.0])
        assert blkit.infimum(inst) == (0.0, True)

    def test_trichotomy_soundness_seeded(self):
        rng = np.random.default_rng(99)
        for _ in range(150):
            inst = random_instance(rng)
            support = inst.support
            value, attained = blkit.infimum(inst)
            if not support:
                assert attained and value == 0.0
                continue
            tag = blkit.hull_classify(inst, support).tag
            assert attained == (tag == "InteriorMin")
            if tag == "OutsideZero":
                assert value == 0.0
            else:
                assert value > 0.0

    def test_face_reduction_identity(self):
        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(600):
            if checked >= 20:
                break
            inst = random_instance(rng, lattice=True)
            support = inst.support
            if not support:
                continue
            cls = blkit.hull_classify(inst, support)
            if cls.tag != "BoundaryInf":
                continue
            full_value, _ = blkit.infimum(inst)
            face_only = np.zeros(inst.size)
            face_only[list(cls.face)] = inst.coeffs[list(cls.face)]
            face_value, _ = blkit.infimum(inst.with_coeffs(face_only))
            assert abs(full_value - face_value) <= 1e-9 * (1 + abs(full_value))
            checked += 1
        assert checked >= 10


class TestNearMinimise:
    def test_case1_certificate_on_the_ray(self):
        inst = example_instance(0.0, 0.0)
        cert = blkit.near_minimise(inst, 0.1)
        assert cert.value <= 0.1 + 1e-12
        assert np.linalg.norm(cert.y) <= cert.radius_bound
        # certificate travels along the (1, 2) direction
        direction = cert.y / np.linalg.norm(cert.y)
        np.testing.assert_allclose(direction, np.array([1.0, 2.0]) / 5**0.5, atol=1e-9)

    def test_case2_value(self):
        inst = example_instance(0.25, 0.0)
        cert = blkit.near_minimise(inst, 0.01)
        assert cert.value <= 1.0 + 0.01 + 1e-12

    def test_case3_value(self):
        inst = example_instance(0.0, 1e-3)
        cert = blkit.near_minimise(inst, 0.01)
        assert cert.value <= 0.3 + 0.01 + 1e-12

    def test_delta_range(self):
        inst = example_instance(1.0, 1.0)
        with pytest.raises(DeltaOutOfRange):
            blkit.near_minimise(inst, 0.5)  # delta0 = 1/5
        with pytest.raises(DeltaOutOfRange):
            blkit.near_minimise(inst, 0.0)

    def test_zero_instance(self):
        inst = blkit.ExpSumInstance.create(1, [[1.0], [-1.0]], [0.0, 0.0])
        cert = blkit.near_minimise(inst, 0.1)
        assert cert.value == 0.0 and cert.mode == "ExactMin"

    def test_certificate_property_seeded(self):
        rng = np.random.default_rng(321)
        for _ in range(60):
            inst = random_instance(rng)
            for delta in (0.1, 0.01):
                cert = blkit.near_minimise(inst, delta)
                max_d = float(inst.coeffs.max(initial=0.0))
                value, _ = blkit.infimum(inst)
                assert cert.value <= value + delta * max_d + 1e-9
                assert np.linalg.norm(cert.y) <= cert.radius_bound + 1e-9


class TestHolderCheck:
    def test_equal_coefficients(self):
        inst = example_instance(0.5, 0.5)
        lhs, bound = expsum.holder_check(inst, inst.coeffs, 1.0)
        assert lhs == 0.0 and bound == 0.0

    def test_case2_square_root_growth(self):
        inst = example_instance(0.0, 0.0)
        lhs, bound = expsum.holder_check(inst, [1e-6, 1.0, 1.0, 0.0], 1.0)
        assert lhs == pytest.approx(2e-3, rel=1e-9)
        assert lhs <= bound

    def test_seeded_contract(self):
        rng = np.random.default_rng(17)
        inst0 = example_instance(0.3, 0.7)
        for _ in range(100):
            d = rng.uniform(0.0, 1.0, 4)
            d2 = np.clip(d + rng.uniform(-0.3, 0.3, 4), 0.0, 1.0)
            lhs, bound = expsum.holder_check(inst0.with_coeffs(d), d2, 1.0)
            assert lhs <= bound + 1e-12


class TestOracle:
    def test_cosh(self):
        inst = blkit.ExpSumInstance.create(1, [[1.0], [-1.0]], [1.0, 1.0])
        assert blkit.oracle_infimum(inst, 5.0, 101) == pytest.approx(2.0, abs=1e-6)

    def test_case4(self):
        value = blkit.oracle_infimum(example_instance(1.0, 1.0), 5.0, 61)
        assert value == pytest.approx(case4_value(), abs=1e-6)

    def test_case1_decays(self):
        value = blkit.oracle_infimum(example_instance(0.0, 0.0), 20.0, 61)
        assert value <= 1e-8

    def test_upper_bound_property(self):
        rng = np.random.default_rng(55)
        for _ in range(20):
            inst = random_instance(rng, max_dim=2, max_size=5)
            exact, _ = blkit.infimum(inst)
            assert blkit.oracle_infimum(inst, 8.0, 41) >= exact - 1e-9


class TestTrivialBound:
    def test_spot_checks(self):
        # f(y) <= |J| * D * exp(C0 R) whenever |y| <= R and d in [0, D]
        rng = np.random.default_rng(13)
        inst = example_instance(1.0, 1.0)
        consts = expsum.constants(inst)
        for _ in range(50):
            r = rng.uniform(0, 5)
            y = rng.standard_normal(2)
            y = y / np.linalg.norm(y) * rng.uniform(0, r)
            d = rng.uniform(0, 2.0, 4)
            value = blkit.evaluate(inst.with_coeffs(d), y)
            assert value <= 4 * 2.0 * math.exp(consts.C0 * r) * (1 + 1e-12)
