import numpy as np
import pytest
from numpy.testing import assert_allclose

from qmflow import (
    BlockOp2,
    StructureMapSet,
    apply_extended,
    apply_superop,
    build_evans_hudson,
    build_extended_generator,
    commutation_residual,
    conservativity_residual,
    delta_map,
    delta_sq_map,
    delta_sq_semigroup,
    devectorize,
    dissipativity_residual_min_eig,
    extended_choi_min_eig,
    extended_superop_matrix,
    kappa_residual,
    matrix_exponential,
    max_abs,
    normalization_residual,
    resolvent_generator,
    vectorize,
)
from conftest import random_op


class TestBlockOp2:
    def test_roundtrip(self):
        rng = np.random.default_rng(40)
        m = random_op(rng, 6, unit=False)
        x = BlockOp2.from_full(m)
        assert x.dim == 3
        assert_allclose(x.as_full(), m)

    def test_adjoint_matches_full(self):
        rng = np.random.default_rng(41)
        x = BlockOp2.from_full(random_op(rng, 4, unit=False))
        assert_allclose(x.adjoint().as_full(), x.as_full().conj().T)

    def test_product_matches_full(self):
        rng = np.random.default_rng(42)
        x = BlockOp2.from_full(random_op(rng, 4, unit=False))
        y = BlockOp2.from_full(random_op(rng, 4, unit=False))
        assert_allclose((x @ y).as_full(), x.as_full() @ y.as_full())

    def test_block_shape_validation(self):
        with pytest.raises(ValueError, match="shape"):
            BlockOp2(np.eye(2), np.eye(3), np.eye(2), np.eye(2))
        with pytest.raises(ValueError, match="even"):
            BlockOp2.from_full(np.eye(3))


class TestGeneratorTable:
    def test_conservative_entries(self, qubit_sm, qubit_gen_cons):
        m0, mm, mp = qubit_sm.theta_zero, qubit_sm.theta_minus, qubit_sm.theta_plus
        g = qubit_gen_cons
        assert_allclose(g.block(0, 0), m0)
        assert_allclose(g.block(0, 1), m0 + mm)
        assert_allclose(g.block(1, 0), m0 + mp)
        assert_allclose(g.block(1, 1), m0 + mp + mm)

    def test_physical_adds_identity_to_corner(self, qubit_gen_cons, qubit_gen_phys):
        for i in (0, 1):
            for j in (0, 1):
                want = qubit_gen_cons.block(i, j)
                if (i, j) == (1, 1):
                    want = want + np.eye(4)
                assert_allclose(qubit_gen_phys.block(i, j), want)

    def test_mode_conversion_helpers(self, qubit_gen_cons, qubit_gen_phys):
        for i in (0, 1):
            for j in (0, 1):
                assert_allclose(qubit_gen_phys.conservative_block(i, j),
                                qubit_gen_cons.block(i, j))
                assert_allclose(qubit_gen_cons.physical_block(i, j),
                                qubit_gen_phys.block(i, j))

    def test_bad_mode_rejected(self, qubit_sm):
        with pytest.raises(ValueError, match="mode"):
            build_extended_generator(qubit_sm, "rescaled")

    def test_axiom_failures_rejected(self):
        rng = np.random.default_rng(43)
        f = random_op(rng, 2, unit=False)
        from qmflow import commutator_map
        broken = StructureMapSet(dim=2, theta_minus=commutator_map(f),
                                 theta_zero=np.zeros((4, 4)),
                                 theta_plus=commutator_map(f))
        with pytest.raises(ValueError, match="axiom failure"):
            build_extended_generator(broken)


class TestApplyExtended:
    def test_entrywise_oracle(self, qubit_gen_phys):
        rng = np.random.default_rng(44)
        x = BlockOp2.from_full(random_op(rng, 4, unit=False))
        got = apply_extended(qubit_gen_phys, 0.6, x)
        for i in (0, 1):
            for j in (0, 1):
                p = matrix_exponential(qubit_gen_phys.block(i, j), 0.6)
                assert_allclose(got.block(i, j), apply_superop(p, x.block(i, j)),
                                atol=1e-13)

    def test_zero_time_is_identity(self, qubit_gen_phys):
        rng = np.random.default_rng(45)
        x = BlockOp2.from_full(random_op(rng, 4))
        got = apply_extended(qubit_gen_phys, 0.0, x)
        assert_allclose(got.as_full(), x.as_full(), atol=1e-14)

    def test_negative_time_rejected(self, qubit_gen_phys):
        x = BlockOp2.identity_pattern(2)
        with pytest.raises(ValueError, match="nonnegative"):
            apply_extended(qubit_gen_phys, -0.1, x)


class TestFullMatrixAssembly:
    def test_matches_blockwise_application(self, qubit_gen_phys):
        # the assembled big matrix must act exactly like entrywise
        # evolution on arbitrary doubled-space operators
        rng = np.random.default_rng(46)
        full = extended_superop_matrix(qubit_gen_phys, 0.8)
        for _ in range(5):
            x = random_op(rng, 4, unit=False)
            via_matrix = devectorize(full @ vectorize(x), 4)
            via_blocks = apply_extended(qubit_gen_phys, 0.8, BlockOp2.from_full(x))
            assert_allclose(via_matrix, via_blocks.as_full(), atol=1e-12)


class TestPositivity:
    def test_physical_map_completely_positive(self, qubit_gen_phys):
        for t in (0.1, 0.5, 1.0, 2.0):
            assert extended_choi_min_eig(qubit_gen_phys, t) > -1e-12

    def test_conservative_rescaling_not_cp(self, qubit_gen_cons):
        # the conservative normalization trades positivity for a fixed
        # unit block; its Choi matrix dips clearly negative
        assert extended_choi_min_eig(qubit_gen_cons, 0.5) < -1e-2

    def test_wrong_sign_drift_detected(self, qubit_sm):
        # flip the drift sign past construction-time validation: the maps
        # stay unital and conjugation-symmetric, but the semigroup loses
        # complete positivity and the detector fires hard
        adv = StructureMapSet(dim=2, theta_minus=qubit_sm.theta_minus,
                              theta_zero=-qubit_sm.theta_zero,
                              theta_plus=qubit_sm.theta_plus, ito=qubit_sm.ito)
        gen = build_extended_generator(adv, "physical")
        assert extended_choi_min_eig(gen, 0.5) < -1e-3

    def test_weak_noise_weight_not_cp(self):
        # calibrated constant below 1 (here 1/2) breaks positivity
        f = np.array([[0.0, 1.0], [0.0, 0.0]])
        sm = build_evans_hudson(np.zeros((2, 2)), f, 0.25, 0.0)
        gen = build_extended_generator(sm, "physical")
        assert extended_choi_min_eig(gen, 0.5) < -1e-2

    def test_dimension_guard(self, glauber_sm):
        big = StructureMapSet(dim=64, theta_minus=np.zeros((4096, 4096)),
                              theta_zero=np.zeros((4096, 4096)),
                              theta_plus=np.zeros((4096, 4096)))
        gen = build_extended_generator(big, "physical")
        with pytest.raises(ValueError, match="guard"):
            extended_choi_min_eig(gen, 0.1)


class TestUnitProfiles:
    def test_conservative_fixes_unit(self, qubit_gen_cons, qubit_gen_phys):
        for t in (0.1, 0.7, 1.5):
            assert conservativity_residual(qubit_gen_cons, t) < 1e-11
            # helper is normalization-aware: same answer from either mode
            assert conservativity_residual(qubit_gen_phys, t) < 1e-11

    def test_physical_profile(self, qubit_gen_phys):
        for t in (0.1, 0.7, 1.5):
            assert normalization_residual(qubit_gen_phys, t) < 1e-11

    def test_profile_values_directly(self, qubit_gen_phys):
        # P(J) = [[1, 1], [1, e^t]] (x) identity in physical normalization
        t = 0.9
        j = BlockOp2.identity_pattern(2)
        out = apply_extended(qubit_gen_phys, t, j)
        eye = np.eye(2)
        assert_allclose(out.x00, eye, atol=1e-12)
        assert_allclose(out.x01, eye, atol=1e-12)
        assert_allclose(out.x10, eye, atol=1e-12)
        assert_allclose(out.x11, np.exp(t) * eye, atol=1e-11)

    def test_kappa_condition(self, qubit_gen_phys, qubit_gen_cons):
        assert kappa_residual(qubit_gen_phys) < 1e-13
        assert kappa_residual(qubit_gen_cons) < 1e-13


class TestDissipativity:
    def test_positive_for_valid_model(self, qubit_gen_cons):
        rng = np.random.default_rng(47)
        for _ in range(100):
            x = BlockOp2.from_full(random_op(rng, 4))
            assert dissipativity_residual_min_eig(qubit_gen_cons, x) > -1e-10

    def test_ampliated_level(self, qubit_gen_cons):
        rng = np.random.default_rng(48)
        for _ in range(50):
            x = random_op(rng, 8)
            assert dissipativity_residual_min_eig(qubit_gen_cons, x, level=2) > -1e-10

    def test_weak_weight_fails(self):
        # the same form goes negative when the calibrated constant drops
        # below 1: constructive witness at level 1
        f = np.array([[0.0, 1.0], [0.0, 0.0]])
        sm = build_evans_hudson(np.zeros((2, 2)), f, 0.25, 0.0)
        gen = build_extended_generator(sm, "conservative")
        rng = np.random.default_rng(49)
        worst = min(dissipativity_residual_min_eig(gen, BlockOp2.from_full(random_op(rng, 4)))
                    for _ in range(50))
        assert worst < -1e-2

    def test_physical_mode_rejected(self, qubit_gen_phys):
        with pytest.raises(ValueError, match="conservative"):
            dissipativity_residual_min_eig(qubit_gen_phys, BlockOp2.identity_pattern(2))

    def test_bad_level_rejected(self, qubit_gen_cons):
        with pytest.raises(ValueError, match="level"):
            dissipativity_residual_min_eig(qubit_gen_cons,
                                           BlockOp2.identity_pattern(2), level=3)


class TestDelta:
    def test_delta_matches_commutator(self):
        rng = np.random.default_rng(50)
        d = 3
        x = random_op(rng, 2 * d, unit=False)
        e = np.kron(np.diag([0.0, 1.0]), np.eye(d))
        want = 1j * (x @ e - e @ x)
        assert_allclose(delta_map(BlockOp2.from_full(x)).as_full(), want, atol=1e-14)

    def test_delta_sq_closed_form(self):
        rng = np.random.default_rng(51)
        x = BlockOp2.from_full(random_op(rng, 6, unit=False))
        ds = delta_sq_map(x)
        assert_allclose(ds.x00, 0 * x.x00)
        assert_allclose(ds.x01, -x.x01)
        assert_allclose(ds.x10, -x.x10)
        assert_allclose(ds.x11, 0 * x.x11)
        # agreement with applying delta twice
        twice = delta_map(delta_map(x))
        assert_allclose(ds.as_full(), twice.as_full(), atol=1e-14)

    def test_delta_sq_semigroup_factor(self):
        rng = np.random.default_rng(52)
        x = BlockOp2.from_full(random_op(rng, 4, unit=False))
        t = 0.8
        out = delta_sq_semigroup(t, x)
        s = np.exp(-t / 2)
        assert_allclose(out.x00, x.x00)
        assert_allclose(out.x01, s * x.x01)
        assert_allclose(out.x10, s * x.x10)
        assert_allclose(out.x11, x.x11)

    def test_delta_sq_semigroup_composition(self):
        rng = np.random.default_rng(53)
        x = BlockOp2.from_full(random_op(rng, 4))
        a = delta_sq_semigroup(0.3, delta_sq_semigroup(0.5, x))
        b = delta_sq_semigroup(0.8, x)
        assert_allclose(a.as_full(), b.as_full(), atol=1e-15)

    def test_commutation_with_generator(self, qubit_gen_cons, glauber_gen_cons):
        assert commutation_residual(qubit_gen_cons) < 1e-14
        assert commutation_residual(glauber_gen_cons) < 1e-13


class TestResolvent:
    def test_first_order_convergence(self, qubit_gen_cons):
        errs = []
        eps_grid = (1e-2, 5e-3, 2.5e-3)
        for eps in eps_grid:
            ge = resolvent_generator(qubit_gen_cons, eps)
            err = max(max_abs(matrix_exponential(ge.block(i, j), 1.0)
                              - matrix_exponential(qubit_gen_cons.block(i, j), 1.0))
                      for i in (0, 1) for j in (0, 1))
            errs.append(err)
        slope = np.polyfit(np.log(eps_grid), np.log(errs), 1)[0]
        assert 0.8 <= slope <= 1.2

    def test_singular_parameter_rejected(self, qubit_gen_phys):
        # the physical corner entry fixes the identity up to e^t, so it
        # has eigenvalue exactly 1 and eps = 1 is singular
        with pytest.raises(ValueError, match=r"too large for entry \(1, 1\)"):
            resolvent_generator(qubit_gen_phys, 1.0)

    def test_bad_eps_rejected(self, qubit_gen_cons):
        with pytest.raises(ValueError, match="positive"):
            resolvent_generator(qubit_gen_cons, -0.1)


def _rk4_evolve(l, t, steps):
    # Fixed-step integration of dP/dt = P L from the identity; an
    # independent reference for the matrix exponential.
    p = np.eye(l.shape[0], dtype=complex)
    h = t / steps
    for _ in range(steps):
        k1 = p @ l
        k2 = (p + 0.5 * h * k1) @ l
        k3 = (p + 0.5 * h * k2) @ l
        k4 = (p + h * k3) @ l
        p = p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return p


class TestOdeOracle:
    def test_all_entries_match_integration(self, qubit_gen_cons):
        t = 0.7
        steps = 7000
        for i in (0, 1):
            for j in (0, 1):
                l = qubit_gen_cons.block(i, j)
                assert max_abs(matrix_exponential(l, t) - _rk4_evolve(l, t, steps)) < 1e-8

    def test_physical_corner_scalar_relation(self, qubit_gen_cons, qubit_gen_phys):
        # adding the identity map to a generator scales the semigroup by e^t
        t = 0.7
        a = matrix_exponential(qubit_gen_phys.block(1, 1), t)
        b = np.exp(t) * matrix_exponential(qubit_gen_cons.block(1, 1), t)
        assert max_abs(a - b) < 1e-12
