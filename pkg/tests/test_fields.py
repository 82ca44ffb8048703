"""Tests for the free-space field solver."""

import warnings

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import j0, j1

from freepif.fields import FieldSolveConfig, FieldSolver, _realify
from freepif.greens import precompute_kernels
from freepif.shapes import TruncatedGaussian


def potential_oracle(r, shape, L, power, s_max):
    """Radial Hankel quadrature for the kernel g * S (power=1) or g * S * S."""
    from freepif.greens import ghat

    val, _ = quad(
        lambda s: ghat(s, L) * shape.fourier(s) ** power * j0(s * r) * s,
        0.0,
        s_max,
        limit=2000,
        epsabs=1e-12,
        epsrel=1e-11,
    )
    return val / (2.0 * np.pi)


def radial_force_oracle(r, shape, L, s_max):
    """Outward force magnitude between two unit mollified charges."""
    from freepif.greens import ghat

    val, _ = quad(
        lambda s: ghat(s, L) * shape.fourier(s) ** 2 * j1(s * r) * s * s,
        0.0,
        s_max,
        limit=2000,
        epsabs=1e-12,
        epsrel=1e-11,
    )
    return val / (2.0 * np.pi)


def make_solver(n_modes=128, sigma=0.02, radius=0.12, L=1.7, **kw):
    shape = TruncatedGaussian(sigma, radius)
    return FieldSolver(FieldSolveConfig(n_modes, shape, L, **kw))


class TestPairInteractions:
    def test_two_particle_force_matches_quadrature(self):
        solver = make_solver()
        p1 = np.array([-0.055, -0.02])
        p2 = np.array([0.065, 0.047])
        pts = np.vstack([p1, p2])
        solver.bind(pts)
        rho = solver.deposit(1.0)
        acc = solver.accelerations(rho, 1.0)

        d = p1 - p2
        r = np.hypot(*d)
        f = radial_force_oracle(r, solver.config.shape, 1.7, s_max=400.0)
        expected_a1 = f * d / r
        np.testing.assert_allclose(acc[0], expected_a1, rtol=1e-8)
        np.testing.assert_allclose(acc[1], -expected_a1, rtol=1e-8)

    def test_potential_profile_matches_quadrature(self):
        solver = make_solver()
        src = np.array([[0.03, -0.01]])
        solver.bind(src)
        rho = solver.deposit(1.0)
        shape = solver.config.shape
        for r in (0.05, 0.11, 0.21):
            target = src[0] + np.array([r, 0.0])
            bare = solver.potential_at(target[None, :], rho)[0]
            soft = solver.potential_at(target[None, :], rho, mollified=True)[0]
            assert bare == pytest.approx(potential_oracle(r, shape, 1.7, 1, 400.0), rel=1e-9)
            assert soft == pytest.approx(potential_oracle(r, shape, 1.7, 2, 400.0), rel=1e-9)

    def test_far_field_is_free_space_log(self):
        # outside the shape support the mollified charge acts as a point
        # charge, so the potential must be the free-space log kernel with no
        # periodic-image contamination at all
        solver = make_solver()
        src = np.array([[-0.04, 0.06]])
        solver.bind(src)
        rho = solver.deposit(1.0)
        for r in (0.15, 0.3, 0.45):
            target = src[0] + r * np.array([0.6, -0.8])
            val = solver.potential_at(target[None, :], rho)[0]
            assert val == pytest.approx(-np.log(r) / (2.0 * np.pi), rel=1e-9)

    def test_truncation_radius_does_not_matter(self):
        # needs enough modes that the shape spectrum has decayed at the cut;
        # below that, the two kernels differ at the truncation-error level
        rng = np.random.default_rng(7)
        pts = rng.uniform(-0.45, 0.45, size=(20, 2))
        accs = []
        for L in (1.7, 1.9):
            solver = make_solver(n_modes=128, L=L)
            solver.bind(pts)
            rho = solver.deposit(1.0)
            accs.append(solver.accelerations(rho, 1.0))
        scale = np.max(np.abs(accs[0]))
        assert np.max(np.abs(accs[0] - accs[1])) < 1e-11 * scale


class TestStructuralIdentities:
    def test_self_force_vanishes(self):
        solver = make_solver(n_modes=32)
        solver.bind(np.array([[0.137, -0.29]]))
        rho = solver.deposit(1.0)
        acc = solver.accelerations(rho, 1.0)
        assert np.max(np.abs(acc)) < 1e-9

    def test_momentum_conservation(self):
        rng = np.random.default_rng(11)
        pts = rng.uniform(-0.4, 0.4, size=(30, 2))
        solver = make_solver(n_modes=32)
        solver.bind(pts)
        rho = solver.deposit(0.7)
        acc = solver.accelerations(rho, 0.7)  # q = m here, so m a = q a
        total = np.linalg.norm(acc.sum(axis=0))
        scale = np.sum(np.linalg.norm(acc, axis=1))
        assert total < 1e-10 * scale

    def test_charge_residual_is_tiny(self):
        rng = np.random.default_rng(12)
        pts = rng.uniform(-0.45, 0.45, size=(30, 2))
        solver = make_solver(n_modes=32)
        solver.bind(pts)
        rho = solver.deposit(0.7)
        assert solver.charge_residual(rho, 0.7 * 30) < 1e-13

    def test_energy_dual_forms_agree(self):
        rng = np.random.default_rng(13)
        pts = rng.uniform(-0.4, 0.4, size=(25, 2))
        q = 0.3
        solver = make_solver(n_modes=32)
        solver.bind(pts)
        rho = solver.deposit(q)
        u_modes = solver.field_energy(rho)
        u_pairs = 0.5 * q * np.sum(solver.potential_at_sources(rho, mollified=True))
        assert u_modes == pytest.approx(u_pairs, rel=1e-13)

    def test_force_is_energy_gradient(self):
        # central finite difference of the total interaction energy along a
        # particle displacement must equal minus the reported force
        rng = np.random.default_rng(14)
        pts = rng.uniform(-0.35, 0.35, size=(10, 2))
        q = 0.5
        solver = make_solver(n_modes=32)

        def energy(positions):
            solver.bind(positions)
            return solver.field_energy(solver.deposit(q))

        solver.bind(pts)
        rho = solver.deposit(q)
        acc = solver.accelerations(rho, q)  # masses 1, so force = acc
        delta = 1e-5
        for j, axis in ((2, 0), (7, 1)):
            bumped = pts.copy()
            bumped[j, axis] += delta
            up = energy(bumped)
            bumped[j, axis] -= 2 * delta
            down = energy(bumped)
            force_fd = -(up - down) / (2 * delta)
            assert force_fd == pytest.approx(acc[j, axis], rel=1e-6)


class TestPrecomputedMode:
    def test_matches_direct_and_refines(self):
        # off-lattice particles: the condensed potential is second-order
        # accurate; its spectral derivative gives up one order to the
        # periodization kink, so forces refine at first order
        shape = TruncatedGaussian(0.05, 0.3)
        L = 2.1
        pts = np.array([[-0.08, -0.05], [0.09, 0.11], [0.151, -0.033]])
        targets = np.array([[0.21, 0.017], [-0.33, 0.12], [0.05, -0.27]])

        ref_solver = FieldSolver(FieldSolveConfig(64, shape, L))
        ref_solver.bind(pts)
        rho_ref = ref_solver.deposit(1.0)
        ref_acc = ref_solver.accelerations(rho_ref, 1.0)
        ref_pot = ref_solver.potential_at(targets, rho_ref)

        acc_errs, pot_errs = [], []
        for n in (32, 64):
            solver = FieldSolver(FieldSolveConfig(n, shape, L, precompute=True))
            solver.bind(pts)
            rho = solver.deposit(1.0)
            acc = solver.accelerations(rho, 1.0)
            pot = solver.potential_at(targets, rho)
            acc_errs.append(np.max(np.abs(acc - ref_acc)) / np.max(np.abs(ref_acc)))
            pot_errs.append(np.max(np.abs(pot - ref_pot)) / np.max(np.abs(ref_pot)))
        assert acc_errs[0] < 0.05
        assert acc_errs[0] / acc_errs[1] > 1.6
        assert pot_errs[0] < 1e-3
        assert pot_errs[0] / pot_errs[1] > 2.5

    def test_structural_identities_hold(self):
        rng = np.random.default_rng(15)
        pts = rng.uniform(-0.4, 0.4, size=(20, 2))
        shape = TruncatedGaussian(0.05, 0.3)
        solver = FieldSolver(FieldSolveConfig(32, shape, 2.1, precompute=True))
        solver.bind(pts)
        rho = solver.deposit(1.0)
        acc = solver.accelerations(rho, 1.0)
        assert np.linalg.norm(acc.sum(axis=0)) < 1e-10 * np.sum(np.linalg.norm(acc, axis=1))
        u_modes = solver.field_energy(rho)
        u_pairs = 0.5 * np.sum(solver.potential_at_sources(rho, mollified=True))
        assert u_modes == pytest.approx(u_pairs, rel=1e-13)

    def test_accepts_matching_kernel_tables(self):
        shape = TruncatedGaussian(0.05, 0.3)
        kern = precompute_kernels(16, shape, 2.1)
        solver = FieldSolver(FieldSolveConfig(16, shape, 2.1, precompute=True), kernels=kern)
        assert solver.kernels is kern
        with pytest.raises(ValueError, match="do not match"):
            FieldSolver(FieldSolveConfig(16, shape, 2.2, precompute=True), kernels=kern)

    def test_rejects_tables_in_direct_mode(self):
        shape = TruncatedGaussian(0.05, 0.3)
        kern = precompute_kernels(16, shape, 2.1)
        with pytest.raises(ValueError):
            FieldSolver(FieldSolveConfig(16, shape, 2.1), kernels=kern)


class TestGriddedOutput:
    def test_matches_scattered_evaluation(self):
        rng = np.random.default_rng(16)
        pts = rng.uniform(-0.4, 0.4, size=(15, 2))
        solver = make_solver(n_modes=32)
        solver.bind(pts)
        rho = solver.deposit(1.0)
        for n_out in (32, 64):
            grid_vals = solver.eval_on_grid(rho, n_out)
            x = solver.grid_coordinates(n_out)
            xx, yy = np.meshgrid(x, x, indexing="ij")
            targets = np.column_stack([xx.ravel(), yy.ravel()])
            point_vals = solver.potential_at(targets, rho).reshape(n_out, n_out)
            scale = np.max(np.abs(grid_vals))
            assert np.max(np.abs(grid_vals - point_vals)) < 1e-10 * scale

    def test_rejects_bad_output_size(self):
        solver = make_solver(n_modes=32)
        solver.bind(np.zeros((1, 2)))
        rho = solver.deposit(1.0)
        with pytest.raises(ValueError):
            solver.eval_on_grid(rho, 16)
        with pytest.raises(ValueError):
            solver.eval_on_grid(rho, 33)


class TestValidation:
    def test_rejects_small_truncation_radius(self):
        shape = TruncatedGaussian(0.02, 0.12)
        with pytest.raises(ValueError, match="admissible minimum"):
            FieldSolveConfig(32, shape, 1.2)

    def test_requires_bind_before_solving(self):
        solver = make_solver(n_modes=16)
        with pytest.raises(RuntimeError, match="bind"):
            solver.deposit(1.0)

    def test_field_at_matches_acceleration_at_sources(self):
        pts = np.array([[-0.1, 0.02], [0.14, -0.07]])
        solver = make_solver(n_modes=64)
        solver.bind(pts)
        rho = solver.deposit(1.0)
        acc = solver.accelerations(rho, 1.0)
        field = solver.field_at(pts, rho)
        np.testing.assert_allclose(field, acc, atol=1e-11 * np.max(np.abs(acc)))


class TestImaginaryResidueMonitor:
    def test_clean_input_passes_silently(self):
        vals = np.array([1.0 + 1e-13j, -2.0 - 1e-14j])
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = _realify(vals, 2.0, "test")
        np.testing.assert_array_equal(out, [1.0, -2.0])

    def test_moderate_residue_warns(self):
        vals = np.array([1.0 + 1e-9j, -2.0])
        with pytest.warns(RuntimeWarning, match="imaginary residue"):
            _realify(vals, 2.0, "test")

    def test_large_residue_raises(self):
        vals = np.array([1.0 + 1e-6j, -2.0])
        with pytest.raises(RuntimeError, match="imaginary residue"):
            _realify(vals, 2.0, "test")

    def test_zero_bound_passes_through(self):
        out = _realify(np.array([0.0 + 0.0j]), 0.0, "test")
        np.testing.assert_array_equal(out, [0.0])
