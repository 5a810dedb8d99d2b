import math
from unittest.mock import patch

import numpy as np

from ptwaveguide.core.bs import (
    BirmanSchwingerOperator,
    BSDiscretization,
    FieldSample,
    G,
    G_series,
    Method,
    apply_z,
    assemble_bs_operator,
    asymptotic_lambda,
    composition_residual,
    count_roots,
    factorize_perturbation,
    gauge_transform_check,
    check_reality,
    leading_order_k,
    perturbation_matrix,
    signed_root,
    solve_weak_coupling,
)
from ptwaveguide.core.exceptions import (
    BorderlineCase,
    NeumannSeriesDivergence,
    RealityViolation,
)
from ptwaveguide.core.factories import WaveguideConfigFactory
from ptwaveguide.core.kernels import SpectralVariable
from ptwaveguide.core.settings import app_settings
from ptwaveguide.core.transverse import default_quad_order

from .base import BaseTestCase


class FactorizationTestCase(BaseTestCase):
    def test_signed_root(self):
        np.testing.assert_allclose(signed_root(np.array([-4.0, 0.0, 9.0])), [-2.0, 0.0, 3.0])

    def test_factor_count_and_labels(self):
        for n in (1, 2):
            config = WaveguideConfigFactory(n=n)
            factorized = factorize_perturbation(config.beta, n, config.epsilon)

            self.assertEqual(factorized.size, 2 * n + 3)
            self.assertEqual(
                [factor.label for factor in factorized.a_factors],
                [f"A{i}" for i in range(1, 2 * n + 4)],
            )
            np.testing.assert_array_equal(
                factorized.weights, [1.0] * (n + 2) + [config.epsilon] * (n + 1)
            )

    def test_composition_reproduces_z(self):
        for n in (1, 2):
            config = WaveguideConfigFactory(n=n, epsilon=0.3)
            factorized = factorize_perturbation(config.beta, n, config.epsilon)
            for seed in range(3):
                sample = FieldSample.random(n, math.pi, size=100, seed=seed, radius=3.0)
                self.assertLess(composition_residual(factorized, sample), 1e-12, f"n={n}")

    def test_composition_with_a_bump(self):
        config = WaveguideConfigFactory(beta__bump=True, beta__width=2.0, epsilon=0.2)
        factorized = factorize_perturbation(config.beta, 1, config.epsilon)
        sample = FieldSample.random(1, math.pi, size=100, seed=7, radius=3.0)
        self.assertLess(composition_residual(factorized, sample), 1e-12)

    def test_z_vanishes_outside_the_support(self):
        config = WaveguideConfigFactory(beta__bump=True, beta__width=1.0)
        sample = FieldSample.random(1, math.pi, size=50, seed=0, radius=5.0)
        outside = np.abs(sample.x[:, 0]) > 1.0
        values = apply_z(config.beta, config.epsilon, sample)
        self.assertTrue(np.all(values[outside] == 0))


class GaugeTransformTestCase(BaseTestCase):
    def test_identity_at_zero_coupling(self):
        config = WaveguideConfigFactory(epsilon=0.0)
        self.assertEqual(gauge_transform_check(config), 0.0)

    def test_second_order_convergence(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        coarse = gauge_transform_check(config, h=0.1)
        fine = gauge_transform_check(config, h=0.05)
        self.assertGreater(coarse / fine, 3.0)
        self.assertLess(coarse / fine, 5.0)


class AsymptoticsTestCase(BaseTestCase):
    def test_leading_order_k(self):
        self.assertAlmostEqual(leading_order_k(0.1, WaveguideConfigFactory()), 0.05, places=14)
        self.assertAlmostEqual(
            leading_order_k(0.1, WaveguideConfigFactory(n=2)), -0.05 / math.pi, places=14
        )

    def test_asymptotic_lambda_on_the_strip(self):
        config = WaveguideConfigFactory()
        self.assertAlmostEqual(asymptotic_lambda(0.1, config), 0.2475, places=14)
        self.assertEqual(asymptotic_lambda(0.0, config), 0.25)

    def test_asymptotic_lambda_on_the_layer(self):
        config = WaveguideConfigFactory(n=2, epsilon=0.5)
        w = 0.5 * 0.5 * -1.0 / math.pi
        self.assertAlmostEqual(asymptotic_lambda(0.5, config), 0.25 - math.exp(2.0 / w), places=14)

    def test_repulsive_coupling_predicts_nothing(self):
        config = WaveguideConfigFactory(beta__repulsive=True)
        self.assertEqual(asymptotic_lambda(0.1, config), 0.25)


class WeakCouplingTestCase(BaseTestCase):
    def test_strip_root_follows_the_leading_order(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        result = solve_weak_coupling(config)

        self.assertEqual(result.method, Method.BS_ROOT)
        self.assertGreater(result.k.real, 0)
        self.assertLess(abs(result.k / 0.05 - 1.0), 0.3)
        self.assertLess(result.lambda_.real, 0.25)
        self.assertLess(abs(result.lambda_.imag), 1e-8)
        self.assertLess(result.residual, 1e-10)

    def test_strip_root_solves_the_scalar_equation(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        discretization = BSDiscretization.default(config)
        result = solve_weak_coupling(config, discretization)

        value = G(result.k, config.epsilon, config, discretization)
        self.assertLess(abs(result.k - value), 1e-10)

    def test_layer_root_follows_the_leading_order(self):
        for epsilon in (0.1, 0.05):
            config = WaveguideConfigFactory(n=2, epsilon=epsilon)
            result = solve_weak_coupling(config)
            expected = leading_order_k(epsilon, config)

            self.assertLess(result.k.real, 0)
            self.assertLess(abs(result.k / expected - 1.0), 0.3, f"epsilon={epsilon}")

    def test_root_is_real_at_the_default_resolution(self):
        with app_settings.override(LONGITUDINAL_NODES=64, MODES=6):
            for epsilon in (0.05, 0.1, 0.2):
                result = solve_weak_coupling(WaveguideConfigFactory(epsilon=epsilon))
                self.assertLessEqual(
                    abs(result.lambda_.imag), 1e-8 * abs(result.lambda_), f"epsilon={epsilon}"
                )

    def test_complex_eigenvalue_is_rejected(self):
        check_reality(0.25 + 1e-12j)
        with self.assertRaises(RealityViolation) as context:
            check_reality(0.25 + 1e-6j)
        self.assertEqual(context.exception.imaginary, 1e-6)
        self.assertEqual(context.exception.tolerance, 1e-8)

    def test_perturbation_is_assembled_once_per_solve(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        with patch(
            "ptwaveguide.core.bs.perturbation_matrix", wraps=perturbation_matrix
        ) as assembled:
            result = solve_weak_coupling(config)
            count_roots(config, center=result.k, radius=0.5 * result.k.real, samples=16)
        self.assertEqual(assembled.call_count, 2)

    def test_reversed_signs_bind_like_the_mirrored_waveguide(self):
        reversed_ = WaveguideConfigFactory(alpha0=-0.5, beta__repulsive=True)
        mirrored = WaveguideConfigFactory(alpha0=0.5)

        result = solve_weak_coupling(reversed_)
        self.assertIsNotNone(result)
        self.assertLess(abs(result.lambda_ - solve_weak_coupling(mirrored).lambda_), 1e-8)

    def test_reversed_alpha_with_attractive_mean_has_no_eigenvalue(self):
        self.assertIsNone(solve_weak_coupling(WaveguideConfigFactory(alpha0=-0.5)))

    def test_no_eigenvalue_for_repulsive_coupling(self):
        config = WaveguideConfigFactory(beta__repulsive=True)
        self.assertIsNone(solve_weak_coupling(config))

    def test_no_eigenvalue_without_perturbation(self):
        self.assertIsNone(solve_weak_coupling(WaveguideConfigFactory(epsilon=0.0)))

    def test_vanishing_mean_is_borderline(self):
        config = WaveguideConfigFactory(beta__odd=True)
        with self.assertRaises(BorderlineCase):
            solve_weak_coupling(config)

    def test_supercritical_coupling_is_borderline(self):
        config = WaveguideConfigFactory(alpha0=1.5)
        with self.assertRaises(BorderlineCase):
            solve_weak_coupling(config)

    def test_neumann_series_converges_to_g(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        exact = G(0.05, 0.1, config)
        truncated = G_series(0.05, 0.1, config, order=60)
        self.assertLess(abs(exact - truncated), 1e-6 * abs(exact))

    def test_g_vanishes_at_zero_coupling(self):
        self.assertEqual(G(0.05, 0.0, WaveguideConfigFactory()), 0j)

    def test_single_root_near_the_leading_order(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        self.assertEqual(count_roots(config, samples=48), 1)


class BirmanSchwingerOperatorTestCase(BaseTestCase):
    def test_operator_has_eigenvalue_minus_one_at_the_root(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        discretization = BSDiscretization.default(config)
        result = solve_weak_coupling(config, discretization)

        sv = SpectralVariable.from_k(result.k, 1, config.threshold)
        operator = BirmanSchwingerOperator(sv, config, discretization)
        self.assertLess(abs(operator.nearest_eigenvalue(-1.0) + 1.0), 1e-3)

    def test_regular_part_is_a_contraction(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        sv = SpectralVariable.from_k(0.05, 1, config.threshold)
        operator = BirmanSchwingerOperator(sv, config, BSDiscretization.default(config))
        self.assertLess(operator.check_contraction(), 1.0)

    def test_contraction_check_rejects_a_divergent_series(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        sv = SpectralVariable.from_k(0.05, 1, config.threshold)
        operator = BirmanSchwingerOperator(sv, config, BSDiscretization.default(config))

        with patch.object(BirmanSchwingerOperator, "norm_m", return_value=0.7):
            with self.assertLogs("ptwaveguide.core.bs", level="WARNING"):
                self.assertEqual(operator.check_contraction(), 0.7)

        with patch.object(BirmanSchwingerOperator, "norm_m", return_value=1.5):
            with self.assertRaises(NeumannSeriesDivergence) as context:
                operator.check_contraction()
        self.assertEqual(context.exception.norm, 1.5)

    def test_discretization_size(self):
        config = WaveguideConfigFactory()
        discretization = BSDiscretization.default(config, modes=3, order=16)
        self.assertEqual(discretization.size, 4 * 16)
        self.assertGreaterEqual(discretization.transverse_nodes, default_quad_order(3))

    def test_assembled_operator_at_the_root(self):
        config = WaveguideConfigFactory(epsilon=0.1)
        discretization = BSDiscretization.default(config, modes=3, order=24)
        result = solve_weak_coupling(config, discretization)

        sv = SpectralVariable.from_k(result.k, 1, config.threshold)
        matrix = assemble_bs_operator(sv, config, discretization)
        self.assertEqual(matrix.shape, (discretization.size, discretization.size))

        eigenvalues = np.linalg.eigvals(matrix)
        self.assertLess(np.abs(eigenvalues + 1.0).min(), 1e-3)
