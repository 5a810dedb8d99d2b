import numpy as np

from ptwaveguide.core.exceptions import DecayViolation
from ptwaveguide.core.factories import PerturbationProfileFactory
from ptwaveguide.core.profiles import DecayClass, PerturbationProfile, decay_exponent

from .base import BaseTestCase


class PerturbationProfileTestCase(BaseTestCase):
    def test_gaussian_mean(self):
        profile = PerturbationProfileFactory()

        self.assertEqual(profile.decay_class, DecayClass.GAUSSIAN)
        self.assertAlmostEqual(profile.mean, -1.0, places=14)
        self.assertAlmostEqual(profile.quadrature_mean(), -1.0, places=9)

    def test_planar_gaussian_mean(self):
        profile = PerturbationProfileFactory(n=2, width=1.5, center=(0.5, -1.0))
        self.assertAlmostEqual(profile.quadrature_mean(), -1.0, places=9)

    def test_amplitude_and_mean_are_equivalent(self):
        by_amplitude = PerturbationProfile.gaussian(1, amplitude=2.0, width=0.5)
        by_mean = PerturbationProfile.gaussian(1, mean=by_amplitude.mean, width=0.5)
        points = np.linspace(-2, 2, 9)[:, None]
        np.testing.assert_allclose(by_mean.eval(points), by_amplitude.eval(points))

    def test_bump_is_compactly_supported(self):
        profile = PerturbationProfileFactory(bump=True, width=2.0)

        self.assertEqual(profile.support_radius(), 2.0)
        self.assertEqual(float(profile.eval(np.array([[2.5]]))[0]), 0.0)
        self.assertAlmostEqual(profile.quadrature_mean(), -1.0, places=12)

    def test_odd_gaussian_has_mean_zero(self):
        profile = PerturbationProfileFactory(odd=True)
        points = np.linspace(0.1, 3.0, 7)[:, None]

        self.assertEqual(profile.mean, 0.0)
        np.testing.assert_allclose(profile.eval(points), -profile.eval(-points))
        self.assertLess(abs(profile.quadrature_mean()), 1e-12)

    def test_gradient_and_laplacian_match_finite_differences(self):
        step = 1e-4
        for profile in (
            PerturbationProfileFactory(n=2, center=(0.2, -0.3)),
            PerturbationProfileFactory(n=2, bump=True, width=2.0),
            PerturbationProfileFactory(n=2, odd=True),
        ):
            x = np.array([[0.3, 0.4], [-0.5, 0.1], [0.7, -0.6]])
            laplacian = np.zeros(len(x))
            for axis in range(2):
                shift = np.zeros(2)
                shift[axis] = step
                forward, backward = profile.eval(x + shift), profile.eval(x - shift)
                np.testing.assert_allclose(
                    (forward - backward) / (2 * step), profile.grad(x)[:, axis], atol=1e-6
                )
                laplacian += (forward - 2 * profile.eval(x) + backward) / step**2
            np.testing.assert_allclose(laplacian, profile.hess_trace(x), atol=1e-5)

    def test_gaussian_passes_the_decay_check(self):
        PerturbationProfileFactory().validate_decay()
        PerturbationProfileFactory(n=2, width=3.0).validate_decay()

    def test_slow_decay_is_rejected(self):
        def value(y):
            return 1.0 / (1.0 + (y**2).sum(axis=-1))

        def gradient(y):
            return -2.0 * y * value(y)[..., None] ** 2

        def laplacian(y):
            r2 = (y**2).sum(axis=-1)
            return (6.0 * r2 - 2.0) * value(y) ** 3

        profile = PerturbationProfile.custom(1, value, gradient, laplacian, mean=np.pi, support=50)
        with self.assertRaises(DecayViolation):
            profile.validate_decay()

    def test_decay_exponent(self):
        self.assertAlmostEqual(decay_exponent(1), 5.1)
        self.assertAlmostEqual(decay_exponent(2), 4.1)
