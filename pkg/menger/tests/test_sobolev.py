import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import quad
from scipy.special import gamma, sici

from menger.analysis import cosine_series
from menger.curve import FourierCurve, random_curve
from menger.exceptions import ParameterError, PreconditionError
from menger.sobolev import (
	SobolevIndex,
	banach_algebra_check,
	bessel_inner,
	bessel_norm,
	derivative_norm_inequality_check,
	gagliardo_seminorm,
	norm_equivalence_ratio,
	norm_report,
	product,
)

# [cos 2 pi x]_{1/2, 2}^2
COSINE_SEMINORM_SQUARED = 4.0 * np.pi * (sici(np.pi)[0] - 2.0 / np.pi)


def random_scalar_series(seed, bandwidth=8):
	rng = np.random.default_rng(seed)
	positive = (rng.normal(size=bandwidth) + 1j * rng.normal(size=bandwidth)) / np.arange(1, bandwidth + 1) ** 2
	coeffs = np.concatenate([np.conj(positive[::-1]), [0.0], positive])
	return FourierCurve(coeffs[:, None])


def cosine_seminorm_by_offset(sigma, p):
	"""[cos 2 pi x]_{sigma, p}^p with the x-average of |sin|^p done in closed form."""
	sine_moment = gamma((p + 1.0) / 2.0) / (np.sqrt(np.pi) * gamma(p / 2.0 + 1.0))
	half, _ = quad(lambda w: abs(2.0 * np.sin(np.pi * w)) ** p * w ** (-1.0 - sigma * p), 0.0, 0.5, epsabs=0.0, epsrel=1e-12, limit=200)
	return 2.0 * sine_moment * half


class BesselNormTests(SimpleTestCase):
	def test_single_mode(self):
		for s in (0.0, 1.0, 2.5):
			self.assertAlmostEqual(bessel_norm(cosine_series(1), s), np.sqrt(2.0 ** (s - 1.0)), places=14)

	def test_inner_product_is_consistent_with_norm(self):
		curve = random_curve(bandwidth=6, seed=2)

		self.assertAlmostEqual(bessel_inner(curve, curve, 1.5), bessel_norm(curve, 1.5) ** 2, places=12)

	def test_negative_index_is_rejected(self):
		with self.assertRaises(ParameterError):
			SobolevIndex(-1.0)


class GagliardoTests(SimpleTestCase):
	def test_cosine_seminorm(self):
		value = gagliardo_seminorm(cosine_series(1), 0, 0.5)

		self.assertLess(abs(value ** 2 - COSINE_SEMINORM_SQUARED) / COSINE_SEMINORM_SQUARED, 1e-6)

	def test_constant_has_zero_seminorm(self):
		self.assertEqual(gagliardo_seminorm(cosine_series(1, 4) * 0.0, 0, 0.3), 0.0)

	def test_ratio_to_fourier_weight(self):
		ratio = norm_equivalence_ratio(cosine_series(1), 0.5)

		self.assertLess(abs(ratio - 2.0 * COSINE_SEMINORM_SQUARED) / ratio, 1e-6)

	def test_derivative_seminorm_scales_with_frequency(self):
		report = norm_report(cosine_series(1), 1.0, k=1, sigma=0.5)

		self.assertAlmostEqual(report.gagliardo_seminorm / (2.0 * np.pi * np.sqrt(COSINE_SEMINORM_SQUARED)), 1.0, places=5)

	def test_cosine_seminorm_away_from_p_two(self):
		for p in (2.5, 3.0):
			expected = cosine_seminorm_by_offset(0.5, p)

			value = gagliardo_seminorm(cosine_series(1), 0, 0.5, p)

			self.assertLess(abs(value ** p - expected) / expected, 1e-4, p)

	def test_seminorm_is_stable_under_grid_refinement(self):
		coarse = gagliardo_seminorm(cosine_series(1), 0, 0.4, 3.0)

		fine = gagliardo_seminorm(cosine_series(1, 16), 0, 0.4, 3.0)

		self.assertLess(abs(fine - coarse) / fine, 1e-4)

	def test_sigma_range(self):
		with self.assertRaises(ParameterError):
			gagliardo_seminorm(cosine_series(1), 0, 1.0)


class InequalityTests(SimpleTestCase):
	def test_derivative_inequality_holds_for_mean_zero_curve(self):
		triple = derivative_norm_inequality_check(random_curve(bandwidth=8, seed=5), 2.0)

		self.assertTrue(triple.holds)

	def test_derivative_inequality_over_random_series(self):
		for m in (1.5, 2.0, 2.5):
			for seed in range(100):
				self.assertTrue(derivative_norm_inequality_check(random_scalar_series(seed), m).holds, (m, seed))

	def test_first_mode_saturates_the_upper_bound(self):
		for m in (1.5, 2.0, 2.5):
			triple = derivative_norm_inequality_check(cosine_series(1), m)

			self.assertAlmostEqual(triple.mid / triple.rhs, 1.0, places=12)

	def test_derivative_inequality_needs_m_above_one(self):
		for m in (1.0, 0.5):
			with self.assertRaises(ParameterError):
				derivative_norm_inequality_check(cosine_series(1), m)

	def test_derivative_inequality_needs_mean_zero(self):
		with self.assertRaises(PreconditionError):
			derivative_norm_inequality_check(random_curve(seed=5).translated([1.0, 0.0, 0.0]), 2.0)

	def test_banach_algebra_ratio_for_cosines(self):
		ratio = banach_algebra_check(cosine_series(1), cosine_series(1), 1.0)

		self.assertAlmostEqual(ratio, np.sqrt(7.0 / 8.0), places=12)

	def test_product_of_scalar_and_vector(self):
		curve = random_curve(bandwidth=3, seed=1)

		scaled = product(cosine_series(0, 3), curve)

		self.assertEqual(scaled.dim, 3)
		self.assertTrue(scaled.allclose(curve * 0.5, atol=1e-14))

	def test_banach_algebra_needs_m_above_one_half(self):
		with self.assertRaises(ParameterError):
			banach_algebra_check(cosine_series(1), cosine_series(1), 0.5)
