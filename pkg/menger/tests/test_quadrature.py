import mpmath
import numpy as np
from django.test import SimpleTestCase
from scipy import integrate as scipy_integrate

from menger.exceptions import AccuracyError, ParameterError
from menger.quadrature import (
	DomainD,
	QuadratureConfig,
	base_mesh,
	difference_quotient,
	expm1i,
	integrate,
	kernel_weight,
	second_difference_quotient,
	shift_difference,
)


def domain_moment(profile):
	"""int_D profile(v) dv dw from the upper boundary of D."""
	low = scipy_integrate.quad(lambda v: profile(v) * (1.0 + 2.0 * v), -0.5, -1.0 / 3.0)[0]
	high = scipy_integrate.quad(lambda v: profile(v) * 0.5 * (1.0 + v), -1.0 / 3.0, 0.0)[0]
	return low + high


class SymbolTests(SimpleTestCase):
	def test_expm1i_matches_exponential(self):
		theta = np.array([0.1, 1.0, 3.0, -2.0])

		np.testing.assert_allclose(expm1i(theta), np.exp(1j * theta) - 1.0, rtol=1e-14)

	def test_expm1i_keeps_relative_accuracy_for_tiny_angles(self):
		value = expm1i(np.array([1e-12]))[0]

		self.assertAlmostEqual(value.imag / 1e-12, 1.0, places=14)
		self.assertAlmostEqual(value.real / -5e-25, 1.0, places=12)

	def test_difference_quotient_tends_to_derivative_symbol(self):
		k = np.array([-3, 1, 4])

		symbol = difference_quotient(k, np.array([1e-14]))[0]

		np.testing.assert_allclose(symbol, 2j * np.pi * k, rtol=1e-10)

	def test_shift_difference(self):
		k = np.array([2.0])
		x, y = np.array([0.3]), np.array([0.1])

		symbol = shift_difference(k, x, y)[0, 0]

		self.assertAlmostEqual(abs(symbol - (np.exp(2j * np.pi * 0.6) - np.exp(2j * np.pi * 0.2))), 0.0, places=14)

	def test_second_difference_quotient_series_branch(self):
		k = np.array([3])
		v, w = np.array([-1e-4]), np.array([2e-4])
		with mpmath.workdps(50):
			z = 2j * mpmath.pi * 3
			exact = complex((mpmath.exp(z * mpmath.mpf("-1e-4")) - 1) / mpmath.mpf("-1e-4") - (mpmath.exp(z * mpmath.mpf("2e-4")) - 1) / mpmath.mpf("2e-4"))

		value = second_difference_quotient(k, v, w)[0, 0]

		self.assertLess(abs(value - exact) / abs(exact), 1e-12)

	def test_second_difference_quotient_direct_branch(self):
		k = np.array([1, 5])
		v, w = np.array([-0.3]), np.array([0.2])

		value = second_difference_quotient(k, v, w)[0]

		expected = (np.exp(2j * np.pi * k * -0.3) - 1) / -0.3 - (np.exp(2j * np.pi * k * 0.2) - 1) / 0.2
		np.testing.assert_allclose(value, expected, rtol=1e-13)

	def test_kernel_weight(self):
		self.assertAlmostEqual(kernel_weight(-0.25, 0.25, 2.0), 4.0)


class CubatureTests(SimpleTestCase):
	def test_base_mesh_weights_sum_to_area(self):
		mesh = base_mesh(QuadratureConfig(base_cells=4, gauss_order=5))

		self.assertAlmostEqual(mesh.weights.sum(), DomainD.AREA, places=14)
		self.assertTrue(np.all(DomainD.contains(mesh.v, mesh.w)))

	def test_constant_integrand(self):
		result = integrate(lambda v, w: np.ones_like(v), QuadratureConfig(base_cells=2))

		self.assertAlmostEqual(result.value, DomainD.AREA, places=14)
		self.assertTrue(result.converged)

	def test_vector_valued_integrand(self):
		result = integrate(lambda v, w: np.stack([np.ones_like(v), v], axis=1), QuadratureConfig(base_cells=2))

		np.testing.assert_allclose(result.value, [DomainD.AREA, domain_moment(lambda v: v)], rtol=1e-12)

	def test_edge_singularity(self):
		quad = QuadratureConfig(base_cells=4, rel_tol=1e-6, max_refine=10)

		result = integrate(lambda v, w: np.abs(v) ** -0.5, quad)

		expected = domain_moment(lambda v: abs(v) ** -0.5)
		self.assertLess(abs(result.value - expected) / expected, 1e-5)
		self.assertGreater(max(result.depth_histogram), 0)

	def test_unreachable_tolerance_raises_accuracy_error(self):
		quad = QuadratureConfig(base_cells=2, rel_tol=1e-14, max_refine=1)

		with self.assertRaises(AccuracyError) as raised:
			integrate(lambda v, w: np.abs(v) ** -0.9, quad)

		self.assertGreater(raised.exception.estimate, 0.0)
		self.assertGreater(raised.exception.error, 0.0)

	def test_workers_do_not_change_the_result(self):
		serial = integrate(lambda v, w: np.abs(v * w) ** -0.25, QuadratureConfig(base_cells=4, rel_tol=1e-6))
		threaded = integrate(lambda v, w: np.abs(v * w) ** -0.25, QuadratureConfig(base_cells=4, rel_tol=1e-6, workers=3), chunk_size=97)

		self.assertAlmostEqual(serial.value, threaded.value, places=13)

	def test_config_validation(self):
		with self.assertRaises(ParameterError):
			QuadratureConfig(rel_tol=2.0)
		with self.assertRaises(ParameterError):
			QuadratureConfig(grading_exponent=0.5)
