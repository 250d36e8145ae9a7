import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, tag

from menger.analysis import cosine_series
from menger.curve import FourierCurve, circle, random_curve
from menger.energy import EnergyFunctional, EnergyParams
from menger.exceptions import DegenerateCurveError, ParameterError
from menger.quadrature import QuadratureConfig
from menger.variation import (
	MAIN_TERM_FACTOR,
	MultiplierTable,
	circle_lambda,
	corollary_constant,
	corollary_ql_check,
	euler_lagrange_residual,
	first_variation_adjoint,
	first_variation_fd,
	main_term_bilinear,
	main_term_operator_direct,
	main_term_operator_fourier,
	multiplier_table,
	remainder_multipliers,
	split_first_variation,
	stationarity,
)

COARSE = QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-4, max_refine=8)


def power_table(p=2.5, k_max=4):
	"""Multipliers rho_k = k^(3p-4) exactly, so that q_k = 1."""
	ks = tuple(range(1, k_max + 1))
	return MultiplierTable(p=p, k=ks, rho=tuple(k ** (3.0 * p - 4.0) for k in ks), c_estimate=1.0)


class MultiplierTableTests(SimpleTestCase):
	def setUp(self):
		self.table = power_table()

	def test_normalized_multipliers(self):
		np.testing.assert_allclose(self.table.q, 1.0, rtol=1e-14)
		self.assertAlmostEqual(self.table.slope(), 3.5, places=12)

	def test_lookup(self):
		self.assertEqual(self.table.rho_of(0), 0.0)
		self.assertEqual(self.table.rho_of(-2), self.table.rho_of(2))
		with self.assertRaises(ParameterError):
			self.table.rho_of(5)

	def test_covers(self):
		self.assertTrue(self.table.covers(circle(bandwidth=64)))
		self.assertFalse(self.table.covers(random_curve(bandwidth=6)))

	def test_csv_file_reads_back(self):
		with tempfile.TemporaryDirectory() as directory:
			path = self.table.write_csv(Path(directory) / "rho.csv")

			loaded = MultiplierTable.read_csv(path, 2.5)

		self.assertEqual(loaded.k, self.table.k)
		self.assertEqual(loaded.rho, self.table.rho)
		self.assertEqual(self.table.csv_text().splitlines()[0], "k,rho_k,q_k")

	def test_empty_csv_is_rejected(self):
		with tempfile.TemporaryDirectory() as directory:
			path = Path(directory) / "empty.csv"
			path.write_text("k,rho_k,q_k\n", encoding="utf-8")

			with self.assertRaises(ParameterError):
				MultiplierTable.read_csv(path, 2.5)

	def test_corollary_constant(self):
		self.assertAlmostEqual(corollary_constant(self.table), (2.0 * np.pi) ** 3 * np.sqrt(2.0), places=9)

	def test_circle_lambda(self):
		self.assertAlmostEqual(circle_lambda(self.table), MAIN_TERM_FACTOR / (4.0 * np.pi ** 2), places=14)


class MainTermTests(SimpleTestCase):
	def setUp(self):
		self.table = power_table()
		self.series = cosine_series(1, 2) + cosine_series(2) * 0.3

	def test_fourier_operator_is_diagonal(self):
		image = main_term_operator_fourier(self.series, self.table)

		self.assertAlmostEqual(image.mode(1)[0].real, 0.5 * self.table.rho_of(1), places=14)
		self.assertAlmostEqual(image.mode(-2)[0].real, 0.15 * self.table.rho_of(2), places=12)

	def test_fourier_operator_needs_a_long_enough_table(self):
		with self.assertRaises(ParameterError):
			main_term_operator_fourier(cosine_series(5), self.table)

	def test_corollary_ratio_is_bounded(self):
		ratio = corollary_ql_check(self.series, self.table, 0, 0.0)

		self.assertLessEqual(ratio, corollary_constant(self.table))

	def test_remainder_multipliers_recover_the_shift(self):
		curve = random_curve(bandwidth=4, seed=3)
		gradient = main_term_operator_fourier(curve, self.table) * MAIN_TERM_FACTOR + curve * (MAIN_TERM_FACTOR * 0.1)

		rows = remainder_multipliers(gradient, curve, self.table)

		self.assertEqual([k for k, _ in rows], [1, 2, 3, 4])
		np.testing.assert_allclose([r for _, r in rows], 0.1, rtol=1e-10)

	def test_analysis_range_of_p(self):
		with self.assertRaises(ParameterError):
			main_term_bilinear(self.series, self.series, 2.0)


class ComputedMultiplierTests(SimpleTestCase):
	@classmethod
	def setUpClass(cls):
		super().setUpClass()
		cls.table = multiplier_table(2.5, 4, COARSE)

	def test_multipliers_are_positive_and_increasing(self):
		self.assertTrue(all(r > 0 for r in self.table.rho))
		self.assertTrue(all(a < b for a, b in zip(self.table.rho, self.table.rho[1:])))
		self.assertGreater(self.table.slope(), 0.0)

	def test_single_mode_route_agrees_with_bilinear_form(self):
		value = main_term_bilinear(cosine_series(1), cosine_series(1), 2.5, COARSE)

		self.assertLess(abs(2.0 * value - self.table.rho_of(1)) / self.table.rho_of(1), 1e-3)

	def test_table_needs_four_modes(self):
		with self.assertRaises(ParameterError):
			multiplier_table(2.5, 3, COARSE)

	@tag("slow")
	def test_direct_operator_matches_fourier_multipliers(self):
		series = cosine_series(1, 2) + cosine_series(2) * 0.3
		quad = QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-5, max_refine=10)

		direct = main_term_operator_direct(series, 2.5, quad)

		fourier = main_term_operator_fourier(series, self.table)
		self.assertLess((direct - fourier).l2_norm() / fourier.l2_norm(), 2e-3)


@tag("slow")
class MultiplierAsymptoticsTests(SimpleTestCase):
	@classmethod
	def setUpClass(cls):
		super().setUpClass()
		cls.table = multiplier_table(2.5, 32, COARSE)
		cls.quad = QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-5, max_refine=10)

	def test_large_modes_follow_the_power_law(self):
		q = dict(zip(self.table.k, self.table.q))

		slope = self.table.slope(k_min=16)

		self.assertAlmostEqual(slope, 3.0 * 2.5 - 4.0, delta=0.1)
		self.assertLess(abs(q[32] / q[16] - 1.0), 0.05)

	def test_direct_operator_on_the_circle(self):
		curve = circle(bandwidth=8)

		direct = main_term_operator_direct(curve, 2.5, self.quad)

		fourier = main_term_operator_fourier(curve, self.table)
		self.assertLess((direct - fourier).l2_norm() / fourier.l2_norm(), 2e-3)

	def test_direct_operator_on_random_curves(self):
		for seed in range(5):
			curve = random_curve(dim=3, bandwidth=8, seed=seed, amplitude=0.05)

			direct = main_term_operator_direct(curve, 2.5, self.quad)

			fourier = main_term_operator_fourier(curve, self.table)
			self.assertLess((direct - fourier).l2_norm() / fourier.l2_norm(), 2e-3, seed)


class FirstVariationTests(SimpleTestCase):
	def setUp(self):
		self.params = EnergyParams(2.5, 2.0, QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-4, max_refine=6))
		self.curve = random_curve(dim=3, bandwidth=4, seed=2)
		self.direction = random_curve(dim=3, bandwidth=4, seed=11) - circle(bandwidth=4)
		self.functional = EnergyFunctional.adapted_to(self.curve, self.params)

	def test_difference_quotient_matches_adjoint(self):
		fd = first_variation_fd(self.curve, self.direction, self.params, functional=self.functional)

		adjoint = first_variation_adjoint(self.curve, self.direction, self.params, functional=self.functional)

		self.assertLess(abs(fd.value - adjoint), 1e-6 * abs(adjoint))
		self.assertLess(fd.error, 1e-6 * abs(adjoint))

	def test_split_adds_up(self):
		result = split_first_variation(self.curve, self.direction, self.params, table=power_table())

		self.assertAlmostEqual(result.q_part + result.r_part, result.value, places=10)

	def test_unknown_method(self):
		with self.assertRaises(ParameterError):
			split_first_variation(self.curve, self.direction, self.params, method="spline")

	def test_dimension_mismatch(self):
		with self.assertRaises(ParameterError):
			first_variation_fd(self.curve, cosine_series(1), self.params)


class StationarityTests(SimpleTestCase):
	def test_multiple_of_curvature_is_stationary(self):
		curve = random_curve(bandwidth=5, seed=4)

		lam, residual = stationarity(curve.derivative(2) * 3.0, curve)

		self.assertAlmostEqual(lam, -3.0, places=12)
		self.assertLess(residual.l2_norm(), 1e-12 * curve.derivative(2).l2_norm())

	def test_constant_curve_has_no_curvature(self):
		curve = FourierCurve.constant([1.0, 0.0, 0.0], bandwidth=3)

		with self.assertRaises(DegenerateCurveError):
			stationarity(curve, curve)

	def test_circle_is_critical(self):
		params = EnergyParams(2.5, 2.0, QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-4, max_refine=6))

		result = euler_lagrange_residual(circle(bandwidth=4), params, table=power_table())

		self.assertLess(result.relative_residual, 1e-9)
		self.assertTrue(np.isfinite(result.main_term_norm))
		self.assertGreater(result.gradient_norm, 0.0)
