from fractions import Fraction
from math import factorial

import mpmath
import numpy as np
import sympy
from django.test import SimpleTestCase, tag

from menger.analysis import (
	CASES,
	MajorantConfig,
	Plane,
	Sphere,
	UniversalPolyInput,
	analyticity_diagnostics,
	cosine_series,
	faa_di_bruno,
	faa_di_bruno_uniform,
	fit_factorial_growth,
	fourier_decay_fit,
	fractional_leibniz_check,
	integrate_majorant_ode,
	intersection_count,
	leibniz_sweep,
	majorant_ode,
	majorant_rhs,
	majorant_sequence,
	phi,
)
from menger.analysis.diagnostics import AMBIGUOUS, CONTAINED, FINITE
from menger.analysis.faadibruno import coefficient_bound_check, faa_di_bruno_terms, multi_indices, scalar_chain_derivatives
from menger.curve import FourierCurve, circle, random_curve
from menger.exceptions import DomainError, InputError, InsufficientDataError, ParameterError
from menger.quadrature import QuadratureConfig

MAJORANT = {"C": 1.0, "Chat": 1.0, "mu": 0.5, "r": 1.0, "K": 3, "n": 1, "a0": 1.0, "a1": 1.0, "a2": 1.0}
MAJORANT_VARIANTS = (
	MAJORANT,
	dict(MAJORANT, mu=0.25, r=2.0, K=4),
	dict(MAJORANT, n=2, C=0.5, Chat=2.0, a1=0.5),
)


class FaaDiBrunoTests(SimpleTestCase):
	def test_second_derivative_of_a_scalar_composition(self):
		data = UniversalPolyInput(2, 1, {(0,): 5, (1,): 2, (2,): Fraction(1, 3)}, [[1], [Fraction(1, 2)]])

		self.assertEqual(faa_di_bruno(data), Fraction(4, 3))

	def test_matches_symbolic_chain_rule(self):
		a, b, t = sympy.symbols("a b t")
		f = sympy.exp(a) * sympy.sin(b) + a ** 3 * b
		g = (t + t ** 2 / 2 + t ** 3, 2 * t - t ** 3)
		k = 3
		y = {}
		for alpha in ((i, j) for i in range(k + 1) for j in range(k + 1 - i)):
			partial = f
			for symbol, order in zip((a, b), alpha):
				for _ in range(order):
					partial = sympy.diff(partial, symbol)
			y[alpha] = int(partial.subs({a: 0, b: 0}))
		x = [[int(sympy.diff(component, t, i).subs(t, 0)) for component in g] for i in range(1, k + 1)]

		expected = sympy.diff(f.subs({a: g[0], b: g[1]}), t, k).subs(t, 0)

		self.assertEqual(faa_di_bruno(UniversalPolyInput(k, 2, y, x)), int(expected))

	@tag("slow")
	def test_random_polynomial_compositions(self):
		rng = np.random.default_rng(3)
		t = sympy.Symbol("t")
		for _ in range(50):
			k, n = int(rng.integers(1, 7)), int(rng.integers(1, 4))
			z = sympy.symbols("z0:%d" % n)
			coefficients = {alpha: int(rng.integers(-3, 4)) for alpha in multi_indices(n, k)}
			outer = sum(c * sympy.prod([s ** e for s, e in zip(z, alpha)]) for alpha, c in coefficients.items())
			inner = [sum(int(rng.integers(-3, 4)) * t ** i for i in range(1, k + 1)) for _ in range(n)]
			y = {alpha: c * sympy.prod([factorial(e) for e in alpha]) for alpha, c in coefficients.items()}
			x = [[int(sympy.diff(component, t, i).subs(t, 0)) for component in inner] for i in range(1, k + 1)]

			expected = sympy.diff(outer.subs(dict(zip(z, inner))), t, k).subs(t, 0)

			self.assertEqual(faa_di_bruno(UniversalPolyInput(k, n, y, x)), int(expected), (k, n))

	def test_polynomial_is_linear_in_y_and_graded_in_x(self):
		rng = np.random.default_rng(5)
		k, n, c = 4, 2, Fraction(3, 2)
		y = {alpha: Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for alpha in multi_indices(n, k)}
		x = [[Fraction(int(rng.integers(-5, 6)), 2) for _ in range(n)] for _ in range(k)]
		value = faa_di_bruno(UniversalPolyInput(k, n, y, x))

		scaled_y = faa_di_bruno(UniversalPolyInput(k, n, {alpha: c * v for alpha, v in y.items()}, x))
		graded_x = faa_di_bruno(UniversalPolyInput(k, n, y, [[c ** i * v for v in row] for i, row in enumerate(x, start=1)]))

		self.assertEqual(scaled_y, c * value)
		self.assertEqual(graded_x, c ** k * value)

	def test_scalar_terms_follow_partitions(self):
		self.assertEqual(len(faa_di_bruno_terms(5, 1)), 7)
		self.assertEqual(sum(c for c, _, _ in faa_di_bruno_terms(4, 1)), 15)

	def test_uniform_evaluation(self):
		k, n = 4, 2
		x = [1, 2, 3, 4]
		y = {alpha: sum(alpha) + 2 for alpha in ((i, j) for i in range(k + 1) for j in range(k + 1 - i))}

		general = faa_di_bruno(UniversalPolyInput(k, n, y, [[value] * n for value in x]))

		self.assertEqual(faa_di_bruno_uniform(k, n, lambda m: m + 2, x), general)

	def test_scalar_chain_of_exponentials(self):
		# d^m/dt^m exp(exp(t) - 1) at 0 are the Bell numbers
		values = scalar_chain_derivatives([1] * 7, [0] + [1] * 6, 6)

		self.assertEqual(values, [1, 1, 2, 5, 15, 52, 203])

	def test_missing_partials_are_reported(self):
		with self.assertRaises(InputError):
			UniversalPolyInput(2, 1, {(0,): 1, (1,): 1}, [[1], [1]])

	def test_coefficient_bound(self):
		rng = np.random.default_rng(0)
		for _ in range(5):
			lhs, rhs = coefficient_bound_check(4, 2, 0.7, 1.5, 2.0, rng)

			self.assertLessEqual(lhs, rhs * (1.0 + 1e-12))


class MajorantTests(SimpleTestCase):
	def setUp(self):
		self.cfg = MajorantConfig.from_dict(MAJORANT)

	def test_phi_for_lowest_order(self):
		self.assertEqual(phi(1, 1, 1, 3, [1, 1]), 7)

	def test_recursion_and_ode_agree(self):
		sequence = majorant_sequence(self.cfg, 7)

		ode = majorant_ode(self.cfg, 7)

		self.assertFalse(sequence.bigfloat)
		np.testing.assert_allclose(sequence.as_floats(), ode.as_floats(), rtol=1e-9)

	def test_recursion_and_ode_agree_across_configs(self):
		for data in MAJORANT_VARIANTS:
			cfg = MajorantConfig.from_dict(data)

			sequence, ode = majorant_sequence(cfg, 7), majorant_ode(cfg, 7)

			np.testing.assert_allclose(sequence.as_floats(), ode.as_floats(), rtol=1e-9, err_msg=str(data))

	def test_sequence_dominates_sequences_below_its_recursion(self):
		rng = np.random.default_rng(11)
		majorant = majorant_sequence(self.cfg, 6)
		bound = majorant.as_floats()
		for _ in range(100):
			candidate = [value * rng.uniform() for value in bound[:3]]

			for l in range(4):
				candidate.append(rng.uniform() * majorant.cbar * majorant_rhs(self.cfg, candidate, l))

			self.assertTrue(all(b <= a * (1.0 + 1e-12) for a, b in zip(bound, candidate)))

	def test_recursion_and_ode_agree_in_bigfloat(self):
		sequence = majorant_sequence(self.cfg, 11)

		ode = majorant_ode(self.cfg, 11)

		self.assertTrue(sequence.bigfloat)
		with mpmath.workprec(256):
			for a, c in zip(sequence.values, ode.values):
				self.assertLess(abs(a - c) / abs(a), mpmath.mpf("1e-40"))

	def test_sequence_satisfies_its_recursion(self):
		sequence = majorant_sequence(self.cfg, 6)
		values = list(sequence.values)

		for l in range(4):
			self.assertAlmostEqual(values[l + 3] / (sequence.cbar * majorant_rhs(self.cfg, values, l)), 1.0, places=12)

	def test_taylor_series_matches_numerical_solution(self):
		coefficients = majorant_sequence(self.cfg, 10).as_floats()

		times, values = integrate_majorant_ode(self.cfg, 0.01, points=3)

		taylor = sum(c * times[-1] ** l / factorial(l) for l, c in enumerate(coefficients))
		self.assertLess(abs(values[-1] - taylor) / taylor, 1e-5)

	def test_ode_leaves_the_analytic_region(self):
		with self.assertRaises(DomainError):
			integrate_majorant_ode(self.cfg, 1.0)

	def test_invalid_config(self):
		with self.assertRaises(InputError):
			MajorantConfig.from_dict(dict(MAJORANT, K=2))
		with self.assertRaises(InputError):
			MajorantConfig.from_dict({"C": 1.0})

	def test_factorial_growth_fit(self):
		values = [2.0 * factorial(l) / 0.5 ** l for l in range(12)]

		fit = fit_factorial_growth(values)

		self.assertAlmostEqual(fit.r, 0.5, places=10)
		self.assertAlmostEqual(fit.C, 2.0, places=9)
		self.assertAlmostEqual(fit.sup_ratio, 2.0, places=9)


class DecayTests(SimpleTestCase):
	def test_exponential_decay_rate(self):
		bandwidth = 32
		k = np.arange(-bandwidth, bandwidth + 1)
		curve = FourierCurve(np.exp(-0.3 * np.abs(k))[:, None])

		fit = fourier_decay_fit(curve)

		self.assertAlmostEqual(fit.sigma, 0.3, places=10)
		self.assertAlmostEqual(fit.r_squared, 1.0, places=10)
		self.assertFalse(fit.floor_limited)

	def test_exhausted_spectrum_is_floor_limited(self):
		fit = fourier_decay_fit(circle(bandwidth=8))

		self.assertTrue(fit.floor_limited)
		self.assertEqual(fit.sigma, float("inf"))

	def test_short_series_is_rejected(self):
		with self.assertRaises(InsufficientDataError):
			fourier_decay_fit(circle(bandwidth=3))

	def test_random_curve_report(self):
		report = analyticity_diagnostics(random_curve(bandwidth=12, seed=1), l_max=8)

		self.assertEqual(len(report.derivative_norms), 9)
		self.assertEqual(report.fourier.k_range[1], 12)
		self.assertIn("factorialGrowth", report.as_dict())


class IntersectionTests(SimpleTestCase):
	def setUp(self):
		self.curve = circle(bandwidth=4)
		self.radius = 1.0 / (2.0 * np.pi)

	def test_plane_through_the_centre(self):
		report = intersection_count(self.curve, Plane([1.0, 0.0, 0.0], 0.0))

		self.assertEqual(report.status, FINITE)
		self.assertEqual(report.count, 2)
		np.testing.assert_allclose(report.roots, [0.25, 0.75], atol=1e-10)

	def test_plane_containing_the_curve(self):
		self.assertEqual(intersection_count(self.curve, Plane([0.0, 0.0, 2.0], 0.0)).status, CONTAINED)

	def test_tangent_plane_is_ambiguous(self):
		report = intersection_count(self.curve, Plane([2.0, 0.0, 0.0], 2.0 * self.radius))

		self.assertEqual(report.status, AMBIGUOUS)

	def test_spheres(self):
		inner = intersection_count(self.curve, Sphere(np.zeros(3), 0.5 * self.radius))
		same = intersection_count(self.curve, Sphere(np.zeros(3), self.radius))

		self.assertEqual((inner.status, inner.count), (FINITE, 0))
		self.assertEqual(same.status, CONTAINED)

	def test_dimension_mismatch(self):
		with self.assertRaises(ParameterError):
			intersection_count(self.curve, Plane([1.0, 0.0], 0.0))


class LeibnizTests(SimpleTestCase):
	def test_parameter_checks(self):
		f = cosine_series(1)
		with self.assertRaises(ParameterError):
			fractional_leibniz_check(f, f, 0.5, 2.5, 1, 0.2, 0.8)
		with self.assertRaises(ParameterError):
			fractional_leibniz_check(f, f, 1.0, 2.5, 5, 0.2, 0.8)
		with self.assertRaises(ParameterError):
			fractional_leibniz_check(circle(bandwidth=2), f, 1.0, 2.5, 1, 0.2, 0.8)

	@tag("slow")
	def test_all_cases_give_finite_ratios(self):
		quad = QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-3, max_refine=8)

		results = leibniz_sweep(cosine_series(1), cosine_series(2), 1.0, 2.5, 0.25, 0.75, quad)

		self.assertEqual(sorted(results), list(CASES))
		for result in results.values():
			self.assertGreater(result.lhs, 0.0)
			self.assertTrue(np.isfinite(result.ratio))

	@tag("slow")
	def test_ratio_is_invariant_under_scaling(self):
		quad = QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-3, max_refine=8)
		f, g = cosine_series(1), cosine_series(2)

		plain = fractional_leibniz_check(f, g, 1.0, 2.5, 2, 0.25, 0.75, quad)
		scaled = fractional_leibniz_check(f * 3.0, g, 1.0, 2.5, 2, 0.25, 0.75, quad)

		self.assertAlmostEqual(scaled.lhs / plain.lhs, 3.0, places=9)
		self.assertAlmostEqual(scaled.rhs_product / plain.rhs_product, 3.0, places=12)
		self.assertAlmostEqual(scaled.ratio / plain.ratio, 1.0, places=9)

	@tag("slow")
	def test_ratio_is_stable_under_refinement(self):
		f, g = cosine_series(1), cosine_series(2)

		coarse = fractional_leibniz_check(f, g, 1.0, 2.5, 3, 0.25, 0.75, QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-3, max_refine=8))
		fine = fractional_leibniz_check(f, g, 1.0, 2.5, 3, 0.25, 0.75, QuadratureConfig(base_cells=4, gauss_order=6, rel_tol=1e-5, max_refine=10))

		self.assertLess(abs(coarse.ratio - fine.ratio) / fine.ratio, 2e-3)
