"""Generalized integral Menger curvature intM^(p,q) of Fourier curves.

The triple integral over (R/Z)^3 is written in relative coordinates
u1 = u, u2 = u + v, u3 = u + w with (v, w) in D; D covers one sixth of the
torus and the integrand is symmetric in the three points, so
``E = 6 * int_u int_D F``.  With the difference quotients

	A = (g(u+v) - g(u)) / v,   B = (g(u+w) - g(u)) / w,   C = (wB - vA) / (w - v)

the integrand is

	F = |g'(u)| |g'(u+v)| |g'(u+w)| |v|^(q-p) |w|^(q-p) (w-v)^(-p) |(A-B) ^ B|^q / (|A||B||C|)^p

which stays bounded near the diagonal for regular curves.  ``A - B`` is
evaluated through its own Fourier symbol so that it does not cancel.
"""
import logging
import time
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .curve import FourierCurve, assert_simple, effective_bandwidth, trimmed
from .exceptions import AccuracyError, DegenerateCurveError, DegenerateTripleError, ParameterError
from .quadrature import (
	CubatureMesh,
	QuadratureConfig,
	base_mesh,
	difference_quotient,
	evaluate_nodes,
	integrate,
	second_difference_quotient,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
SYMMETRY_FACTOR = 6.0
NODE_BUDGET = 1 << 21


@dataclass(frozen=True)
class EnergyParams:
	p: float = 2.5
	q: float = 2.0
	quad: QuadratureConfig = field(default_factory=QuadratureConfig)

	def __post_init__(self):
		if not (np.isfinite(self.p) and np.isfinite(self.q)) or self.p <= 0 or self.q <= 0:
			raise ParameterError("energy exponents must be positive, got p=%r q=%r" % (self.p, self.q))

	@property
	def non_degenerate(self):
		"""q == 2 and 7/3 < p < 8/3, where the energy is a non-degenerate knot energy."""
		return self.q == 2 and 7.0 / 3.0 < self.p < 8.0 / 3.0

	@property
	def finite_for_smooth_curves(self):
		return self.p < self.q + 2.0 / 3.0

	@property
	def scaling_exponent(self):
		return 3.0 + 2.0 * self.q - 3.0 * self.p

	def as_dict(self):
		return {"p": self.p, "q": self.q, "quadrature": self.quad.as_dict()}


class Triple(NamedTuple):
	x: np.ndarray
	y: np.ndarray
	z: np.ndarray


def _triple_geometry(triple):
	x, y, z = (np.asarray(point, dtype=float) for point in triple)
	a, b, c = y - x, z - x, z - y
	la, lb, lc = np.linalg.norm(a), np.linalg.norm(b), np.linalg.norm(c)
	if min(la, lb, lc) == 0.0:
		raise DegenerateTripleError("triple contains coincident points")
	wedge = np.sqrt(max(la * la * lb * lb - float(np.dot(a, b)) ** 2, 0.0))
	return la * lb * lc, wedge


def circumradius(triple):
	"""Circumcircle radius; infinite for collinear points."""
	lengths, wedge = _triple_geometry(triple)
	if wedge == 0.0:
		return float("inf")
	return float(lengths / (2.0 * wedge))


def decoupled_radius(triple, p, q):
	"""R^(p,q) = (|x-y||y-z||z-x|)^p / |(x-y) ^ (x-z)|^q."""
	lengths, wedge = _triple_geometry(triple)
	if wedge == 0.0:
		return float("inf")
	return float(lengths ** p / wedge ** q)


def u_grid_size(bandwidth, quad):
	return max(quad.u_oversampling * bandwidth + 1, 2 * bandwidth + 1, 5)


class MengerIntegrand:
	"""Evaluates the u-average of F at nodes (v, w) for one curve."""

	def __init__(self, curve, p, q, grid_size):
		if curve.dim < 2:
			raise ParameterError("energy needs a curve in R^n with n >= 2")
		self.curve = curve
		self.p, self.q = float(p), float(q)
		self.grid_size = int(grid_size)
		self.k = curve.k
		self.columns = self.k % self.grid_size
		self.coeffs = np.array(curve.coeffs)
		self.tangent_coeffs = self.coeffs * (2j * np.pi * self.k)[:, None]
		tangent = self._to_grid(self.tangent_coeffs[None])[0]
		self.tangent = tangent
		self.speed = np.linalg.norm(tangent, axis=1)
		if float(np.min(self.speed)) <= 1e-12 * float(np.max(self.speed)):
			raise DegenerateCurveError("curve is not regular: |gamma'| vanishes on the sampling grid")

	@property
	def chunk_size(self):
		return max(1, NODE_BUDGET // (self.grid_size * self.curve.dim * 8))

	def _to_grid(self, spectra):
		placed = np.zeros((spectra.shape[0], self.grid_size, spectra.shape[2]), dtype=complex)
		placed[:, self.columns, :] = spectra
		return (np.fft.ifft(placed, axis=1) * self.grid_size).real

	def _from_grid(self, samples):
		return np.fft.fft(samples, axis=1)[:, self.columns, :] / self.grid_size

	def _symbols(self, v, w):
		symbol_v = difference_quotient(self.k, v)
		symbol_w = difference_quotient(self.k, w)
		symbol_d = second_difference_quotient(self.k, v, w)
		shift_v = np.exp(1j * TWO_PI * np.outer(v, self.k))
		shift_w = np.exp(1j * TWO_PI * np.outer(w, self.k))
		return symbol_v, symbol_w, symbol_d, shift_v, shift_w

	def _fields(self, v, w):
		symbol_v, symbol_w, symbol_d, shift_v, shift_w = symbols = self._symbols(v, w)
		c = self.coeffs[None]
		a = self._to_grid(symbol_v[:, :, None] * c)
		b = self._to_grid(symbol_w[:, :, None] * c)
		d = self._to_grid(symbol_d[:, :, None] * c)
		tv = self._to_grid(shift_v[:, :, None] * self.tangent_coeffs[None])
		tw = self._to_grid(shift_w[:, :, None] * self.tangent_coeffs[None])
		return symbols, a, b, d, tv, tw

	def _pointwise(self, v, w, a, b, d, tv, tw):
		p, q = self.p, self.q
		vv, ww = v[:, None, None], w[:, None, None]
		c = (ww * b - vv * a) / (ww - vv)
		alpha2 = np.sum(a * a, axis=2)
		beta2 = np.sum(b * b, axis=2)
		gamma2 = np.sum(c * c, axis=2)
		dd = np.sum(d * d, axis=2)
		db = np.sum(d * b, axis=2)
		wedge2 = np.maximum(dd * beta2 - db * db, 0.0)
		speed_v = np.linalg.norm(tv, axis=2)
		speed_w = np.linalg.norm(tw, axis=2)
		av, aw = np.abs(v), np.abs(w)
		scale = (av * aw) ** (q - p) * (w - v) ** (-p)
		valid = (wedge2 > 0) & (alpha2 > 0) & (beta2 > 0) & (gamma2 > 0)
		safe = lambda x: np.where(valid, x, 1.0)
		values = (
			self.speed[None, :] * speed_v * speed_w * scale[:, None]
			* safe(wedge2) ** (0.5 * q) / safe(alpha2 * beta2 * gamma2) ** (0.5 * p)
		)
		values = np.where(valid, values, 0.0)
		return values, c, alpha2, beta2, gamma2, dd, db, wedge2, speed_v, speed_w, valid

	def __call__(self, v, w):
		_, a, b, d, tv, tw = self._fields(v, w)
		values = self._pointwise(v, w, a, b, d, tv, tw)[0]
		return np.mean(values, axis=1)

	def value_and_gradient(self, v, w, weights):
		"""Weighted sum of node values and its gradient in the coefficients.

		Returns ``(sum_i weights_i Fbar_i, spectrum)`` where spectrum has the
		shape of the coefficient array and pairs with a perturbation by
		``Re sum_k spectrum_k conj(h_k)``.
		"""
		p, q = self.p, self.q
		(symbol_v, symbol_w, symbol_d, shift_v, shift_w), a, b, d, tv, tw = self._fields(v, w)
		values, c, alpha2, beta2, gamma2, dd, db, wedge2, speed_v, speed_w, valid = self._pointwise(v, w, a, b, d, tv, tw)
		safe = lambda x: np.where(valid, x, 1.0)
		f = values[:, :, None]
		vv, ww = v[:, None, None], w[:, None, None]
		inv_wedge = (1.0 / safe(wedge2))[:, :, None]
		c_term = p * c / safe(gamma2)[:, :, None]
		grad_d = f * q * (beta2[:, :, None] * d - db[:, :, None] * b) * inv_wedge
		grad_b = f * (
			q * (dd[:, :, None] * b - db[:, :, None] * d) * inv_wedge
			- p * b / safe(beta2)[:, :, None]
			- c_term * ww / (ww - vv)
		)
		grad_a = f * (-p * a / safe(alpha2)[:, :, None] + c_term * vv / (ww - vv))
		grad_tv = f * tv / np.where(valid, speed_v ** 2, 1.0)[:, :, None]
		grad_tw = f * tw / np.where(valid, speed_w ** 2, 1.0)[:, :, None]
		grad_t0 = f * self.tangent[None] / (self.speed ** 2)[None, :, None]
		wt = weights[:, None, None]
		twopik = (2j * np.pi * self.k)[None, :, None]
		spectrum = (
			np.sum(wt * self._from_grid(grad_a) * np.conj(symbol_v)[:, :, None], axis=0)
			+ np.sum(wt * self._from_grid(grad_b) * np.conj(symbol_w)[:, :, None], axis=0)
			+ np.sum(wt * self._from_grid(grad_d) * np.conj(symbol_d)[:, :, None], axis=0)
			+ np.sum(wt * self._from_grid(grad_tv) * np.conj(shift_v[:, :, None] * twopik), axis=0)
			+ np.sum(wt * self._from_grid(grad_tw) * np.conj(shift_w[:, :, None] * twopik), axis=0)
			+ np.sum(wt * self._from_grid(grad_t0), axis=0) * np.conj(twopik[0])
		)
		return float(np.sum(weights * np.mean(values, axis=1))), spectrum


@dataclass(frozen=True, eq=False)
class EnergyResult:
	value: float
	error: float
	params: EnergyParams
	mesh: CubatureMesh
	cell_count: int
	depth_histogram: dict
	largest_cell: tuple
	grid_size: int
	elapsed: float

	def as_dict(self):
		magnitude, (v, w) = self.largest_cell
		return {
			"value": self.value,
			"errorEstimate": self.error,
			"p": self.params.p,
			"q": self.params.q,
			"nonDegenerate": self.params.non_degenerate,
			"cells": self.cell_count,
			"depthHistogram": {str(k): n for k, n in self.depth_histogram.items()},
			"largestCell": {"contribution": SYMMETRY_FACTOR * magnitude, "v": v, "w": w},
			"uGridSize": self.grid_size,
			"seconds": self.elapsed,
		}


def _checked_params(params):
	if not params.finite_for_smooth_curves:
		logger.warning(
			"intM^(%g,%g): p >= q + 2/3, the energy is infinite for smooth curves; expect AccuracyError",
			params.p, params.q,
		)
	elif not params.non_degenerate:
		logger.info("intM^(%g,%g) lies outside the non-degenerate range q=2, 7/3<p<8/3", params.p, params.q)


def energy(curve, params, check_simple=True):
	"""intM^(p,q)(curve) with an estimate of the quadrature error.

	Raises TopologyError for curves that are not simple at the sampled
	resolution and AccuracyError when the cubature does not reach
	``params.quad.rel_tol``.
	"""
	if check_simple:
		assert_simple(curve)
	_checked_params(params)
	started = time.perf_counter()
	bandwidth = max(1, effective_bandwidth(curve))
	grid_size = u_grid_size(bandwidth, params.quad)
	integrand = MengerIntegrand(curve.with_bandwidth(bandwidth), params.p, params.q, grid_size)
	try:
		result = integrate(integrand, params.quad, chunk_size=integrand.chunk_size, label="intM^(%g,%g)" % (params.p, params.q))
	except AccuracyError as exc:
		raise AccuracyError(
			str(exc),
			estimate=SYMMETRY_FACTOR * float(exc.estimate),
			error=SYMMETRY_FACTOR * float(exc.error),
		) from exc
	elapsed = time.perf_counter() - started
	logger.info(
		"intM^(%g,%g) = %.12g (error %.2e, %d cells, %.2fs)",
		params.p, params.q, SYMMETRY_FACTOR * result.value, SYMMETRY_FACTOR * result.error,
		result.mesh.cell_count, elapsed,
	)
	return EnergyResult(
		value=SYMMETRY_FACTOR * float(result.value),
		error=SYMMETRY_FACTOR * result.error,
		params=params,
		mesh=result.mesh,
		cell_count=result.mesh.cell_count,
		depth_histogram=result.depth_histogram,
		largest_cell=result.largest_cell(),
		grid_size=grid_size,
		elapsed=elapsed,
	)


def menger_energy(curve, p, quad=None):
	"""M_p = int 1/R^p = 2^p intM^(p,p)."""
	params = EnergyParams(p=p, q=p, quad=quad or QuadratureConfig())
	result = energy(curve, params)
	return 2.0 ** p * result.value, 2.0 ** p * result.error


@dataclass(frozen=True)
class IntegrandStats:
	value: float
	error: float
	depth_histogram: dict
	deepest_cell_distance: float
	largest_contribution: float
	largest_location: tuple
	convergence: tuple

	def as_dict(self):
		return {
			"value": self.value,
			"errorEstimate": self.error,
			"depthHistogram": {str(k): n for k, n in self.depth_histogram.items()},
			"deepestCellDistance": self.deepest_cell_distance,
			"largestContribution": self.largest_contribution,
			"largestLocation": list(self.largest_location),
			"convergence": [
				{"maxRefine": level, "estimate": estimate, "error": error}
				for level, estimate, error in self.convergence
			],
		}


def self_convergence(curve, params, levels=None):
	"""(max_refine, estimate, error) for increasing refinement budgets."""
	levels = range(params.quad.max_refine + 1) if levels is None else levels
	rows = []
	for level in levels:
		quad = replace(params.quad, max_refine=level)
		try:
			result = energy(curve, EnergyParams(params.p, params.q, quad), check_simple=False)
			rows.append((level, result.value, result.error))
		except AccuracyError as exc:
			rows.append((level, float(exc.estimate), float(exc.error)))
	return tuple(rows)


def energy_integrand_stats(curve, params):
	"""Where the adaptive cubature spends its cells and how it converges."""
	result = energy(curve, params)
	mesh = result.mesh
	depths = mesh.cells[:, 5]
	deepest = mesh.cells[depths == depths.max()]
	reach = deepest[:, 2] ** mesh.grading_exponent
	magnitude, location = result.largest_cell
	return IntegrandStats(
		value=result.value,
		error=result.error,
		depth_histogram=result.depth_histogram,
		deepest_cell_distance=float(np.max(reach) * 0.5),
		largest_contribution=SYMMETRY_FACTOR * magnitude,
		largest_location=location,
		convergence=self_convergence(curve, params),
	)


class EnergyFunctional:
	"""The discrete energy on a frozen cubature mesh, with its exact gradient.

	Freezing the mesh makes the energy a smooth function of the
	coefficients, which is what finite differences, line searches and the
	adjoint gradient need.
	"""

	def __init__(self, mesh, params):
		self.mesh = mesh
		self.params = params

	@classmethod
	def adapted_to(cls, curve, params):
		return cls(energy(curve, params).mesh, params)

	@classmethod
	def on_base_mesh(cls, params):
		return cls(base_mesh(params.quad), params)

	def _integrand(self, curve):
		curve = trimmed(curve)
		return MengerIntegrand(curve, self.params.p, self.params.q, u_grid_size(curve.bandwidth, self.params.quad))

	def value(self, curve):
		integrand = self._integrand(curve)
		values = evaluate_nodes(
			integrand, self.mesh.v.ravel(), self.mesh.w.ravel(), integrand.chunk_size, self.params.quad.workers
		)
		return SYMMETRY_FACTOR * float(np.dot(self.mesh.weights.ravel(), values))

	def value_and_gradient(self, curve):
		integrand = self._integrand(curve)
		v, w, weights = self.mesh.v.ravel(), self.mesh.w.ravel(), self.mesh.weights.ravel()
		total = 0.0
		spectrum = np.zeros_like(integrand.coeffs)
		step = max(1, integrand.chunk_size // 4)
		for start in range(0, v.size, step):
			part, grad = integrand.value_and_gradient(v[start:start + step], w[start:start + step], weights[start:start + step])
			total += part
			spectrum += grad
		gradient = FourierCurve(SYMMETRY_FACTOR * spectrum).with_bandwidth(curve.bandwidth)
		return SYMMETRY_FACTOR * total, gradient


def l2_gradient(curve, params, functional=None):
	"""Energy and its L^2 gradient on a mesh adapted to ``curve``."""
	functional = functional or EnergyFunctional.adapted_to(curve, params)
	return functional.value_and_gradient(curve)
