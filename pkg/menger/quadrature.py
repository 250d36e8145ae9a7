"""Graded adaptive cubature over the relative-offset domain D.

D = {(v, w) in (-1/2, 0) x (0, 1/2) : w <= 1 + 2v, v >= -1 + 2w} is the
quadrilateral with vertices (0, 0), (-1/2, 0), (-1/3, 1/3), (0, 1/2).  Every
integrand handled here is singular only on the edges v = 0, w = 0 and at the
corner, so D is split into two triangles with the corner at the origin.  Each
triangle is the image of the unit square under a Duffy map whose coordinates
are graded by s = sigma**g, t = tau**g, with t = 0 on the singular edge.

The module also holds the Fourier symbols of the difference operators
f(u + x) - f(u + y) that the integrands are built from.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import factorial

import numpy as np
from numpy.polynomial.legendre import leggauss

from .exceptions import AccuracyError, ParameterError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
SERIES_TERMS = 24
_SERIES_WEIGHTS = np.array([1.0 / factorial(j + 2) for j in range(SERIES_TERMS)])


@dataclass(frozen=True)
class QuadratureConfig:
	base_cells: int = 16
	grading_exponent: float = 3.0
	gauss_order: int = 8
	rel_tol: float = 1e-5
	max_refine: int = 6
	u_oversampling: int = 4
	workers: int = 1

	def __post_init__(self):
		if self.base_cells < 1 or self.gauss_order < 1 or self.u_oversampling < 2 or self.workers < 1:
			raise ParameterError("quadrature cell counts, orders and workers must be positive")
		if self.grading_exponent < 1:
			raise ParameterError("grading exponent must be >= 1")
		if not 0 < self.rel_tol < 1:
			raise ParameterError("relative tolerance must lie in (0, 1)")
		if self.max_refine < 0:
			raise ParameterError("max_refine must be non-negative")

	def refined(self, levels=1):
		return replace(self, base_cells=self.base_cells * 2 ** levels)

	def as_dict(self):
		return {
			"baseCells": self.base_cells,
			"gradingExponent": self.grading_exponent,
			"gaussOrder": self.gauss_order,
			"relTol": self.rel_tol,
			"maxRefine": self.max_refine,
			"uOversampling": self.u_oversampling,
			"workers": self.workers,
		}


class DomainD:
	CORNER = np.array([0.0, 0.0])
	VERTICES = np.array([[-0.5, 0.0], [-1.0 / 3.0, 1.0 / 3.0], [0.0, 0.5]])
	AREA = 1.0 / 6.0
	# (edge point P, far point Q) per triangle; the edge O-P is singular.
	TRIANGLES = np.array([
		[[-0.5, 0.0], [-1.0 / 3.0, 1.0 / 3.0]],
		[[0.0, 0.5], [-1.0 / 3.0, 1.0 / 3.0]],
	])

	@staticmethod
	def contains(v, w):
		v, w = np.asarray(v, dtype=float), np.asarray(w, dtype=float)
		return (v > -0.5) & (v < 0.0) & (w > 0.0) & (w < 0.5) & (w <= 1.0 + 2.0 * v) & (v >= -1.0 + 2.0 * w)

	@classmethod
	def duffy(cls, triangle, s, t):
		"""Map (s, t) in [0, 1]^2 into a triangle; returns v, w and the Jacobian."""
		p, q = cls.TRIANGLES[triangle, 0], cls.TRIANGLES[triangle, 1]
		det = abs(p[0] * q[1] - p[1] * q[0])
		v = s * ((1.0 - t) * p[0] + t * q[0])
		w = s * ((1.0 - t) * p[1] + t * q[1])
		return v, w, s * det


def expm1i(theta):
	"""exp(i theta) - 1 without cancellation for small theta."""
	theta = np.asarray(theta, dtype=float)
	half = np.sin(0.5 * theta)
	return -2.0 * half * half + 1j * np.sin(theta)


def difference_quotient(k, x):
	"""Symbol of (f(u + x) - f(u)) / x, shape (len(x), len(k))."""
	k = np.asarray(k, dtype=float)
	x = np.asarray(x, dtype=float)[:, None]
	return expm1i(TWO_PI * k[None, :] * x) / x


def shift_difference(k, x, y):
	"""Symbol of f(u + x) - f(u + y)."""
	k = np.asarray(k, dtype=float)[None, :]
	x = np.asarray(x, dtype=float)[:, None]
	y = np.asarray(y, dtype=float)[:, None]
	return np.exp(1j * TWO_PI * k * y) * expm1i(TWO_PI * k * (x - y))


def second_difference_quotient(k, v, w):
	"""Symbol of (f(u+v) - f(u))/v - (f(u+w) - f(u))/w.

	Near the corner the two quotients agree to leading order; there the
	divided difference of phi(z) = (e^z - 1)/z is summed as a series,
	phi[a, b] = sum_j h_j(a, b) / (j + 2)!, with h_j the complete homogeneous
	polynomials.
	"""
	k = np.asarray(k, dtype=float)
	v = np.asarray(v, dtype=float)
	w = np.asarray(w, dtype=float)
	alpha = TWO_PI * k[None, :] * v[:, None]
	beta = TWO_PI * k[None, :] * w[:, None]
	result = expm1i(alpha) / v[:, None] - expm1i(beta) / w[:, None]
	small = np.maximum(np.abs(alpha), np.abs(beta)) < 1.0
	if np.any(small):
		rows, cols = np.nonzero(small)
		a, b = 1j * alpha[rows, cols], 1j * beta[rows, cols]
		h = np.ones_like(a)
		b_power = np.ones_like(b)
		total = _SERIES_WEIGHTS[0] * h
		for j in range(1, SERIES_TERMS):
			b_power = b_power * b
			h = a * h + b_power
			total = total + _SERIES_WEIGHTS[j] * h
		z = 1j * TWO_PI * k[cols]
		result[rows, cols] = z * z * (v[rows] - w[rows]) * total
	return result


def kernel_weight(v, w, p):
	"""1 / (|v|^(p-2) |w|^(p-2) |v-w|^p) on D."""
	v, w = np.abs(v), np.abs(w)
	return (v * w) ** (2.0 - p) * (v + w) ** (-p)


@dataclass(frozen=True, eq=False)
class CubatureMesh:
	"""Frozen node set over D: cells, nodes and weights including Jacobians."""

	cells: np.ndarray
	v: np.ndarray
	w: np.ndarray
	weights: np.ndarray
	gauss_order: int
	grading_exponent: float

	@property
	def size(self):
		return self.weights.size

	@property
	def cell_count(self):
		return self.cells.shape[0]

	def depth_histogram(self):
		depths, counts = np.unique(self.cells[:, 5].astype(int), return_counts=True)
		return {int(d): int(c) for d, c in zip(depths, counts)}


@dataclass(frozen=True, eq=False)
class CubatureResult:
	value: object
	error: float
	mesh: CubatureMesh
	cell_values: np.ndarray
	converged: bool = True
	levels: int = 0
	history: tuple = field(default_factory=tuple)

	@property
	def depth_histogram(self):
		return self.mesh.depth_histogram()

	def largest_cell(self):
		"""Magnitude and (v, w) centre of the cell contributing the most."""
		magnitudes = np.abs(self.cell_values.reshape(self.cell_values.shape[0], -1)).sum(axis=1)
		index = int(np.argmax(magnitudes))
		return float(magnitudes[index]), _cell_centres(self.mesh.cells[index:index + 1], self.mesh.grading_exponent)[0]


def initial_cells(base_cells):
	edges = np.arange(base_cells + 1) / base_cells
	lo, hi = edges[:-1], edges[1:]
	cells = []
	for triangle in (0, 1):
		for i in range(base_cells):
			for j in range(base_cells):
				cells.append((triangle, lo[i], hi[i], lo[j], hi[j], 0))
	return np.array(cells, dtype=float)


def split_cells(cells):
	"""Quarter every cell; children of a parent are contiguous."""
	tri, s0, s1, t0, t1, depth = cells.T
	sm, tm = 0.5 * (s0 + s1), 0.5 * (t0 + t1)
	children = np.stack([
		np.column_stack([tri, s0, sm, t0, tm, depth + 1]),
		np.column_stack([tri, s0, sm, tm, t1, depth + 1]),
		np.column_stack([tri, sm, s1, t0, tm, depth + 1]),
		np.column_stack([tri, sm, s1, tm, t1, depth + 1]),
	], axis=1)
	return children.reshape(-1, 6)


def _cell_centres(cells, grading):
	sigma = 0.5 * (cells[:, 1] + cells[:, 2])
	tau = 0.5 * (cells[:, 3] + cells[:, 4])
	centres = []
	for row, s, t in zip(cells, sigma ** grading, tau ** grading):
		v, w, _ = DomainD.duffy(int(row[0]), s, t)
		centres.append((float(v), float(w)))
	return centres


def cell_nodes(cells, order, grading):
	"""Tensor Gauss-Legendre nodes of each cell, shape (cells, order**2)."""
	x, wx = leggauss(order)
	x01, w01 = 0.5 * (x + 1.0), 0.5 * wx
	tri = cells[:, 0].astype(int)
	hs, ht = cells[:, 2] - cells[:, 1], cells[:, 4] - cells[:, 3]
	sigma = cells[:, 1, None] + hs[:, None] * x01[None, :]
	tau = cells[:, 3, None] + ht[:, None] * x01[None, :]
	s, t = sigma ** grading, tau ** grading
	ds = grading * sigma ** (grading - 1.0) * hs[:, None] * w01[None, :]
	dt = grading * tau ** (grading - 1.0) * ht[:, None] * w01[None, :]
	p = DomainD.TRIANGLES[tri, 0]
	q = DomainD.TRIANGLES[tri, 1]
	det = np.abs(p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0])
	s3, t3 = s[:, :, None], t[:, None, :]
	v = s3 * ((1.0 - t3) * p[:, 0, None, None] + t3 * q[:, 0, None, None])
	w = s3 * ((1.0 - t3) * p[:, 1, None, None] + t3 * q[:, 1, None, None])
	weights = (ds * s)[:, :, None] * dt[:, None, :] * det[:, None, None]
	count = cells.shape[0]
	return v.reshape(count, -1), w.reshape(count, -1), weights.reshape(count, -1)


def mesh_from_cells(cells, quad):
	order = np.lexsort((cells[:, 3], cells[:, 1], cells[:, 0]))
	cells = cells[order]
	v, w, weights = cell_nodes(cells, quad.gauss_order, quad.grading_exponent)
	return CubatureMesh(cells, v, w, weights, quad.gauss_order, quad.grading_exponent)


def base_mesh(quad):
	"""Non-adaptive mesh of the initial graded cells."""
	return mesh_from_cells(initial_cells(quad.base_cells), quad)


def evaluate_nodes(integrand, v, w, chunk_size, workers=1):
	"""Integrand values for flat node arrays, evaluated chunk by chunk in order."""
	bounds = [(start, min(start + chunk_size, v.size)) for start in range(0, v.size, chunk_size)]
	if workers > 1 and len(bounds) > 1:
		with ThreadPoolExecutor(max_workers=workers) as pool:
			parts = list(pool.map(lambda b: integrand(v[b[0]:b[1]], w[b[0]:b[1]]), bounds))
	else:
		parts = [integrand(v[a:b], w[a:b]) for a, b in bounds]
	return np.concatenate(parts, axis=0)


def _cell_integrals(integrand, cells, quad, chunk_size):
	v, w, weights = cell_nodes(cells, quad.gauss_order, quad.grading_exponent)
	values = evaluate_nodes(integrand, v.ravel(), w.ravel(), chunk_size, quad.workers)
	values = values.reshape(weights.shape + values.shape[1:])
	return np.einsum("cn,cn...->c...", weights, values)


def _norm(values):
	values = np.asarray(values)
	if values.ndim <= 1:
		return np.abs(values)
	return np.sqrt(np.sum(np.abs(values.reshape(values.shape[0], -1)) ** 2, axis=1))


def integrate_on_mesh(integrand, mesh, chunk_size=2048, workers=1):
	values = evaluate_nodes(integrand, mesh.v.ravel(), mesh.w.ravel(), chunk_size, workers)
	return np.tensordot(mesh.weights.ravel(), values, axes=(0, 0))


def integrate(integrand, quad, chunk_size=2048, label="integral"):
	"""Adaptive cubature of ``integrand(v, w) -> array (P, ...)`` over D.

	Every active cell is compared with the sum over its four children.  Cells
	are accepted from the smallest estimated error upward while the accepted
	error stays within half of ``rel_tol * |estimate|``; the rest are split.
	More than ``max_refine`` rounds raises AccuracyError with the best
	estimate.
	"""
	cells = initial_cells(quad.base_cells)
	coarse = _cell_integrals(integrand, cells, quad, chunk_size)
	accepted_cells, accepted_values = [], []
	accepted_error = 0.0
	history = []
	for level in range(quad.max_refine + 1):
		children = split_cells(cells)
		child_values = _cell_integrals(integrand, children, quad, chunk_size)
		fine = child_values.reshape((cells.shape[0], 4) + child_values.shape[1:]).sum(axis=1)
		errors = _norm(fine - coarse)
		kept_sum = sum(np.sum(part, axis=0) for part in accepted_values) if accepted_values else 0.0
		total = kept_sum + np.sum(fine, axis=0)
		total_error = accepted_error + float(np.sum(errors))
		scale = float(np.sqrt(np.sum(np.abs(total) ** 2)))
		budget = quad.rel_tol * scale
		history.append((level, total, total_error))
		logger.debug("%s: level %d, %d active cells, error %.3e (budget %.3e)", label, level, cells.shape[0], total_error, budget)
		if total_error <= budget:
			accepted_cells.append(children)
			accepted_values.append(child_values)
			accepted_error = total_error
			break
		if level == quad.max_refine:
			raise AccuracyError(
				"%s did not reach relative tolerance %.1e after %d refinements (error %.3e)"
				% (label, quad.rel_tol, quad.max_refine, total_error),
				estimate=total,
				error=total_error,
			)
		order = np.argsort(errors, kind="stable")
		cumulative = accepted_error + np.cumsum(errors[order])
		keep = order[cumulative <= 0.5 * budget]
		refine = np.setdiff1d(np.arange(cells.shape[0]), keep)
		if keep.size:
			accepted_error += float(np.sum(errors[keep]))
			kept_children = (4 * keep[:, None] + np.arange(4)[None, :]).ravel()
			accepted_cells.append(children[kept_children])
			accepted_values.append(child_values[kept_children])
		refine_children = (4 * refine[:, None] + np.arange(4)[None, :]).ravel()
		cells = children[refine_children]
		coarse = child_values[refine_children]
	all_cells = np.concatenate(accepted_cells, axis=0)
	all_values = np.concatenate(accepted_values, axis=0)
	order = np.lexsort((all_cells[:, 3], all_cells[:, 1], all_cells[:, 0]))
	all_cells, all_values = all_cells[order], all_values[order]
	mesh = mesh_from_cells(all_cells, quad)
	value = np.sum(all_values, axis=0)
	return CubatureResult(
		value=value if np.ndim(value) else float(value),
		error=accepted_error,
		mesh=mesh,
		cell_values=all_values,
		converged=True,
		levels=len(history),
		history=tuple(history),
	)
