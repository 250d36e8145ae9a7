"""Closed curves R/Z -> R^n stored as truncated Fourier series.

Coefficients are kept in an array of shape ``(2N+1, n)`` whose row ``k + N``
holds the vector coefficient of ``exp(2 pi i k u)``.  Scalar periodic series
(the functions the Sobolev and Leibniz checks act on) use the same type with
``dim == 1``.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize
from scipy.spatial.distance import cdist

from . import utils
from .exceptions import DegenerateCurveError, ParameterError, TopologyError, UndersamplingError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
CONJUGATE_TOL = 1e-10
DEFAULT_BANDWIDTH = 64
SIMPLICITY_THRESHOLD = 1e-6
SEPARATION_WINDOW = 0.125
ARC_LENGTH_MAX_ITER = 50


def wavenumbers(bandwidth):
	return np.arange(-bandwidth, bandwidth + 1)


def default_grid_size(bandwidth):
	return 4 * bandwidth + 1


@dataclass(frozen=True, eq=False)
class FourierCurve:
	coeffs: np.ndarray

	def __post_init__(self):
		coeffs = np.array(self.coeffs, dtype=complex)
		if coeffs.ndim == 1:
			coeffs = coeffs[:, None]
		if coeffs.ndim != 2 or coeffs.shape[0] % 2 != 1:
			raise ParameterError("coefficients must have shape (2N+1, n), got %s" % (coeffs.shape,))
		if not np.all(np.isfinite(coeffs)):
			raise ParameterError("coefficients must be finite")
		mirrored = np.conj(coeffs[::-1])
		scale = max(1.0, float(np.max(np.abs(coeffs))))
		if np.max(np.abs(coeffs - mirrored)) > CONJUGATE_TOL * scale:
			raise ParameterError("coefficients are not conjugate symmetric; the curve would not be real")
		coeffs = 0.5 * (coeffs + mirrored)
		coeffs.setflags(write=False)
		object.__setattr__(self, "coeffs", coeffs)

	@classmethod
	def from_samples(cls, samples, bandwidth):
		return cls(forward_transform(samples, bandwidth))

	@classmethod
	def constant(cls, point, bandwidth=1):
		point = np.asarray(point, dtype=float)
		coeffs = np.zeros((2 * bandwidth + 1, point.size), dtype=complex)
		coeffs[bandwidth] = point
		return cls(coeffs)

	@property
	def dim(self):
		return self.coeffs.shape[1]

	@property
	def bandwidth(self):
		return (self.coeffs.shape[0] - 1) // 2

	@property
	def k(self):
		return wavenumbers(self.bandwidth)

	@property
	def centroid(self):
		return self.coeffs[self.bandwidth].real.copy()

	def mode(self, k):
		if abs(k) > self.bandwidth:
			return np.zeros(self.dim, dtype=complex)
		return self.coeffs[k + self.bandwidth]

	def with_bandwidth(self, bandwidth):
		"""Zero-pad or truncate to a new bandwidth."""
		coeffs = np.zeros((2 * bandwidth + 1, self.dim), dtype=complex)
		m = min(bandwidth, self.bandwidth)
		coeffs[bandwidth - m:bandwidth + m + 1] = self.coeffs[self.bandwidth - m:self.bandwidth + m + 1]
		return FourierCurve(coeffs)

	def derivative(self, order=1):
		symbol = (2j * np.pi * self.k) ** order
		return FourierCurve(self.coeffs * symbol[:, None])

	def multiplied(self, symbol):
		"""Apply a real even Fourier multiplier given per wavenumber."""
		return FourierCurve(self.coeffs * np.asarray(symbol, dtype=float)[:, None])

	def translated(self, offset):
		coeffs = np.array(self.coeffs)
		coeffs[self.bandwidth] += np.asarray(offset, dtype=float)
		return FourierCurve(coeffs)

	def transformed(self, matrix):
		matrix = np.asarray(matrix, dtype=float)
		return FourierCurve(self.coeffs @ matrix.T)

	def scaled(self, factor, about=None):
		about = self.centroid if about is None else np.asarray(about, dtype=float)
		return (self.translated(-about) * factor).translated(about)

	def evaluate_at(self, u, deriv_order=0):
		"""Direct (non-uniform) evaluation at the parameters ``u``."""
		u = np.atleast_1d(np.asarray(u, dtype=float))
		k = self.k
		spec = self.coeffs * ((2j * np.pi * k) ** deriv_order)[:, None]
		phases = np.exp(2j * np.pi * np.outer(u, k))
		return (phases @ spec).real

	def l2_inner(self, other):
		"""The L^2(R/Z) inner product, computed by Parseval."""
		n = max(self.bandwidth, other.bandwidth)
		a, b = self.with_bandwidth(n).coeffs, other.with_bandwidth(n).coeffs
		return float(np.sum((a * np.conj(b)).real))

	def l2_norm(self):
		return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

	def allclose(self, other, atol=1e-12):
		n = max(self.bandwidth, other.bandwidth)
		return self.dim == other.dim and np.allclose(
			self.with_bandwidth(n).coeffs, other.with_bandwidth(n).coeffs, rtol=0.0, atol=atol
		)

	def _aligned(self, other):
		if self.dim != other.dim:
			raise ParameterError("curves live in different dimensions (%d, %d)" % (self.dim, other.dim))
		n = max(self.bandwidth, other.bandwidth)
		return self.with_bandwidth(n).coeffs, other.with_bandwidth(n).coeffs

	def __add__(self, other):
		a, b = self._aligned(other)
		return FourierCurve(a + b)

	def __sub__(self, other):
		a, b = self._aligned(other)
		return FourierCurve(a - b)

	def __mul__(self, factor):
		return FourierCurve(self.coeffs * float(factor))

	__rmul__ = __mul__

	def __neg__(self):
		return FourierCurve(-self.coeffs)

	def __repr__(self):
		return "FourierCurve(dim=%d, bandwidth=%d)" % (self.dim, self.bandwidth)


@dataclass(frozen=True, eq=False)
class SampledCurve:
	samples: np.ndarray

	@property
	def dim(self):
		return self.samples.shape[1]

	@property
	def grid_size(self):
		return self.samples.shape[0]

	@property
	def grid(self):
		return np.arange(self.grid_size) / self.grid_size


@dataclass(frozen=True)
class CurveQuality:
	length_deviation: float
	bilipschitz_constant: float
	min_separation: float
	length: float
	grid_size: int

	def is_simple(self, threshold=SIMPLICITY_THRESHOLD):
		return self.min_separation > threshold

	def as_dict(self):
		return {
			"lengthDeviation": self.length_deviation,
			"bilipschitzConstant": self.bilipschitz_constant,
			"minSeparation": self.min_separation,
			"length": self.length,
			"gridSize": self.grid_size,
		}


def effective_bandwidth(curve, rel_tol=1e-15):
	"""Highest wavenumber whose coefficient is not negligible."""
	norms = np.linalg.norm(curve.coeffs[curve.bandwidth:], axis=1)
	top = float(np.max(norms)) if norms.size else 0.0
	active = np.nonzero(norms > rel_tol * top)[0] if top > 0 else []
	return int(active[-1]) if len(active) else 0


def trimmed(curve, minimum=1):
	return curve.with_bandwidth(max(minimum, effective_bandwidth(curve)))


def scalar_series(coeffs):
	"""A scalar periodic series from its coefficients for k = -N..N."""
	return FourierCurve(np.asarray(coeffs, dtype=complex)[:, None])


def series_from_function(func, bandwidth, grid_size=None):
	"""Project a periodic callable on [0, 1) onto bandwidth ``N``."""
	grid_size = grid_size or max(8 * bandwidth + 1, 64)
	u = np.arange(grid_size) / grid_size
	values = np.asarray(func(u), dtype=float)
	if values.ndim == 1:
		values = values[:, None]
	return FourierCurve.from_samples(values, bandwidth)


def _placed(coeffs, bandwidth, grid_size):
	spectrum = np.zeros((grid_size, coeffs.shape[1]), dtype=complex)
	spectrum[wavenumbers(bandwidth) % grid_size] = coeffs
	return spectrum


def evaluate(curve, deriv_order=0, grid_size=None):
	"""Samples of the ``deriv_order``-th derivative on the grid u_j = j/M."""
	if deriv_order < 0:
		raise ParameterError("derivative order must be non-negative")
	n = curve.bandwidth
	grid_size = default_grid_size(n) if grid_size is None else int(grid_size)
	if grid_size < 2 * n + 1:
		raise UndersamplingError("grid of %d points cannot resolve bandwidth %d" % (grid_size, n))
	spec = curve.coeffs * ((2j * np.pi * curve.k) ** deriv_order)[:, None]
	values = np.fft.ifft(_placed(spec, n, grid_size), axis=0) * grid_size
	return SampledCurve(values.real)


def forward_transform(samples, bandwidth):
	samples = np.asarray(samples, dtype=float)
	if samples.ndim == 1:
		samples = samples[:, None]
	grid_size = samples.shape[0]
	if grid_size < 2 * bandwidth + 1:
		raise UndersamplingError("%d samples cannot determine bandwidth %d" % (grid_size, bandwidth))
	spectrum = np.fft.fft(samples, axis=0) / grid_size
	return spectrum[wavenumbers(bandwidth) % grid_size]


def speed(curve, grid_size=None):
	return np.linalg.norm(evaluate(curve, 1, grid_size).samples, axis=1)


def curve_length(curve, grid_size=None):
	"""Length by the trapezoid rule on |gamma'|, spectrally accurate."""
	grid_size = grid_size or max(8 * curve.bandwidth + 1, 65)
	return float(np.mean(speed(curve, grid_size)))


def _require_regular(speeds):
	top = float(np.max(speeds))
	if top <= 0.0 or float(np.min(speeds)) <= 1e-12 * top:
		raise DegenerateCurveError("curve is not regular: |gamma'| vanishes on the sampling grid")


def _arc_length_pass(curve, grid_size):
	u = np.arange(grid_size) / grid_size
	speeds = speed(curve, grid_size)
	_require_regular(speeds)
	speed_hat = np.fft.fft(speeds) / grid_size
	freqs = np.rint(np.fft.fftfreq(grid_size, d=1.0 / grid_size))
	length = speed_hat[0].real
	primitive_hat = np.zeros_like(speed_hat)
	nonzero = freqs != 0
	primitive_hat[nonzero] = speed_hat[nonzero] / (2j * np.pi * freqs[nonzero])
	primitive = (np.fft.ifft(primitive_hat) * grid_size).real
	origin = primitive_hat.sum().real

	def arc_fraction(x):
		phases = np.exp(2j * np.pi * np.outer(x, freqs))
		return x + ((phases @ primitive_hat).real - origin) / length

	def arc_rate(x):
		phases = np.exp(2j * np.pi * np.outer(x, freqs))
		return (phases @ speed_hat).real / length

	fraction = u + (primitive - origin) / length
	inverse = PchipInterpolator(np.append(fraction, 1.0), np.append(u, 1.0))
	targets = u
	params = inverse(targets)
	for _ in range(4):
		params = params - (arc_fraction(params) - targets) / arc_rate(params)
	new_samples = curve.evaluate_at(params)
	return FourierCurve.from_samples(new_samples, curve.bandwidth)


def length_deviation(curve, grid_size=None):
	grid_size = grid_size or max(8 * curve.bandwidth + 1, 65)
	speeds = speed(curve, grid_size)
	return float(np.max(np.abs(speeds - speeds.mean()))), float(speeds.mean())


def reparametrize_arc_length(curve, tol=1e-10, max_iter=ARC_LENGTH_MAX_ITER):
	"""Constant-speed representative of the same image.

	Each pass inverts the cumulative arc length (monotone cubic start, Newton
	polish on the spectral primitive), resamples and projects back to the
	original bandwidth.  Passes stop at ``tol * L`` or once the deviation no
	longer improves, which happens when the bandwidth cannot represent the
	arc-length parametrization any better.
	"""
	grid_size = max(8 * curve.bandwidth + 1, 65)
	_require_regular(speed(curve, grid_size))
	best = curve
	deviation, length = length_deviation(curve, grid_size)
	best_deviation = deviation
	for iteration in range(max_iter):
		if deviation <= tol * length:
			return best
		candidate = _arc_length_pass(best, grid_size)
		deviation, length = length_deviation(candidate, grid_size)
		logger.debug("arc-length pass %d: deviation %.3e (L=%.12g)", iteration, deviation, length)
		if deviation >= 0.9 * best_deviation:
			if deviation < best_deviation:
				best, best_deviation = candidate, deviation
			break
		best, best_deviation = candidate, deviation
	if best_deviation > tol * length:
		logger.warning(
			"arc-length reparametrization stopped at deviation %.3e (target %.3e) for bandwidth %d",
			best_deviation, tol * length, curve.bandwidth,
		)
	return best


def normalize_length(curve, target_length=1.0):
	length = curve_length(curve)
	if length <= 1e-14:
		raise DegenerateCurveError("curve has zero length")
	return curve.scaled(target_length / length)


def _polished_separation(curve, s, t, window):
	"""Local minimum of |curve(s) - curve(t)| started from the closest sampled far pair."""

	def distance2(x):
		diff = curve.evaluate_at(x[:1])[0] - curve.evaluate_at(x[1:])[0]
		return float(diff @ diff)

	result = minimize(distance2, [s, t], method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-30, "maxiter": 600})
	gap = abs(result.x[0] - result.x[1]) % 1.0
	if min(gap, 1.0 - gap) < window:
		return float("inf")
	return float(np.sqrt(result.fun))


def quality_report(curve, grid_size=None, separation_window=SEPARATION_WINDOW):
	if curve.dim < 2:
		raise ParameterError("quality report needs a curve in R^n with n >= 2")
	n = curve.bandwidth
	grid_size = default_grid_size(n) if grid_size is None else int(grid_size)
	points = evaluate(curve, 0, grid_size).samples
	speeds = speed(curve, grid_size)
	length = float(speeds.mean())
	index = np.arange(grid_size)
	gap = np.abs(index[:, None] - index[None, :])
	gap = np.minimum(gap, grid_size - gap) / grid_size
	chords = cdist(points, points)
	off_diagonal = gap > 0
	bilipschitz = float(np.min(chords[off_diagonal] / gap[off_diagonal]))
	far = gap >= separation_window
	min_separation = float("inf")
	if np.any(far):
		far_chords = np.where(far, chords, np.inf)
		i, j = np.unravel_index(np.argmin(far_chords), far_chords.shape)
		min_separation = min(
			float(far_chords[i, j]),
			_polished_separation(curve, i / grid_size, j / grid_size, separation_window),
		)
	return CurveQuality(
		length_deviation=float(np.max(np.abs(speeds - length))),
		bilipschitz_constant=bilipschitz,
		min_separation=min_separation,
		length=length,
		grid_size=grid_size,
	)


def assert_simple(curve, threshold=SIMPLICITY_THRESHOLD, grid_size=None):
	report = quality_report(curve, grid_size)
	if not report.is_simple(threshold):
		raise TopologyError(
			"curve is not simple at the sampled resolution (min separation %.3e)" % report.min_separation,
			min_separation=report.min_separation,
		)
	return report


def _finish(samples, bandwidth, arc_length=True):
	curve = FourierCurve.from_samples(samples, bandwidth)
	if arc_length:
		curve = reparametrize_arc_length(curve)
	return normalize_length(curve, 1.0)


def _fixture_grid(bandwidth):
	size = max(16 * bandwidth + 1, 257)
	return np.arange(size) / size


def _embed(planar, dim):
	samples = np.zeros((planar.shape[0], dim))
	samples[:, :planar.shape[1]] = planar
	return samples


def circle(dim=3, bandwidth=DEFAULT_BANDWIDTH):
	"""Unit-length round circle in the first coordinate plane."""
	if dim < 2:
		raise ParameterError("a circle needs dimension >= 2")
	coeffs = np.zeros((2 * bandwidth + 1, dim), dtype=complex)
	coeffs[bandwidth + 1, :2] = np.array([1.0, -1.0j]) / (4.0 * np.pi)
	coeffs[bandwidth - 1, :2] = np.array([1.0, 1.0j]) / (4.0 * np.pi)
	return FourierCurve(coeffs)


def ellipse(a=0.2, b=0.1, dim=3, bandwidth=DEFAULT_BANDWIDTH):
	if a <= 0 or b <= 0:
		raise ParameterError("ellipse axes must be positive")
	theta = TWO_PI * _fixture_grid(bandwidth)
	planar = np.column_stack([a * np.cos(theta), b * np.sin(theta)])
	return _finish(_embed(planar, dim), bandwidth)


def torus_knot(p=2, q=3, major=1.0, minor=0.5, dim=3, bandwidth=DEFAULT_BANDWIDTH):
	if dim < 3:
		raise ParameterError("torus knots need dimension >= 3")
	if minor <= 0 or major <= minor:
		raise ParameterError("torus knot radii must satisfy 0 < minor < major")
	theta = TWO_PI * _fixture_grid(bandwidth)
	tube = major + minor * np.cos(q * theta)
	points = np.column_stack([tube * np.cos(p * theta), tube * np.sin(p * theta), -minor * np.sin(q * theta)])
	return _finish(_embed(points, dim), bandwidth)


def figure_eight(dim=3, bandwidth=DEFAULT_BANDWIDTH):
	"""Planar lemniscate crossing itself at the origin (not simple)."""
	theta = TWO_PI * _fixture_grid(bandwidth)
	planar = np.column_stack([np.cos(theta), 0.5 * np.sin(2.0 * theta)])
	return _finish(_embed(planar, dim), bandwidth)


def perturbed(base, mode=3, amplitude=1e-2):
	"""Base curve pushed along ``cos`` radially and ``sin`` along the last axis."""
	if not 1 <= mode <= base.bandwidth:
		raise ParameterError("perturbation mode must lie in 1..%d, got %r" % (base.bandwidth, mode))
	u = _fixture_grid(base.bandwidth)
	points = base.evaluate_at(u)
	offset = points - base.centroid
	radial = offset / np.linalg.norm(offset, axis=1)[:, None]
	bump = amplitude * np.cos(TWO_PI * mode * u)[:, None] * radial
	if base.dim >= 3:
		bump[:, -1] += amplitude * np.sin(TWO_PI * mode * u)
	return _finish(points + bump, base.bandwidth)


def random_curve(dim=3, bandwidth=8, seed=0, amplitude=0.02, arc_length=False):
	"""Unit circle plus decaying random modes 2..N; simple for small amplitudes."""
	rng = np.random.default_rng(seed)
	curve = circle(dim, bandwidth)
	coeffs = np.array(curve.coeffs)
	for k in range(2, bandwidth + 1):
		vector = (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) * amplitude / k ** 2
		coeffs[bandwidth + k] = vector
		coeffs[bandwidth - k] = np.conj(vector)
	curve = FourierCurve(coeffs)
	if arc_length:
		return normalize_length(reparametrize_arc_length(curve))
	return curve


# Fixture constructors by name; "perturbed" is built on top of one of them.
SHAPES = {
	"circle": circle,
	"ellipse": ellipse,
	"torus": torus_knot,
	"figure-eight": figure_eight,
	"random": random_curve,
}


def curve_to_dict(curve):
	return {
		"dim": curve.dim,
		"bandwidth": curve.bandwidth,
		"coeffs": [[[c.real, c.imag] for c in row] for row in curve.coeffs],
	}


def curve_from_dict(data):
	try:
		dim, bandwidth = int(data["dim"]), int(data["bandwidth"])
		coeffs = np.array(
			[[complex(pair[0], pair[1]) for pair in row] for row in data["coeffs"]], dtype=complex
		)
	except (KeyError, TypeError, ValueError, IndexError) as exc:
		raise ParameterError("malformed curve data: %s" % exc) from exc
	if coeffs.shape != (2 * bandwidth + 1, dim):
		raise ParameterError(
			"curve data declares dim=%d bandwidth=%d but holds coefficients of shape %s"
			% (dim, bandwidth, coeffs.shape)
		)
	return FourierCurve(coeffs)


def read_curve_file(path):
	with Path(path).open(encoding="utf-8") as handle:
		try:
			data = json.load(handle)
		except json.JSONDecodeError as exc:
			raise ParameterError("%s is not a curve file: %s" % (path, exc)) from exc
	return curve_from_dict(data)


def write_curve_file(curve, path, **extra):
	data = curve_to_dict(curve)
	data.update(extra)
	return utils.write_json(path, data)
