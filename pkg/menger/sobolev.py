"""Sobolev norms of periodic series and the inequality checks built on them."""
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .curve import FourierCurve, evaluate, forward_transform
from .exceptions import AccuracyError, DegenerateCurveError, ParameterError, PreconditionError
from .quadrature import shift_difference

logger = logging.getLogger(__name__)

MEAN_ZERO_TOL = 1e-12
GAGLIARDO_REL_TOL = 1e-6
GAGLIARDO_GAUSS_ORDER = 12
GAGLIARDO_GRADING = 3.0
GAGLIARDO_MAX_DOUBLINGS = 8


@dataclass(frozen=True)
class SobolevIndex:
	s: float

	def __post_init__(self):
		if not np.isfinite(self.s) or self.s < 0:
			raise ParameterError("Sobolev index must be a finite non-negative real, got %r" % (self.s,))

	def __float__(self):
		return float(self.s)


class NormTriple(NamedTuple):
	lhs: float
	mid: float
	rhs: float

	@property
	def holds(self):
		return self.lhs <= self.mid * (1 + 1e-12) and self.mid <= self.rhs * (1 + 1e-12)


class NormReport(NamedTuple):
	bessel_norm: float
	gagliardo_seminorm: float
	s: float
	k: int
	sigma: float
	p: float

	def as_dict(self):
		return {
			"besselNorm": self.bessel_norm,
			"gagliardoSeminorm": self.gagliardo_seminorm,
			"s": self.s,
			"k": self.k,
			"sigma": self.sigma,
			"p": self.p,
		}


def bessel_weights(k, s):
	return (1.0 + np.asarray(k, dtype=float) ** 2) ** float(s)


def bessel_norm(f, s):
	"""sqrt(sum_k (1 + k^2)^s |f_k|^2), summed over components."""
	weights = bessel_weights(f.k, s)
	return float(np.sqrt(np.sum(weights[:, None] * np.abs(f.coeffs) ** 2)))


def bessel_inner(f, g, s):
	n = max(f.bandwidth, g.bandwidth)
	a, b = f.with_bandwidth(n), g.with_bandwidth(n)
	weights = bessel_weights(a.k, s)
	return float(np.sum(weights[:, None] * (a.coeffs * np.conj(b.coeffs)).real))


def product(f, g):
	"""Pointwise product sampled on a 4N+1 grid and cut back to bandwidth 2N."""
	n = max(f.bandwidth, g.bandwidth)
	grid_size = 4 * n + 1
	a = evaluate(f.with_bandwidth(n), 0, grid_size).samples
	b = evaluate(g.with_bandwidth(n), 0, grid_size).samples
	if a.shape[1] != b.shape[1] and 1 not in (a.shape[1], b.shape[1]):
		raise ParameterError("cannot multiply series of dimensions %d and %d" % (a.shape[1], b.shape[1]))
	return FourierCurve(forward_transform(a * b, 2 * n))


def _graded_cells(cells):
	edges = (np.arange(cells + 1) / cells) ** GAGLIARDO_GRADING
	return edges[:-1], edges[1:]


def _gagliardo_estimate(spec, k, p, sigma, cells, grid_size):
	x, wx = leggauss(GAGLIARDO_GAUSS_ORDER)
	lo, hi = _graded_cells(cells)
	half = 0.5 * (hi - lo)
	nodes = (0.5 * (lo + hi))[:, None] + half[:, None] * x[None, :]
	weights = half[:, None] * wx[None, :]
	# w in (0, 1/2]; the integrand is even in w.
	offsets = 0.5 * nodes.ravel()
	weights = 0.5 * weights.ravel()
	total = 0.0
	for start in range(0, offsets.size, 256):
		w = offsets[start:start + 256]
		symbol = shift_difference(k, w, np.zeros_like(w))
		diff = symbol[:, :, None] * spec[None, :, :]
		placed = np.zeros((w.size, grid_size, spec.shape[1]), dtype=complex)
		placed[:, k % grid_size, :] = diff
		samples = (np.fft.ifft(placed, axis=1) * grid_size).real
		mean_power = np.mean(np.linalg.norm(samples, axis=2) ** p, axis=1)
		total += float(np.sum(weights[start:start + 256] * mean_power / w ** (1.0 + p * sigma)))
	return 2.0 * total


def gagliardo_seminorm(f, k, sigma, p=2.0, rel_tol=GAGLIARDO_REL_TOL):
	"""[f^(k)]_{sigma, p} by graded Gauss-Legendre in the offset w.

	The x-integral uses the trapezoid rule on a grid that resolves |.|^p of the
	difference; cells in w are doubled until two estimates agree to
	``rel_tol``.
	"""
	if not 0 < sigma < 1:
		raise ParameterError("sigma must lie in (0, 1), got %r" % (sigma,))
	if p < 1:
		raise ParameterError("p must be >= 1, got %r" % (p,))
	if k < 0:
		raise ParameterError("derivative order must be non-negative")
	g = f.derivative(k) if k else f
	coeffs = np.array(g.coeffs)
	coeffs[g.bandwidth] = 0.0
	if not np.any(np.abs(coeffs) > 0):
		return 0.0
	n = g.bandwidth
	grid_size = max(8 * n + 1, 64)
	cells = 8
	previous = _gagliardo_estimate(coeffs, g.k, p, sigma, cells, grid_size)
	for _ in range(GAGLIARDO_MAX_DOUBLINGS):
		cells *= 2
		current = _gagliardo_estimate(coeffs, g.k, p, sigma, cells, grid_size)
		if abs(current - previous) <= rel_tol * abs(current):
			return float(current ** (1.0 / p))
		previous = current
	raise AccuracyError(
		"Gagliardo seminorm did not settle to %.1e" % rel_tol,
		estimate=previous ** (1.0 / p),
		error=abs(current - previous),
	)


def norm_report(f, s, k=0, sigma=0.5, p=2.0):
	return NormReport(bessel_norm(f, s), gagliardo_seminorm(f, k, sigma, p), float(s), k, sigma, p)


def norm_equivalence_ratio(f, sigma):
	"""[f]_{sigma,2}^2 against the homogeneous Fourier weight sum_k |k|^{2 sigma} |f_k|^2."""
	k = f.k.astype(float)
	fourier = float(np.sum(np.abs(k)[:, None] ** (2 * sigma) * np.abs(f.coeffs) ** 2))
	if fourier == 0.0:
		raise DegenerateCurveError("series is constant")
	return gagliardo_seminorm(f, 0, sigma, 2.0) ** 2 / fourier


def derivative_norm_inequality_check(f, m):
	"""(1/2 pi)|f'|_{H^{m-1}} <= |f|_{H^m} <= (1/(sqrt 2 pi))|f'|_{H^{m-1}} for mean-zero f."""
	if m <= 1:
		raise ParameterError("derivative inequality needs m > 1, got %r" % (m,))
	if float(np.max(np.abs(f.mode(0)))) > MEAN_ZERO_TOL:
		raise PreconditionError("derivative inequality needs a mean-zero series")
	derivative_norm = bessel_norm(f.derivative(1), m - 1)
	return NormTriple(
		derivative_norm / (2.0 * np.pi),
		bessel_norm(f, m),
		derivative_norm / (np.sqrt(2.0) * np.pi),
	)


def banach_algebra_check(f, g, m):
	"""|fg|_{H^m} / (|f|_{H^m} |g|_{H^m}) for m > 1/2."""
	if m <= 0.5:
		raise ParameterError("H^m is a Banach algebra only for m > 1/2")
	denominator = bessel_norm(f, m) * bessel_norm(g, m)
	if denominator == 0.0:
		raise DegenerateCurveError("one factor vanishes identically")
	return bessel_norm(product(f, g), m) / denominator

