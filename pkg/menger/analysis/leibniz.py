"""Fractional Leibniz estimate for products of first differences.

For scalar periodic f, g and shifts x1..x4 built from (v, w) in D the check
compares

	int_D |(f(.+x1) - f(.+x2)) (g(.+x3) - g(.+x4))|_{H^m} / (|v|^(p-2) |w|^(p-2) |v-w|^p)

with |f|_{H^(m+3p/2-3)} |g|_{H^(m+3p/2-3)}.
"""
import logging
from dataclasses import dataclass

import numpy as np

from ..curve import FourierCurve
from ..exceptions import ParameterError
from ..quadrature import QuadratureConfig, integrate, kernel_weight, shift_difference
from ..sobolev import bessel_norm, bessel_weights

logger = logging.getLogger(__name__)

CASES = (1, 2, 3, 4)


def case_shifts(case, s1, s2, v, w):
	"""(x1, x2, x3, x4) for the four shift patterns."""
	if case == 1:
		return s1 * w, s1 * v, s2 * w, s2 * v
	if case == 2:
		return s1 * w, s2 * w, s1 * w, s2 * w
	if case == 3:
		return s1 * v, s2 * v, s1 * v, s2 * v
	if case == 4:
		first, second = v + s1 * (w - v), v + s2 * (w - v)
		return first, second, first, second
	raise ParameterError("Leibniz case must be one of %s, got %r" % (CASES, case))


@dataclass(frozen=True)
class LeibnizResult:
	case: int
	lhs: float
	rhs_product: float
	error: float

	@property
	def ratio(self):
		return self.lhs / self.rhs_product if self.rhs_product else float("inf")

	def as_dict(self):
		return {
			"case": self.case,
			"lhs": self.lhs,
			"rhsProduct": self.rhs_product,
			"ratio": self.ratio,
			"errorEstimate": self.error,
		}


class _ProductNormIntegrand:
	def __init__(self, f, g, m, p, case, s1, s2):
		n = max(f.bandwidth, g.bandwidth)
		self.f, self.g = f.with_bandwidth(n), g.with_bandwidth(n)
		self.k = self.f.k
		self.grid_size = 4 * n + 1
		self.columns = self.k % self.grid_size
		self.product_weights = np.sqrt(bessel_weights(np.arange(-2 * n, 2 * n + 1), m))
		self.m, self.p, self.case, self.s1, self.s2 = m, p, case, s1, s2
		self.bandwidth = n

	def _difference(self, series, x, y):
		placed = np.zeros((x.size, self.grid_size), dtype=complex)
		placed[:, self.columns] = shift_difference(self.k, x, y) * series.coeffs[:, 0][None, :]
		return (np.fft.ifft(placed, axis=1) * self.grid_size).real

	def __call__(self, v, w):
		x1, x2, x3, x4 = case_shifts(self.case, self.s1, self.s2, v, w)
		values = self._difference(self.f, x1, x2) * self._difference(self.g, x3, x4)
		spectrum = np.fft.fft(values, axis=1) / self.grid_size
		spectrum = spectrum[:, np.arange(-2 * self.bandwidth, 2 * self.bandwidth + 1) % self.grid_size]
		norms = np.sqrt(np.sum((self.product_weights[None, :] * np.abs(spectrum)) ** 2, axis=1))
		return kernel_weight(v, w, self.p) * norms


def check_leibniz_parameters(m, p, s1, s2, case=None):
	if m <= 0.5:
		raise ParameterError("Leibniz check needs m > 1/2, got %r" % (m,))
	if not 7.0 / 3.0 < p < 8.0 / 3.0:
		raise ParameterError("Leibniz check needs 7/3 < p < 8/3, got %r" % (p,))
	if not (0.0 <= s1 <= 1.0 and 0.0 <= s2 <= 1.0):
		raise ParameterError("shift parameters must lie in [0, 1]")
	if case is not None:
		case_shifts(case, s1, s2, 0.0, 0.0)


def fractional_leibniz_check(f, g, m, p, case, s1, s2, quad=None):
	if f.dim != 1 or g.dim != 1:
		raise ParameterError("Leibniz check acts on scalar series")
	check_leibniz_parameters(m, p, s1, s2, case)
	quad = quad or QuadratureConfig()
	integrand = _ProductNormIntegrand(f, g, m, p, case, s1, s2)
	result = integrate(integrand, quad, chunk_size=2048, label="Leibniz case %d" % case)
	index = m + 1.5 * p - 3.0
	rhs = bessel_norm(f, index) * bessel_norm(g, index)
	logger.debug("Leibniz case %d: lhs %.10g, rhs %.10g", case, result.value, rhs)
	return LeibnizResult(case=case, lhs=float(result.value), rhs_product=rhs, error=result.error)


def leibniz_sweep(f, g, m, p, s1, s2, quad=None):
	return {case: fractional_leibniz_check(f, g, m, p, case, s1, s2, quad) for case in CASES}


def cosine_series(frequency=1, bandwidth=None):
	"""cos(2 pi frequency x) as a scalar series."""
	bandwidth = bandwidth or frequency
	coeffs = np.zeros(2 * bandwidth + 1, dtype=complex)
	coeffs[bandwidth + frequency] = coeffs[bandwidth - frequency] = 0.5
	return FourierCurve(coeffs[:, None])
