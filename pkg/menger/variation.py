"""First variation of intM^(p,2) and its main term.

The main term of the first variation is the bilinear form

	Q(g, h) = int_u int_D <Dg, Dh> / (|v|^(p-2) |w|^(p-2) |v-w|^p)

with D the second difference quotient (f(u+v) - f(u))/v - (f(u+w) - f(u))/w.
Q is diagonal in Fourier space: Q(g, h) = sum_k rho_|k| <g_k, h_k> with
rho_k = q_k |k|^(3p-4), and the first variation splits as 12 Q(g, h) plus a
lower-order remainder.
"""
import csv
import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .curve import FourierCurve, assert_simple, effective_bandwidth, quality_report, trimmed
from .energy import EnergyFunctional, l2_gradient
from .exceptions import ConsistencyError, DegenerateCurveError, ParameterError, TopologyError
from .quadrature import QuadratureConfig, integrate, kernel_weight, second_difference_quotient, shift_difference
from .sobolev import bessel_norm
from . import utils

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
MAIN_TERM_FACTOR = 12.0
NEGATIVE_RHO_TOL = 1e-9
DEFAULT_FD_STEP = 1e-3


class DirectionalDerivative(NamedTuple):
	value: float
	error: float


@dataclass(frozen=True)
class VariationResult:
	value: float
	q_part: float
	r_part: float
	error: float = 0.0

	def as_dict(self):
		return {"value": self.value, "mainTerm": self.q_part, "remainder": self.r_part, "errorEstimate": self.error}


def require_main_term_exponent(p):
	if not 7.0 / 3.0 < p < 8.0 / 3.0:
		raise ParameterError("the main-term analysis needs 7/3 < p < 8/3, got %r" % (p,))


def first_variation_fd(curve, h, params, eps=DEFAULT_FD_STEP, functional=None):
	"""Richardson-extrapolated central difference of the energy along ``h``.

	Every evaluation uses the mesh adapted to ``curve`` so the difference
	quotient sees a smooth discrete energy.  Returns the derivative and the
	estimate |D(eps) - D(eps/2)| / 3.
	"""
	if eps <= 0:
		raise ParameterError("finite-difference step must be positive")
	if h.dim != curve.dim:
		raise ParameterError("variation field lives in R^%d, curve in R^%d" % (h.dim, curve.dim))
	assert_simple(curve)
	for sign in (1.0, -1.0):
		report = quality_report(curve + sign * eps * h)
		if not report.is_simple():
			raise TopologyError(
				"step %.3g leaves the simple curves (min separation %.3e)" % (eps, report.min_separation),
				min_separation=report.min_separation,
			)
	functional = functional or EnergyFunctional.adapted_to(curve, params)

	def central(step):
		return (functional.value(curve + step * h) - functional.value(curve - step * h)) / (2.0 * step)

	coarse, fine = central(eps), central(0.5 * eps)
	value = (4.0 * fine - coarse) / 3.0
	logger.debug("first variation: D(eps)=%.12g D(eps/2)=%.12g extrapolated=%.12g", coarse, fine, value)
	return DirectionalDerivative(float(value), float(abs(fine - coarse) / 3.0))


def first_variation_adjoint(curve, h, params, functional=None):
	"""<grad E, h> with the exact gradient of the discrete energy."""
	_, gradient = l2_gradient(curve, params, functional)
	return gradient.l2_inner(h)


class _BilinearIntegrand:
	def __init__(self, g, h, p, grid_size):
		n = max(g.bandwidth, h.bandwidth)
		self.g, self.h = g.with_bandwidth(n), h.with_bandwidth(n)
		self.k = self.g.k
		self.p = p
		self.grid_size = grid_size
		self.columns = self.k % grid_size

	def _sample(self, symbol, coeffs):
		placed = np.zeros((symbol.shape[0], self.grid_size, coeffs.shape[1]), dtype=complex)
		placed[:, self.columns, :] = symbol[:, :, None] * coeffs[None]
		return (np.fft.ifft(placed, axis=1) * self.grid_size).real

	def __call__(self, v, w):
		symbol = second_difference_quotient(self.k, v, w)
		dg = self._sample(symbol, self.g.coeffs)
		dh = self._sample(symbol, self.h.coeffs)
		return kernel_weight(v, w, self.p) * np.mean(np.sum(dg * dh, axis=2), axis=1)


def main_term_bilinear(g, h, p, quad=None):
	"""Q(g, h) by adaptive cubature over D, trapezoid in u."""
	require_main_term_exponent(p)
	quad = quad or QuadratureConfig()
	n = max(g.bandwidth, h.bandwidth, 1)
	result = integrate(_BilinearIntegrand(g, h, p, 2 * n + 2), quad, chunk_size=1024, label="Q(g, h)")
	return float(result.value)


def _single_mode_integrand(k, p, grid_size):
	u = np.arange(grid_size) / grid_size
	theta = TWO_PI * k * u

	def quotient(x):
		# (cos(theta + 2 pi k x) - cos(theta)) / x as a product of sines
		half = np.pi * k * x
		return -2.0 * np.sin(theta[None, :] + half[:, None]) * (np.sin(half) / x)[:, None]

	def integrand(v, w):
		d = quotient(v) - quotient(w)
		return kernel_weight(v, w, p) * np.mean(d * d, axis=1)

	return integrand


@dataclass(frozen=True)
class MultiplierTable:
	p: float
	k: tuple
	rho: tuple
	c_estimate: float
	errors: tuple = field(default_factory=tuple)

	@property
	def k_max(self):
		return max(self.k)

	@property
	def q(self):
		return tuple(r / k ** (3.0 * self.p - 4.0) for k, r in zip(self.k, self.rho))

	def rho_of(self, k):
		k = abs(int(k))
		if k == 0:
			return 0.0
		if k > self.k_max:
			raise ParameterError("multiplier table stops at k=%d, asked for %d" % (self.k_max, k))
		return self.rho[self.k.index(k)]

	def symbol(self, wavenumbers):
		return np.array([self.rho_of(k) for k in wavenumbers])

	def covers(self, curve):
		return effective_bandwidth(curve) <= self.k_max

	def slope(self, k_min=None):
		"""Least-squares slope of log rho_k against log k over k >= k_min."""
		k_min = k_min or max(2, self.k_max // 4)
		ks = np.array([k for k in self.k if k >= k_min], dtype=float)
		rho = np.array([r for k, r in zip(self.k, self.rho) if k >= k_min])
		return float(np.polyfit(np.log(ks), np.log(rho), 1)[0])

	def rows(self):
		return [(k, r, q) for k, r, q in zip(self.k, self.rho, self.q)]

	def write_csv(self, path):
		return utils.write_csv(path, ["k", "rho_k", "q_k"], self.rows())

	def csv_text(self):
		return utils.csv_text(["k", "rho_k", "q_k"], self.rows())

	@classmethod
	def read_csv(cls, path, p):
		with open(path, newline="", encoding="utf-8") as handle:
			rows = list(csv.DictReader(handle))
		if not rows:
			raise ParameterError("%s holds no multiplier rows" % path)
		try:
			ks = tuple(int(row["k"]) for row in rows)
			rho = tuple(float(row["rho_k"]) for row in rows)
		except (KeyError, ValueError) as exc:
			raise ParameterError("malformed multiplier table %s: %s" % (path, exc)) from exc
		return cls(p=p, k=ks, rho=rho, c_estimate=_top_quartile_mean(ks, rho, p))


def _top_quartile_mean(ks, rho, p):
	q = [r / k ** (3.0 * p - 4.0) for k, r in zip(ks, rho)]
	cut = max(1, len(q) // 4)
	return float(np.mean(q[-cut:]))


def multiplier_table(p, k_max, quad=None):
	"""rho_k = 2 Q(e_k, e_k) for the real single-mode curves e_k(u) = cos(2 pi k u) E.

	Modes are sampled in real space on 8k+16 points, independently of the
	Fourier symbols used by the energy and by the operator routes.
	"""
	require_main_term_exponent(p)
	if k_max < 4:
		raise ParameterError("multiplier table needs k_max >= 4")
	quad = quad or QuadratureConfig()
	ks, rho, errors = [], [], []
	for k in range(1, k_max + 1):
		local = replace(quad, base_cells=max(quad.base_cells, k))
		result = integrate(_single_mode_integrand(k, p, 8 * k + 16), local, chunk_size=2048, label="rho_%d" % k)
		value = 2.0 * float(result.value)
		if value < -NEGATIVE_RHO_TOL:
			raise ConsistencyError("negative multiplier rho_%d = %.3e" % (k, value), estimate=value, error=result.error)
		ks.append(k)
		rho.append(value)
		errors.append(2.0 * result.error)
		logger.debug("rho_%d = %.12g (q_%d = %.12g)", k, value, k, value / k ** (3 * p - 4))
	table = MultiplierTable(p=p, k=tuple(ks), rho=tuple(rho), c_estimate=_top_quartile_mean(ks, rho, p), errors=tuple(errors))
	logger.info("multiplier table p=%g up to k=%d: c ~ %.8g", p, k_max, table.c_estimate)
	return table


def main_term_operator_fourier(curve, table):
	"""Q~(g) with Fourier coefficients rho_|k| g_k."""
	if not table.covers(curve):
		raise ParameterError(
			"multiplier table stops at k=%d but the curve carries modes up to %d"
			% (table.k_max, effective_bandwidth(curve))
		)
	curve = trimmed(curve)
	return curve.multiplied(table.symbol(curve.k))


class _OperatorIntegrand:
	"""K(v, w) D*(D g)(u_j) on the u-grid, with D* the adjoint difference."""

	def __init__(self, curve, p, grid_size):
		self.curve = curve
		self.k = curve.k
		self.p = p
		self.grid_size = grid_size
		self.columns = self.k % grid_size
		self.grid_k = np.rint(np.fft.fftfreq(grid_size, d=1.0 / grid_size))

	def __call__(self, v, w):
		first = second_difference_quotient(self.k, v, w)
		placed = np.zeros((v.size, self.grid_size, self.curve.dim), dtype=complex)
		placed[:, self.columns, :] = first[:, :, None] * self.curve.coeffs[None]
		field_samples = (np.fft.ifft(placed, axis=1) * self.grid_size).real
		spectrum = np.fft.fft(field_samples, axis=1)
		# D* f(u) = (f(u - v) - f(u))/v - (f(u - w) - f(u))/w
		back_v = shift_difference(self.grid_k, -v, np.zeros_like(v))
		back_w = shift_difference(self.grid_k, -w, np.zeros_like(w))
		quotient_v = (np.fft.ifft(back_v[:, :, None] * spectrum, axis=1)).real / v[:, None, None]
		quotient_w = (np.fft.ifft(back_w[:, :, None] * spectrum, axis=1)).real / w[:, None, None]
		return kernel_weight(v, w, self.p)[:, None, None] * (quotient_v - quotient_w)


def main_term_operator_direct(curve, p, quad=None, grid_size=None):
	"""Q~(g) sampled on the u-grid by vector-valued cubature over D.

	Expanding D*(Dg) gives the four-term second-difference formula of the
	operator; the inner quotient uses the stable symbol and the outer one is
	applied to the sampled field.
	"""
	require_main_term_exponent(p)
	quad = quad or QuadratureConfig()
	curve = trimmed(curve)
	grid_size = grid_size or 4 * curve.bandwidth + 1
	integrand = _OperatorIntegrand(curve, p, grid_size)
	result = integrate(integrand, quad, chunk_size=512, label="Q~ direct")
	return FourierCurve.from_samples(np.asarray(result.value), curve.bandwidth)


def split_first_variation(curve, h, params, table=None, method="adjoint", eps=DEFAULT_FD_STEP):
	"""delta intM(curve; h) together with its split into 12 Q(curve, h) and the remainder."""
	require_main_term_exponent(params.p)
	if method == "fd":
		derivative = first_variation_fd(curve, h, params, eps)
		value, error = derivative.value, derivative.error
	elif method == "adjoint":
		value, error = first_variation_adjoint(curve, h, params), 0.0
	else:
		raise ParameterError("unknown variation method %r" % (method,))
	if table is not None and table.covers(curve) and table.covers(h):
		q_part = MAIN_TERM_FACTOR * main_term_operator_fourier(curve, table).l2_inner(h)
	else:
		q_part = MAIN_TERM_FACTOR * main_term_bilinear(curve, h, params.p, params.quad)
	return VariationResult(value=value, q_part=q_part, r_part=value - q_part, error=error)


@dataclass(frozen=True)
class ELResult:
	lam: float
	residual_norm: float
	gradient_norm: float
	energy: float
	main_term_norm: float = float("nan")
	remainder_norm: float = float("nan")

	@property
	def relative_residual(self):
		return self.residual_norm / self.gradient_norm if self.gradient_norm else 0.0

	def as_dict(self):
		return {
			"lambda": self.lam,
			"residualNorm": self.residual_norm,
			"relativeResidual": self.relative_residual,
			"gradientNorm": self.gradient_norm,
			"energy": self.energy,
			"mainTermNorm": self.main_term_norm,
			"remainderNorm": self.remainder_norm,
		}


def stationarity(gradient, curve):
	"""Best multiplier lambda for gradient + lambda g'' and the residual norm."""
	second = curve.derivative(2)
	denominator = second.l2_norm() ** 2
	if denominator == 0.0:
		raise DegenerateCurveError("curve has no curvature modes")
	lam = -gradient.l2_inner(second) / denominator
	return lam, (gradient + lam * second)


def euler_lagrange_residual(curve, params, table=None, n_test=None, functional=None):
	"""How far the curve is from a critical point under the length constraint.

	``n_test`` restricts the residual to modes |k| <= n_test.
	"""
	energy_value, gradient = l2_gradient(curve, params, functional)
	if n_test is not None:
		gradient = gradient.with_bandwidth(n_test).with_bandwidth(gradient.bandwidth)
	lam, residual = stationarity(gradient, curve)
	main_norm = remainder_norm = float("nan")
	if table is not None and table.covers(curve):
		main = main_term_operator_fourier(curve, table) * MAIN_TERM_FACTOR
		main_norm = main.l2_norm()
		remainder_norm = (gradient - main).l2_norm()
	return ELResult(
		lam=float(lam),
		residual_norm=residual.l2_norm(),
		gradient_norm=gradient.l2_norm(),
		energy=energy_value,
		main_term_norm=main_norm,
		remainder_norm=remainder_norm,
	)


def remainder_multipliers(gradient, curve, table):
	"""Per-mode r_k with <grad_k, g_k> = 12 (rho_k + r_k) |g_k|^2."""
	rows = []
	for k in range(1, min(effective_bandwidth(curve), table.k_max) + 1):
		mode = curve.mode(k)
		weight = float(np.sum(np.abs(mode) ** 2))
		if weight == 0.0:
			continue
		pairing = float(np.sum((gradient.mode(k) * np.conj(mode)).real))
		rows.append((k, pairing / (MAIN_TERM_FACTOR * weight) - table.rho_of(k)))
	return rows


def circle_lambda(table, remainder=0.0):
	"""lambda at the round circle: 12 (rho_1 + r_1) / (4 pi^2)."""
	return MAIN_TERM_FACTOR * (table.rho_of(1) + remainder) / (4.0 * np.pi ** 2)


def corollary_constant(table):
	"""[inf_k |q_k| (2 pi)^-3 2^(7-3p)]^-1 over the tabulated k."""
	smallest = min(abs(q) for q in table.q)
	if smallest == 0.0:
		raise ConsistencyError("multiplier table contains q_k = 0")
	return 1.0 / (smallest * TWO_PI ** -3 * 2.0 ** (7.0 - 3.0 * table.p))


def corollary_ql_check(curve, table, l, m):
	"""|g^(l+3)|_{H^(m+3p-7)} / |(Q~ g)^(l)|_{H^m}, bounded by corollary_constant."""
	if l < 0 or m < 0:
		raise ParameterError("derivative order and Sobolev index must be non-negative")
	numerator = bessel_norm(curve.derivative(l + 3), m + 3.0 * table.p - 7.0)
	denominator = bessel_norm(main_term_operator_fourier(curve, table).derivative(l), m)
	if denominator == 0.0:
		raise DegenerateCurveError("main-term operator vanishes on this curve")
	return numerator / denominator

