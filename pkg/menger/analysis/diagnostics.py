"""Regularity and intersection diagnostics for curves."""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.optimize import brentq

from ..curve import evaluate
from ..exceptions import InsufficientDataError, ParameterError
from ..sobolev import bessel_norm
from .majorants import GrowthFit, fit_factorial_growth

logger = logging.getLogger(__name__)

NOISE_FLOOR = 1e-13
MIN_FIT_MODES = 4
DEFAULT_L_MAX = 12
CRITICAL_INDEX = 2.5

FINITE = "FINITE"
CONTAINED = "CONTAINED"
AMBIGUOUS = "AMBIGUOUS"


@dataclass(frozen=True)
class DecayFit:
	sigma: float
	amplitude: float
	r_squared: float
	k_range: tuple
	floor_limited: bool = False

	def as_dict(self):
		return {
			"sigma": self.sigma,
			"amplitude": self.amplitude,
			"rSquared": self.r_squared,
			"kRange": list(self.k_range),
			"floorLimited": self.floor_limited,
		}


@dataclass(frozen=True)
class AnalyticityReport:
	fourier: DecayFit
	factorial: GrowthFit
	derivative_norms: tuple
	analytic_to_machine_precision: bool

	def as_dict(self):
		return {
			"fourierDecay": self.fourier.as_dict(),
			"factorialGrowth": self.factorial.as_dict(),
			"derivativeNorms": list(self.derivative_norms),
			"analyticToMachinePrecision": self.analytic_to_machine_precision,
		}


def mode_amplitudes(curve):
	return np.linalg.norm(curve.coeffs[curve.bandwidth + 1:], axis=1)


def fourier_decay_fit(curve, noise_floor=NOISE_FLOOR):
	"""Fit log|c_k| ~ log A - sigma k over the upper half of the resolved modes.

	When fewer than four modes rise above the noise floor the spectrum is
	exhausted by rounding; the fit is then flagged ``floor_limited`` with
	sigma = inf.
	"""
	if curve.bandwidth < MIN_FIT_MODES:
		raise InsufficientDataError("decay fit needs bandwidth >= %d, got %d" % (MIN_FIT_MODES, curve.bandwidth))
	amplitudes = mode_amplitudes(curve)
	top = float(np.max(amplitudes))
	if top == 0.0:
		raise InsufficientDataError("curve has no non-constant modes")
	ks = np.arange(1, curve.bandwidth + 1)
	resolved = ks[amplitudes > noise_floor * top]
	if resolved.size < MIN_FIT_MODES:
		last = int(resolved[-1]) if resolved.size else 1
		return DecayFit(float("inf"), top, 1.0, (1, last), floor_limited=True)
	window = resolved[resolved.size // 2:]
	if window.size < 3:
		window = resolved[-3:]
	fit = stats.linregress(window, np.log(amplitudes[window - 1]))
	return DecayFit(
		sigma=float(-fit.slope),
		amplitude=float(np.exp(fit.intercept)),
		r_squared=float(fit.rvalue ** 2),
		k_range=(int(window[0]), int(window[-1])),
	)


def derivative_norms(curve, l_max=DEFAULT_L_MAX, s=CRITICAL_INDEX):
	"""b_l = |curve^(l)|_{H^s} for l = 0..l_max."""
	return tuple(bessel_norm(curve.derivative(l), s) for l in range(l_max + 1))


def analyticity_diagnostics(curve, l_max=DEFAULT_L_MAX, noise_floor=NOISE_FLOOR):
	decay = fourier_decay_fit(curve, noise_floor)
	norms = derivative_norms(curve, l_max)
	growth = fit_factorial_growth(norms, start=1)
	top = float(np.max(mode_amplitudes(curve)))
	predicted_tail = decay.amplitude * np.exp(-decay.sigma * curve.bandwidth) if np.isfinite(decay.sigma) else 0.0
	machine = decay.floor_limited or predicted_tail < noise_floor * top
	logger.info("decay sigma=%.6g (R^2=%.4f), factorial r=%.6g", decay.sigma, decay.r_squared, growth.r)
	return AnalyticityReport(decay, growth, norms, bool(machine))


@dataclass(frozen=True)
class Plane:
	normal: np.ndarray
	offset: float

	def __post_init__(self):
		normal = np.asarray(self.normal, dtype=float)
		norm = np.linalg.norm(normal)
		if norm == 0.0:
			raise ParameterError("plane normal must be non-zero")
		object.__setattr__(self, "normal", normal / norm)
		object.__setattr__(self, "offset", float(self.offset) / norm)

	def level(self, points):
		return points @ self.normal - self.offset


@dataclass(frozen=True)
class Sphere:
	center: np.ndarray
	radius: float

	def __post_init__(self):
		if self.radius <= 0:
			raise ParameterError("sphere radius must be positive")
		object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

	def level(self, points):
		offset = points - self.center
		return np.sum(offset * offset, axis=1) - self.radius ** 2


@dataclass(frozen=True)
class IntersectionReport:
	status: str
	count: int
	roots: tuple = field(default_factory=tuple)

	def as_dict(self):
		return {"status": self.status, "count": self.count, "roots": list(self.roots)}


def intersection_count(curve, surface, tol=1e-10, grid_size=None):
	"""Crossings of the curve with a plane or sphere, from a dense sign scan.

	Runs of samples within ``tol`` of the surface between samples of opposite
	sign count as one crossing; between samples of equal sign they are a
	tangency and make the result AMBIGUOUS.  Roots are refined with Brent's
	method on the exact series.
	"""
	surface_dim = surface.normal.size if isinstance(surface, Plane) else surface.center.size
	if surface_dim != curve.dim:
		raise ParameterError("surface lives in R^%d, curve in R^%d" % (surface_dim, curve.dim))
	grid_size = grid_size or max(32 * curve.bandwidth + 1, 1025)
	values = surface.level(evaluate(curve, 0, grid_size).samples)
	signs = np.where(np.abs(values) < tol, 0, np.sign(values)).astype(int)
	if not np.any(signs):
		return IntersectionReport(CONTAINED, 0)

	def level_at(u):
		return float(surface.level(curve.evaluate_at([u]))[0])

	start = int(np.nonzero(signs)[0][0])
	roots, tangencies = [], 0
	last_sign, last_index = signs[start], start
	for step in range(1, grid_size + 1):
		index = start + step
		sign = signs[index % grid_size]
		if sign == 0:
			continue
		if sign != last_sign:
			lo, hi = last_index / grid_size, index / grid_size
			root = brentq(level_at, lo, hi, xtol=1e-14)
			roots.append(root % 1.0)
		elif index - last_index > 1:
			tangencies += 1
		last_sign, last_index = sign, index
	roots = tuple(sorted(roots))
	status = AMBIGUOUS if tangencies else FINITE
	if tangencies:
		logger.warning("%d tangential contact(s) within tol=%.1e; crossing count is ambiguous", tangencies, tol)
	return IntersectionReport(status, len(roots), roots)
