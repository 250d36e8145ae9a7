"""Majorant sequences for the derivatives of critical curves.

Two independent routes produce the same numbers: the explicit recursion
built on Phi (the uniform-argument Faa di Bruno sum), and the Taylor
coefficients of the scalar majorant ODE c'' = C_bar (F(d/dt G(c)) + mu c'),
expanded with the general enumerated Faa di Bruno formula.
"""
import logging
from contextlib import nullcontext
from dataclasses import asdict, dataclass
from math import comb, factorial, perm

import mpmath
import numpy as np
from scipy import stats
from scipy.integrate import solve_ivp

from ..exceptions import DomainError, InputError
from .faadibruno import faa_di_bruno_uniform, scalar_chain_derivatives, weak_compositions

logger = logging.getLogger(__name__)

BIGFLOAT_THRESHOLD = 8
BIGFLOAT_BITS = 256


@dataclass(frozen=True)
class MajorantConfig:
	C: float
	Chat: float
	mu: float
	r: float
	K: int
	n: int
	a0: float
	a1: float
	a2: float
	Cbar: float = None

	def __post_init__(self):
		if not isinstance(self.K, int) or self.K < 3:
			raise InputError("K must be an integer >= 3, got %r" % (self.K,))
		if not isinstance(self.n, int) or self.n < 1:
			raise InputError("n must be a positive integer, got %r" % (self.n,))
		if min(self.C, self.Chat, self.r, self.a0, self.a1, self.a2) <= 0 or self.mu < 0:
			raise InputError("majorant constants and seeds must be positive")
		if self.Cbar is not None and self.Cbar < 1:
			raise InputError("C_bar must be >= 1")

	@classmethod
	def from_dict(cls, data):
		try:
			return cls(**{key: data[key] for key in ("C", "Chat", "mu", "r", "K", "n", "a0", "a1", "a2")}, Cbar=data.get("Cbar"))
		except (KeyError, TypeError) as exc:
			raise InputError("majorant config is missing %s" % exc) from exc

	@property
	def rho(self):
		return self.r / (2.0 * np.pi)

	def as_dict(self):
		return asdict(self)


def _number(value, big):
	return mpmath.mpf(value) if big else float(value)


def _precision(big):
	return mpmath.workprec(BIGFLOAT_BITS) if big else nullcontext()


def phi(l, n, r, K, x):
	"""Phi(l, n, r, K; x_0..x_l).

	Sum over j_1 + ... + j_{K-1} = l of the multinomial coefficient times
	p_{j_1}^(3n)(y, x) with y(m) = (m+1)!/r^(m+1) and every inner derivative of
	order i equal to x_i, times prod_{i>=2} x_{j_i}.
	"""
	if len(x) < l + 1:
		raise InputError("Phi(%d, ...) needs x_0..x_%d" % (l, l))

	def y_of_order(m):
		return factorial(m + 1) / r ** (m + 1)

	inner = {}
	total = 0
	for parts in weak_compositions(l, K - 1):
		j1 = parts[0]
		if j1 not in inner:
			inner[j1] = faa_di_bruno_uniform(j1, 3 * n, y_of_order, x[1:j1 + 1])
		multinomial = factorial(l)
		for j in parts:
			multinomial //= factorial(j)
		term = multinomial * inner[j1]
		for j in parts[1:]:
			term = term * x[j]
		total = total + term
	return total


@dataclass(frozen=True)
class MajorantSequence:
	values: tuple
	cbar: float
	bigfloat: bool

	def as_floats(self):
		return [float(value) for value in self.values]


def _resolved_cbar(cfg, a2, leading):
	if cfg.Cbar is not None:
		return cfg.Cbar
	return max(1, a2 / leading)


def majorant_sequence(cfg, L):
	"""a~_0..a~_L from the recursion driven by b_j = Chat Phi(j, n, rho, K; a~) + mu a~_j."""
	if L < 2:
		raise InputError("majorant sequence needs L >= 2")
	big = L > BIGFLOAT_THRESHOLD
	with _precision(big):
		C, Chat, mu, r = (_number(value, big) for value in (cfg.C, cfg.Chat, cfg.mu, cfg.r))
		rho = r / (2 * (mpmath.pi if big else np.pi))
		a = [_number(cfg.a0, big), _number(cfg.a1, big)]

		def b(j):
			return Chat * phi(j, cfg.n, rho, cfg.K, a[:j + 1]) + mu * a[j]

		b1 = b(1)
		leading = C / r * b1 ** (cfg.K - 2)
		cbar = _resolved_cbar(cfg, _number(cfg.a2, big), leading)
		a.append(cbar * (leading + mu * a[1]))
		for l in range(L - 2):
			bs = [b(j) for j in range(1, l + 3)]
			a.append(cbar * (C * phi(l + 1, cfg.n, r, cfg.K, bs) + mu * a[l + 2]))
		logger.debug("majorant sequence up to L=%d (bigfloat=%s): C_bar=%s", L, big, cbar)
		return MajorantSequence(tuple(a), cbar, big)


def majorant_rhs(cfg, values, l):
	"""C Phi(l+1, n, r, K; beta_1..beta_{l+2}) + mu b_{l+2} for a candidate sequence b."""
	rho = cfg.rho
	beta = [cfg.Chat * phi(j, cfg.n, rho, cfg.K, values[:j + 1]) + cfg.mu * values[j] for j in range(1, l + 3)]
	return cfg.C * phi(l + 1, cfg.n, cfg.r, cfg.K, beta) + cfg.mu * values[l + 2]


def kernel_derivatives(scale, kappa, K, at, order):
	"""d^j/ds^j [scale (1 + kappa (at - s))^-2 s^(K-2)] at s = at, j = 0..order."""
	values = []
	for j in range(order + 1):
		total = 0
		for i in range(j + 1):
			m = j - i
			falling = perm(K - 2, m)
			if falling == 0:
				continue
			total = total + comb(j, i) * factorial(i + 1) * kappa ** i * falling * at ** (K - 2 - m)
		values.append(scale * total)
	return values


def majorant_ode(cfg, L):
	"""c^(l)(0) for l = 0..L from the Taylor expansion of the majorant ODE.

	G(s) = (Chat/rho) (1 + 3n/rho (a0 - s))^-2 s^(K-2) + mu s and
	F(y) = (C/r) (1 + 3n/r (b1 - y))^-2 y^(K-2) with b1 = (G o c)'(0).
	"""
	if L < 2:
		raise InputError("majorant ODE expansion needs L >= 2")
	big = L > BIGFLOAT_THRESHOLD
	with _precision(big):
		C, Chat, mu, r = (_number(value, big) for value in (cfg.C, cfg.Chat, cfg.mu, cfg.r))
		rho = r / (2 * (mpmath.pi if big else np.pi))
		a0, a1 = _number(cfg.a0, big), _number(cfg.a1, big)
		if a0 <= 0:
			raise DomainError("G is expanded around a0 = %s <= 0" % a0)
		kappa_g, kappa_f = 3 * cfg.n / rho, 3 * cfg.n / r
		g_derivs = kernel_derivatives(Chat / rho, kappa_g, cfg.K, a0, L)
		g_derivs[0] = g_derivs[0] + mu * a0
		g_derivs[1] = g_derivs[1] + mu
		c = [a0, a1]
		gc = scalar_chain_derivatives(g_derivs, c, 1)
		b1 = gc[1]
		if b1 <= 0:
			raise DomainError("(G o c)'(0) = %s is not positive" % b1)
		f_derivs = kernel_derivatives(C / r, kappa_f, cfg.K, b1, L)
		cbar = _resolved_cbar(cfg, _number(cfg.a2, big), f_derivs[0])
		for m in range(L - 1):
			# Y = (G o c)' needs c up to order m + 1, which is known.
			gc = scalar_chain_derivatives(g_derivs, c, m + 1)
			y = gc[1:m + 2]
			fy = scalar_chain_derivatives(f_derivs, y, m)[m]
			c.append(cbar * (fy + mu * c[m + 1]))
		return MajorantSequence(tuple(c), cbar, big)


def integrate_majorant_ode(cfg, t_end, points=64):
	"""Solve the majorant ODE numerically on [0, t_end] (DOP853).

	Raises DomainError where a kernel bracket 1 + kappa (centre - s) reaches 0.
	"""
	rho = cfg.rho
	kappa_g, kappa_f = 3 * cfg.n / rho, 3 * cfg.n / cfg.r
	K = cfg.K

	def g_prime(s):
		bracket = 1.0 + kappa_g * (cfg.a0 - s)
		return (cfg.Chat / rho) * (
			2.0 * kappa_g * bracket ** -3 * s ** (K - 2) + bracket ** -2 * (K - 2) * s ** (K - 3)
		) + cfg.mu

	b1 = g_prime(cfg.a0) * cfg.a1
	cbar = float(majorant_ode(cfg, 2).cbar)

	def f(y):
		return (cfg.C / cfg.r) * (1.0 + kappa_f * (b1 - y)) ** -2 * y ** (K - 2)

	def rhs(t, state):
		c, dc = state
		return [dc, cbar * (f(g_prime(c) * dc) + cfg.mu * dc)]

	def g_bracket(t, state):
		return 1.0 + kappa_g * (cfg.a0 - state[0])

	def f_bracket(t, state):
		return 1.0 + kappa_f * (b1 - g_prime(state[0]) * state[1])

	g_bracket.terminal = f_bracket.terminal = True
	solution = solve_ivp(
		rhs, (0.0, t_end), [cfg.a0, cfg.a1], method="DOP853",
		t_eval=np.linspace(0.0, t_end, points), events=(g_bracket, f_bracket), rtol=1e-10, atol=1e-12,
	)
	if solution.status == 1:
		hit = min(event[0] for event in solution.t_events if len(event))
		raise DomainError("majorant ODE leaves the analytic region at t = %.6g" % hit)
	if not solution.success:
		raise DomainError("majorant ODE integration failed: %s" % solution.message)
	return solution.t, solution.y[0]


@dataclass(frozen=True)
class GrowthFit:
	C: float
	r: float
	r_squared: float
	sup_ratio: float

	def as_dict(self):
		return {"C": self.C, "r": self.r, "rSquared": self.r_squared, "supRatio": self.sup_ratio}


def fit_factorial_growth(values, start=1):
	"""Fit values_l ~ C l! / r^l by regressing log(values_l / l!) on l."""
	ls = np.arange(start, len(values))
	logs = np.array([float(mpmath.log(mpmath.mpf(values[l]) / mpmath.factorial(l))) for l in ls])
	if ls.size < 3 or not np.all(np.isfinite(logs)):
		raise InputError("factorial fit needs at least three positive values")
	fit = stats.linregress(ls, logs)
	r = float(np.exp(-fit.slope))
	ratios = [float(mpmath.mpf(values[l]) * mpmath.mpf(r) ** l / mpmath.factorial(l)) for l in ls]
	return GrowthFit(C=float(np.exp(fit.intercept)), r=r, r_squared=float(fit.rvalue ** 2), sup_ratio=max(ratios))
