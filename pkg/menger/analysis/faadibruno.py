"""Multivariate Faa di Bruno polynomials with exact integer coefficients.

For f: R^n -> R and g: R -> R^n the k-th derivative of f(g(t)) is

	p_k = sum_{r} sum_{q} k! / (prod_i (i!)^{r_i} prod_{i,j} q_ij!)
	      * y_alpha * prod_{i,j} (x_ij)^{q_ij}

where r runs over r_1 + 2 r_2 + ... + k r_k = k, each q_i = (q_i1..q_in) is a
weak composition of r_i, alpha_j = sum_i q_ij, y_alpha is the partial
derivative of f and x_ij the i-th derivative of the j-th component of g.
Arithmetic is generic, so floats, Fractions and mpmath numbers all work.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product as cartesian
from math import factorial, prod
from typing import Mapping, Sequence

from ..exceptions import InputError


@lru_cache(maxsize=None)
def partitions_by_multiplicity(k):
	"""All (r_1, ..., r_k) with sum_i i r_i = k, in lexicographic order."""
	if k == 0:
		return ((),)
	found = []

	def walk(i, remaining, prefix):
		if i > k:
			if remaining == 0:
				found.append(tuple(prefix))
			return
		for r in range(remaining // i + 1):
			walk(i + 1, remaining - i * r, prefix + [r])

	walk(1, k, [])
	return tuple(sorted(found))


@lru_cache(maxsize=None)
def weak_compositions(total, parts):
	"""Tuples of ``parts`` non-negative integers summing to ``total``."""
	if parts == 0:
		return ((),) if total == 0 else ()
	if parts == 1:
		return ((total,),)
	out = []
	for first in range(total + 1):
		for rest in weak_compositions(total - first, parts - 1):
			out.append((first,) + rest)
	return tuple(out)


@lru_cache(maxsize=None)
def multi_indices(n, max_order):
	"""Multi-indices alpha in N^n with |alpha| <= max_order."""
	return tuple(alpha for order in range(max_order + 1) for alpha in weak_compositions(order, n))


@lru_cache(maxsize=None)
def faa_di_bruno_terms(k, n):
	"""(coefficient, alpha, powers) for every monomial of p_k^(n).

	``powers[i-1][j-1]`` is q_ij.  Coefficients are exact integers.
	"""
	terms = []
	for r in partitions_by_multiplicity(k):
		base = factorial(k)
		for i, ri in enumerate(r, start=1):
			base //= factorial(i) ** ri
		for powers in cartesian(*(weak_compositions(ri, n) for ri in r)):
			coefficient = base
			for row in powers:
				coefficient //= prod(factorial(q) for q in row)
			alpha = tuple(sum(row[j] for row in powers) for j in range(n)) if powers else (0,) * n
			terms.append((coefficient, alpha, tuple(powers)))
	return tuple(terms)


@dataclass(frozen=True)
class UniversalPolyInput:
	"""Arguments of p_k^(n): partials y_alpha for |alpha| <= k, inner derivatives x_ij."""

	k: int
	n: int
	y: Mapping = field(hash=False)
	x: Sequence = field(hash=False)

	def __post_init__(self):
		if not isinstance(self.k, int) or not isinstance(self.n, int) or self.k < 0 or self.n < 1:
			raise InputError("need integers k >= 0 and n >= 1, got k=%r n=%r" % (self.k, self.n))
		if len(self.x) < self.k or any(len(row) != self.n for row in self.x[:self.k]):
			raise InputError("x must hold k=%d rows of n=%d inner derivatives" % (self.k, self.n))
		missing = [alpha for alpha in multi_indices(self.n, self.k) if alpha not in self.y]
		if missing:
			raise InputError("missing outer partial derivatives y_alpha for %s" % (missing[:5],))


def faa_di_bruno(data):
	"""Evaluate p_k^(n) at ``data``; the sum runs in a fixed term order."""
	total = 0
	for coefficient, alpha, powers in faa_di_bruno_terms(data.k, data.n):
		term = coefficient * data.y[alpha]
		for i, row in enumerate(powers):
			for j, q in enumerate(row):
				if q:
					term = term * data.x[i][j] ** q
		total = total + term
	return total


def faa_di_bruno_uniform(k, n, y_of_order, x):
	"""p_k^(n) when y_alpha depends on |alpha| only and x_ij = x[i-1] for every j.

	Summing the weak compositions out leaves
	sum_r k! / prod((i!)^{r_i} r_i!) * n^{|r|} * y(|r|) * prod x_i^{r_i}.
	"""
	total = 0
	for r in partitions_by_multiplicity(k):
		coefficient = factorial(k)
		for i, ri in enumerate(r, start=1):
			coefficient //= factorial(i) ** ri * factorial(ri)
		order = sum(r)
		term = coefficient * n ** order * y_of_order(order)
		for i, ri in enumerate(r):
			if ri:
				term = term * x[i] ** ri
		total = total + term
	return total


def scalar_chain_derivatives(outer, inner, order):
	"""d^m/dt^m f(g(t)) for m = 0..order from f^(i)(g(0)) and g^(i)(0)."""
	values = [outer[0]]
	for m in range(1, order + 1):
		data = UniversalPolyInput(m, 1, {(i,): outer[i] for i in range(m + 1)}, [[inner[i]] for i in range(1, m + 1)])
		values.append(faa_di_bruno(data))
	return values


def coefficient_bound_check(k, n, r, c_x, c_y, rng):
	"""Compare p_k^(n)(y, C_x x) with C_y p_k^(n)(y*, x) for random admissible y.

	Admissible means |y_alpha| <= C_y (|alpha|+1)! / r^(|alpha|+1); y* is the
	extremal choice with r replaced by r / max(1, C_x).  Returns (lhs, rhs).
	"""
	if r <= 0 or c_x <= 0 or c_y <= 0:
		raise InputError("r, C_x and C_y must be positive")
	scale = max(1.0, c_x)
	y = {
		alpha: rng.uniform(0.0, 1.0) * c_y * factorial(sum(alpha) + 1) / r ** (sum(alpha) + 1)
		for alpha in multi_indices(n, k)
	}
	x = [[rng.uniform(0.0, 1.0) for _ in range(n)] for _ in range(k)]
	lhs = faa_di_bruno(UniversalPolyInput(k, n, y, [[c_x * value for value in row] for row in x]))
	extremal = {alpha: factorial(sum(alpha) + 1) / (r / scale) ** (sum(alpha) + 1) for alpha in y}
	rhs = c_y * faa_di_bruno(UniversalPolyInput(k, n, extremal, x))
	return lhs, rhs
