"""Length-constrained, preconditioned descent towards critical curves."""
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .curve import FourierCurve, assert_simple, normalize_length, quality_report, reparametrize_arc_length
from .energy import EnergyFunctional
from .exceptions import ParameterError, StagnationError, TopologyError
from .variation import MAIN_TERM_FACTOR, main_term_operator_fourier, stationarity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowConfig:
	step: float = 1e-2
	precondition_order: float = None
	max_iters: int = 500
	residual_tol: float = 1e-3
	backtrack_factor: float = 0.5
	project_every: int = 1
	armijo: float = 1e-4
	min_step: float = 1e-12
	growth: float = 2.0
	max_step: float = 1.0

	def __post_init__(self):
		if self.step <= 0 or self.max_step <= 0 or self.min_step <= 0:
			raise ParameterError("flow steps must be positive")
		if not 0 < self.backtrack_factor < 1:
			raise ParameterError("backtrack factor must lie in (0, 1)")
		if self.growth < 1:
			raise ParameterError("step growth must be >= 1")
		if self.max_iters < 0 or self.project_every < 1:
			raise ParameterError("max_iters must be >= 0 and project_every >= 1")
		if self.residual_tol <= 0:
			raise ParameterError("residual tolerance must be positive")

	def sobolev_order(self, p):
		"""Preconditioner order, (3p - 4)/2 unless set."""
		return (3.0 * p - 4.0) / 2.0 if self.precondition_order is None else float(self.precondition_order)

	def as_dict(self):
		return {
			"step": self.step,
			"preconditionOrder": self.precondition_order,
			"maxIters": self.max_iters,
			"residualTol": self.residual_tol,
			"backtrackFactor": self.backtrack_factor,
			"projectEvery": self.project_every,
			"armijo": self.armijo,
			"minStep": self.min_step,
			"growth": self.growth,
			"maxStep": self.max_step,
		}


@dataclass(frozen=True, eq=False)
class FlowState:
	curve: FourierCurve
	lam: float
	energy_history: tuple
	residual_history: tuple
	lambda_history: tuple = ()
	iter: int = 0
	converged: bool = False
	step: float = 1e-2
	step_history: tuple = ()
	gradient: FourierCurve = field(default=None, repr=False)

	@property
	def energy(self):
		return self.energy_history[-1]

	@property
	def residual(self):
		return self.residual_history[-1]

	def history_rows(self):
		"""(iter, energy, residual, lambda) for the start and every accepted step."""
		return [
			(i, e, r, lam)
			for i, (e, r, lam) in enumerate(zip(self.energy_history, self.residual_history, self.lambda_history))
		]


def precondition(direction, order):
	"""Divide mode k by (1 + k^2)^order."""
	return direction.multiplied((1.0 + direction.k.astype(float) ** 2) ** (-order))


def _measure(functional, curve):
	value, gradient = functional.value_and_gradient(curve)
	lam, direction = stationarity(gradient, curve)
	norm = gradient.l2_norm()
	residual = direction.l2_norm() / norm if norm else 0.0
	return value, gradient, lam, direction, residual


def _project(curve, reparametrize):
	if reparametrize:
		curve = reparametrize_arc_length(curve)
	return normalize_length(curve, 1.0)


def flow_step(state, cfg, params, table=None, functional=None):
	"""One accepted descent step, or the state flagged as converged.

	The trial curve is ``c - step * P(g + lambda c'')`` pushed back to unit
	length (and to arc length every ``project_every`` steps).  Steps are
	halved until the discrete energy drops by the Armijo margin; growing
	steps after success keeps the line search short.
	"""
	functional = functional or EnergyFunctional.on_base_mesh(params)
	if state.gradient is None:
		energy_value, gradient, lam, direction, residual = _measure(functional, state.curve)
		state = replace(
			state,
			lam=lam,
			energy_history=state.energy_history or (energy_value,),
			residual_history=state.residual_history or (residual,),
			lambda_history=state.lambda_history or (lam,),
			gradient=gradient,
		)
	else:
		energy_value, gradient = state.energy, state.gradient
		lam, direction = stationarity(gradient, state.curve)
		residual = state.residual
	if residual <= cfg.residual_tol:
		return replace(state, converged=True, lam=lam)
	if table is not None and table.covers(state.curve):
		main = main_term_operator_fourier(state.curve, table) * MAIN_TERM_FACTOR
		logger.debug("main-term share of the gradient: %.4f", main.l2_norm() / gradient.l2_norm())
	search = precondition(direction, cfg.sobolev_order(params.p))
	slope = max(gradient.l2_inner(search), 0.0)
	reparametrize = (state.iter + 1) % cfg.project_every == 0
	step = state.step
	while step >= cfg.min_step:
		trial = _project(state.curve - step * search, reparametrize)
		trial_energy = functional.value(trial)
		if trial_energy <= energy_value - cfg.armijo * step * slope and trial_energy <= energy_value:
			break
		logger.debug("step %.3e rejected: %.12g -> %.12g", step, energy_value, trial_energy)
		step *= cfg.backtrack_factor
	else:
		raise StagnationError(
			"descent step fell below %.1e at iteration %d (residual %.3e)" % (cfg.min_step, state.iter, residual),
			state=state,
		)
	trial_energy, trial_gradient, trial_lam, _, trial_residual = _measure(functional, trial)
	logger.debug(
		"iteration %d: step %.3e energy %.12g residual %.3e lambda %.6g",
		state.iter + 1, step, trial_energy, trial_residual, trial_lam,
	)
	return FlowState(
		curve=trial,
		lam=trial_lam,
		energy_history=state.energy_history + (trial_energy,),
		residual_history=state.residual_history + (trial_residual,),
		lambda_history=state.lambda_history + (trial_lam,),
		iter=state.iter + 1,
		converged=trial_residual <= cfg.residual_tol,
		step=min(step * cfg.growth, cfg.max_step),
		step_history=state.step_history + (step,),
		gradient=trial_gradient,
	)


def initial_state(curve, cfg, params, functional=None):
	functional = functional or EnergyFunctional.on_base_mesh(params)
	curve = normalize_length(reparametrize_arc_length(curve), 1.0)
	energy_value, gradient, lam, _, residual = _measure(functional, curve)
	return FlowState(
		curve=curve,
		lam=lam,
		energy_history=(energy_value,),
		residual_history=(residual,),
		lambda_history=(lam,),
		converged=residual <= cfg.residual_tol,
		step=cfg.step,
		gradient=gradient,
	)


def find_critical_point(init, cfg, params, table=None, callback=None):
	"""Iterate flow_step until the relative residual drops below ``residual_tol``.

	The discrete energy lives on the base mesh of ``params.quad`` for the whole
	run, so the flow is equivariant under rigid motions of the initial curve.
	Raises TopologyError (with the last simple state) when the iterate stops
	being simple and StagnationError when the line search underflows.
	"""
	assert_simple(init)
	functional = EnergyFunctional.on_base_mesh(params)
	state = initial_state(init, cfg, params, functional)
	logger.info("flow start: energy %.12g residual %.3e", state.energy, state.residual)
	while not state.converged and state.iter < cfg.max_iters:
		previous = state
		state = flow_step(state, cfg, params, table, functional)
		if state.converged and state.iter == previous.iter:
			break
		report = quality_report(state.curve)
		if not report.is_simple():
			raise TopologyError(
				"flow left the simple curves at iteration %d (min separation %.3e)" % (state.iter, report.min_separation),
				state=previous,
				min_separation=report.min_separation,
			)
		if callback is not None:
			callback(state)
	if state.converged:
		logger.info("flow converged after %d iterations: energy %.12g residual %.3e", state.iter, state.energy, state.residual)
	else:
		logger.warning("flow stopped after %d iterations with residual %.3e", state.iter, state.residual)
	return state


def rigid_misfit(a, b):
	"""Largest coefficient difference between two curves."""
	n = max(a.bandwidth, b.bandwidth)
	return float(np.max(np.abs(a.with_bandwidth(n).coeffs - b.with_bandwidth(n).coeffs)))
