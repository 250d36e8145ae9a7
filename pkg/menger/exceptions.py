"""Error hierarchy shared by the numerical modules and the command line."""


class LabError(Exception):
	"""Base class for every error raised by the lab."""


class PreconditionError(LabError, ValueError):
	"""An operation was called on input that violates its precondition."""


class DegenerateCurveError(PreconditionError):
	pass


class DegenerateTripleError(PreconditionError):
	pass


class UndersamplingError(PreconditionError):
	pass


class InsufficientDataError(PreconditionError):
	pass


class DomainError(PreconditionError):
	"""A majorant expansion left the region where its kernels are analytic."""


class TopologyError(PreconditionError):
	"""The curve is not (or no longer) simple at the sampled resolution."""

	def __init__(self, message, state=None, min_separation=None):
		super().__init__(message)
		self.state = state
		self.min_separation = min_separation


class ParameterError(LabError, ValueError):
	"""A parameter lies outside its admissible range."""


class InputError(ParameterError):
	pass


class AccuracyError(LabError, ArithmeticError):
	"""A quadrature did not reach its tolerance; keeps the best estimate."""

	def __init__(self, message, estimate=None, error=None):
		super().__init__(message)
		self.estimate = estimate
		self.error = error


class ConsistencyError(AccuracyError):
	pass


class StagnationError(LabError):
	"""The descent step underflowed before the residual target was met."""

	def __init__(self, message, state=None):
		super().__init__(message)
		self.state = state
