from .diagnostics import (
	AnalyticityReport,
	DecayFit,
	IntersectionReport,
	Plane,
	Sphere,
	analyticity_diagnostics,
	fourier_decay_fit,
	intersection_count,
)
from .faadibruno import UniversalPolyInput, faa_di_bruno, faa_di_bruno_uniform
from .leibniz import CASES, LeibnizResult, cosine_series, fractional_leibniz_check, leibniz_sweep
from .majorants import (
	MajorantConfig,
	fit_factorial_growth,
	integrate_majorant_ode,
	majorant_ode,
	majorant_rhs,
	majorant_sequence,
	phi,
)
