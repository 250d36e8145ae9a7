"""Lab configuration: settings.MENGER_LAB, an optional INI file, then flags."""
import configparser
import copy
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from .energy import EnergyParams
from .exceptions import ParameterError
from .flow import FlowConfig
from .quadrature import QuadratureConfig

logger = logging.getLogger(__name__)

SECTIONS = ("quadrature", "flow_quadrature", "energy", "flow", "curve", "analysis", "output")


@dataclass(frozen=True)
class CurveDefaults:
	bandwidth: int = 64
	dim: int = 3
	simplicity_threshold: float = 1e-6

	def __post_init__(self):
		if self.bandwidth < 1 or self.dim < 2 or self.simplicity_threshold <= 0:
			raise ParameterError("curve defaults need bandwidth >= 1, dim >= 2 and a positive threshold")


@dataclass(frozen=True)
class AnalysisDefaults:
	l_max: int = 12
	noise_floor: float = 1e-13
	k_max: int = 32

	def __post_init__(self):
		if self.l_max < 2 or self.k_max < 4 or not 0 < self.noise_floor < 1:
			raise ParameterError("analysis defaults need l_max >= 2, k_max >= 4 and 0 < noise_floor < 1")


@dataclass(frozen=True)
class GlobalConfig:
	quadrature: QuadratureConfig
	flow_quadrature: QuadratureConfig
	energy: EnergyParams
	flow: FlowConfig
	curve: CurveDefaults = field(default_factory=CurveDefaults)
	analysis: AnalysisDefaults = field(default_factory=AnalysisDefaults)
	output_dir: Path = Path("runs")
	source: str = ""

	@property
	def flow_energy(self):
		"""Energy parameters evaluated on the fixed flow mesh."""
		return EnergyParams(self.energy.p, self.energy.q, self.flow_quadrature)

	def as_dict(self):
		return {
			"quadrature": self.quadrature.as_dict(),
			"flowQuadrature": self.flow_quadrature.as_dict(),
			"energy": {"p": self.energy.p, "q": self.energy.q},
			"flow": self.flow.as_dict(),
			"curve": {
				"bandwidth": self.curve.bandwidth,
				"dim": self.curve.dim,
				"simplicityThreshold": self.curve.simplicity_threshold,
			},
			"analysis": {
				"lMax": self.analysis.l_max,
				"noiseFloor": self.analysis.noise_floor,
				"kMax": self.analysis.k_max,
			},
			"outputDir": str(self.output_dir),
			"source": self.source,
		}


def _coerce(section, key, raw, default):
	text = raw.strip()
	try:
		if default is None:
			return None if text.lower() in ("", "none") else float(text)
		if isinstance(default, bool):
			return text.lower() in ("1", "true", "yes", "on")
		if isinstance(default, int):
			return int(text)
		if isinstance(default, float):
			return float(text)
	except ValueError as exc:
		raise ImproperlyConfigured("[%s] %s = %r is not a valid value" % (section, key, raw)) from exc
	return text


def _read_ini(path, values):
	parser = configparser.ConfigParser()
	if not parser.read(path, encoding="utf-8"):
		raise ImproperlyConfigured("configuration file %s cannot be read" % path)
	for section in parser.sections():
		if section not in values:
			raise ImproperlyConfigured("unknown configuration section [%s] in %s" % (section, path))
		for key, raw in parser.items(section):
			if key not in values[section]:
				raise ImproperlyConfigured("unknown option %r in section [%s] of %s" % (key, section, path))
			values[section][key] = _coerce(section, key, raw, values[section][key])


def load_config(path=None, overrides=None):
	"""Merge settings.MENGER_LAB, the INI file at ``path`` and ``overrides``.

	``overrides`` maps section names to dictionaries; ``None`` values are
	ignored so that unset command-line flags keep the lower layers.
	"""
	values = copy.deepcopy(getattr(settings, "MENGER_LAB", {}))
	for section in SECTIONS:
		values.setdefault(section, {})
	path = path or os.environ.get("MENGER_LAB_CONFIG")
	if path:
		_read_ini(path, values)
	for section, entries in (overrides or {}).items():
		if section not in values:
			raise ImproperlyConfigured("unknown configuration section %r" % section)
		values[section].update({key: value for key, value in entries.items() if value is not None})
	try:
		quadrature = QuadratureConfig(**values["quadrature"])
		flow_quadrature = QuadratureConfig(**values["flow_quadrature"])
		config = GlobalConfig(
			quadrature=quadrature,
			flow_quadrature=flow_quadrature,
			energy=EnergyParams(quad=quadrature, **values["energy"]),
			flow=FlowConfig(**values["flow"]),
			curve=CurveDefaults(**values["curve"]),
			analysis=AnalysisDefaults(**values["analysis"]),
			output_dir=Path(values["output"].get("directory", "runs")),
			source=str(path or ""),
		)
	except (TypeError, ParameterError) as exc:
		raise ImproperlyConfigured("invalid lab configuration: %s" % exc) from exc
	logger.debug("configuration loaded from %s", config.source or "settings")
	return config
