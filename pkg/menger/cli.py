"""Command-line surface of the lab on top of Django management commands.

``manage.py`` hands its argv to :func:`dispatch`, which accepts the dashed
aliases of the lab subcommands and turns every outcome into the lab exit
codes: 0 success, 2 precondition failure, 3 accuracy failure, 4 usage error.
"""
import logging
import os
import sys
from functools import partial
from importlib import metadata
from pathlib import Path

from django.core.exceptions import ImproperlyConfigured
from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError
from packaging.version import Version

from . import __version__, utils
from .conf import load_config
from .curve import read_curve_file
from .exceptions import AccuracyError, ParameterError, PreconditionError, StagnationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_ACCURACY = 3
EXIT_USAGE = 4

LAB_COMMANDS = (
	"energy", "gradient", "multiplier", "elresidual", "flow", "diagnose",
	"faadibruno", "majorant", "leibniz", "intersect", "curve-make", "curve-info",
)
ALIASES = {"curve-make": "curve_make", "curve-info": "curve_info"}
TRACKED_PACKAGES = ("django", "numpy", "scipy", "mpmath", "sympy")


def usage():
	return "usage: manage.py <command> [options]\n\nLab commands:\n%s\n" % "\n".join(
		"    %s" % name for name in LAB_COMMANDS
	)


def dispatch(argv=None):
	"""Run a lab or Django command and return its exit code."""
	argv = list(sys.argv if argv is None else argv)
	os.environ.setdefault("DJANGO_SETTINGS_MODULE", "project.settings")
	try:
		import django
		from django.core.management import execute_from_command_line, get_commands
	except ImportError as exc:
		raise ImportError(
			"Couldn't import Django. Are you sure it's installed and "
			"available on your PYTHONPATH environment variable? Did you "
			"forget to activate a virtual environment?"
		) from exc
	django.setup()
	if len(argv) > 1:
		name = ALIASES.get(argv[1], argv[1])
		if not name.startswith("-") and name != "help" and name not in get_commands():
			sys.stderr.write("Unknown command: %r\n%s" % (argv[1], usage()))
			return EXIT_USAGE
		argv = [argv[0], name] + argv[2:]
	try:
		execute_from_command_line(argv)
	except SystemExit as exc:
		if exc.code is None:
			return EXIT_OK
		return exc.code if isinstance(exc.code, int) else EXIT_USAGE
	return EXIT_OK


def _usage_error(parser, message):
	if parser.called_from_command_line:
		parser.print_help(sys.stderr)
		parser.exit(EXIT_USAGE, "%s: error: %s\n" % (parser.prog, message))
	raise CommandError("Error: %s" % message, returncode=EXIT_USAGE)


def library_versions():
	versions = {"python": sys.version.split()[0]}
	for package in TRACKED_PACKAGES:
		try:
			versions[package] = metadata.version(package)
		except metadata.PackageNotFoundError:
			versions[package] = None
	return versions


def record_run(command, argv, config, outputs, inputs=(), seed=None, directory=None):
	"""Write manifest.json next to the outputs and mirror it into RunManifest."""
	from .models import RunManifest

	outputs = [Path(path) for path in outputs]
	directory = Path(directory) if directory else outputs[0].parent
	manifest_path = directory / "manifest.json"
	content = {
		"command": command,
		"argv": list(argv),
		"config": config,
		"inputs": {str(path): utils.sha256_file(path) for path in inputs},
		"outputs": {str(path): utils.sha256_file(path) for path in outputs},
		"seed": seed,
		"toolVersion": str(Version(__version__)),
		"versions": library_versions(),
	}
	utils.write_json(manifest_path, content)
	try:
		RunManifest.objects.create(
			command=command,
			argv=content["argv"],
			config=config,
			inputs=content["inputs"],
			outputs=content["outputs"],
			seed=seed,
			tool_version=content["toolVersion"],
			versions=content["versions"],
			manifest_path=str(manifest_path),
		)
	except DatabaseError as exc:
		logger.warning("run manifest not recorded in the database (%s); run 'manage.py migrate'", exc)
	return manifest_path


def add_energy_arguments(parser):
	parser.add_argument("--p", type=float, help="exponent p of intM^(p,q)")
	parser.add_argument("--q", type=float, help="exponent q of intM^(p,q)")
	parser.add_argument("--rel-tol", dest="rel_tol", type=float, help="relative tolerance of the cubature")
	parser.add_argument("--max-refine", dest="max_refine", type=int, help="maximum refinement rounds")
	parser.add_argument("--base-cells", dest="base_cells", type=int, help="initial cells per triangle side")
	parser.add_argument("--gauss-order", dest="gauss_order", type=int, help="Gauss-Legendre points per cell side")


def energy_overrides(options):
	return {
		"energy": {"p": options.get("p"), "q": options.get("q")},
		"quadrature": {key: options.get(key) for key in ("rel_tol", "max_refine", "base_cells", "gauss_order")},
	}


class LabCommand(BaseCommand):
	"""Base for the lab subcommands: shared flags, config and exit codes."""

	requires_migrations_checks = False
	requires_system_checks = []
	uses_curve_argument = False

	def create_parser(self, prog_name, subcommand, **kwargs):
		parser = super().create_parser(prog_name, subcommand, **kwargs)
		parser.error = partial(_usage_error, parser)
		return parser

	def add_arguments(self, parser):
		parser.add_argument("--lab-config", dest="lab_config", help="INI file overriding settings.MENGER_LAB")
		parser.add_argument("--workers", type=int, help="worker threads for quadrature")
		if self.uses_curve_argument:
			parser.add_argument("curve", help="curve file (JSON Fourier coefficients)")
		self.add_lab_arguments(parser)

	def add_lab_arguments(self, parser):
		pass

	def config_overrides(self, options):
		return {}

	def validate(self, config, options):
		"""Check flag values against the ranges the computation accepts."""

	def execute(self, *args, **options):
		try:
			return super().execute(*args, **options)
		except ImproperlyConfigured as exc:
			raise CommandError(str(exc), returncode=EXIT_USAGE) from exc
		except (PreconditionError, StagnationError) as exc:
			raise CommandError("%s: %s" % (type(exc).__name__, exc), returncode=EXIT_PRECONDITION) from exc
		except AccuracyError as exc:
			raise CommandError(
				"%s: %s (best estimate %s, error %s)" % (
					type(exc).__name__, exc, utils.format_number(_scalar(exc.estimate)), utils.format_number(_scalar(exc.error)),
				),
				returncode=EXIT_ACCURACY,
			) from exc
		except ParameterError as exc:
			raise CommandError("%s: %s" % (type(exc).__name__, exc), returncode=EXIT_PRECONDITION) from exc

	def load(self, options):
		overrides = self.config_overrides(options)
		workers = options.get("workers")
		if workers is not None:
			for section in ("quadrature", "flow_quadrature"):
				overrides.setdefault(section, {})["workers"] = workers
		self.config = load_config(options.get("lab_config"), overrides)
		try:
			self.validate(self.config, options)
		except ParameterError as exc:
			raise CommandError("invalid option: %s" % exc, returncode=EXIT_USAGE) from exc
		return self.config

	def read_curve(self, path):
		try:
			return read_curve_file(path)
		except FileNotFoundError as exc:
			raise CommandError("curve file %s does not exist" % path, returncode=EXIT_USAGE) from exc

	def argv(self, options):
		if getattr(self, "_called_from_command_line", False):
			return sys.argv
		return [self.__module__.rsplit(".", 1)[-1]] + ["%s=%s" % item for item in sorted(options.items()) if item[0] not in ("stdout", "stderr")]

	def emit(self, payload):
		self.stdout.write(utils.dumps(payload))

	def output_dir(self, options):
		directory = options.get("out_dir") or self.config.output_dir
		return Path(directory)


def _scalar(value):
	try:
		return float(value)
	except (TypeError, ValueError):
		return None
