import logging
from pathlib import Path

from menger import curve as curves
from menger.cli import LabCommand, record_run
from menger.curve import quality_report, write_curve_file

logger = logging.getLogger(__name__)

SHAPE_CHOICES = tuple(curves.SHAPES) + ("perturbed",)


class Command(LabCommand):
	help = "Generate a fixture curve and write it as a Fourier coefficient file."

	def add_lab_arguments(self, parser):
		parser.add_argument("--shape", required=True, choices=SHAPE_CHOICES)
		parser.add_argument("--n", dest="dim", type=int, help="ambient dimension")
		parser.add_argument("--N", dest="bandwidth", type=int, help="Fourier bandwidth")
		parser.add_argument("--a", type=float, default=0.2, help="ellipse semi-axis a")
		parser.add_argument("--b", type=float, default=0.1, help="ellipse semi-axis b")
		parser.add_argument("--torus", nargs=2, type=int, default=(2, 3), metavar=("P", "Q"), help="torus knot winding numbers")
		parser.add_argument("--radii", nargs=2, type=float, default=(1.0, 0.5), metavar=("R", "r"), help="torus knot major and minor radius")
		parser.add_argument("--base", default="circle", help="shape name or curve file the perturbation is applied to")
		parser.add_argument("--mode", type=int, default=3, help="wavenumber of the perturbation")
		parser.add_argument("--amplitude", type=float, help="perturbation or random amplitude")
		parser.add_argument("--seed", type=int, default=0)
		parser.add_argument("--arc-length", dest="arc_length", action="store_true", help="reparametrize the random curve by arc length")
		parser.add_argument("--output", help="curve file (defaults to <output dir>/<shape>.json)")

	def config_overrides(self, options):
		return {"curve": {"dim": options.get("dim"), "bandwidth": options.get("bandwidth")}}

	def shape_options(self, shape, options):
		if shape == "ellipse":
			return {"a": options["a"], "b": options["b"]}
		if shape == "torus":
			(p, q), (major, minor) = options["torus"], options["radii"]
			return {"p": p, "q": q, "major": major, "minor": minor}
		if shape == "random":
			amplitude = options["amplitude"] if options["amplitude"] is not None else 0.02
			return {"seed": options["seed"], "amplitude": amplitude, "arc_length": options["arc_length"]}
		return {}

	def build_shape(self, shape, options):
		return curves.SHAPES[shape](dim=self.config.curve.dim, bandwidth=self.config.curve.bandwidth, **self.shape_options(shape, options))

	def base_curve(self, options):
		base = options["base"]
		if base in curves.SHAPES:
			return self.build_shape(base, options), None
		return self.read_curve(base), Path(base)

	def validate(self, config, options):
		self.config = config
		self.inputs = []
		if options["shape"] != "perturbed":
			self.curve = self.build_shape(options["shape"], options)
			return
		base, source = self.base_curve(options)
		if source is not None:
			self.inputs.append(source)
		amplitude = options["amplitude"] if options["amplitude"] is not None else 1e-2
		self.curve = curves.perturbed(base, options["mode"], amplitude)

	def handle(self, *args, **options):
		config = self.load(options)
		curve = self.curve
		report = quality_report(curve)
		simple = report.is_simple(config.curve.simplicity_threshold)
		if not simple:
			logger.warning("%s curve is not simple (min separation %.3e)", options["shape"], report.min_separation)
		path = options["output"] or self.output_dir(options) / ("%s.json" % options["shape"])
		path = write_curve_file(curve, path, shape=options["shape"], simple=simple)
		uses_seed = "random" in (options["shape"], options["base"] if options["shape"] == "perturbed" else None)
		manifest = record_run(
			"curve-make", self.argv(options), config.as_dict(), [path],
			inputs=self.inputs, seed=options["seed"] if uses_seed else None,
		)
		self.emit({
			"shape": options["shape"],
			"dim": curve.dim,
			"bandwidth": curve.bandwidth,
			"simple": simple,
			"quality": report.as_dict(),
			"output": str(path),
			"manifest": str(manifest),
		})
