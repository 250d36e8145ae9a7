from menger.analysis import analyticity_diagnostics
from menger.cli import LabCommand
from menger.curve import quality_report


class Command(LabCommand):
	help = "Fourier-decay and factorial-growth diagnostics of a curve."
	uses_curve_argument = True

	def add_lab_arguments(self, parser):
		parser.add_argument("--lmax", dest="l_max", type=int, help="highest derivative order for b_l")
		parser.add_argument("--noise-floor", dest="noise_floor", type=float)

	def config_overrides(self, options):
		return {"analysis": {"l_max": options.get("l_max"), "noise_floor": options.get("noise_floor")}}

	def handle(self, *args, **options):
		config = self.load(options)
		curve = self.read_curve(options["curve"])
		report = analyticity_diagnostics(curve, config.analysis.l_max, config.analysis.noise_floor)
		payload = report.as_dict()
		if curve.dim >= 2:
			payload["quality"] = quality_report(curve).as_dict()
		self.emit(payload)
