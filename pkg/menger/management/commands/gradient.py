from menger.cli import LabCommand, add_energy_arguments, energy_overrides, record_run
from menger.curve import write_curve_file
from menger.energy import l2_gradient


class Command(LabCommand):
	help = "Write the L^2 gradient of intM^(p,q) at a curve as a curve file."
	uses_curve_argument = True

	def add_lab_arguments(self, parser):
		add_energy_arguments(parser)
		parser.add_argument("--output", help="gradient file (default: <output dir>/gradient.json)")

	def config_overrides(self, options):
		return energy_overrides(options)

	def handle(self, *args, **options):
		config = self.load(options)
		curve = self.read_curve(options["curve"])
		value, gradient = l2_gradient(curve, config.energy)
		output = options["output"] or self.output_dir(options) / "gradient.json"
		write_curve_file(gradient, output, energy=value, p=config.energy.p, q=config.energy.q)
		manifest = record_run("gradient", self.argv(options), config.as_dict(), [output], inputs=[options["curve"]])
		self.emit({
			"energy": value,
			"gradientNorm": gradient.l2_norm(),
			"output": str(output),
			"manifest": str(manifest),
		})
