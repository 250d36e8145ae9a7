from menger.cli import LabCommand, add_energy_arguments, energy_overrides
from menger.variation import MultiplierTable, euler_lagrange_residual


class Command(LabCommand):
	help = "Euler-Lagrange residual |grad E + lambda g''| and the best multiplier lambda."
	uses_curve_argument = True

	def add_lab_arguments(self, parser):
		add_energy_arguments(parser)
		parser.add_argument("--table", help="multiplier table CSV used to split off the main term")
		parser.add_argument("--n-test", dest="n_test", type=int, help="restrict the residual to modes |k| <= n")

	def config_overrides(self, options):
		return energy_overrides(options)

	def handle(self, *args, **options):
		config = self.load(options)
		curve = self.read_curve(options["curve"])
		table = MultiplierTable.read_csv(options["table"], config.energy.p) if options["table"] else None
		result = euler_lagrange_residual(curve, config.energy, table=table, n_test=options["n_test"])
		self.emit(result.as_dict())
