from menger.cli import LabCommand, add_energy_arguments, energy_overrides, record_run
from menger.utils import dumps
from menger.variation import multiplier_table, require_main_term_exponent


class Command(LabCommand):
	help = "Tabulate the main-term multipliers rho_k and q_k = rho_k / k^(3p-4) as CSV."

	def add_lab_arguments(self, parser):
		add_energy_arguments(parser)
		parser.add_argument("--kmax", dest="k_max", type=int, help="largest wavenumber (>= 4)")
		parser.add_argument("--output", help="CSV file; the table goes to stdout when omitted")

	def config_overrides(self, options):
		overrides = energy_overrides(options)
		overrides["analysis"] = {"k_max": options.get("k_max")}
		return overrides

	def validate(self, config, options):
		require_main_term_exponent(config.energy.p)

	def handle(self, *args, **options):
		config = self.load(options)
		table = multiplier_table(config.energy.p, config.analysis.k_max, config.quadrature)
		summary = {
			"p": table.p,
			"kMax": table.k_max,
			"cEstimate": table.c_estimate,
			"logLogSlope": table.slope(),
			"expectedSlope": 3.0 * table.p - 4.0,
		}
		if not options["output"]:
			self.stdout.write(table.csv_text(), ending="")
			self.stderr.write(dumps(summary))
			return
		table.write_csv(options["output"])
		summary["output"] = str(options["output"])
		summary["manifest"] = str(record_run("multiplier", self.argv(options), config.as_dict(), [options["output"]]))
		self.emit(summary)
