from menger.cli import LabCommand, add_energy_arguments, energy_overrides
from menger.energy import EnergyParams, energy, energy_integrand_stats


class Command(LabCommand):
	help = "Compute intM^(p,q) of a curve file together with a quadrature error estimate."
	uses_curve_argument = True

	def add_lab_arguments(self, parser):
		add_energy_arguments(parser)
		parser.add_argument("--menger", action="store_true", help="report M_p = 2^p intM^(p,p); sets q = p")
		parser.add_argument("--stats", action="store_true", help="add refinement statistics and self-convergence")

	def config_overrides(self, options):
		return energy_overrides(options)

	def handle(self, *args, **options):
		config = self.load(options)
		curve = self.read_curve(options["curve"])
		params = config.energy
		if options["menger"]:
			params = EnergyParams(params.p, params.p, params.quad)
		result = energy(curve, params)
		payload = result.as_dict()
		if options["menger"]:
			payload["mengerEnergy"] = 2.0 ** params.p * result.value
			payload["mengerErrorEstimate"] = 2.0 ** params.p * result.error
		if options["stats"]:
			payload["integrandStats"] = energy_integrand_stats(curve, params).as_dict()
		self.emit(payload)
