from menger.analysis import CASES, cosine_series, fractional_leibniz_check
from menger.analysis.leibniz import check_leibniz_parameters
from menger.cli import LabCommand


class Command(LabCommand):
	help = "Fractional Leibniz estimate for products of first differences of two scalar series."

	def add_lab_arguments(self, parser):
		parser.add_argument("--case", type=int, choices=CASES, help="shift pattern; all cases when omitted")
		parser.add_argument("--m", type=float, default=1.0, help="Sobolev order m > 1/2 of the product norm")
		parser.add_argument("--p", type=float, help="kernel exponent, 7/3 < p < 8/3")
		parser.add_argument("--s1", type=float, default=0.25)
		parser.add_argument("--s2", type=float, default=0.75)
		parser.add_argument("--f", help="scalar curve file for f (cos 2 pi x when omitted)")
		parser.add_argument("--g", help="scalar curve file for g (cos 4 pi x when omitted)")
		parser.add_argument("--rel-tol", dest="rel_tol", type=float)
		parser.add_argument("--max-refine", dest="max_refine", type=int)

	def config_overrides(self, options):
		return {
			"energy": {"p": options.get("p")},
			"quadrature": {"rel_tol": options.get("rel_tol"), "max_refine": options.get("max_refine")},
		}

	def validate(self, config, options):
		check_leibniz_parameters(options["m"], config.energy.p, options["s1"], options["s2"])

	def handle(self, *args, **options):
		config = self.load(options)
		f = self.read_curve(options["f"]) if options["f"] else cosine_series(1)
		g = self.read_curve(options["g"]) if options["g"] else cosine_series(2)
		cases = (options["case"],) if options["case"] else CASES
		results = [
			fractional_leibniz_check(f, g, options["m"], config.energy.p, case, options["s1"], options["s2"], config.quadrature)
			for case in cases
		]
		self.emit({
			"m": options["m"],
			"p": config.energy.p,
			"s1": options["s1"],
			"s2": options["s2"],
			"cases": [result.as_dict() for result in results],
		})
