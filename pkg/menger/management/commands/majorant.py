import json

from django.core.management.base import CommandError

from menger.analysis import MajorantConfig, fit_factorial_growth, integrate_majorant_ode, majorant_ode, majorant_sequence
from menger.cli import EXIT_USAGE, LabCommand, record_run
from menger.exceptions import InputError
from menger.utils import write_csv


def relative_difference(a, b):
	scale = max(abs(a), abs(b))
	return abs(a - b) / scale if scale else 0.0


class Command(LabCommand):
	help = "Majorant sequence a~_l by recursion and by the majorant ODE, with a factorial-growth fit."

	def add_lab_arguments(self, parser):
		parser.add_argument("--config", dest="majorant_config", required=True, help="JSON file with C, Chat, mu, r, K, n, a0, a1, a2 and optional Cbar")
		parser.add_argument("--L", dest="L", type=int, default=12, help="highest order of the sequence")
		parser.add_argument("--t-end", dest="t_end", type=float, help="also integrate the ODE numerically on [0, t_end]")
		parser.add_argument("--output", help="CSV file with l, a_tilde, ode, relative difference")

	def handle(self, *args, **options):
		config = self.load(options)
		try:
			with open(options["majorant_config"], encoding="utf-8") as handle:
				data = json.load(handle)
		except OSError as exc:
			raise CommandError("cannot read %s: %s" % (options["majorant_config"], exc), returncode=EXIT_USAGE) from exc
		except json.JSONDecodeError as exc:
			raise InputError("majorant config is not JSON: %s" % exc) from exc
		cfg = MajorantConfig.from_dict(data)
		sequence = majorant_sequence(cfg, options["L"])
		ode = majorant_ode(cfg, options["L"])
		rows = [
			(l, a, c, relative_difference(a, c))
			for l, (a, c) in enumerate(zip(sequence.values, ode.values))
		]
		fit = fit_factorial_growth(sequence.values, start=1)
		payload = {
			"config": cfg.as_dict(),
			"L": options["L"],
			"cbar": sequence.cbar,
			"bigfloat": sequence.bigfloat,
			"sequence": list(sequence.values),
			"maxRelativeDifference": max(row[3] for row in rows),
			"factorialGrowth": fit.as_dict(),
		}
		if options["t_end"] is not None:
			times, values = integrate_majorant_ode(cfg, options["t_end"])
			payload["odeSolution"] = {"t": times, "c": values}
		if options["output"]:
			path = write_csv(options["output"], ["l", "a_tilde", "ode", "relative_difference"], rows)
			payload["output"] = str(path)
			payload["manifest"] = str(record_run(
				"majorant", self.argv(options), config.as_dict(), [path], inputs=[options["majorant_config"]],
			))
		self.emit(payload)
