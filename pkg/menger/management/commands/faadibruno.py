import json
import sys
from fractions import Fraction

from django.core.management.base import CommandError

from menger.analysis import UniversalPolyInput, faa_di_bruno
from menger.cli import EXIT_USAGE, LabCommand
from menger.exceptions import InputError


def _number(value):
	if isinstance(value, str):
		try:
			return Fraction(value)
		except ValueError as exc:
			raise InputError("%r is not a number" % value) from exc
	if isinstance(value, (int, float)):
		return value
	raise InputError("%r is not a number" % (value,))


def parse_input(data):
	"""{"k": 2, "n": 1, "y": {"0": 1, "1": 2, "2": "1/3"}, "x": [[1], [0.5]]}."""
	try:
		k, n = data["k"], data["n"]
		y = {tuple(int(i) for i in key.split(",")): _number(value) for key, value in data["y"].items()}
		x = [[_number(value) for value in row] for row in data["x"]]
	except (KeyError, TypeError, AttributeError, ValueError) as exc:
		raise InputError("malformed universal polynomial input: %s" % exc) from exc
	return UniversalPolyInput(k, n, y, x)


class Command(LabCommand):
	help = "Evaluate the multivariate Faa di Bruno polynomial p_k^(n) on a JSON input."

	def add_lab_arguments(self, parser):
		parser.add_argument("input", help="JSON file, or - for stdin")

	def handle(self, *args, **options):
		self.load(options)
		try:
			handle = sys.stdin if options["input"] == "-" else open(options["input"], encoding="utf-8")
		except OSError as exc:
			raise CommandError("cannot read %s: %s" % (options["input"], exc), returncode=EXIT_USAGE) from exc
		with handle:
			try:
				data = json.load(handle)
			except json.JSONDecodeError as exc:
				raise InputError("input is not JSON: %s" % exc) from exc
		value = faa_di_bruno(parse_input(data))
		payload = {"k": data["k"], "n": data["n"], "value": value}
		if isinstance(value, Fraction):
			payload["exact"] = str(value)
		self.emit(payload)
