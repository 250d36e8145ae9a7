from django.core.management.base import CommandError

from menger.analysis import Plane, Sphere, intersection_count
from menger.cli import EXIT_USAGE, LabCommand


class Command(LabCommand):
	help = "Count intersections of a curve with a plane or a sphere."
	uses_curve_argument = True

	def add_lab_arguments(self, parser):
		surface = parser.add_mutually_exclusive_group(required=True)
		surface.add_argument("--plane", nargs="+", type=float, metavar="X", help="normal components followed by the offset")
		surface.add_argument("--sphere", nargs="+", type=float, metavar="X", help="center components followed by the radius")
		parser.add_argument("--tol", type=float, default=1e-10, help="distance below which a sample lies on the surface")

	def validate(self, config, options):
		values = options["plane"] or options["sphere"]
		if len(values) < 2:
			raise CommandError("a surface needs at least two numbers", returncode=EXIT_USAGE)
		if options["plane"]:
			self.surface = Plane(values[:-1], values[-1])
		else:
			self.surface = Sphere(values[:-1], values[-1])

	def handle(self, *args, **options):
		self.load(options)
		curve = self.read_curve(options["curve"])
		self.emit(intersection_count(curve, self.surface, tol=options["tol"]).as_dict())
