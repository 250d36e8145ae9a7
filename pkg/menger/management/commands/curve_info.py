from menger.cli import LabCommand
from menger.curve import effective_bandwidth, quality_report


class Command(LabCommand):
	help = "Dimension, bandwidth and sampled quality of a curve file."
	uses_curve_argument = True

	def handle(self, *args, **options):
		config = self.load(options)
		curve = self.read_curve(options["curve"])
		report = quality_report(curve)
		self.emit({
			"dim": curve.dim,
			"bandwidth": curve.bandwidth,
			"effectiveBandwidth": effective_bandwidth(curve),
			"quality": report.as_dict(),
			"simple": report.is_simple(config.curve.simplicity_threshold),
		})
