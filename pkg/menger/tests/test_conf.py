import tempfile
from pathlib import Path

from django.core.exceptions import ImproperlyConfigured
from django.test import SimpleTestCase, override_settings

from menger.conf import load_config


class LoadConfigTests(SimpleTestCase):
	def setUp(self):
		self.tmp = tempfile.TemporaryDirectory()
		self.addCleanup(self.tmp.cleanup)

	def write_ini(self, text):
		path = Path(self.tmp.name) / "lab.ini"
		path.write_text(text, encoding="utf-8")
		return str(path)

	def test_settings_defaults(self):
		config = load_config()

		self.assertEqual((config.energy.p, config.energy.q), (2.5, 2.0))
		self.assertIsNone(config.flow.precondition_order)
		self.assertEqual(config.flow_energy.quad, config.flow_quadrature)

	def test_ini_file_overrides_settings(self):
		path = self.write_ini("[energy]\np = 2.4\n\n[quadrature]\nmax_refine = 2\n\n[flow]\nprecondition_order = 1.5\n")

		config = load_config(path)

		self.assertEqual(config.energy.p, 2.4)
		self.assertEqual(config.quadrature.max_refine, 2)
		self.assertEqual(config.flow.precondition_order, 1.5)
		self.assertEqual(config.source, path)

	def test_flags_override_the_file_and_unset_flags_are_ignored(self):
		path = self.write_ini("[energy]\np = 2.4\n")

		config = load_config(path, {"energy": {"p": 2.6, "q": None}})

		self.assertEqual((config.energy.p, config.energy.q), (2.6, 2.0))

	def test_unknown_section(self):
		with self.assertRaises(ImproperlyConfigured):
			load_config(self.write_ini("[plotting]\ncolor = red\n"))

	def test_unknown_option(self):
		with self.assertRaises(ImproperlyConfigured):
			load_config(self.write_ini("[energy]\nr = 1\n"))

	def test_malformed_value(self):
		with self.assertRaises(ImproperlyConfigured):
			load_config(self.write_ini("[quadrature]\nbase_cells = many\n"))

	def test_inadmissible_value(self):
		with self.assertRaises(ImproperlyConfigured):
			load_config(overrides={"flow": {"step": -1.0}})

	@override_settings(MENGER_LAB={"output": {"directory": "/srv/runs"}})
	def test_missing_sections_fall_back_to_defaults(self):
		config = load_config()

		self.assertEqual(str(config.output_dir), "/srv/runs")
		self.assertEqual(config.curve.bandwidth, 64)
