import tempfile
from pathlib import Path

from django.contrib.admin.sites import AdminSite
from django.contrib.auth import get_user_model
from django.test import RequestFactory, TestCase

from menger.admin import RunManifestAdmin
from menger.cli import record_run
from menger.models import RunManifest


class RunManifestTests(TestCase):
	def setUp(self):
		self.tmp = tempfile.TemporaryDirectory()
		self.addCleanup(self.tmp.cleanup)
		self.output = Path(self.tmp.name) / "result.csv"
		self.output.write_text("k,rho_k,q_k\n1,1,1\n", encoding="utf-8")

	def _record(self, seed=None):
		record_run("multiplier", ["multiplier", "--kmax", "4"], {"energy": {"p": 2.5}}, [self.output], seed=seed)
		return RunManifest.objects.get()

	def test_record_run_mirrors_the_manifest(self):
		manifest = self._record(seed=7)

		self.assertEqual(manifest.seed, 7)
		self.assertEqual(manifest.config, {"energy": {"p": 2.5}})
		self.assertEqual(Path(manifest.manifest_path), self.output.parent / "manifest.json")
		self.assertIn(str(self.output), manifest.outputs)
		self.assertIn("numpy", manifest.versions)

	def test_manifests_cannot_be_deleted(self):
		manifest = self._record()

		with self.assertRaises(PermissionError):
			manifest.delete()
		self.assertEqual(RunManifest.objects.count(), 1)

	def test_verify_reports_modified_outputs(self):
		manifest = self._record()
		self.assertEqual(manifest.verify(), [])

		self.output.write_text("k,rho_k,q_k\n", encoding="utf-8")

		self.assertEqual(manifest.verify(), [str(self.output)])


class RunManifestAdminTests(TestCase):
	def setUp(self):
		self.admin = RunManifestAdmin(RunManifest, AdminSite())
		self.request = RequestFactory().get("/admin/menger/runmanifest/")
		RunManifest.objects.create(command="energy", tool_version="1.0.0", manifest_path="/tmp/manifest.json")

	def test_admin_is_read_only(self):
		self.assertFalse(self.admin.has_add_permission(self.request))
		self.assertFalse(self.admin.has_change_permission(self.request))
		self.assertFalse(self.admin.has_delete_permission(self.request))

	def test_changelist_filters_on_creation_date(self):
		user = get_user_model().objects.create_superuser("admin", "admin@example.com", "secret")
		self.client.force_login(user)

		def listed(params):
			response = self.client.get("/admin/menger/runmanifest/", params)
			self.assertEqual(response.status_code, 200)
			return response.context["cl"].result_count

		self.assertEqual(listed({"created_at__gte": "2000-01-01 00:00:00+00:00"}), 1)
		self.assertEqual(listed({"created_at__gte": "2999-01-01 00:00:00+00:00"}), 0)
		self.assertEqual(listed({"command__exact": "flow"}), 0)
