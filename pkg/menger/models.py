from pathlib import Path

from django.db import models

from .utils import sha256_file


class RunManifest(models.Model):
	"""Provenance of one lab run that wrote files: inputs, outputs, versions."""

	created_at = models.DateTimeField(auto_now_add=True)
	command = models.CharField(max_length=64)
	argv = models.JSONField(default=list)
	config = models.JSONField(default=dict)
	inputs = models.JSONField(default=dict, blank=True)
	outputs = models.JSONField(default=dict)
	seed = models.BigIntegerField(null=True, blank=True)
	tool_version = models.CharField(max_length=32)
	versions = models.JSONField(default=dict)
	manifest_path = models.CharField(max_length=1024)

	def delete(self, *args, **kwargs):
		"""Prevent deletion to keep the run history reproducible."""
		raise PermissionError("RunManifest records cannot be deleted")

	def verify(self):
		"""Paths whose current content no longer matches the recorded hash."""
		changed = []
		for path, digest in self.outputs.items():
			if not Path(path).exists() or sha256_file(path) != digest:
				changed.append(path)
		return changed

	def __str__(self):
		return f"[{self.command}] {self.tool_version} @ {self.created_at:%Y-%m-%d %H:%M:%S}"

	class Meta:
		ordering = ["-created_at"]
		verbose_name = "Run manifest"
		verbose_name_plural = "Run manifests"
