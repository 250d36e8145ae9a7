from django.contrib import admin

from .models import RunManifest


@admin.register(RunManifest)
class RunManifestAdmin(admin.ModelAdmin):
	list_display = ("command", "created_at", "tool_version", "seed", "manifest_path")
	list_filter = ("created_at", "command")
	date_hierarchy = "created_at"
	search_fields = ("command", "manifest_path")
	readonly_fields = [field.name for field in RunManifest._meta.fields]

	def has_add_permission(self, request):
		return False

	def has_change_permission(self, request, obj=None):
		return False

	def has_delete_permission(self, request, obj=None):
		return False
