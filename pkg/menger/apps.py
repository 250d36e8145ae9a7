from django.apps import AppConfig


class MengerConfig(AppConfig):
	default_auto_field = 'django.db.models.BigAutoField'
	name = 'menger'
	verbose_name = 'Menger curvature lab'
