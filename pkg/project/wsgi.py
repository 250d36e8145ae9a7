"""
WSGI entry point serving the run-manifest admin of the Menger curvature lab.

    gunicorn project.wsgi:application --bind 127.0.0.1:8000

Run ``manage.py collectstatic`` first so the jazzmin assets are served from
STATIC_ROOT.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'project.settings')

application = get_wsgi_application()
