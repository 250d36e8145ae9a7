"""
URL configuration for the Menger curvature lab.

Only the admin is exposed; it lists the recorded run manifests.
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]
