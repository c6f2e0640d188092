"""rdsa URL Configuration

Only the Django admin is exposed: it is used to browse stored experiment
reports and per-seed runs.
"""
from django.conf import settings
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path(getattr(settings, 'ADMIN_URL', 'admin/'), admin.site.urls),
]
