"""
Django settings for the Menger curvature lab.

Generated by 'django-admin startproject' using Django 6.0.

For more information on this file, see
https://docs.djangoproject.com/en/6.0/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/6.0/ref/settings/
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/6.0/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-menger-lab-local-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DJANGO_DEBUG', '1') == '1'

ALLOWED_HOSTS = ['localhost', '127.0.0.1']


# Application definition

INSTALLED_APPS = [
    'jazzmin',
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'menger',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'project.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'project.wsgi.application'


# Database
# https://docs.djangoproject.com/en/6.0/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Password validation
# https://docs.djangoproject.com/en/6.0/ref/settings/#auth-password-validators

AUTH_PASSWORD_VALIDATORS = [
    {
        'NAME': 'django.contrib.auth.password_validation.UserAttributeSimilarityValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.MinimumLengthValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.CommonPasswordValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.NumericPasswordValidator',
    },
]


# Internationalization
# https://docs.djangoproject.com/en/6.0/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)
# https://docs.djangoproject.com/en/6.0/howto/static-files/

STATIC_URL = 'static/'
STATIC_ROOT = os.path.join(BASE_DIR, 'static/')


# Logging: numerical modules log under 'menger.*'; results go to stdout, logs to stderr.

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'menger': {
            'handlers': ['console'],
            'level': os.environ.get('MENGER_LAB_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# Lab defaults; an INI file (--lab-config or MENGER_LAB_CONFIG) and command flags override them.

MENGER_LAB = {
    'quadrature': {
        'base_cells': 16,
        'grading_exponent': 3.0,
        'gauss_order': 8,
        'rel_tol': 1e-5,
        'max_refine': 6,
        'u_oversampling': 4,
        'workers': int(os.environ.get('MENGER_LAB_WORKERS', '1')),
    },
    'flow_quadrature': {
        'base_cells': 8,
        'grading_exponent': 3.0,
        'gauss_order': 6,
        'rel_tol': 1e-4,
        'max_refine': 0,
        'u_oversampling': 4,
        'workers': int(os.environ.get('MENGER_LAB_WORKERS', '1')),
    },
    'energy': {
        'p': 2.5,
        'q': 2.0,
    },
    'flow': {
        'step': 1e-2,
        'precondition_order': None,
        'max_iters': 500,
        'residual_tol': 1e-3,
        'backtrack_factor': 0.5,
        'project_every': 1,
        'armijo': 1e-4,
        'min_step': 1e-12,
        'growth': 2.0,
        'max_step': 1.0,
    },
    'curve': {
        'bandwidth': 64,
        'dim': 3,
        'simplicity_threshold': 1e-6,
    },
    'analysis': {
        'l_max': 12,
        'noise_floor': 1e-13,
        'k_max': 32,
    },
    'output': {
        'directory': os.environ.get('MENGER_LAB_OUTPUT_DIR', str(BASE_DIR / 'runs')),
    },
}


# Jazzmin admin branding
JAZZMIN_SETTINGS = {
    "site_title": "Menger Lab Admin",
    "site_header": "Menger Lab",
    "site_brand": "Menger Lab",
    "welcome_sign": "Run manifests of the Menger curvature lab",
    "copyright": "Menger Lab",
}
