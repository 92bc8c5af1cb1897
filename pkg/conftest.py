import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'fourterm.settings')
django.setup()
