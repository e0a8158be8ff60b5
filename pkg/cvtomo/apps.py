from django.apps import AppConfig


class CvtomoConfig(AppConfig):
    name = 'cvtomo'
    verbose_name = 'Continuous-variable tomography'
