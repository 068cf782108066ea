from django.apps import AppConfig


class ChannelNetAppConfig(AppConfig):
    name = "channelnet"
    verbose_name = "ChannelNet MIMO Detection"
    default_auto_field = "django.db.models.AutoField"

    def ready(self):
        from channelnet.signals import result_signals  # noqa: F401
