import logging

from channelnet.models import EpochEvent, SweepEvent

logger = logging.getLogger(__name__)


class ModelBackend:
    def sweep(self, sweep_info):
        return SweepEvent.objects.create(**sweep_info)

    def epoch(self, epoch_info):
        return EpochEvent.objects.create(**epoch_info)


class LoggingBackend:
    """Writes results to the ``channelnet.backends`` logger instead of the database."""

    def sweep(self, sweep_info):
        logger.info(
            "sweep %(detector)s %(scenario)s snr=%(snr_db)g ser=%(ser).3e "
            "errors=%(errors)d symbols=%(symbols)d skipped=%(skipped)d",
            sweep_info,
        )
        return sweep_info

    def epoch(self, epoch_info):
        logger.info(
            "epoch %(run)s #%(epoch)d loss=%(loss).5f ser=%(ser_estimate).3e lr=%(lr).1e",
            epoch_info,
        )
        return epoch_info


class NullBackend:
    def sweep(self, sweep_info):
        return None

    def epoch(self, epoch_info):
        return None
