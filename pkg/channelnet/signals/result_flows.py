import contextlib
import logging

from django.db import transaction
from django.utils.module_loading import import_string

from channelnet.settings import RESULTS_BACKEND
from channelnet.utils import should_propagate_exceptions

logger = logging.getLogger(__name__)
results_backend = import_string(RESULTS_BACKEND)()


def handle_flow_exception(item, signal):
    item_str = ""
    with contextlib.suppress(Exception):
        item_str = f" item: {item}"

    logger.exception(f"channelnet had a {signal} exception storing a result.{item_str}")
    if should_propagate_exceptions():
        raise


def sweep_record_flow(record):
    try:
        with transaction.atomic():
            results_backend.sweep(
                {
                    "detector": record.detector,
                    "scenario": record.scenario,
                    "snr_db": record.snr_db,
                    "symbols": record.symbols,
                    "errors": record.errors,
                    "ser": record.ser,
                    "ci95": record.ci95,
                    "mults": record.mults,
                    "skipped": record.skipped,
                    "seed": record.seed,
                }
            )
    except Exception:
        handle_flow_exception(record, "sweep_record_ready")


def epoch_flow(run, epoch):
    try:
        with transaction.atomic():
            results_backend.epoch(
                {
                    "run": run,
                    "epoch": epoch.epoch,
                    "loss": epoch.loss,
                    "ser_estimate": epoch.ser_estimate,
                    "lr": epoch.lr,
                    "seconds": epoch.seconds,
                }
            )
    except Exception:
        handle_flow_exception(epoch, "epoch_completed")
