from channelnet.settings import WATCH_SWEEP_EVENTS, WATCH_TRAINING_EVENTS
from channelnet.signals import epoch_completed, sweep_record_ready
from channelnet.signals.result_flows import epoch_flow, sweep_record_flow


def sweep_record_ready_handler(sender, record, **kwargs):
    sweep_record_flow(record)


def epoch_completed_handler(sender, run, epoch, **kwargs):
    epoch_flow(run, epoch)


if WATCH_SWEEP_EVENTS:
    sweep_record_ready.connect(
        sweep_record_ready_handler, dispatch_uid="channelnet_sweep_record_ready"
    )
if WATCH_TRAINING_EVENTS:
    epoch_completed.connect(
        epoch_completed_handler, dispatch_uid="channelnet_epoch_completed"
    )
