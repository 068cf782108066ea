from django.dispatch import Signal

# Sent by evaluation.run_sweep for every finished (detector, SNR) cell with ``record``.
sweep_record_ready = Signal()

# Sent by training.train after every epoch with ``run`` and ``epoch`` (a TrainEpoch).
epoch_completed = Signal()
