from django.db import models
from django.utils.translation import gettext_lazy as _


class SweepEvent(models.Model):
    detector = models.CharField(max_length=64, db_index=True, verbose_name=_("Detector"))
    scenario = models.CharField(max_length=255, db_index=True, verbose_name=_("Scenario"))
    snr_db = models.FloatField(verbose_name=_("SNR (dB)"))
    symbols = models.BigIntegerField(verbose_name=_("Symbols"))
    errors = models.BigIntegerField(verbose_name=_("Symbol errors"))
    ser = models.FloatField(verbose_name=_("Symbol error rate"))
    ci95 = models.FloatField(verbose_name=_("95% confidence half-width"))
    mults = models.BigIntegerField(default=0, verbose_name=_("Multiplies per detection"))
    skipped = models.IntegerField(default=0, verbose_name=_("Skipped samples"))
    seed = models.BigIntegerField(verbose_name=_("Seed"))
    datetime = models.DateTimeField(auto_now_add=True, verbose_name=_("Date time"))

    class Meta:
        verbose_name = _("sweep event")
        verbose_name_plural = _("sweep events")
        ordering = ["-datetime"]
        indexes = [
            models.Index(fields=["detector", "scenario"], name="channelnet_det_scen_idx")
        ]

    def __str__(self):
        return f"{self.detector} @ {self.snr_db:g} dB on {self.scenario}"


class EpochEvent(models.Model):
    run = models.CharField(max_length=255, db_index=True, verbose_name=_("Run"))
    epoch = models.IntegerField(verbose_name=_("Epoch"))
    loss = models.FloatField(verbose_name=_("Mean loss"))
    ser_estimate = models.FloatField(verbose_name=_("Training SER estimate"))
    lr = models.FloatField(verbose_name=_("Learning rate"))
    seconds = models.FloatField(default=0.0, verbose_name=_("Wall time (s)"))
    datetime = models.DateTimeField(auto_now_add=True, verbose_name=_("Date time"))

    class Meta:
        verbose_name = _("epoch event")
        verbose_name_plural = _("epoch events")
        ordering = ["-datetime"]
        indexes = [models.Index(fields=["run", "epoch"], name="channelnet_run_epoch_idx")]

    def __str__(self):
        return f"{self.run} epoch {self.epoch}"
