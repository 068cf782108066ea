import csv
import datetime

from django.contrib import admin
from django.http import HttpResponse
from django.utils.text import slugify

from .models import EpochEvent, SweepEvent
from .settings import (
    ADMIN_SHOW_EPOCH_EVENTS,
    ADMIN_SHOW_SWEEP_EVENTS,
    EPOCH_EVENT_LIST_FILTER,
    EPOCH_EVENT_SEARCH_FIELDS,
    SWEEP_EVENT_LIST_FILTER,
    SWEEP_EVENT_SEARCH_FIELDS,
)


@admin.display(description="Export to CSV")
def export_to_csv(modeladmin, request, queryset):
    """Download the selected events, one column per stored field."""
    opts = modeladmin.model._meta
    columns = opts.concrete_fields
    response = HttpResponse(content_type="text/csv")
    filename = slugify(opts.verbose_name_plural)
    response["Content-Disposition"] = f"attachment;filename={filename}.csv"
    writer = csv.writer(response, lineterminator="\n")
    writer.writerow([column.verbose_name for column in columns])
    for event in queryset.order_by("pk"):
        writer.writerow([_csv_value(getattr(event, column.attname)) for column in columns])
    return response


def _csv_value(value):
    if isinstance(value, datetime.datetime):
        return value.isoformat()
    if isinstance(value, float):
        return repr(value)
    return value


class ResultEventAdmin(admin.ModelAdmin):
    """Result events are written by runs, never edited by hand."""

    date_hierarchy = "datetime"
    actions = [export_to_csv]

    def get_readonly_fields(self, request, obj=None):
        return [f.name for f in self.model._meta.get_fields()]

    def has_add_permission(self, request, obj=None):
        return False


# Sweep events
class SweepEventAdmin(ResultEventAdmin):
    list_display = [
        "datetime",
        "detector",
        "scenario",
        "snr_db",
        "ser",
        "ci95",
        "errors",
        "symbols",
        "mults",
    ]
    list_filter = SWEEP_EVENT_LIST_FILTER
    search_fields = SWEEP_EVENT_SEARCH_FIELDS


# Epoch events
class EpochEventAdmin(ResultEventAdmin):
    list_display = ["datetime", "run", "epoch", "loss", "ser_estimate", "lr", "seconds"]
    list_filter = EPOCH_EVENT_LIST_FILTER
    search_fields = EPOCH_EVENT_SEARCH_FIELDS


if ADMIN_SHOW_SWEEP_EVENTS:
    admin.site.register(SweepEvent, SweepEventAdmin)
if ADMIN_SHOW_EPOCH_EVENTS:
    admin.site.register(EpochEvent, EpochEventAdmin)
