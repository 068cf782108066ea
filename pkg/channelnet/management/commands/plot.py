from channelnet.evaluation import parse_records, plot_records
from channelnet.management.base import ChannelNetCommand

FORMATS = ("svg", "pdf", "png")


class Command(ChannelNetCommand):
    help = "Plot SER against SNR from a sweep or robustness CSV."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--in", dest="input", required=True, help="Sweep CSV.")
        parser.add_argument("--out", required=True, help="Figure path.")
        parser.add_argument("--format", choices=FORMATS, default=None)

    def run(self, **options):
        records = parse_records(options["input"])
        self.wrote(plot_records(records, options["out"], fmt=options["format"]))
