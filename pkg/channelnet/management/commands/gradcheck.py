from django.core.management.base import CommandError

from channelnet.management.base import RUNTIME_FAILURE, ChannelNetCommand
from channelnet.network import VARIANTS, check_network
from channelnet.neural import check_layers
from channelnet.numerics import MISC_NAMESPACE, RngStream, make_stream_id


class Command(ChannelNetCommand):
    help = "Compare analytic gradients with central finite differences."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--full",
            action="store_true",
            help="Also check a tiny ChannelNet end to end, in every variant.",
        )
        parser.add_argument("--tolerance", type=float, default=1e-6)
        parser.add_argument("--network-tolerance", type=float, default=1e-4)

    def run(self, **options):
        stream = RngStream(options["seed"] or 0, make_stream_id(MISC_NAMESPACE, 1))
        reports = check_layers(stream, tolerance=options["tolerance"])
        if options["full"]:
            for variant in VARIANTS:
                reports[f"channelnet-{variant}"] = check_network(
                    variant, stream, tolerance=options["network_tolerance"]
                )

        failed = []
        for name, report in reports.items():
            path, error = report.worst
            status = "ok" if report.passed else "FAIL"
            self.stdout.write(f"{name:>16}  max rel. error {error:.3e}  ({path})  {status}")
            if not report.passed:
                failed.append(name)
        if failed:
            raise CommandError(
                f"gradient check failed for {', '.join(failed)}", returncode=RUNTIME_FAILURE
            )
