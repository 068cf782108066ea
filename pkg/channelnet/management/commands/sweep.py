from channelnet.checkpoint import load_model
from channelnet.config import (
    load_config,
    parse_detectors,
    parse_snr_range,
    scenario_from_config,
    sweep_options_from,
    sweep_snr_list,
)
from channelnet.evaluation import emit_records, run_sweep
from channelnet.exceptions import ConfigurationError
from channelnet.management.base import ChannelNetCommand


def resolve_snr_list(flat, snr):
    snr_list = parse_snr_range(snr) if snr else sweep_snr_list(flat)
    if not snr_list:
        raise ConfigurationError("no SNR points: pass --snr LO:HI:STEP or set sweep.snr")
    return snr_list


def format_record(record):
    return (
        f"{record.detector:>16} {record.snr_db:>7g} dB  SER {record.ser:.3e} "
        f"± {record.ci95:.1e}  ({record.errors}/{record.symbols})"
    )


class Command(ChannelNetCommand):
    help = "Measure SER against SNR for a list of detectors and write sweep.csv."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--config", required=True, help="TOML run configuration.")
        parser.add_argument("--detectors", default=None, help="Comma-separated names.")
        parser.add_argument("--snr", default=None, help="SNR points as LO:HI:STEP in dB.")
        parser.add_argument("--model", default=None, help="Checkpoint for channelnet-*.")
        parser.add_argument("--out", required=True, help="Output directory.")

    def run(self, **options):
        flat = load_config(options["config"])
        scenario = scenario_from_config(flat)
        detectors = options["detectors"] or ",".join(flat.get("sweep.detectors", []))
        model = load_model(options["model"]) if options["model"] else None
        records = run_sweep(
            parse_detectors(detectors),
            scenario,
            resolve_snr_list(flat, options["snr"]),
            model=model,
            threads=options["threads"],
            **sweep_options_from(flat, seed=options["seed"]),
        )
        for record in records:
            self.stdout.write(format_record(record))
        self.wrote(emit_records(records, self.output_dir(options) / "sweep.csv"))
