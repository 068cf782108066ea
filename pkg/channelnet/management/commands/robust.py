from channelnet.checkpoint import load_model
from channelnet.config import (
    load_config,
    robust_options_from,
    scenario_from_config,
    sweep_options_from,
)
from channelnet.evaluation import emit_records, run_robustness
from channelnet.management.base import ChannelNetCommand
from channelnet.management.commands.sweep import format_record, resolve_snr_list


class Command(ChannelNetCommand):
    help = (
        "Evaluate a trained model, unchanged, under channel-estimation error and "
        "heavy-tailed noise, and write robust.csv."
    )

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--model", required=True, help="Trained checkpoint.")
        parser.add_argument("--config", required=True, help="TOML run configuration.")
        parser.add_argument("--snr", default=None, help="SNR points as LO:HI:STEP in dB.")
        parser.add_argument("--out", required=True, help="Output directory.")

    def run(self, **options):
        flat = load_config(options["config"])
        model = load_model(options["model"])
        records = run_robustness(
            model,
            scenario_from_config(flat),
            resolve_snr_list(flat, options["snr"]),
            threads=options["threads"],
            **robust_options_from(flat),
            **sweep_options_from(flat, seed=options["seed"]),
        )
        for record in records:
            self.stdout.write(f"{record.scenario}: {format_record(record)}")
        self.wrote(emit_records(records, self.output_dir(options) / "robust.csv"))
