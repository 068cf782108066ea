import dataclasses

from channelnet.checkpoint import load_model
from channelnet.config import (
    load_config,
    model_config_from,
    parse_detectors,
    scenario_from_config,
    sweep_options_from,
)
from channelnet.detectors import NEURAL_PREFIX
from channelnet.evaluation import mult_breakdown
from channelnet.management.base import ChannelNetCommand
from channelnet.modulation import build_constellation
from channelnet.network import ChannelNetModel


class Command(ChannelNetCommand):
    help = "Print the mean real multiplies per detection, with the share of each tag."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--config", required=True, help="TOML run configuration.")
        parser.add_argument("--detectors", default=None, help="Comma-separated names.")
        parser.add_argument(
            "--model",
            default=None,
            help="Checkpoint for channelnet-*. Without it an untrained model is counted.",
        )
        parser.add_argument("--samples", type=int, default=10)
        parser.add_argument("--snr", type=float, default=10.0, help="SNR in dB.")

    def model_for(self, name, flat, scenario, checkpoint):
        if not name.startswith(NEURAL_PREFIX):
            return None
        if checkpoint is not None:
            return checkpoint
        # Counts do not depend on the weights.
        classes = build_constellation(scenario.qam_order).classes
        config = model_config_from(flat, classes)
        variant = name.removeprefix(NEURAL_PREFIX)
        return ChannelNetModel(dataclasses.replace(config, variant=variant))

    def run(self, **options):
        flat = load_config(options["config"])
        scenario = scenario_from_config(flat)
        names = parse_detectors(
            options["detectors"] or ",".join(flat.get("sweep.detectors", []))
        )
        checkpoint = load_model(options["model"]) if options["model"] else None

        self.stdout.write(f"{scenario.digest}, lifted {scenario.N}x{scenario.K}")
        for name in names:
            total, tags = mult_breakdown(
                name,
                scenario,
                options["samples"],
                seed=sweep_options_from(flat, seed=options["seed"])["seed"],
                model=self.model_for(name, flat, scenario, checkpoint),
                snr_db=options["snr"],
            )
            shares = ", ".join(
                f"{tag} {count / total:.0%}"
                for tag, count in sorted(tags.items(), key=lambda item: -item[1])
            )
            self.stdout.write(f"{name:>16} {total:>14,.0f}  {shares}")
