from channelnet.checkpoint import save_model
from channelnet.config import (
    load_config,
    model_config_from,
    scenario_from_config,
    train_config_from,
)
from channelnet.management.base import ChannelNetCommand
from channelnet.modulation import build_constellation
from channelnet.network import ChannelNetModel
from channelnet.training import train


class Command(ChannelNetCommand):
    help = "Train a ChannelNet model on simulated data described by a TOML config."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--config", required=True, help="TOML run configuration.")
        parser.add_argument("--out", required=True, help="Output directory.")
        parser.add_argument("--run", default=None, help="Run name used in the result log.")

    def run(self, **options):
        flat = load_config(options["config"])
        scenario = scenario_from_config(flat)
        classes = build_constellation(scenario.qam_order).classes
        model_config = model_config_from(flat, classes)
        train_config = train_config_from(flat, scenario, seed=options["seed"])
        out = self.output_dir(options)

        metadata = {
            "scenario": scenario.digest,
            "train_seed": train_config.seed,
            "snr_range_db": list(train_config.snr_range_db),
            "samples_per_epoch": train_config.samples_per_epoch,
        }
        model = ChannelNetModel(model_config, seed=train_config.seed)
        model, log = train(
            model,
            train_config,
            checkpoint_dir=out / "checkpoints",
            run=options["run"],
            threads=options["threads"],
            metadata=metadata,
        )
        metadata["epochs"] = len(log.epochs)
        self.wrote(save_model(model, out / "model.chnet", metadata))
        self.wrote(log.to_csv(out / "trainlog.csv"))
