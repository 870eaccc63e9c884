"""Run configuration: defaults, flat ``key=value`` config files, CLI overrides."""

from dataclasses import dataclass

from .anchors import DEFAULT_K
from .errors import DataError
from .gan import GanConfig
from .pipeline import PipelineConfig


def parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_noise_removal(text):
    t = str(text).strip().lower()
    return None if t == "auto" else parse_bool(t)


def parse_ints(text):
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def parse_floats(text):
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def parse_list(text):
    return [v.strip() for v in str(text).split(",") if v.strip()]


@dataclass(frozen=True)
class Option:
    type: object
    default: object
    help: str


_G = GanConfig()

# every tunable the CLI and config file understand
OPTIONS = {
    "seed": Option(int, 0, "root random seed"),
    "k": Option(int, DEFAULT_K, "nearest-neighbour k for anchor selection"),
    "noise_removal": Option(parse_noise_removal, None, "minority noise removal: auto|on|off"),
    "prior_epochs": Option(int, 1000, "prior classifier epochs"),
    "prior_lr": Option(float, 0.001, "prior classifier learning rate"),
    "filter_safeguard": Option(parse_bool, True, "keep minority rows if filtering would drop >50%"),
    "noise_dim": Option(int, _G.noise_dim, "generator noise width"),
    "epochs_main": Option(int, _G.epochs_main, "main training epochs"),
    "epochs_finetune": Option(int, _G.epochs_finetune, "finetuning epochs"),
    "batches_per_epoch": Option(int, _G.batches_per_epoch, "update rounds per epoch"),
    "batch_size": Option(int, _G.batch_size, "GAN batch size"),
    "lr_main": Option(float, _G.lr_main, "main training learning rate"),
    "lr_finetune": Option(float, _G.lr_finetune, "finetuning learning rate"),
    "lambda1": Option(float, _G.lambda1, "anchor loss weight, minority generator"),
    "lambda2": Option(float, _G.lambda2, "anchor loss weight, majority generator"),
    "clusters": Option(int, _G.clusters, "k-means centroids per class"),
    "use_score_stabilization": Option(parse_bool, _G.use_score_stabilization, "score-weighted generator loss"),
    "nonsaturating_generator": Option(parse_bool, _G.nonsaturating_generator, "use -log D(G(z))"),
    "hidden": Option(parse_ints, _G.hidden, "hidden widths of generators and discriminator"),
    "positive_candidates": Option(int, _G.positive_candidates, "nearest centroids a positive is drawn from"),
    "methods": Option(parse_list, ["none", "ros", "smote", "bsmote", "adasyn", "anchscgan"], "benchmark methods"),
    "repeats": Option(int, 5, "benchmark repeats"),
    "test_fraction": Option(float, 0.3, "test split fraction"),
    "seeds": Option(parse_ints, None, "explicit seed per repeat"),
    "k_neighbors": Option(int, 5, "k for SMOTE-family baselines"),
    "borderline_m": Option(int, 10, "danger neighbourhood for Borderline-SMOTE"),
}


def read_config_file(path):
    """Parse ``key=value`` lines; ``#`` starts a comment.  Values are typed per ``OPTIONS``."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in OPTIONS:
                raise DataError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = OPTIONS[key].type(value)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


def resolve(cli_values, config_path=None):
    """defaults <- config file <- explicit CLI values."""
    values = {k: o.default for k, o in OPTIONS.items()}
    if config_path:
        values.update(read_config_file(config_path))
    values.update({k: v for k, v in cli_values.items() if k in OPTIONS})
    return values


def gan_config(values):
    return GanConfig(
        noise_dim=values["noise_dim"], epochs_main=values["epochs_main"],
        epochs_finetune=values["epochs_finetune"], batches_per_epoch=values["batches_per_epoch"],
        batch_size=values["batch_size"], lr_main=values["lr_main"], lr_finetune=values["lr_finetune"],
        lambda1=values["lambda1"], lambda2=values["lambda2"], clusters=values["clusters"],
        use_score_stabilization=values["use_score_stabilization"],
        nonsaturating_generator=values["nonsaturating_generator"], seed=values["seed"],
        hidden=values["hidden"], positive_candidates=values["positive_candidates"],
    )


def pipeline_config(values):
    return PipelineConfig(
        k=values["k"], noise_removal=values["noise_removal"], prior_epochs=values["prior_epochs"],
        prior_lr=values["prior_lr"], filter_safeguard=values["filter_safeguard"],
        gan=gan_config(values), seed=values["seed"],
    )
