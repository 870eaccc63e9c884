"""End-to-end Anch-SCGAN oversampling: scale, anchors, prior, filter, cluster, train, generate."""

import logging
from dataclasses import dataclass, field

import numpy as np

from . import gan
from .gan import GanConfig
from .anchors import DEFAULT_K, default_noise_removal, select_anchors
from .clusters import build_centroids
from .data import apply_scaler, fit_scaler
from .errors import AnchError
from .prior import filter_misclassified, train_prior

log = logging.getLogger(__name__)

# stage ids used to derive independent seeds from one root seed
STAGES = {"anchors": 1, "prior": 2, "clusters": 3, "gan": 4, "generate": 5}


def stage_seed(root, stage):
    return int(np.random.SeedSequence([int(root), STAGES[stage]]).generate_state(1)[0])


class StageError(AnchError):
    def __init__(self, stage, exc):
        super().__init__(f"stage {stage!r} failed: {exc}")
        self.stage = stage
        self.cause = exc
        self.exit_code = getattr(exc, "exit_code", 1)


@dataclass
class PipelineConfig:
    k: int = DEFAULT_K
    noise_removal: bool = None  # None -> on when IR < 30
    prior_epochs: int = 1000
    prior_batch_size: int = None
    prior_lr: float = 0.001
    filter_safeguard: bool = True
    gan: GanConfig = field(default_factory=GanConfig)
    seed: int = 0


@dataclass
class FitResult:
    model: object
    anchors: object
    pruned: object
    clean: object
    anchors_clean: object
    history: list
    manifest: dict


def _stage(name, fn, *args, **kw):
    log.info("stage %s", name)
    try:
        return fn(*args, **kw)
    except AnchError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, FloatingPointError) as exc:
        raise StageError(name, exc) from exc


def prepare(train, config):
    """Everything before GAN training.  Returns a dict of intermediate artefacts."""
    scaler = fit_scaler(train)
    norm = train.with_features(apply_scaler(scaler, train.features))
    noise_removal = config.noise_removal
    if noise_removal is None:
        noise_removal = bool(default_noise_removal(norm.labels))
    anchors, pruned = _stage("anchors", select_anchors, norm, config.k, noise_removal,
                             stage_seed(config.seed, "anchors"))
    anchor_data = norm.subset(anchors.indices)
    prior = _stage("prior", train_prior, anchor_data.features, anchor_data.labels,
                   config.prior_epochs, config.prior_batch_size, config.prior_lr,
                   stage_seed(config.seed, "prior"))
    clean = _stage("filter", filter_misclassified, prior, pruned, config.filter_safeguard)
    anchors_clean = _stage("filter", filter_misclassified, prior, anchor_data, config.filter_safeguard)
    cent_src = anchors_clean if min(anchors_clean.n_minority, anchors_clean.n_majority) > 0 else anchor_data
    centroids = _stage("clusters", build_centroids, cent_src.features, cent_src.labels,
                       config.gan.clusters, stage_seed(config.seed, "clusters"))
    return {
        "scaler": scaler, "normalized": norm, "noise_removal": noise_removal,
        "anchors": anchors, "pruned": pruned, "anchor_data": anchor_data,
        "prior": prior, "clean": clean, "anchors_clean": anchors_clean, "centroids": centroids,
    }


def fit(train, config=None):
    """Fit the full model on a raw (unscaled) training split."""
    config = config or PipelineConfig()
    parts = prepare(train, config)
    gcfg = GanConfig(**{**config.gan.as_dict(), "seed": stage_seed(config.seed, "gan")})
    model = gan.build_model(parts["prior"], parts["scaler"], parts["centroids"], gcfg)
    history = _stage("train", gan.train, model, parts["clean"].features)
    history = _stage("finetune", gan.finetune, model, parts["anchors_clean"].features, history)
    a = parts["anchors"]
    manifest = {
        "train_rows": train.n, "train_minority": train.n_minority, "train_majority": train.n_majority,
        "noise_removal": parts["noise_removal"], "k": config.k,
        "anchors_minority": len(a.minority_indices), "anchors_majority": len(a.majority_indices),
        "k_used_minority": a.k_used_minority, "k_used_majority": a.k_used_majority,
        "anchors_exhausted": a.exhausted,
        "noise_discarded": len(a.discarded_noise), "overlap_discarded": len(a.overlap_discard),
        "clean_rows": parts["clean"].n, "anchors_clean_rows": parts["anchors_clean"].n,
        "centroids_minority": len(parts["centroids"].minority_centroids),
        "centroids_majority": len(parts["centroids"].majority_centroids),
    }
    return FitResult(model, a, parts["pruned"], parts["clean"], parts["anchors_clean"], history, manifest)


def oversample_anchscgan(train, config=None):
    """Fit on ``train`` and return ``(balanced_dataset, FitResult)``."""
    config = config or PipelineConfig()
    res = fit(train, config)
    balanced = _stage("generate", gan.oversample, res.model, train, stage_seed(config.seed, "generate"))
    return balanced, res
