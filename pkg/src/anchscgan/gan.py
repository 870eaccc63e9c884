"""Two-generator GAN conditioned on the prior's class representation.

The discriminator sees ``[x ; C(x)]`` where ``C`` is the frozen prior's last
hidden layer.  Each generator minimises a (optionally score-weighted)
adversarial term plus an N-pair anchor loss against k-means centroids of the
cleaned anchors.  Everything runs in the scaler's [0, 1] feature space.
"""

import logging
import warnings
from dataclasses import dataclass, field, fields

import numpy as np

from .clusters import pick_positive
from .data import invert_scaler
from .errors import DivergenceError
from .nn import (Adam, backward, bce, flat_grads, forward, init_network, log_one_minus,
                 mlp_spec, neg_log, npair_loss)
from .prior import REPRESENTATION_LAYER

log = logging.getLogger(__name__)

MINORITY, MAJORITY = 1, 0


@dataclass
class GanConfig:
    noise_dim: int = 100
    epochs_main: int = 800
    epochs_finetune: int = 200
    batches_per_epoch: int = 20
    batch_size: int = 64
    lr_main: float = 0.001
    lr_finetune: float = 0.0005
    lambda1: float = 0.5
    lambda2: float = 0.5
    clusters: int = 5
    use_score_stabilization: bool = True
    nonsaturating_generator: bool = False
    seed: int = 0
    hidden: tuple = (512, 128, 32)
    positive_candidates: int = 2

    def __post_init__(self):
        self.hidden = tuple(int(h) for h in self.hidden)
        for name in ("noise_dim", "batches_per_epoch", "batch_size", "clusters", "positive_candidates"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("epochs_main", "epochs_finetune"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.lr_main <= 0 or self.lr_finetune <= 0:
            raise ValueError("learning rates must be positive")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda weights must be non-negative")

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def generator_spec(noise_dim, d, hidden):
    return mlp_spec([noise_dim, *hidden, d], "relu", "sigmoid")


def discriminator_spec(d, hidden):
    return mlp_spec([2 * d, *hidden, 1], "relu", "sigmoid")


@dataclass
class GanModel:
    discriminator: object
    gen_min: object
    gen_maj: object
    prior: object
    scaler: object
    centroids: object
    config: GanConfig = field(default_factory=GanConfig)

    def __post_init__(self):
        d = self.d
        if self.discriminator.input_dim != 2 * d:
            raise ValueError("discriminator input must be twice the feature width")
        for g in (self.gen_min, self.gen_maj):
            if g.output_dim != d:
                raise ValueError("generator output width must equal the feature width")
        self._centroid_reps = None

    @property
    def d(self):
        return self.prior.d

    @property
    def noise_dim(self):
        return self.gen_min.input_dim

    def centroid_reps(self):
        if self._centroid_reps is None:
            c = self.centroids
            self._centroid_reps = (
                class_representation(self.prior, c.minority_centroids),
                class_representation(self.prior, c.majority_centroids),
            )
        return self._centroid_reps

    def generator(self, cls):
        return self.gen_min if cls == MINORITY else self.gen_maj


def class_representation(prior, x):
    return forward(prior.net, x)[REPRESENTATION_LAYER]


def build_model(prior, scaler, centroids, config=None):
    config = config or GanConfig()
    d = prior.d
    seeds = np.random.SeedSequence([config.seed, 101]).generate_state(3)
    return GanModel(
        init_network(discriminator_spec(d, config.hidden), int(seeds[0])),
        init_network(generator_spec(config.noise_dim, d, config.hidden), int(seeds[1])),
        init_network(generator_spec(config.noise_dim, d, config.hidden), int(seeds[2])),
        prior, scaler, centroids, config,
    )


def discriminator_input(x, prior, prior_acts=None):
    """Row-wise ``[x ; C(x)]``; also returns the prior activations used."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[1] != prior.d:
        raise ValueError(f"expected width {prior.d}, got {x.shape[1]}")
    acts = forward(prior.net, x) if prior_acts is None else prior_acts
    return np.hstack([x, acts[REPRESENTATION_LAYER]]), acts


def discriminator_loss(D, real_in, fake_in):
    """BCE on reals (target 1) plus BCE on fakes (target 0), and D's gradients."""
    acts_r = forward(D, real_in)
    acts_f = forward(D, fake_in)
    l_r, g_r = bce(acts_r[-1], 1.0)
    l_f, g_f = bce(acts_f[-1], 0.0)
    grads_r, _ = backward(D, acts_r, g_r)
    grads_f, _ = backward(D, acts_f, g_f)
    grads = [(a[0] + b[0], a[1] + b[1]) for a, b in zip(grads_r, grads_f)]
    return l_r + l_f, grads


def anchor_loss(prior, x_gen, positives, negatives):
    """N-pair loss of generated rows against positive and negative points in feature space."""
    rep = class_representation(prior, x_gen)
    pos = class_representation(prior, np.atleast_2d(positives))
    neg = class_representation(prior, np.atleast_2d(negatives))
    return npair_loss(rep, pos, neg)[0]


def score_weights(prior_out, cls, use_score):
    """Per-sample adversarial weights: 1 - C_o(x) for minority, C_o(x) for majority."""
    co = prior_out[:, 0]
    if not use_score:
        return np.ones_like(co)
    return 1.0 - co if cls == MINORITY else co.copy()


def generator_objective(model, cls, z, rng=None, positives=None, weights=None, gen=None):
    """Generator loss for class ``cls`` and its gradients.

    ``positives`` (centroid indices) and ``weights`` may be fixed by the
    caller; otherwise they are drawn/evaluated here.  The weights never
    receive gradient.  Returns ``(loss, grads, info)``.
    """
    cfg = model.config
    gen = gen or model.generator(cls)
    prior = model.prior
    d = model.d
    acts_g = forward(gen, z)
    x = acts_g[-1]
    xi, acts_p = discriminator_input(x, prior)
    if weights is None:
        weights = score_weights(acts_p[-1], cls, cfg.use_score_stabilization)
    m = x.shape[0]

    acts_d = forward(model.discriminator, xi)
    p = acts_d[-1]
    adv, dadv = neg_log(p) if cfg.nonsaturating_generator else log_one_minus(p)
    loss_adv = float(np.mean(weights[:, None] * adv))
    _, g_in = backward(model.discriminator, acts_d, weights[:, None] * dadv / m, param_grads=False)

    reps_min, reps_maj = model.centroid_reps()
    if cls == MINORITY:
        same_pts, same_reps, opp_reps, lam = model.centroids.minority_centroids, reps_min, reps_maj, cfg.lambda1
    else:
        same_pts, same_reps, opp_reps, lam = model.centroids.majority_centroids, reps_maj, reps_min, cfg.lambda2
    if positives is None:
        rng = rng if rng is not None else np.random.default_rng()
        positives = pick_positive(x, same_pts, rng, cfg.positive_candidates)
    rep = acts_p[REPRESENTATION_LAYER]
    loss_anchor, g_rep = npair_loss(rep, same_reps[positives], opp_reps)

    g_rep_total = g_in[:, d:] + lam * g_rep
    _, g_x_prior = backward(prior.net, acts_p, g_rep_total, top=REPRESENTATION_LAYER, param_grads=False)
    grads, _ = backward(gen, acts_g, g_in[:, :d] + g_x_prior)
    info = {"adversarial": loss_adv, "anchor": loss_anchor, "positives": positives, "weights": weights}
    return loss_adv + lam * loss_anchor, grads, info


def generator_loss_min(model, z, rng=None):
    return generator_objective(model, MINORITY, z, rng)[0]


def generator_loss_maj(model, z, rng=None):
    return generator_objective(model, MAJORITY, z, rng)[0]


def generate(gen, n, noise_dim, rng):
    return forward(gen, rng.standard_normal((n, noise_dim)))[-1]


def _run_phase(model, X, lr, epochs, rng, history, phase):
    cfg = model.config
    n = X.shape[0]
    m = min(cfg.batch_size, n)
    half = m // 2
    D = model.discriminator
    opt_d = Adam(D.parameters(), lr=lr)
    opt_min = Adam(model.gen_min.parameters(), lr=lr)
    opt_maj = Adam(model.gen_maj.parameters(), lr=lr)
    real_all, _ = discriminator_input(X, model.prior)
    start = len(history)
    for e in range(epochs):
        sums = np.zeros(3)
        try:
            for _ in range(cfg.batches_per_epoch):
                rows = rng.choice(n, size=m, replace=False)
                fake = np.vstack([
                    generate(model.gen_min, half, cfg.noise_dim, rng),
                    generate(model.gen_maj, m - half, cfg.noise_dim, rng),
                ])
                fake_in, _ = discriminator_input(fake, model.prior)
                ld, gd = discriminator_loss(D, real_all[rows], fake_in)
                opt_d.step(flat_grads(gd))

                z = rng.standard_normal((m, cfg.noise_dim))
                lmin, gmin, _ = generator_objective(model, MINORITY, z, rng)
                opt_min.step(flat_grads(gmin))

                z = rng.standard_normal((m, cfg.noise_dim))
                lmaj, gmaj, _ = generator_objective(model, MAJORITY, z, rng)
                opt_maj.step(flat_grads(gmaj))
                sums += (ld, lmin, lmaj)
        except DivergenceError as exc:
            raise DivergenceError(f"{phase} training diverged", epoch=start + e) from exc
        means = sums / cfg.batches_per_epoch
        if not np.all(np.isfinite(means)):
            raise DivergenceError(f"{phase} training diverged", epoch=start + e)
        history.append({"phase": phase, "epoch": start + e, "d_loss": float(means[0]),
                        "g_min_loss": float(means[1]), "g_maj_loss": float(means[2])})
        if (e + 1) % 100 == 0 or e + 1 == epochs:
            log.info("%s epoch %d/%d  D %.4f  Gmin %.4f  Gmaj %.4f", phase, e + 1, epochs, *means)
    return history


def _phase_rng(cfg, phase_id):
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, phase_id]))


def train(model, X_clean, history=None):
    """Main adversarial training on the cleaned training rows (normalised space).

    Each epoch runs ``batches_per_epoch`` rounds of one discriminator step,
    one minority-generator step and one majority-generator step.
    Returns the per-epoch loss history (a list of dicts).
    """
    history = [] if history is None else history
    cfg = model.config
    if cfg.epochs_main == 0:
        return history
    X = np.asarray(X_clean, dtype=np.float64)
    if len(X) == 0:
        raise ValueError("no training rows")
    return _run_phase(model, X, cfg.lr_main, cfg.epochs_main, _phase_rng(cfg, 1), history, "main")


def finetune(model, X_anchors, history=None):
    """Continue the same loop on the cleaned anchors at the finetuning rate."""
    history = [] if history is None else history
    cfg = model.config
    if cfg.epochs_finetune == 0:
        return history
    X = np.asarray(X_anchors, dtype=np.float64)
    if len(X) == 0:
        warnings.warn("no cleaned anchors; skipping finetuning", RuntimeWarning, stacklevel=2)
        return history
    return _run_phase(model, X, cfg.lr_finetune, cfg.epochs_finetune, _phase_rng(cfg, 2), history, "finetune")


def generate_minority(model, m, seed):
    """``m`` synthetic minority rows in normalised [0, 1] space."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 3]))
    if m <= 0:
        return np.empty((0, model.d))
    return generate(model.gen_min, m, model.noise_dim, rng)


def oversample(model, train, seed=0):
    """Append ``#majority - #minority`` generated minority rows to the original train split."""
    m = train.n_majority - train.n_minority
    if m <= 0:
        return train
    x = generate_minority(model, m, seed)
    return train.append_minority(invert_scaler(model.scaler, x))
