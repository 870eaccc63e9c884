"""Dirac-GAN toy dynamics with an optional score-weighted generator update.

Real data sits at 0, the generator at ``theta`` and the discriminator is
``D(x) = psi * x``.  With ``l(t) = -log(1 + exp(-t))`` the discriminator
ascends and the generator descends ``l(psi * theta)``, alternating, D first.
"""

import csv
from dataclasses import dataclass, replace

import numpy as np


def loss_fn(t):
    return -np.logaddexp(0.0, -t)


def loss_grad(t):
    # d/dt -log(1 + e^-t) = sigmoid(-t)
    return 0.5 * (1.0 - np.tanh(0.5 * t))


def score(x):
    return np.exp(-abs(x))


@dataclass(frozen=True)
class DiracState:
    psi: float
    theta: float
    eta: float = 0.01
    use_score: bool = False
    # also differentiate through the score when it multiplies the generator loss
    differentiate_score: bool = False

    @property
    def radius(self):
        return float(np.hypot(self.psi, self.theta))


def dirac_step(state):
    if state.eta <= 0:
        raise ValueError("step size must be positive")
    psi = state.psi + state.eta * state.theta * loss_grad(state.psi * state.theta)
    theta = state.theta
    t = psi * theta
    s = score(theta) if state.use_score else 1.0
    grad = s * psi * loss_grad(t)
    if state.use_score and state.differentiate_score:
        grad += -np.sign(theta) * s * loss_fn(t)
    return replace(state, psi=float(psi), theta=float(theta - state.eta * grad))


def simulate_trajectory(init, eta, steps, use_score, differentiate_score=False):
    """``steps + 1`` rows of ``(psi, theta)``, starting with ``init``."""
    state = DiracState(float(init[0]), float(init[1]), eta, use_score, differentiate_score)
    out = np.empty((steps + 1, 2))
    out[0] = state.psi, state.theta
    for i in range(1, steps + 1):
        state = dirac_step(state)
        out[i] = state.psi, state.theta
    return out


def write_trajectory(traj, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "psi", "theta"])
        for i, (psi, theta) in enumerate(traj):
            w.writerow([i, format(psi, ".17g"), format(theta, ".17g")])


def conserved_quantity(psi, theta):
    """First integral of the continuous-time score-weighted flow.

    ``psi**2 / 2 + F(theta)`` with ``F' = theta * exp(|theta|)``; any update
    that only rescales the generator step by a function of ``theta`` keeps it
    constant, which is why that variant orbits instead of converging.
    """
    a = abs(theta)
    return 0.5 * psi ** 2 + (a - 1.0) * np.exp(a) + 1.0
