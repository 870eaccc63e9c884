import math

import numpy as np
import pytest

from anchscgan.dirac import (DiracState, conserved_quantity, dirac_step, loss_fn, loss_grad, score,
                             simulate_trajectory, write_trajectory)


def test_loss_and_derivative():
    t = np.linspace(-30, 30, 13)
    np.testing.assert_allclose(loss_fn(t), -np.log1p(np.exp(-t)), rtol=1e-12)
    h = 1e-6
    np.testing.assert_allclose(loss_grad(t), (loss_fn(t + h) - loss_fn(t - h)) / (2 * h), atol=1e-8)
    assert loss_grad(0.0) == 0.5


def test_single_step_by_hand():
    # [DERIVED] one alternating step from (1, 1) with eta = 0.1
    s = dirac_step(DiracState(1.0, 1.0, 0.1))
    psi = 1.0 + 0.1 * 1.0 / (1.0 + math.exp(1.0))
    theta = 1.0 - 0.1 * psi / (1.0 + math.exp(psi))
    assert s.psi == pytest.approx(psi, rel=1e-15)
    assert s.theta == pytest.approx(theta, rel=1e-15)
    w = dirac_step(DiracState(1.0, 1.0, 0.1, use_score=True))
    assert w.theta == pytest.approx(1.0 - 0.1 * math.exp(-1.0) * psi / (1.0 + math.exp(psi)), rel=1e-15)


def test_equilibrium_is_fixed():
    s = DiracState(0.0, 0.0, 0.05, use_score=True)
    t = dirac_step(s)
    assert (t.psi, t.theta) == (0.0, 0.0)


def test_plain_dynamics_do_not_converge():
    traj = simulate_trajectory((1.0, 1.0), 0.01, 10000, use_score=False)
    assert traj.shape == (10001, 2)
    assert np.hypot(*traj[-1]) >= 0.9 * math.sqrt(2.0)


def test_constant_score_weight_conserves_first_integral():
    # the score-weighted flow keeps psi^2/2 + F(theta) fixed; the discrete
    # scheme drifts only at O(eta) over the run
    for eta in (0.01, 0.001):
        traj = simulate_trajectory((1.0, 1.0), eta, int(20 / eta), use_score=True)
        H = conserved_quantity(traj[:, 0], traj[:, 1])
        assert np.ptp(H) < 60 * eta


def test_differentiating_through_score_converges_from_negative_psi():
    traj = simulate_trajectory((-1.0, 1.0), 0.01, 10000, use_score=True, differentiate_score=True)
    assert np.hypot(*traj[-1]) < 0.1


def test_step_size_must_be_positive():
    with pytest.raises(ValueError):
        dirac_step(DiracState(1.0, 1.0, 0.0))


def test_score_shape():
    assert score(0.0) == 1.0
    assert score(-2.0) == score(2.0) == pytest.approx(math.exp(-2.0))


def test_trajectory_csv(tmp_path):
    traj = simulate_trajectory((0.5, -0.25), 0.1, 3, use_score=False)
    path = tmp_path / "t.csv"
    write_trajectory(traj, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "step,psi,theta"
    assert len(lines) == 5
    assert lines[1] == "0,0.5,-0.25"
    back = np.loadtxt(str(path), delimiter=",", skiprows=1)
    assert np.array_equal(back[:, 1:], traj)
