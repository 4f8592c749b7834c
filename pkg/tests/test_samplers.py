import numpy as np
import pytest

from gammaproc import Dependence, GammaParams, ParameterError, derive_stream
from gammaproc.samplers import (
    beta_draw,
    cir_transition_draw,
    gamma_draw,
    poisson_draw,
    walker_innovation_draw,
)


def test_gamma_draw_zero_shape_is_exact_zero():
    rng = derive_stream(0, 0)
    assert gamma_draw(rng, 0.0, 2.0) == 0.0
    vals = gamma_draw(rng, np.array([0.0, 1.0, 0.0]), 1.0)
    assert vals[0] == 0.0 and vals[2] == 0.0 and vals[1] > 0.0


def test_gamma_draw_moments():
    rng = derive_stream(42, 0)
    x = gamma_draw(rng, 2.5, 2.0, size=200000)
    assert abs(np.mean(x) - 1.25) < 4 * np.std(x) / np.sqrt(x.size)
    assert np.all(x >= 0.0)


def test_gamma_draw_rejects_bad_args():
    rng = derive_stream(0, 0)
    with pytest.raises(ParameterError):
        gamma_draw(rng, -1.0, 1.0)
    with pytest.raises(ParameterError):
        gamma_draw(rng, 1.0, 0.0)


def test_beta_draw_range_and_moments():
    rng = derive_stream(7, 0)
    a, b = 0.8, 1.6
    x = beta_draw(rng, a, b, size=200000)
    assert np.all((x >= 0.0) & (x <= 1.0))
    target = a / (a + b)
    assert abs(np.mean(x) - target) < 4 * np.std(x) / np.sqrt(x.size)


def test_poisson_draw_mean():
    rng = derive_stream(5, 0)
    k = poisson_draw(rng, 3.7, size=200000)
    assert abs(np.mean(k) - 3.7) < 4 * np.sqrt(3.7 / k.size)


def test_walker_innovation_zero_atom_probability():
    # P(innovation = 0) = P(N = 0) = E[exp(-(1-rho)/rho L)] = rho^alpha
    params = GammaParams(2.0, 1.0)
    rho = 0.3
    rng = derive_stream(11, 0)
    n = 20000
    zeros = 0
    for _ in range(n):
        tr = walker_innovation_draw(rng, params, rho)
        if tr.count == 0:
            assert tr.value == 0.0
            zeros += 1
        else:
            assert tr.value > 0.0
        assert tr.mixing > 0.0
    p_hat = zeros / n
    p = rho**params.alpha
    assert abs(p_hat - p) < 4 * np.sqrt(p * (1 - p) / n)


def test_walker_innovation_rejects_bad_rho():
    rng = derive_stream(0, 0)
    params = GammaParams(1.0, 1.0)
    for rho in (0.0, 1.0, 1.2):
        with pytest.raises(ParameterError):
            walker_innovation_draw(rng, params, rho)


def test_cir_transition_conditional_mean():
    # E[X_dt | X_0 = x] = x rho_d + (alpha/beta)(1 - rho_d)
    params = GammaParams(1.5, 2.0)
    dep = Dependence.from_rho(0.5)
    x0, dt = 2.0, 0.7
    rho_d = dep.gap_corr(dt)
    rng = derive_stream(3, 0)
    n = 20000
    draws = np.array([cir_transition_draw(rng, params, dep, x0, dt) for _ in range(n)])
    target = x0 * rho_d + params.mean * (1.0 - rho_d)
    assert np.all(draws >= 0.0)
    assert abs(np.mean(draws) - target) < 4 * np.std(draws) / np.sqrt(n)


def test_cir_transition_rejects_negative_state():
    rng = derive_stream(0, 0)
    with pytest.raises(ParameterError):
        cir_transition_draw(rng, GammaParams(1.0, 1.0), Dependence.from_rho(0.5), -0.1, 1.0)
