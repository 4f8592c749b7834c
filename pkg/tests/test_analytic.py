import math

import mpmath as mp
import numpy as np
import pytest

from gammaproc import (
    Dependence,
    GammaParams,
    ParameterError,
    ProcessKind,
    TestFunction,
    TimeGrid,
    UnsupportedKindError,
    cir_transition_density,
    gamma_chf,
    gamma_survival,
    generator_apply,
    innovation_chf,
    levy_tail,
    log_bessel_i,
    make_uniform_grid,
    pair_chf,
    rm_joint_chf,
)

P11 = GammaParams(1.0, 1.0)
DEP5 = Dependence.from_rho(0.5)


def test_gamma_chf_against_direct_formula():
    p = GammaParams(2.5, 2.0)
    for w in (-3.0, -0.5, 0.0, 0.4, 2.0):
        expected = (1.0 - 1j * w / p.beta) ** (-p.alpha)
        assert gamma_chf(w, p) == pytest.approx(expected, rel=1e-14)
    assert gamma_chf(0.0, p) == 1.0 + 0.0j


def test_gamma_chf_vectorized():
    p = GammaParams(0.7, 1.3)
    w = np.array([-1.0, 0.0, 2.0])
    out = gamma_chf(w, p)
    assert out.shape == (3,)
    assert out[1] == 1.0 + 0.0j


def test_innovation_chf_ratio_form():
    # chf of the AR(1) innovation: [ (1 - i w/beta) / (1 - i rho w / beta) ]^{-alpha}
    p = GammaParams(2.0, 1.0)
    rho = 0.3
    for w in (0.25, 1.0, -2.0):
        expected = ((1.0 - 1j * w / p.beta) / (1.0 - 1j * rho * w / p.beta)) ** (-p.alpha)
        assert innovation_chf(w, p, rho) == pytest.approx(expected, rel=1e-13)
    # stationarity identity: chf_X(w) = chf_X(rho w) * chf_innov(w)
    for w in (0.5, 2.0):
        lhs = gamma_chf(w, p)
        rhs = gamma_chf(rho * w, p) * innovation_chf(w, p, rho)
        assert lhs == pytest.approx(rhs, rel=1e-13)


def test_pair_chf_margins_reduce_to_gamma_chf():
    kinds = [ProcessKind.AR1, ProcessKind.THINNED, ProcessKind.RANDOM_MEASURE,
             ProcessKind.CHANGE_POINT, ProcessKind.SQUARED_OU]
    for kind in kinds:
        for w in (0.5, -1.5):
            assert pair_chf(kind, w, 0.0, P11, DEP5) == pytest.approx(gamma_chf(w, P11), abs=1e-12)
            assert pair_chf(kind, 0.0, w, P11, DEP5) == pytest.approx(gamma_chf(w, P11), abs=1e-12)


def test_pair_chf_changepoint_worked_value():
    # mixture form at s=t=1, alpha=beta=1, rho=0.5:
    # 0.5 * (1-2i)^{-1} + 0.5 * (1-i)^{-2} = 0.1 + 0.45i
    val = pair_chf(ProcessKind.CHANGE_POINT, 1.0, 1.0, P11, DEP5)
    assert val == pytest.approx(0.1 + 0.45j, abs=1e-15)


def test_pair_chf_thinned_equals_random_measure():
    rng = np.random.default_rng(2026)
    args = rng.uniform(-4.0, 4.0, size=(200, 2))
    for s, t in args:
        a = pair_chf(ProcessKind.THINNED, s, t, P11, DEP5)
        b = pair_chf(ProcessKind.RANDOM_MEASURE, s, t, P11, DEP5)
        assert abs(a - b) < 1e-14


def test_pair_chf_squared_ou_quadratic_form():
    p = GammaParams(1.5, 2.0)
    dep = Dependence.from_rho(0.7)
    for s, t in ((0.5, 1.0), (-1.0, 2.0)):
        rho = dep.rho
        expected = (1.0 - 1j * (s + t) / p.beta - s * t * (1.0 - rho) / p.beta**2) ** (-p.alpha)
        assert pair_chf(ProcessKind.SQUARED_OU, s, t, p, dep) == pytest.approx(expected, rel=1e-13)


def test_pair_chf_cthin_unsupported():
    with pytest.raises(UnsupportedKindError):
        pair_chf(ProcessKind.CONTINUOUSLY_THINNED, 1.0, 1.0, P11, DEP5)


def test_rm_joint_chf_singleton_is_gamma_chf():
    g = TimeGrid(np.array([0.0]))
    for w in (0.5, -2.0):
        val = rm_joint_chf(np.array([w]), g, P11, DEP5)
        assert val == pytest.approx(gamma_chf(w, P11), rel=1e-14)


def test_rm_joint_chf_factorizes_at_large_separation():
    # tent overlap decays like rho^gap, so far-apart points are nearly independent
    g = TimeGrid(np.array([0.0, 80.0]))
    val = rm_joint_chf(np.array([1.0, 1.0]), g, P11, DEP5)
    indep = gamma_chf(1.0, P11) ** 2
    assert val == pytest.approx(indep, abs=1e-12)


@pytest.mark.parametrize("q", [-0.5, 0.0, 0.5, 1.0, 2.5, 4.0])
@pytest.mark.parametrize("x", [1e-3, 0.1, 1.0, 10.0, 40.0, 200.0, 700.0])
def test_log_bessel_i_against_mpmath(q, x):
    mp.mp.dps = 40
    ref = float(mp.log(mp.besseli(q, x)))
    got = log_bessel_i(q, x)
    assert got == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_cir_transition_density_from_zero_state():
    # from x=0 the transition is a pure gamma: c^alpha y^(alpha-1) e^(-c y)/Gamma(alpha)
    p = GammaParams(1.5, 2.0)
    dep = Dependence.from_rho(0.5)
    dt = 0.7
    rho_d = dep.gap_corr(dt)
    c = p.beta / (1.0 - rho_d)
    y = 0.8
    expected = c**p.alpha * y ** (p.alpha - 1.0) * math.exp(-c * y) / math.gamma(p.alpha)
    assert cir_transition_density(y, 0.0, p, dep, dt) == pytest.approx(expected, rel=1e-12)


def test_cir_transition_density_poisson_mixture_identity():
    # density equals sum_k Poisson(k; c x rho_d) * Gamma(y; alpha + k, c)
    p = GammaParams(1.2, 1.0)
    dep = Dependence.from_rho(0.6)
    dt, x, y = 0.5, 1.7, 0.9
    rho_d = dep.gap_corr(dt)
    c = p.beta / (1.0 - rho_d)
    lam_mix = c * x * rho_d
    mp.mp.dps = 30
    total = mp.mpf(0)
    for k in range(200):
        w = mp.e ** (-lam_mix) * mp.mpf(lam_mix) ** k / mp.factorial(k)
        dens = mp.mpf(c) ** (p.alpha + k) * mp.mpf(y) ** (p.alpha + k - 1) \
            * mp.e ** (-c * y) / mp.gamma(p.alpha + k)
        total += w * dens
    got = cir_transition_density(y, x, p, dep, dt)
    assert got == pytest.approx(float(total), rel=1e-11)


def test_test_function_remainders_match_definition():
    x, u = 1.7, 0.4
    for f in (TestFunction.identity(), TestFunction.square(), TestFunction.exponential(-0.8)):
        up = f.phi(x + u) - f.phi(x) - u * f.dphi(x)
        down = f.phi(x - u) - f.phi(x) + u * f.dphi(x)
        assert f.remainder_up(x, u) == pytest.approx(up, rel=1e-9, abs=1e-12)
        assert f.remainder_down(x, u) == pytest.approx(down, rel=1e-9, abs=1e-12)


def test_test_function_exponential_requires_nonpositive_theta():
    with pytest.raises(ParameterError):
        TestFunction.exponential(0.5)


def test_generator_identity_closed_form_both_kinds():
    # A id(x) = -lam (x - alpha/beta) for both generators
    p = GammaParams(2.0, 3.0)
    dep = Dependence.from_rho(0.4)
    f = TestFunction.identity()
    for x in (0.1, 1.0, 5.0):
        expected = -dep.lam * (x - p.mean)
        got_ou = generator_apply(ProcessKind.SQUARED_OU, f, x, p, dep)
        got_ct = generator_apply(ProcessKind.CONTINUOUSLY_THINNED, f, x, p, dep)
        assert got_ou == pytest.approx(expected, rel=1e-12)
        assert got_ct == pytest.approx(expected, rel=1e-9)


def test_generator_square_closed_forms():
    # squared OU: A x^2 = -2 lam x (x - alpha/beta) + 2 (lam/beta) x
    #   at alpha=beta=1, x=2: -2 lam 2 (2-1) + 2 lam 2 = 0
    f = TestFunction.square()
    assert generator_apply(ProcessKind.SQUARED_OU, f, 2.0, P11, DEP5) == pytest.approx(0.0, abs=1e-14)
    # continuously thinned at the same point: lam (alpha + 1)/beta^2 + 2 lam x alpha/beta
    #   - lam x^2 (2 - 1/(alpha+1)) ... = -lam for alpha=beta=1, x=2
    got = generator_apply(ProcessKind.CONTINUOUSLY_THINNED, f, 2.0, P11, DEP5)
    assert got == pytest.approx(-DEP5.lam, rel=1e-10)


def test_generator_unsupported_kind():
    with pytest.raises(ParameterError):
        generator_apply(ProcessKind.AR1, TestFunction.identity(), 1.0, P11, DEP5)


def test_levy_tail_and_survival_against_mpmath():
    mp.mp.dps = 40
    p = GammaParams(1.5, 2.0)
    for u in (0.5, 2.0, 10.0):
        lt = levy_tail(u, p)
        ref_exact = float(p.alpha * mp.e1(p.beta * u))
        ref_surv = float(mp.gammainc(p.alpha, p.beta * u, mp.inf, regularized=True))
        assert lt.exact == pytest.approx(ref_exact, rel=1e-13)
        assert lt.approximant == pytest.approx(
            p.alpha / (p.beta * u) * math.exp(-p.beta * u), rel=1e-13
        )
        assert gamma_survival(u, p) == pytest.approx(ref_surv, rel=1e-13)


def test_tail_argument_validation():
    assert gamma_survival(0.0, P11) == 1.0
    with pytest.raises(ParameterError):
        gamma_survival(-1.0, P11)
    with pytest.raises(ParameterError):
        levy_tail(0.0, P11)
