import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from optoqubit.dynamics import (
    MARGINAL_TOL,
    build_diffusion,
    build_drift,
    is_stable_eig,
    is_stable_rh,
    stability,
    stability_map,
    threshold_coupling,
)
from optoqubit.params import ReducedParams, baseline

params = st.builds(
    ReducedParams,
    delta=st.floats(-3, 3),
    kappa=st.floats(0.01, 3),
    gamma_m=st.floats(1e-6, 0.5),
    g_eff=st.floats(0, 2),
    eta=st.floats(0, 0.999),
    n_th=st.floats(0, 1e4),
)


def test_drift_entries_exact():
    p = ReducedParams(delta=0.5, kappa=0.5, gamma_m=1e-5, g_eff=0.6, eta=0.6)
    a = build_drift(p)
    assert a[1].tolist() == [-(1 - 0.6), -1e-5, 0.6, 0.0]
    assert a[0].tolist() == [0.0, 1.0, 0.0, 0.0]
    assert a[2].tolist() == [0.0, 0.0, -0.5, 0.5]
    assert a[3].tolist() == [0.6, 0.0, -0.5, -0.5]


def test_drift_uncoupled_is_block_diagonal():
    a = build_drift(baseline(g_eff=0.0))
    assert not a[:2, 2:].any() and not a[2:, :2].any()


def test_drift_free_particle_limit():
    assert build_drift(baseline(eta=1.0))[1, 0] == 0.0


def test_diffusion():
    d = build_diffusion(ReducedParams(delta=0.3, kappa=0.5, gamma_m=1e-5, g_eff=0.2, n_th=0.0))
    assert np.array_equal(d, np.diag([0.0, 1e-5, 0.5, 0.5]))
    d = build_diffusion(baseline(n_th=1250.0))
    assert d[1, 1] == pytest.approx(2.501e-2, rel=1e-12)
    assert np.array_equal(build_diffusion(baseline(delta=0.9, g_eff=0.1)), build_diffusion(baseline()))


def test_threshold_coupling_values():
    assert threshold_coupling(0.51, 0.5, 0.6) == pytest.approx(0.6325, abs=5e-4)
    assert threshold_coupling(0.8, 0.5, 0.0) == pytest.approx(math.sqrt((0.64 + 0.25) / 0.8), rel=1e-14)
    assert threshold_coupling(0.8, 0.5, 0.0) == pytest.approx(1.0547, abs=1e-4)
    assert threshold_coupling(0.5, 0.5, 1 - 1e-12) == pytest.approx(0.0, abs=1e-5)


def test_threshold_coupling_rejects_bad_domain():
    with pytest.raises(ValueError):
        threshold_coupling(0.0, 0.5, 0.2)
    with pytest.raises(ValueError):
        threshold_coupling(0.5, 0.5, 1.0)


def test_rh_examples():
    p = ReducedParams(delta=0.5, kappa=0.5, gamma_m=1e-5, g_eff=0.6, eta=0.6)
    assert is_stable_rh(p).stable
    assert not is_stable_rh(p.replace(g_eff=0.7)).stable
    assert is_stable_rh(p.replace(g_eff=0.0)).stable
    # condition 2 is the determinant of the drift matrix
    assert is_stable_rh(p).condition_2 == pytest.approx(np.linalg.det(build_drift(p)), rel=1e-12)


def test_rh_condition_1_is_hurwitz_determinant():
    p = ReducedParams(delta=-0.7, kappa=0.3, gamma_m=0.05, g_eff=0.4, eta=0.2)
    a1, a2, a3, a4 = np.poly(build_drift(p))[1:]
    assert is_stable_rh(p).condition_1 == pytest.approx(a1 * a2 * a3 - a3**2 - a1**2 * a4, rel=1e-10)


def test_eig_uncoupled_max_real_part():
    gm = 1e-5
    stable, max_re = is_stable_eig(build_drift(baseline(g_eff=0.0, gamma_m=gm)))
    assert stable
    # underdamped mirror: -gamma/2 exactly; the cavity sits at -kappa
    assert max_re == pytest.approx(-gm / 2, rel=1e-6)


def test_eig_free_particle_marginal():
    v = stability(baseline(eta=1.0, g_eff=0.0))
    assert v.marginal and not v.stable


@given(p=params)
def test_rh_agrees_with_eigenvalues(p):
    v = stability(p)
    assert v.method_agreement


@given(p=params)
def test_red_detuned_threshold_matches_eigenvalues(p):
    assume(p.delta > 1e-3)
    v = stability(p)
    g_thr = threshold_coupling(p.delta, p.kappa, p.eta)
    assume(abs(p.g_eff - g_thr) > 1e-6)
    assert v.stable == (p.g_eff < g_thr)


def test_stability_map_default_grid():
    deltas = np.linspace(0, 1.2, 241)
    gs = np.linspace(0, 1.2, 241)
    m0 = stability_map(deltas, gs, baseline(eta=0.0))
    m6 = stability_map(deltas, gs, baseline(eta=0.6))
    assert m0.disagreements == 0 and m6.disagreements == 0
    assert m0.stable[:, 0].all() and m6.stable[:, 0].all()
    assert m0.uniform_limit() == pytest.approx(1.0, abs=0.005)
    assert m6.uniform_limit() == pytest.approx(0.63, abs=0.005)
    # stronger softening only removes stable points
    assert not (m6.stable & ~m0.stable).any()


def test_stability_map_matches_pointwise_verdicts():
    deltas = np.linspace(-0.5, 1.2, 9)
    gs = np.linspace(0, 1.2, 7)
    t = baseline(eta=0.3)
    m = stability_map(deltas, gs, t)
    for i, d in enumerate(deltas):
        for j, g in enumerate(gs):
            v = stability(t.replace(delta=float(d), g_eff=float(g)))
            assert m.stable[i, j] == v.stable
            assert m.max_re_eig[i, j] == pytest.approx(v.max_real_eigenvalue, abs=1e-12)


def test_stability_map_threshold_consistency():
    deltas = np.linspace(0.05, 1.2, 47)
    gs = np.linspace(0, 1.2, 49)
    for eta in (0.0, 0.3, 0.6):
        m = stability_map(deltas, gs, baseline(eta=eta))
        for i, d in enumerate(deltas):
            g_thr = threshold_coupling(d, 0.5, eta)
            expected = gs < g_thr
            close = np.abs(gs - g_thr) < 1e-6
            assert np.array_equal(m.stable[i][~close], expected[~close])


def test_marginal_tolerance_constant():
    assert MARGINAL_TOL == 1e-9
