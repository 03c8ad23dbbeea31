import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import (
    discord_by_minimisation,
    entropy,
    local_symplectic,
    pt_nu_minus,
    random_physical_cm,
    symplectic_spectrum,
    two_mode_squeezed,
)

from optoqubit.measures import (
    UnphysicalStateError,
    conditional_determinant,
    f_function,
    gaussian_discord,
    invariants,
    log_negativity,
    mutual_information,
    report,
    symplectic_eigenvalues,
)

VACUUM = 0.5 * np.eye(4)


def product_state(n1, n2):
    return np.diag([n1, n1, n2, n2])


def test_invariants_vacuum_and_product():
    inv = invariants(VACUUM)
    assert (inv.i1, inv.i2, inv.i3) == (0.25, 0.25, 0.0)
    assert inv.i4 == pytest.approx(1 / 16, rel=1e-15)
    v = np.block([[np.array([[2.0, 0.3], [0.3, 1.0]]), np.zeros((2, 2))], [np.zeros((2, 2)), 0.7 * np.eye(2)]])
    inv = invariants(v)
    assert inv.i3 == 0.0
    assert inv.i4 == pytest.approx(inv.i1 * inv.i2, rel=1e-14)


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0])
def test_invariants_two_mode_squeezed(r):
    inv = invariants(two_mode_squeezed(r))
    assert inv.i1 == pytest.approx(math.cosh(2 * r) ** 2 / 4, rel=1e-14)
    assert inv.i2 == pytest.approx(math.cosh(2 * r) ** 2 / 4, rel=1e-14)
    assert inv.i3 == pytest.approx(-math.sinh(2 * r) ** 2 / 4, rel=1e-14)
    assert inv.i4 == pytest.approx(1 / 16, rel=1e-9)


def test_symplectic_eigenvalues_simple_states():
    assert symplectic_eigenvalues(invariants(VACUUM)) == (0.5, 0.5)
    nu_p, nu_m = symplectic_eigenvalues(invariants(two_mode_squeezed(0.8)))
    assert (nu_p, nu_m) == pytest.approx((0.5, 0.5), abs=1e-9)
    n = 3.0
    nu_p, nu_m = symplectic_eigenvalues(invariants(product_state((2 * n + 1) / 2, 0.5)))
    assert (nu_p, nu_m) == pytest.approx(((2 * n + 1) / 2, 0.5), rel=1e-14)


def test_symplectic_eigenvalues_match_spectral_oracle(rng):
    for _ in range(30):
        v = random_physical_cm(rng)
        nu_p, nu_m = symplectic_eigenvalues(invariants(v))
        ref = symplectic_spectrum(v)
        assert (nu_m, nu_p) == pytest.approx(tuple(ref), abs=1e-10)


@pytest.mark.parametrize("r", [0.1, 0.5, 1.0])
def test_two_mode_squeezed_closed_forms(r):
    inv = invariants(two_mode_squeezed(r))
    e_n, nu_t = log_negativity(inv)
    assert e_n == pytest.approx(2 * r, abs=1e-9)
    assert nu_t == pytest.approx(math.exp(-2 * r) / 2, abs=1e-9)
    assert mutual_information(inv) == pytest.approx(2 * entropy(math.cosh(2 * r) / 2), abs=1e-9)


def test_product_states_carry_no_correlation():
    for n1, n2 in [(0.5, 0.5), (3.0, 0.5), (1.2, 7.5)]:
        r = report(product_state(n1, n2))
        assert r.e_n == 0.0
        assert r.i_m == pytest.approx(0.0, abs=1e-12)
        assert r.d_g == pytest.approx(0.0, abs=1e-12)
        assert r.w == pytest.approx(n1 * n1, rel=1e-12)


def test_vacuum_report():
    r = report(VACUUM)
    assert (r.e_n, r.i_m, r.d_g) == (0.0, 0.0, 0.0)
    assert r.nu_tilde_minus == 0.5


def test_f_function_values():
    assert f_function(0.5) == 0.0
    assert f_function(1.5) == pytest.approx(2 * math.log(2), rel=1e-15)
    with pytest.raises(UnphysicalStateError):
        f_function(0.4)


def test_f_function_increasing_and_concave():
    xs = np.linspace(0.5 + 1e-6, 50, 4001)
    ys = np.array([f_function(x) for x in xs])
    assert (np.diff(ys) > 0).all()
    assert (np.diff(ys, 2) < 0).all()


def test_pt_eigenvalue_matches_momentum_flip_oracle(rng):
    for _ in range(50):
        v = random_physical_cm(rng)
        _, nu_t = log_negativity(invariants(v))
        assert nu_t == pytest.approx(pt_nu_minus(v), abs=1e-10)


def test_simon_boundary():
    # E_N vanishes exactly when the PT eigenvalue is at least 1/2
    for r in [0.0, 1e-6, 0.3]:
        e_n, nu_t = log_negativity(invariants(two_mode_squeezed(r)))
        assert (e_n == 0.0) == (nu_t >= 0.5)


def test_discord_matches_measurement_minimisation(rng):
    branches = set()
    for _ in range(20):
        v = random_physical_cm(rng)
        d_g, _, branch = gaussian_discord(invariants(v))
        branches.add(branch)
        assert d_g == pytest.approx(discord_by_minimisation(v), abs=1e-4)
    assert branches == {1, 2}


def _standard_form(a, b, c1, c2):
    return np.array([[a, 0, c1, 0], [0, a, 0, c2], [c1, 0, b, 0], [0, c2, 0, b]])


def _guard_ratio(inv):
    return 4 * (inv.i1 * inv.i2 - inv.i4) ** 2 / ((inv.i1 + 4 * inv.i4) * (1 + 4 * inv.i2) * inv.i3**2)


def test_discord_branches_meet_on_switching_surface(rng):
    found = 0
    while found < 20:
        a, b = rng.uniform(0.6, 3, 2)
        c1 = rng.uniform(0.05, 1) * math.sqrt((a - 0.5) * (b - 0.5))
        cs = np.linspace(1e-3 * c1, c1, 200)
        vals = []
        for c2 in cs:
            v = _standard_form(a, b, c1, c2)
            vals.append(_guard_ratio(invariants(v)) - 1 if symplectic_spectrum(v)[0] >= 0.5 else np.nan)
        vals = np.array(vals)
        for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
            lo, hi = cs[i], cs[i + 1]
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if np.sign(_guard_ratio(invariants(_standard_form(a, b, c1, mid))) - 1) == np.sign(vals[i]):
                    lo = mid
                else:
                    hi = mid
            inv = invariants(_standard_form(a, b, c1, 0.5 * (lo + hi)))
            w1, _ = conditional_determinant(inv, 1)
            w2, _ = conditional_determinant(inv, 2)
            assert w1 == pytest.approx(w2, abs=1e-6)
            found += 1


def test_zero_i3_routes_to_limit_branch():
    v = product_state(2.0, 1.5)
    v[0, 2] = v[2, 0] = 1e-8  # tiny correlation keeps I3 ~ 0
    w, branch = conditional_determinant(invariants(v))
    assert branch == 2
    assert w == pytest.approx(4.0, rel=1e-6)


def _local(v, tm, rm, tc, rc):
    s = np.zeros((4, 4))
    s[:2, :2] = local_symplectic(tm, rm)
    s[2:, 2:] = local_symplectic(tc, rc)
    return s @ v @ s.T


@given(
    tm=st.floats(0, 2 * math.pi),
    rm=st.floats(-1, 1),
    tc=st.floats(0, 2 * math.pi),
    rc=st.floats(-1, 1),
    seed=st.integers(0, 2**32 - 1),
)
def test_local_symplectic_invariance(tm, rm, tc, rc, seed):
    v = random_physical_cm(np.random.default_rng(seed))
    r0 = report(v)
    r1 = report(_local(v, tm, rm, tc, rc))
    for name in ("e_n", "i_m", "d_g", "nu_plus", "nu_minus", "nu_tilde_minus"):
        assert getattr(r1, name) == pytest.approx(getattr(r0, name), abs=1e-10)


@given(seed=st.integers(0, 2**32 - 1))
def test_measure_bounds(seed):
    r = report(random_physical_cm(np.random.default_rng(seed)))
    assert r.nu_minus >= 0.5 - 1e-9 and r.nu_plus >= r.nu_minus
    assert r.e_n >= 0 and r.i_m >= 0 and r.d_g >= 0
    assert r.d_g <= r.i_m + 1e-12
    assert r.w >= 0.25 - 1e-9


def test_unphysical_state_rejected():
    v = 0.2 * np.eye(4)
    with pytest.raises(UnphysicalStateError):
        report(v)
