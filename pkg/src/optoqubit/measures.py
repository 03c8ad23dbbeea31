"""Correlation measures of a two-mode Gaussian state from its covariance matrix.

Convention: vacuum quadrature variance is 1/2, so physical symplectic
eigenvalues are >= 1/2. Logarithms are natural. Mode order is (mirror, cavity);
discord is for a Gaussian measurement on the cavity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GUARD = 1e-9
EPS = float(np.finfo(float).eps)
I3_ZERO = 1e-12


class UnphysicalStateError(ValueError):
    """Covariance data violates the uncertainty principle."""


@dataclass(frozen=True)
class SymplecticInvariants:
    i1: float  # det V_m
    i2: float  # det V_c
    i3: float  # det V_mc
    i4: float  # det V

    @property
    def sigma(self) -> float:
        return self.i1 + self.i2 + 2.0 * self.i3

    @property
    def sigma_pt(self) -> float:
        return self.i1 + self.i2 - 2.0 * self.i3


@dataclass(frozen=True)
class CorrelationReport:
    nu_plus: float
    nu_minus: float
    nu_tilde_minus: float
    e_n: float
    i_m: float
    d_g: float
    w: float
    w_branch: int  # 1: non-homodyne optimum, 2: the other case of the closed form


def _det2(m) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def invariants(v) -> SymplecticInvariants:
    v = np.asarray(v, dtype=float)
    return SymplecticInvariants(
        i1=_det2(v[:2, :2]),
        i2=_det2(v[2:, 2:]),
        i3=_det2(v[:2, 2:]),
        i4=float(np.linalg.det(v)),
    )


def _roots(s: float, inv: SymplecticInvariants) -> tuple[float, float]:
    # the two roots of x^2 - s x + i4, as squared symplectic eigenvalues
    i4 = inv.i4
    disc = s * s - 4.0 * i4
    # rounding in the determinants is amplified by the square root near a double
    # root (e.g. pure states); below this level the roots are degenerate
    noise = 1e3 * EPS * (abs(inv.i1) + abs(inv.i2) + 2.0 * abs(inv.i3)) ** 2
    if abs(disc) <= noise:
        disc = 0.0
    elif disc < 0:
        if disc < -GUARD * max(1.0, s * s):
            raise UnphysicalStateError(f"negative symplectic discriminant {disc:.3g}")
        disc = 0.0
    big = 0.5 * (s + math.sqrt(disc))
    if big <= 0:
        raise UnphysicalStateError("non-positive symplectic spectrum")
    # small root from the product to avoid cancellation when i4 << s^2
    return big, i4 / big


def _clamp(nu: float) -> float:
    if nu < 0.5:
        if nu < 0.5 - GUARD:
            raise UnphysicalStateError(f"symplectic eigenvalue {nu!r} below 1/2")
        return 0.5
    return nu


def symplectic_eigenvalues(inv: SymplecticInvariants) -> tuple[float, float]:
    """Return (nu_plus, nu_minus)."""
    big, small = _roots(inv.sigma, inv)
    return _clamp(math.sqrt(big)), _clamp(math.sqrt(max(small, 0.0)))


def log_negativity(inv: SymplecticInvariants) -> tuple[float, float]:
    """Return (E_N, nu_tilde_minus); the state is entangled iff nu_tilde_minus < 1/2."""
    _, small = _roots(inv.sigma_pt, inv)
    if small < 0:
        raise UnphysicalStateError("negative partially transposed spectrum")
    nu = math.sqrt(small)
    if 0.5 - GUARD <= nu < 0.5:
        nu = 0.5
    return max(0.0, -math.log(2.0 * nu)), nu


def f_function(x: float) -> float:
    """Von Neumann entropy of a single-mode thermal state with symplectic eigenvalue x."""
    if x < 0.5 - GUARD:
        raise UnphysicalStateError(f"f_function argument {x!r} below 1/2")
    if x <= 0.5:
        return 0.0
    hi, lo = x + 0.5, x - 0.5
    return hi * math.log(hi) - lo * math.log(lo)


def mutual_information(inv: SymplecticInvariants) -> float:
    nu_p, nu_m = symplectic_eigenvalues(inv)
    return _mutual_information(inv, nu_p, nu_m)


def _mutual_information(inv, nu_p, nu_m) -> float:
    return f_function(math.sqrt(inv.i1)) + f_function(math.sqrt(inv.i2)) - f_function(nu_p) - f_function(nu_m)


def conditional_determinant(inv: SymplecticInvariants, branch: int | None = None) -> tuple[float, int]:
    """Minimal determinant W of the mirror state after a Gaussian measurement on the cavity.

    Returns ``(W, branch)``. ``branch`` forces one closed form; by default the
    case split on 4(I1 I2 - I4)^2 <= (I1 + 4 I4)(1 + 4 I2) I3^2 picks it, and
    I3 ~ 0 goes to the second form, which is the correct limit there.
    """
    i1, i2, i3, i4 = inv.i1, inv.i2, inv.i3, inv.i4
    if branch is None:
        if i3 * i3 < I3_ZERO:
            branch = 2
        else:
            ratio = 4.0 * (i1 * i2 - i4) ** 2 / ((i1 + 4.0 * i4) * (1.0 + 4.0 * i2) * i3 * i3)
            branch = 1 if ratio <= 1.0 else 2
    if branch == 1:
        root = math.sqrt(max(4.0 * i3 * i3 + (4.0 * i2 - 1.0) * (4.0 * i4 - i1), 0.0))
        w = ((2.0 * abs(i3) + root) / (4.0 * i2 - 1.0)) ** 2
    else:
        b = i1 * i2 + i4 - i3 * i3
        root = math.sqrt(max(b * b - 4.0 * i1 * i2 * i4, 0.0))
        # (b - root) / (2 i2) rewritten through the product of roots
        w = 2.0 * i1 * i4 / (b + root)
    return w, branch


def gaussian_discord(inv: SymplecticInvariants) -> tuple[float, float, int]:
    """Return (D_G, W, branch) for a Gaussian measurement on the cavity mode."""
    nu_p, nu_m = symplectic_eigenvalues(inv)
    return _discord(inv, nu_p, nu_m)


def _discord(inv, nu_p, nu_m):
    w, branch = conditional_determinant(inv)
    if w < 0.25 - GUARD:
        raise UnphysicalStateError(f"conditional determinant W = {w:.6g} < 1/4")
    d_g = f_function(math.sqrt(inv.i2)) - f_function(nu_p) - f_function(nu_m) + f_function(math.sqrt(max(w, 0.25)))
    return d_g, w, branch


def report(v) -> CorrelationReport:
    """All correlation measures of ``v`` from one set of invariants."""
    inv = invariants(v)
    nu_p, nu_m = symplectic_eigenvalues(inv)
    e_n, nu_t = log_negativity(inv)
    i_m = _mutual_information(inv, nu_p, nu_m)
    d_g, w, branch = _discord(inv, nu_p, nu_m)
    return CorrelationReport(
        nu_plus=nu_p,
        nu_minus=nu_m,
        nu_tilde_minus=nu_t,
        e_n=e_n,
        i_m=max(i_m, 0.0) if i_m > -GUARD else i_m,
        d_g=max(d_g, 0.0) if d_g > -GUARD else d_g,
        w=w,
        w_branch=branch,
    )
