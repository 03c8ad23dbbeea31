"""Linearised fluctuation dynamics: drift, diffusion and stability.

Basis ordering throughout is (dq, dp, dX, dY): mirror position and momentum,
then the amplitude and phase quadratures of the cavity field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ReducedParams

MARGINAL_TOL = 1e-9


def build_drift(p: ReducedParams) -> np.ndarray:
    G, d, k = p.g_eff, p.delta, p.kappa
    return np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [-(1.0 - p.eta), -p.gamma_m, G, 0.0],
            [0.0, 0.0, -k, d],
            [G, 0.0, -d, -k],
        ]
    )


def build_diffusion(p: ReducedParams) -> np.ndarray:
    """Diagonal noise matrix Diag[0, gamma_m (2 n_th + 1), kappa, kappa]."""
    return np.diag([0.0, p.gamma_m * (2.0 * p.n_th + 1.0), p.kappa, p.kappa])


def threshold_coupling(delta: float, kappa: float, eta: float) -> float:
    """Largest stable G for red detuning: sqrt((delta^2 + kappa^2)(1 - eta) / delta)."""
    if delta <= 0:
        raise ValueError("threshold formula needs delta > 0; use the eigenvalue check instead")
    if eta >= 1:
        raise ValueError(f"eta = {eta} >= 1 leaves no restoring force")
    return math.sqrt((delta**2 + kappa**2) * (1.0 - eta) / delta)


@dataclass(frozen=True)
class RouthHurwitz:
    stable: bool
    condition_1: float
    condition_2: float


def _rh_margins(d, k, gm, G, eta):
    # Hurwitz quantities of lambda^4 + a1 lambda^3 + a2 lambda^2 + a3 lambda + a4; works on arrays
    d2 = d * d
    c1 = (
        2.0 * gm * k * (d2 * d2 + d2 * (gm**2 + 2 * gm * k + 2 * k**2 - 2.0) + (gm * k + k**2 + 1.0) ** 2)
        + G**2 * d * (gm + 2 * k) ** 2
        + 4.0 * eta * gm * k * (d2 - gm * k - k**2 - 1.0)
        + 2.0 * eta**2 * gm * k
    )
    c2 = (d2 + k**2) - eta * (d2 + k**2) - G**2 * d
    a1 = gm + 2 * k
    a3 = 2 * k * (1.0 - eta) + gm * (d2 + k**2)
    return c1, c2, (c1 > 0) & (c2 > 0) & (a1 > 0) & (a3 > 0)


def is_stable_rh(p: ReducedParams) -> RouthHurwitz:
    """Routh-Hurwitz margins of the drift matrix's characteristic quartic.

    ``condition_1`` is the Hurwitz determinant a1 a2 a3 - a3^2 - a1^2 a4 and
    ``condition_2`` is a4 = det(A); stability requires both to be positive.
    The remaining Hurwitz requirements (a1 > 0, a3 > 0) hold whenever eta < 1
    and are checked but not reported.
    """
    c1, c2, ok = _rh_margins(p.delta, p.kappa, p.gamma_m, p.g_eff, p.eta)
    return RouthHurwitz(stable=bool(ok), condition_1=float(c1), condition_2=float(c2))


def is_stable_eig(a: np.ndarray) -> tuple[bool, float]:
    """Stable iff every eigenvalue of ``a`` lies strictly left of -1e-9."""
    max_re = float(np.max(np.linalg.eigvals(a).real))
    return max_re < -MARGINAL_TOL, max_re


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    marginal: bool
    rh_condition_1: float
    rh_condition_2: float
    max_real_eigenvalue: float
    method_agreement: bool


def stability(p: ReducedParams) -> StabilityVerdict:
    """Eigenvalue verdict (authoritative) cross-checked against Routh-Hurwitz."""
    stable, max_re = is_stable_eig(build_drift(p))
    rh = is_stable_rh(p)
    near_edge = (
        abs(max_re) <= MARGINAL_TOL or abs(rh.condition_1) <= MARGINAL_TOL or abs(rh.condition_2) <= MARGINAL_TOL
    )
    return StabilityVerdict(
        stable=stable,
        marginal=abs(max_re) <= MARGINAL_TOL,
        rh_condition_1=rh.condition_1,
        rh_condition_2=rh.condition_2,
        max_real_eigenvalue=max_re,
        method_agreement=near_edge or rh.stable == stable,
    )


@dataclass
class StabilityMap:
    deltas: np.ndarray
    couplings: np.ndarray
    stable: np.ndarray  # bool, shape (len(deltas), len(couplings))
    max_re_eig: np.ndarray
    disagreements: int

    def rows(self):
        for i, d in enumerate(self.deltas):
            for j, g in enumerate(self.couplings):
                yield float(d), float(g), bool(self.stable[i, j]), float(self.max_re_eig[i, j])

    def uniform_limit(self) -> float:
        """Coupling at which the first red-detuned grid row turns unstable.

        This is the extent of the stable band over the widest part of the map,
        estimated as the midpoint between the last coupling stable on every row
        and the next grid value. NaN if G = 0 is already unstable; the largest
        grid coupling if nothing turns unstable.
        """
        red = self.deltas > 0
        column_ok = np.all(self.stable[red], axis=0)
        if not column_ok[0]:
            return float("nan")
        if column_ok.all():
            return float(self.couplings[-1])
        first_bad = int(np.argmin(column_ok))
        return float(0.5 * (self.couplings[first_bad - 1] + self.couplings[first_bad]))


def stability_map(deltas, couplings, template: ReducedParams) -> StabilityMap:
    """Grid verdicts over (delta, G); eigenvalues decide, RH disagreements are counted.

    Row index runs over ``deltas`` and column index over ``couplings``.
    """
    deltas = np.asarray(deltas, dtype=float)
    couplings = np.asarray(couplings, dtype=float)
    dd, gg = np.meshgrid(deltas, couplings, indexing="ij")
    t = template
    drift = np.zeros(dd.shape + (4, 4))
    drift[..., 0, 1] = 1.0
    drift[..., 1, 0] = -(1.0 - t.eta)
    drift[..., 1, 1] = -t.gamma_m
    drift[..., 1, 2] = gg
    drift[..., 2, 2] = -t.kappa
    drift[..., 2, 3] = dd
    drift[..., 3, 0] = gg
    drift[..., 3, 2] = -dd
    drift[..., 3, 3] = -t.kappa
    max_re = np.linalg.eigvals(drift).real.max(axis=-1)
    stable = max_re < -MARGINAL_TOL
    c1, c2, rh_ok = _rh_margins(dd, t.kappa, t.gamma_m, gg, t.eta)
    near_edge = (np.abs(max_re) <= MARGINAL_TOL) | (np.abs(c1) <= MARGINAL_TOL) | (np.abs(c2) <= MARGINAL_TOL)
    disagreements = int(np.count_nonzero((rh_ok != stable) & ~near_edge))
    return StabilityMap(deltas, couplings, stable, max_re, disagreements)
