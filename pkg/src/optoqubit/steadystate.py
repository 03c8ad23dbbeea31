"""Classical fixed points of the driven cavity with a softened mirror.

Inputs are in omega_m units; the drive amplitude is in sqrt(omega_m)
(i.e. sqrt(photons per mechanical radian)), so that |a_s|^2 is a photon number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ReducedParams, SystemSpec, reduce

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class ClassicalFixedPoint:
    q_s: float
    p_s: float
    a_s_re: float
    a_s_im: float
    delta_eff: float
    g_eff: float
    branch_index: int
    degenerate: bool = False

    @property
    def photon_number(self) -> float:
        return self.a_s_re**2 + self.a_s_im**2


def effective_coupling(g: float, a_s_magnitude: float) -> float:
    """Field-enhanced coupling G = sqrt(2) g |a_s|."""
    if a_s_magnitude < 0:
        raise ValueError("a_s_magnitude must be non-negative")
    return g * a_s_magnitude * math.sqrt(2.0)


def _real_roots(coeffs: np.ndarray) -> np.ndarray:
    # monic cubic x^3 + c2 x^2 + c1 x + c0 via its companion matrix
    c2, c1, c0 = coeffs
    companion = np.array([[-c2, -c1, -c0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    roots = np.linalg.eigvals(companion)
    scale = max(1.0, float(np.max(np.abs(roots))))
    real = np.sort(roots.real[np.abs(roots.imag) <= 1e-7 * scale])
    # Newton polish; the companion eigensolve is only backward stable
    poly = np.poly1d([1.0, c2, c1, c0])
    dpoly = poly.deriv()
    for _ in range(4):
        slope = dpoly(real)
        ok = slope != 0
        real[ok] = real[ok] - poly(real[ok]) / slope[ok]
    return np.sort(real)


def solve_fixed_points(
    delta_0: float,
    kappa: float,
    kappa_ex: float,
    eta: float,
    g: float,
    alpha_in: float,
) -> list[ClassicalFixedPoint]:
    """All real classical steady states, sorted by effective detuning.

    Eliminating the photon number 2 kappa_ex alpha_in^2 / (kappa^2 + Delta^2) and the
    displacement q_s = g |a_s|^2 / (1 - eta) leaves the cubic

        (delta_0 - Delta) (kappa^2 + Delta^2) = 2 g^2 kappa_ex alpha_in^2 / (1 - eta).

    The intracavity amplitude is reported as the real number |a_s|, which the
    linearisation assumes after a phase rotation.
    """
    if eta >= 1:
        raise ValueError(f"eta = {eta} >= omega_m: mirror unbound, no fixed point")
    if alpha_in < 0:
        raise ValueError("alpha_in must be non-negative")
    if not kappa > 0:
        raise ValueError("kappa must be positive")

    source = 2.0 * kappa_ex * alpha_in**2
    c = g**2 * source / (1.0 - eta)
    if c == 0.0:
        deltas = np.array([float(delta_0)])
    else:
        # Delta^3 - delta_0 Delta^2 + kappa^2 Delta - (delta_0 kappa^2 - c) = 0
        deltas = _real_roots(np.array([-delta_0, kappa**2, c - delta_0 * kappa**2]))

    points = []
    for i, d in enumerate(deltas):
        n_photons = source / (kappa**2 + d**2)
        q_s = g * n_photons / (1.0 - eta)
        amp = math.sqrt(n_photons)
        close = [j for j, other in enumerate(deltas) if j != i and abs(other - d) < DEGENERACY_TOL]
        points.append(
            ClassicalFixedPoint(
                q_s=q_s,
                p_s=0.0,
                a_s_re=amp,
                a_s_im=0.0,
                delta_eff=float(d),
                g_eff=effective_coupling(g, amp),
                branch_index=i,
                degenerate=bool(close),
            )
        )
    return points


def residuals(
    fp: ClassicalFixedPoint, delta_0: float, kappa: float, kappa_ex: float, eta: float, g: float, alpha_in: float
) -> tuple[float, float, float]:
    """Residuals of the three steady-state equations (omega_m units).

    The field equation is checked in magnitude, since the reported amplitude
    has been phase-rotated to the real axis.
    """
    n = fp.photon_number
    r_force = (1.0 - eta) * fp.q_s - g * n
    r_detuning = fp.delta_eff - (delta_0 - g * fp.q_s)
    r_field = abs(complex(kappa, fp.delta_eff)) * math.sqrt(n) - math.sqrt(2.0 * kappa_ex) * alpha_in
    return r_force, r_detuning, r_field


def default_branch(points: list[ClassicalFixedPoint]) -> ClassicalFixedPoint:
    """The branch continuously connected to the weak-drive solution (smallest |q_s|)."""
    return min(points, key=lambda fp: abs(fp.q_s))


def reduced_from_drive(spec: SystemSpec, branch: int | None = None) -> tuple[ReducedParams, list[ClassicalFixedPoint]]:
    """Solve the classical steady state for a physical ``spec`` and reduce it.

    Returns the working parameters on the chosen branch and every fixed point found.
    """
    w = spec.omega_m
    args = (spec.delta_0 / w, spec.kappa / w, spec.kappa_ex / w, spec.eta / w, spec.g / w, spec.drive_amplitude / math.sqrt(w))
    points = solve_fixed_points(*args)
    chosen = default_branch(points) if branch is None else points[branch]
    return reduce(spec, chosen.delta_eff * w, chosen.g_eff * w), points
