"""Physical parameters, unit reduction and the qubit-induced spring softening.

Everything downstream of this module works in units where the mechanical
frequency is one. SI quantities (rad/s, kelvin) only appear here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, replace

# CODATA 2018 (exact in the 2019 SI for k_B)
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K

PERTURBATIVE_LIMIT = 0.1  # mu_q / delta_q above which the q^2 expansion is suspect


class PerturbativeValidityWarning(UserWarning):
    """The qubit coupling is too strong for the second-order expansion."""


@dataclass(frozen=True)
class SystemSpec:
    """Raw system parameters; all rates are angular frequencies in rad/s.

    ``drive_amplitude`` is the mean input field amplitude in sqrt(photons/s).
    """

    omega_m: float
    quality_factor: float
    kappa_ex: float
    kappa_0: float
    g: float
    eta: float = 0.0
    temperature: float = 0.0
    delta_0: float = 0.0
    drive_amplitude: float = 0.0

    def __post_init__(self):
        if not self.omega_m > 0:
            raise ValueError(f"omega_m must be positive, got {self.omega_m}")
        if not self.quality_factor > 0:
            raise ValueError(f"quality_factor must be positive, got {self.quality_factor}")
        if self.kappa_ex < 0 or self.kappa_0 < 0 or not self.kappa_ex + self.kappa_0 > 0:
            raise ValueError("cavity decay rates must be non-negative with a positive sum")
        if self.eta < 0:
            raise ValueError(f"eta must be non-negative, got {self.eta}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be non-negative, got {self.temperature}")
        if self.drive_amplitude < 0:
            raise ValueError("drive_amplitude must be non-negative")

    @property
    def kappa(self) -> float:
        return self.kappa_ex + self.kappa_0

    @property
    def gamma_m(self) -> float:
        return self.omega_m / self.quality_factor


@dataclass(frozen=True)
class QubitSpec:
    delta_q: float  # level splitting, rad/s
    mu_q: float  # linear mirror-qubit coupling, rad/s

    def __post_init__(self):
        if not self.delta_q > 0:
            raise ValueError(f"delta_q must be positive, got {self.delta_q}")
        if self.mu_q < 0:
            raise ValueError(f"mu_q must be non-negative, got {self.mu_q}")


@dataclass(frozen=True)
class ReducedParams:
    """Dimensionless working parameters; rates are in units of omega_m.

    Attributes
    ----------
    delta : float
        Effective cavity detuning.
    kappa : float
        Total cavity decay rate.
    kappa_ex_frac : float
        Fraction of ``kappa`` due to the input mirror.
    gamma_m : float
        Mechanical damping rate.
    g_eff : float
        Field-enhanced optomechanical coupling G.
    eta : float
        Qubit-induced spring softening.
    n_th : float
        Mean thermal phonon number of the mechanical bath.
    """

    delta: float
    kappa: float
    gamma_m: float
    g_eff: float
    eta: float = 0.0
    n_th: float = 0.0
    kappa_ex_frac: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not self.gamma_m > 0:
            raise ValueError(f"gamma_m must be positive, got {self.gamma_m}")
        if self.g_eff < 0:
            raise ValueError(f"g_eff must be non-negative, got {self.g_eff}")
        if self.n_th < 0:
            raise ValueError(f"n_th must be non-negative, got {self.n_th}")
        if not 0 <= self.kappa_ex_frac <= 1:
            raise ValueError(f"kappa_ex_frac must lie in [0, 1], got {self.kappa_ex_frac}")

    def replace(self, **changes) -> ReducedParams:
        return replace(self, **changes)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


FIELDS = tuple(ReducedParams.__dataclass_fields__)


def mean_thermal_occupation(temperature: float, omega_m: float) -> float:
    """Bose-Einstein occupation of a mode at ``omega_m`` (rad/s) and ``temperature`` (K)."""
    if temperature < 0:
        raise ValueError(f"temperature must be non-negative, got {temperature}")
    if not omega_m > 0:
        raise ValueError(f"omega_m must be positive, got {omega_m}")
    if temperature == 0:
        return 0.0
    x = HBAR * omega_m / (K_B * temperature)
    if x > 700:
        return 0.0
    return 1.0 / math.expm1(x)


def qubit_induced_coupling(qubit: QubitSpec) -> float:
    """Spring softening eta (rad/s) from a qubit held in a sigma_x eigenstate.

    The second-order energy shift is -(eta/2) q^2 with eta/2 = 2 delta_q (mu_q/delta_q)^2.
    """
    ratio = qubit.mu_q / qubit.delta_q
    if ratio > PERTURBATIVE_LIMIT:
        warnings.warn(
            f"mu_q/delta_q = {ratio:.3g} exceeds {PERTURBATIVE_LIMIT}; "
            "the quadratic softening is outside its perturbative regime",
            PerturbativeValidityWarning,
            stacklevel=2,
        )
    return 4.0 * qubit.delta_q * ratio**2


def reduce(spec: SystemSpec, delta_eff: float, g_eff: float) -> ReducedParams:
    """Express ``spec`` plus the effective detuning/coupling (rad/s) in omega_m units."""
    w = spec.omega_m
    if not w > 0:
        raise ValueError(f"omega_m must be positive, got {w}")
    return ReducedParams(
        delta=delta_eff / w,
        kappa=spec.kappa / w,
        kappa_ex_frac=spec.kappa_ex / spec.kappa,
        gamma_m=spec.gamma_m / w,
        g_eff=g_eff / w,
        eta=spec.eta / w,
        n_th=mean_thermal_occupation(spec.temperature, w),
    )


# Reference operating point: omega_m/2pi = 10 MHz, Q = 1e5, kappa/2pi = 5 MHz, T = 0.6 K.
BASELINE_OMEGA_M = 2 * math.pi * 10e6
BASELINE_TEMPERATURE = 0.6
BASELINE_SYSTEM = SystemSpec(
    omega_m=BASELINE_OMEGA_M,
    quality_factor=1e5,
    kappa_ex=2 * math.pi * 5e6,
    kappa_0=0.0,
    g=0.0,
    temperature=BASELINE_TEMPERATURE,
)


def baseline(**overrides) -> ReducedParams:
    """Reference operating point (delta = 0.5, G = 0.6, eta = 0) with optional overrides."""
    p = reduce(BASELINE_SYSTEM, 0.5 * BASELINE_OMEGA_M, 0.6 * BASELINE_OMEGA_M)
    return p.replace(**overrides) if overrides else p
