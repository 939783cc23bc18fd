"""Three-mode atom-optomechanical model: parameters, drift/noise, steady state.

Quadrature ordering is ``(X_M, Y_M, X_C, Y_C, X_A, Y_A)`` for the mechanical
mirror (M), the cavity field (C) and the collective atomic mode (A). The
cavity and atomic detunings are pinned to ``-omega_m`` (red sideband), so after
the rotating-wave approximation no detuning enters the drift matrix.

Covariances use the vacuum = 1/2 convention.
"""

import cmath
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.constants import hbar, k as k_B

from . import linalg
from .errors import DegenerateDrive, DegenerateFormula

VACUUM = 0.5
PHYSICALITY_TOL = 1e-12
STABILITY_MARGIN = 1e-12


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-level inputs. Frequencies and rates are angular (rad/s)."""

    omega_m: float
    gamma_m: float
    omega_c: float
    omega_l: float
    mass: float
    length: float
    power: float
    kappa: float
    gamma_a: float
    temperature: float
    omega_a: float = 0.0
    n_atoms: float = 1.0
    gamma0: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value}")


@dataclass(frozen=True)
class SystemParams:
    """Effective rates and couplings of one operating point (rad/s).

    ``atom_coupling`` is the cavity/collective-atom coupling and
    ``om_coupling`` the linearised optomechanical coupling. ``nbar`` is the
    mechanical bath occupancy.
    """

    omega_m: float
    gamma_m: float
    kappa: float
    gamma_a: float
    atom_coupling: float = 0.0
    om_coupling: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        # couplings may carry either sign; damping and occupancy may not
        for name in ("omega_m", "gamma_m", "kappa", "gamma_a", "nbar"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")

    def with_couplings(self, atom_coupling, om_coupling):
        return SystemParams(
            self.omega_m, self.gamma_m, self.kappa, self.gamma_a,
            float(atom_coupling), float(om_coupling), self.nbar,
        )


@dataclass(frozen=True)
class SteadyMeans:
    q_mean: float
    p_mean: float
    c_mean: complex
    a_mean: complex


@dataclass(frozen=True)
class CovarianceMatrix:
    """6 x 6 quadrature covariance, stored read-only."""

    sigma: np.ndarray = field(repr=False)

    def __post_init__(self):
        s = np.array(self.sigma, dtype=float)
        if s.shape != (6, 6):
            raise ValueError(f"covariance must be 6x6, got {s.shape}")
        if np.abs(s - s.T).max() > 1e-10 * max(1.0, np.abs(s).max()):
            raise ValueError("covariance is not symmetric")
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)

    def __array__(self, dtype=None, copy=None):
        return self.sigma if dtype is None else self.sigma.astype(dtype)


def thermal_occupation(omega_m, temperature):
    """Bose-Einstein occupancy ``1 / (exp(hbar w / k_B T) - 1)``; 0 at T = 0."""
    if omega_m <= 0:
        raise ValueError("omega_m must be positive")
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0:
        return 0.0
    x = hbar * omega_m / (k_B * temperature)
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def single_photon_coupling(phys):
    """Radiation-pressure coupling ``(omega_c / L) sqrt(hbar / (m omega_m))``."""
    return phys.omega_c / phys.length * math.sqrt(hbar / (phys.mass * phys.omega_m))


def drive_amplitude(phys):
    """Laser drive ``sqrt(2 P kappa / (hbar omega_l))``."""
    return math.sqrt(2.0 * phys.power * phys.kappa / (hbar * phys.omega_l))


def derive_system_params(phys):
    """Mean-field steady state and the effective couplings it implies.

    Solves the coupled stationary amplitudes of the cavity and atomic modes in
    closed form, with both detunings set to ``-omega_m``.
    """
    g0 = single_photon_coupling(phys)
    e_l = drive_amplitude(phys)
    coupling = phys.gamma0 * math.sqrt(phys.n_atoms)
    detuning = -phys.omega_m
    atom_den = phys.gamma_a + 1j * detuning
    den = (phys.kappa + 1j * detuning) * atom_den + coupling**2
    if abs(den) == 0.0 or abs(atom_den) == 0.0:
        raise DegenerateDrive("stationary mean-field denominator vanishes")
    c_mean = e_l * atom_den / den
    a_mean = -1j * coupling * c_mean / atom_den
    q_mean = g0 * abs(c_mean) ** 2 / phys.omega_m
    nbar = thermal_occupation(phys.omega_m, phys.temperature)
    params = SystemParams(
        omega_m=phys.omega_m,
        gamma_m=phys.gamma_m,
        kappa=phys.kappa,
        gamma_a=phys.gamma_a,
        atom_coupling=coupling,
        om_coupling=math.sqrt(2.0) * g0 * abs(c_mean),
        nbar=nbar,
    )
    return params, SteadyMeans(q_mean, 0.0, complex(c_mean), complex(a_mean))


def build_drift(p):
    G = p.om_coupling
    g = p.atom_coupling
    a = np.diag([-p.gamma_m / 2, -p.gamma_m / 2, -p.kappa, -p.kappa, -p.gamma_a, -p.gamma_a])
    a[0, 3] = a[1, 2] = a[2, 1] = a[3, 0] = G / 2
    a[2, 5] = g
    a[3, 4] = -g
    a[4, 3] = g
    a[5, 2] = -g
    return a


def build_noise(p):
    m = p.gamma_m * (2 * p.nbar + 1) / 2
    return np.diag([m, m, p.kappa, p.kappa, p.gamma_a, p.gamma_a])


def is_stable(drift):
    """True when every eigenvalue sits left of ``-1e-12 * max|drift|``."""
    drift = np.asarray(drift, dtype=float)
    margin = STABILITY_MARGIN * float(np.abs(drift).max(initial=0.0))
    return linalg.spectral_abscissa(drift) < -margin


def steady_covariance(p):
    """Steady-state CM from the Lyapunov equation. Raises NonStable."""
    return CovarianceMatrix(linalg.solve_lyapunov(build_drift(p), build_noise(p)))


# (row, col) -> (entry label, sign) of the closed-form layout;
# every position not listed is structurally zero
CLOSED_FORM_LAYOUT = {
    (0, 0): (1, 1), (1, 1): (1, 1),
    (2, 2): (2, 1), (3, 3): (2, 1),
    (4, 4): (3, 1), (5, 5): (3, 1),
    (0, 3): (4, 1), (1, 2): (4, 1),
    (0, 4): (5, 1), (1, 5): (5, -1),
    (2, 5): (6, -1), (3, 4): (6, 1),
}
CLOSED_FORM_LAYOUT.update({(j, i): v for (i, j), v in list(CLOSED_FORM_LAYOUT.items())})

ZERO_MASK = np.ones((6, 6), dtype=bool)
for _pos in CLOSED_FORM_LAYOUT:
    ZERO_MASK[_pos] = False
ZERO_MASK.setflags(write=False)

# the sixth entry's denominator carries gamma_m^2 where the other five
# carry the atom coupling squared
SUSPECT_LABELS = (6,)


def closed_form_entries(p):
    """The six transcribed closed-form scalars, keyed 1..6.

    Kept as written in the source expressions, suspect terms included; only
    unbalanced parentheses are closed at the shortest consistent point, and
    ``num / 2(x)(y)`` reads as ``num / (2 x y)``.
    """
    n = p.nbar
    G = p.om_coupling
    g = p.atom_coupling
    k = p.kappa
    ga = p.gamma_a
    gm = p.gamma_m

    d1 = G**2 * ga - 2 * (g**2 + k * ga) * gm
    d2 = -8 * g**2 * (k + ga) + (2 * k + gm) * (G**2 - 2 * (k + ga) * (2 * ga + gm))
    d6 = G**2 * ga - 2 * (gm**2 + k * ga) * gm
    if d1 == 0 or d2 == 0 or d6 == 0:
        raise DegenerateFormula("closed-form denominator vanishes")
    den = d1 * d2
    z = k * gm * (2 * k + gm) + 2 * ga**2 * (4 * k + gm) + ga * (8 * k**2 + 4 * k * gm + gm**2)

    lam1 = (
        16 * (1 + 2 * n) * g**4 * (k + ga) * gm
        + ga * (-G**2 + 2 * (k + ga) * (2 * ga + gm)) * (2 * k * (1 + 2 * n) * gm)
        + G**2 * (2 * k - (1 + 2 * n) * gm)
        + 2 * g**2 * (
            G**2 * (4 * ga**2 + 4 * ga * (k + (1 + n) * gm) - gm * (-2 * k + (1 + 2 * n) * gm))
            + 2 * (1 + 2 * n) * gm * z
        )
    ) / (2 * den)
    lam2 = (
        16 * g**4 * (k + ga) * gm
        + ga * (-G**2 + 2 * (k + ga) * (2 * ga + gm))
        * (2 * k * gm * (2 * k * gm * (2 * k + gm) + G**2 * (-2 * k + (1 + 2 * n) * gm)))
        + 2 * g**2 * (
            G**2 * (-4 * k * ga - 4 * ga**2 + gm * (-2 * k + gm + 2 * n * gm))
            + 2 * gm * z
        )
    ) / (2 * den)
    lam3 = (
        16 * g**4 * (k + ga) * gm
        + ga * (2 * k + gm) * (G**2 - 2 * (k + ga) * (2 * ga + gm))
        + 2 * g**2 * (
            G**2 * (-4 * ga**2 + (1 + 2 * n) * gm * (2 * k + gm) + 4 * ga * (-k + (1 + n) * gm))
            + 2 * gm * z
        )
    ) / (2 * den)
    lam4 = (
        2 * (1 + n) * G * gm
        * (2 * g**2 * (k + ga) * (2 * ga + gm) + k * ga * (-G**2 + 2 * (k + ga) * (2 * ga + gm)))
    ) / den
    lam5 = (
        2 * (1 + n) * g * G
        * (4 * (g**2 * (k + ga) + ga * (G**2 + 4 * k * (k + ga))) * gm)
    ) / den
    lam6 = 2 * (1 + n) * g * G**2 * ga * gm * (2 * k + 2 * ga + gm) / (d6 * d2)
    return {1: lam1, 2: lam2, 3: lam3, 4: lam4, 5: lam5, 6: lam6}


def closed_form_covariance(p):
    """Assemble the transcribed closed-form CM in its reference sign pattern.

    Not validated for symmetry beyond construction; it is a comparison
    target for ``steady_covariance``, not a trusted result.
    """
    lam = closed_form_entries(p)
    sigma = np.zeros((6, 6))
    for (i, j), (label, sign) in CLOSED_FORM_LAYOUT.items():
        sigma[i, j] = sign * lam[label]
    return CovarianceMatrix(sigma)


def physicality_check(cm):
    """Uncertainty-principle test: smallest symplectic eigenvalue >= 1/2."""
    sigma = np.asarray(cm, dtype=float)
    return bool(linalg.symplectic_eigenvalues(sigma)[0] >= VACUUM - PHYSICALITY_TOL)


def zero_pattern_violation(cm):
    """Largest |entry| at structurally-zero positions, relative to max|entry|."""
    sigma = np.asarray(cm, dtype=float)
    scale = float(np.abs(sigma).max())
    return float(np.abs(sigma[ZERO_MASK]).max()) / scale if scale else 0.0
