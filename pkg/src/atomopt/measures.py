"""Entanglement, Gaussian steering and CKW-type monogamy residuals.

Every function takes a three-mode covariance in the vacuum = 1/2 convention
(a ``CovarianceMatrix`` or a plain 6 x 6 array). Pairwise functions also
accept smaller matrices where noted.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ComplexEigenvalue

NOISE_FLOOR = 1e-12


class ModeId(enum.IntEnum):
    M = 0
    C = 1
    A = 2

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls[value.strip().upper()]
        return cls(int(value))


MODES = (ModeId.M, ModeId.C, ModeId.A)


def _modes(modes):
    if isinstance(modes, (ModeId, int, str)) and not (isinstance(modes, str) and len(modes) > 1):
        modes = [modes]
    return sorted({ModeId.parse(m) for m in modes})


def _label(modes):
    return "".join(m.name for m in modes)


def _others(i):
    return [m for m in MODES if m != i]


def _clamp(x):
    return 0.0 if -NOISE_FLOOR <= x < 0.0 else x


def _sigma(cm):
    return np.asarray(cm, dtype=float)


def reduced_cm(cm, modes):
    """Submatrix on the quadratures of ``modes``, kept in M < C < A order."""
    modes = _modes(modes)
    if not modes:
        raise ValueError("mode set must be nonempty")
    idx = linalg.quadrature_indices([int(m) for m in modes])
    return _sigma(cm)[np.ix_(idx, idx)]


def partial_transpose(cm, flipped):
    """Flip the momentum quadrature sign of each mode position in ``flipped``."""
    sigma = _sigma(cm)
    signs = np.ones(sigma.shape[0])
    for m in flipped:
        signs[2 * int(m) + 1] = -1.0
    return sigma * np.outer(signs, signs)


def log_negativity_1v1(cm, i, k):
    """Logarithmic negativity between single modes ``i`` and ``k``.

    A 4 x 4 input is taken to be the (i, k) pair already.
    """
    i, k = ModeId.parse(i), ModeId.parse(k)
    if i == k:
        raise ValueError("modes must differ")
    sigma = _sigma(cm)
    sub = sigma if sigma.shape == (4, 4) else reduced_cm(sigma, [i, k])
    det = linalg.det
    z1, z2, z3 = sub[:2, :2], sub[2:, 2:], sub[:2, 2:]
    # the -2 det(Z3) sign encodes the partial transposition
    delta = det(z1) + det(z2) - 2.0 * det(z3)
    disc = delta * delta - 4.0 * det(sub)
    if disc < 0.0:
        if disc < -NOISE_FLOOR * max(1.0, delta * delta):
            raise ComplexEigenvalue(f"negative discriminant {disc:.3e}")
        disc = 0.0
    nu_sq = max(0.5 * (delta - math.sqrt(disc)), 0.0)
    nu = math.sqrt(nu_sq)
    if nu == 0.0:
        return math.inf
    return max(0.0, -math.log(2.0 * nu))


def log_negativity_1v2(cm, i):
    """Logarithmic negativity of mode ``i`` against the other two modes."""
    i = ModeId.parse(i)
    nu = linalg.symplectic_eigenvalues(partial_transpose(cm, [i]))[0]
    return max(0.0, -math.log(2.0 * nu))


def contangle_residual(cm, i):
    """Squared-negativity monogamy residual for focus mode ``i``."""
    i = ModeId.parse(i)
    j, k = _others(i)
    total = log_negativity_1v2(cm, i) ** 2
    return _clamp(total - log_negativity_1v1(cm, i, j) ** 2 - log_negativity_1v1(cm, i, k) ** 2)


def gaussian_steering(cm, steerer, steered):
    """Gaussian steerability of party ``steered`` by party ``steerer``."""
    a = _modes(steerer)
    b = _modes(steered)
    if not a or not b or set(a) & set(b):
        raise ValueError(f"invalid bipartition {steerer!r} -> {steered!r}")
    union = sorted(a + b)
    # unit-vacuum convention so the cutoff below is 1
    sub = 2.0 * reduced_cm(cm, union)
    schur = linalg.schur_complement(sub, [union.index(m) for m in a])
    theta = linalg.symplectic_eigenvalues(schur)
    value = -sum(math.log(t) for t in theta if t < 1.0)
    return max(0.0, value)


def steering_residual_out(cm, k):
    """``G(k -> ij) - G(k -> i) - G(k -> j)``."""
    k = ModeId.parse(k)
    i, j = _others(k)
    value = (
        gaussian_steering(cm, [k], [i, j])
        - gaussian_steering(cm, [k], [i])
        - gaussian_steering(cm, [k], [j])
    )
    return _clamp(value)


def steering_residual_in(cm, k):
    """``G(ij -> k) - G(i -> k) - G(j -> k)``."""
    k = ModeId.parse(k)
    i, j = _others(k)
    value = (
        gaussian_steering(cm, [i, j], [k])
        - gaussian_steering(cm, [i], [k])
        - gaussian_steering(cm, [j], [k])
    )
    return _clamp(value)


def complement_label(i):
    """Name of the other two modes, in the cyclic order M, C, A."""
    order = {ModeId.M: "CA", ModeId.C: "AM", ModeId.A: "MC"}
    return order[i]


PAIRS = ("MC", "MA", "CA")


@dataclass
class MeasureReport:
    """Every correlation quantity at one operating point.

    Keys: ``neg_1v1`` by unordered pair ("MC", "MA", "CA"); ``steering_1to1``
    by "<steerer><steered>"; per-mode dicts by the mode name.
    """

    neg_1v1: dict = field(default_factory=dict)
    neg_1v2: dict = field(default_factory=dict)
    contangle_residuals: dict = field(default_factory=dict)
    steering_1to1: dict = field(default_factory=dict)
    steering_1to2: dict = field(default_factory=dict)
    steering_2to1: dict = field(default_factory=dict)
    steering_residual_out: dict = field(default_factory=dict)
    steering_residual_in: dict = field(default_factory=dict)

    def columns(self):
        """Flat mapping in the fixed CSV column order."""
        row = {}
        for pair in PAIRS:
            row[f"n_{pair}"] = self.neg_1v1[pair]
        for m in "MCA":
            row[f"n_{m}_{complement_label(ModeId[m])}"] = self.neg_1v2[m]
        for m in "MCA":
            row[f"res_e_{m}"] = self.contangle_residuals[m]
        for key in ("MC", "CM", "MA", "AM", "CA", "AC"):
            row[f"s_{key}"] = self.steering_1to1[key]
        for m in "MCA":
            row[f"s_{m}_{complement_label(ModeId[m])}"] = self.steering_1to2[m]
        for m in "MCA":
            row[f"s_{complement_label(ModeId[m])}_{m}"] = self.steering_2to1[m]
        for m in "MCA":
            row[f"res_out_{m}"] = self.steering_residual_out[m]
        for m in "MCA":
            row[f"res_in_{m}"] = self.steering_residual_in[m]
        return row

    def to_dict(self):
        return {
            name: dict(getattr(self, name))
            for name in (
                "neg_1v1", "neg_1v2", "contangle_residuals", "steering_1to1",
                "steering_1to2", "steering_2to1", "steering_residual_out",
                "steering_residual_in",
            )
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**{k: dict(v) for k, v in data.items()})


MEASURE_COLUMNS = tuple(
    [f"n_{p}" for p in PAIRS]
    + ["n_M_CA", "n_C_AM", "n_A_MC", "res_e_M", "res_e_C", "res_e_A"]
    + ["s_MC", "s_CM", "s_MA", "s_AM", "s_CA", "s_AC", "s_M_CA", "s_C_AM", "s_A_MC"]
    + ["s_CA_M", "s_AM_C", "s_MC_A"]
    + [f"res_out_{m}" for m in "MCA"]
    + [f"res_in_{m}" for m in "MCA"]
)


def measure_report(cm):
    """Evaluate every measure once, reusing pairwise values for residuals."""
    sigma = _sigma(cm)
    rep = MeasureReport()
    neg = {}
    for pair in PAIRS:
        i, k = ModeId[pair[0]], ModeId[pair[1]]
        neg[frozenset((i, k))] = rep.neg_1v1[pair] = log_negativity_1v1(sigma, i, k)
    s11 = {}
    for i in MODES:
        for j in MODES:
            if i != j:
                s11[(i, j)] = rep.steering_1to1[i.name + j.name] = gaussian_steering(sigma, [i], [j])
    for i in MODES:
        j, k = _others(i)
        n12 = rep.neg_1v2[i.name] = log_negativity_1v2(sigma, i)
        rep.contangle_residuals[i.name] = _clamp(
            n12**2 - neg[frozenset((i, j))] ** 2 - neg[frozenset((i, k))] ** 2
        )
        out = rep.steering_1to2[i.name] = gaussian_steering(sigma, [i], [j, k])
        inn = rep.steering_2to1[i.name] = gaussian_steering(sigma, [j, k], [i])
        rep.steering_residual_out[i.name] = _clamp(out - s11[(i, j)] - s11[(i, k)])
        rep.steering_residual_in[i.name] = _clamp(inn - s11[(j, i)] - s11[(k, i)])
    return rep
