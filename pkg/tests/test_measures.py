import math

import numpy as np
import pytest
import scipy.linalg

from atomopt import linalg, measures, model
from atomopt.errors import NotPositiveDefinite
from atomopt.measures import ModeId
from conftest import tmsv

R_VALUES = [0.1, 0.5, 1.0]


def embed(pair_cm, modes, third=0.5):
    """Place a two-mode CM on ``modes`` of a three-mode state, the rest vacuum."""
    sigma = third * np.eye(6)
    idx = [2 * m + q for m in modes for q in (0, 1)]
    sigma[np.ix_(idx, idx)] = pair_cm
    return sigma


def local_rotation(thetas):
    blocks = [np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]]) for t in thetas]
    return scipy.linalg.block_diag(*blocks)


@pytest.mark.parametrize("r", R_VALUES)
def test_tmsv_negativity(r, backend):
    assert measures.log_negativity_1v1(tmsv(r), 0, 1) == pytest.approx(2 * r, abs=1e-9)


@pytest.mark.parametrize("r", R_VALUES)
def test_tmsv_steering(r, backend):
    sigma = embed(tmsv(r), [0, 1])
    expected = math.log(math.cosh(2 * r))
    assert measures.gaussian_steering(sigma, "M", "C") == pytest.approx(expected, abs=1e-9)
    assert measures.gaussian_steering(sigma, "C", "M") == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("r", R_VALUES)
@pytest.mark.parametrize("modes", [(0, 1), (0, 2), (1, 2)])
def test_embedded_tmsv(r, modes):
    sigma = embed(tmsv(r), modes)
    i, k = (ModeId(m) for m in modes)
    third = ({0, 1, 2} - set(modes)).pop()
    assert measures.log_negativity_1v1(sigma, i, k) == pytest.approx(2 * r, abs=1e-9)
    assert measures.log_negativity_1v1(sigma, i, third) == 0.0
    # a product with vacuum leaves the 1|2 negativity unchanged
    assert measures.log_negativity_1v2(sigma, i) == pytest.approx(2 * r, abs=1e-9)
    assert measures.contangle_residual(sigma, i) == pytest.approx(0.0, abs=1e-9)
    assert measures.steering_residual_out(sigma, i) == pytest.approx(0.0, abs=1e-9)


def test_negativity_matches_partial_transpose_route():
    rng = np.random.default_rng(4)
    for _ in range(50):
        # random mixed state: symplectic congruence of vacuum plus white noise
        h = rng.standard_normal((6, 6))
        h = h + h.T
        omega = np.kron(np.eye(3), [[0, 1], [-1, 0]])
        sym = scipy.linalg.expm(omega @ h * 0.2)
        sigma = 0.5 * sym @ sym.T + 0.05 * np.eye(6)
        for i, k in [(0, 1), (0, 2), (1, 2)]:
            sub = measures.reduced_cm(sigma, [i, k])
            pt = measures.partial_transpose(sub, [0])
            nu = linalg.symplectic_eigenvalues(pt)[0]
            ref = max(0.0, -math.log(2 * nu))
            assert measures.log_negativity_1v1(sigma, i, k) == pytest.approx(ref, abs=1e-9)


def test_vacuum_all_zero():
    rep = measures.measure_report(0.5 * np.eye(6))
    for key, val in rep.columns().items():
        assert val == 0.0, key


def test_thermal_product_all_zero():
    rep = measures.measure_report(np.diag([3.5, 3.5, 0.5, 0.5, 1.0, 1.0]))
    assert all(v == 0.0 for v in rep.columns().values())


def test_local_rotation_invariance(ref_params):
    sigma = model.steady_covariance(ref_params).sigma
    u = local_rotation([0.3, 1.1, -2.0])
    rotated = u @ sigma @ u.T
    ra = measures.measure_report(sigma).columns()
    rb = measures.measure_report(rotated).columns()
    for key in ra:
        assert rb[key] == pytest.approx(ra[key], rel=1e-8, abs=1e-12), key


def test_partial_transpose():
    sigma = tmsv(0.3)
    pt = measures.partial_transpose(sigma, [1])
    assert pt[3, 3] == sigma[3, 3]
    assert pt[1, 3] == -sigma[1, 3]
    assert pt[0, 2] == sigma[0, 2]


def test_reduced_cm_order():
    sigma = np.arange(36.0).reshape(6, 6)
    sigma = sigma + sigma.T
    sub = measures.reduced_cm(sigma, ["A", "M"])
    assert np.array_equal(sub, sigma[np.ix_([0, 1, 4, 5], [0, 1, 4, 5])])
    with pytest.raises(ValueError):
        measures.reduced_cm(sigma, [])


def test_mode_parse():
    assert ModeId.parse("c") is ModeId.C
    assert ModeId.parse(2) is ModeId.A
    with pytest.raises(KeyError):
        ModeId.parse("X")
    with pytest.raises(ValueError):
        measures.log_negativity_1v1(np.eye(6), "M", "M")
    with pytest.raises(ValueError):
        measures.gaussian_steering(np.eye(6), "M", ["M", "C"])


def test_unphysical_input_raises():
    with pytest.raises(NotPositiveDefinite):
        measures.log_negativity_1v2(-np.eye(6), "M")


def test_report_consistency(ref_params):
    sigma = model.steady_covariance(ref_params).sigma
    rep = measures.measure_report(sigma)
    cols = rep.columns()
    assert tuple(cols) == measures.MEASURE_COLUMNS
    assert cols["n_MA"] == measures.log_negativity_1v1(sigma, "M", "A")
    assert cols["s_M_CA"] == measures.gaussian_steering(sigma, "M", "CA")
    assert cols["s_CA_M"] == measures.gaussian_steering(sigma, "CA", "M")
    assert cols["res_e_M"] == measures.contangle_residual(sigma, "M")
    assert cols["res_out_M"] == measures.steering_residual_out(sigma, "M")
    assert cols["res_in_A"] == measures.steering_residual_in(sigma, "A")
    assert measures.MeasureReport.from_dict(rep.to_dict()) == rep


def test_reference_point_signs(ref_params):
    cols = measures.measure_report(model.steady_covariance(ref_params)).columns()
    assert cols["n_MA"] > 0
    assert cols["s_CM"] == 0.0
    assert cols["n_MC"] == 0.0
    assert cols["s_M_CA"] > 0


def test_clamp():
    assert measures._clamp(-5e-13) == 0.0
    assert measures._clamp(-1e-9) == -1e-9
    assert measures._clamp(0.25) == 0.25
