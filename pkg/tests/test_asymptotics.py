import math

import numpy as np
import pytest

from citetoy.asymptotics import (
    DEFAULT_GRID,
    convergence_report,
    discrete_stable_limit_check,
    exponential_tail_fit,
    limit_as_discrete_stable,
    limit_pgf_eval,
    log_survival_tilted,
    rn_pgf_eval,
    survival_from_pmf,
    survival_from_sample,
    tail_index_estimate,
)
from citetoy.errors import DomainError, ParameterError
from citetoy.models import DiscreteStableParams, GeometricParams, pgf_series, pmf
from citetoy.sampler import RngState, simulate


def test_group_pgf_example():
    v = rn_pgf_eval(1.0, 1.0, 0.5, 100, 0.0)
    assert v == pytest.approx(0.995 ** 100, rel=1e-13)
    assert v == pytest.approx(0.60577, abs=1e-5)
    assert rn_pgf_eval(0.5, 0.7, 0.3, 17, 1.0) == 1.0


def test_group_pgf_direct_formula_at_moderate_n():
    # S(r + (1-r) Q(z))**n written out literally
    lam, gamma, q, n, z = 0.8, 0.6, 0.4, 50, 0.3
    r = 1 - n ** (-1 / gamma)
    w = r + (1 - r) * q / (1 - (1 - q) * z)
    direct = (1 - lam * (1 - w) ** gamma) ** n
    assert rn_pgf_eval(gamma, lam, q, n, z) == pytest.approx(direct, rel=1e-12)


def test_limit_examples():
    assert limit_pgf_eval(1.0, 1.0, 0.5, 1.0) == 1.0
    assert limit_pgf_eval(1.0, 1.0, 0.5, 0.0) == pytest.approx(math.exp(-0.5), abs=1e-15)
    assert limit_pgf_eval(1.0, 0.5, 0.5, 0.0) == pytest.approx(math.exp(-math.sqrt(0.5)), abs=1e-15)
    assert limit_pgf_eval(1.0, 0.5, 0.5, 0.0) == pytest.approx(0.493069, abs=1e-6)


def test_group_pgf_reaches_limit():
    assert rn_pgf_eval(1.0, 1.0, 0.5, 10 ** 7, 0.0) == pytest.approx(math.exp(-0.5), abs=1e-7)


def test_convergence_report_examples():
    r = convergence_report(1.0, 0.5, 0.5, [10 ** e for e in range(2, 7)])
    assert r.strictly_decreasing
    r1 = convergence_report(1.0, 1.0, 0.5, [10 ** 6])
    assert r1.sup_errors[0] < 1e-3
    flat = convergence_report(1.0, 0.5, 0.5, [10, 100], grid=(1.0,))
    assert flat.sup_errors == (0.0, 0.0)


def test_convergence_report_rejects_unsorted_n():
    with pytest.raises(DomainError):
        convergence_report(1.0, 0.5, 0.5, [100, 10])


def test_parameter_checks():
    with pytest.raises(ParameterError):
        rn_pgf_eval(0.5, 1.5, 0.5, 10, 0.2)
    with pytest.raises(ParameterError):
        rn_pgf_eval(1.5, 0.5, 0.5, 10, 0.2)
    with pytest.raises(DomainError):
        rn_pgf_eval(0.5, 0.5, 0.5, 0, 0.2)
    with pytest.raises(DomainError):
        limit_pgf_eval(1.0, 0.5, 0.5, 2.0)
    with pytest.raises(ParameterError):
        limit_as_discrete_stable(1.0, 0.5, 1.0)


@pytest.mark.parametrize("gamma", [0.5, 1.0])
@pytest.mark.parametrize("q", [0.3, 0.7])
def test_limit_is_a_discrete_stable_law(gamma, q):
    assert discrete_stable_limit_check(1.0, gamma, q) < 1e-15
    m = limit_as_discrete_stable(1.0, gamma, q)
    assert m.lam == pytest.approx((1 - q) ** gamma)


def test_default_grid():
    assert DEFAULT_GRID[0] == 0.0 and DEFAULT_GRID[-1] == 0.99
    assert len(DEFAULT_GRID) == 21


# --- survival and tails --------------------------------------------------------------

def test_survival_from_pmf_of_geometric():
    s = survival_from_pmf(pmf(GeometricParams(0.5), 200))
    np.testing.assert_allclose(s[:40], 0.5 ** np.arange(1, 41), rtol=1e-12)


def test_survival_from_sample_matches_ecdf():
    sample = np.array([0, 0, 1, 3, 3, 5])
    np.testing.assert_allclose(survival_from_sample(sample, 5), [4 / 6, 3 / 6, 3 / 6, 1 / 6, 1 / 6, 0.0])


def test_sibuya_survival_slope():
    k = np.arange(4097)
    surv = np.cumprod(np.r_[1.0, 1 - 0.5 / k[1:]])
    fit = tail_index_estimate(surv, 32, 4096, kind="survival")
    assert abs(fit.slope + 0.5) < 0.05


def test_geometric_tail_is_exponential_not_power():
    probs = pmf(GeometricParams(0.5), 200)
    power = tail_index_estimate(probs, 8, 64)
    expo = exponential_tail_fit(probs, 8, 64)
    sibuya = tail_index_estimate(np.cumprod(np.r_[1.0, 1 - 0.5 / np.arange(1, 81)]), 8, 64, kind="survival")
    assert expo.slope == pytest.approx(math.log(0.5), abs=1e-9)
    assert expo.r_squared > 1 - 1e-12
    assert power.r_squared < sibuya.r_squared - 0.05


def test_discrete_stable_heavy_tail_slope():
    probs = pmf(DiscreteStableParams(1.0, 0.5, 0.5), 4096)
    fit = tail_index_estimate(probs, 64, 4096)
    assert abs(fit.slope + 0.5) < 0.15


def test_tilted_log_survival_matches_plain_where_both_work():
    model = DiscreteStableParams(1.0, 1.0, 0.5)
    plain = np.log(survival_from_pmf(pmf(model, 400))[:150])
    tilted = log_survival_tilted(pgf_series(model, 400, tilt=2.0).coeffs, 2.0)[:150]
    np.testing.assert_allclose(tilted, plain, rtol=1e-9)


def test_tail_index_from_a_sample():
    model = GeometricParams(0.02)
    values = simulate(model, RngState(3), 10 ** 5).values
    fit = exponential_tail_fit(values, 10, 150, kind="sample")
    assert fit.slope == pytest.approx(math.log(0.98), abs=2e-3)


def test_fit_range_errors():
    probs = pmf(GeometricParams(0.5), 100)
    with pytest.raises(DomainError):
        tail_index_estimate(probs, 0, 10)
    with pytest.raises(DomainError):
        tail_index_estimate(probs, 10, 500)
    with pytest.raises(DomainError):
        tail_index_estimate(np.r_[1.0, 0.5, 0.0, 0.0], 1, 3, kind="survival")
    with pytest.raises(DomainError):
        tail_index_estimate(probs, 1, 10, kind="other")
