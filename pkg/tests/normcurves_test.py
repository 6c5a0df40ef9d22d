import math
import re

import numpy as np
import pandas as pd
import pytest
from scipy import stats

from eegnorm import _errors, _graph, _normcurves

from .common import make_family

LO, HI = math.log(5), math.log(90)


def median_curve(age):
    x = np.log(age)
    return 0.5 + 0.2 * np.exp(-(x - math.log(30)) ** 2 / 0.8)


def synthetic_sample(n=1000, noise=0.05, seed=0):
    rng = np.random.default_rng(seed)
    ages = np.exp(rng.uniform(LO, HI, size=n))
    values = median_curve(ages) * np.exp(noise * rng.normal(size=n))
    return ages, values


@pytest.fixture(scope='module')
def recovered():
    ages, values = synthetic_sample()
    return ages, values, _normcurves.fit_gamlss(ages, values)


def test_SplineModel_is_partition_of_unity():
    spline = _normcurves.SplineModel(0, 1, 5)
    B = spline.design(np.linspace(0, 1, 37))
    assert B.shape == (37, 9)
    assert np.allclose(B.sum(axis=1), 1)


def test_SplineModel_clamps_outside_domain():
    spline = _normcurves.SplineModel(0, 1, 4, coef=np.arange(8.0))
    assert spline(-5)[0] == pytest.approx(spline(0)[0])
    assert spline(7)[0] == pytest.approx(spline(1)[0])


def test_SplineModel_penalty_annihilates_lines():
    spline = _normcurves.SplineModel(0, 1, 6)
    line = 2 + 3 * np.arange(spline.size)
    assert np.allclose(spline.penalty @ line, 0)


@pytest.mark.parametrize(
    argnames='args, exp_exception',
    argvalues=(
        ((1, 1, 3), _errors.ValueError('Invalid spline domain: [1, 1]')),
        ((0, math.inf, 3), _errors.ValueError('Invalid spline domain: [0, inf]')),
        ((0, 1, -1), _errors.ValueError('Invalid number of knots: -1')),
        ((0, 1, 2, [1, 2]), _errors.ValueError('Expected 6 coefficients, got (2,)')),
    ),
)
def test_SplineModel_validation(args, exp_exception):
    with pytest.raises(type(exp_exception), match=rf'^{re.escape(str(exp_exception))}$'):
        _normcurves.SplineModel(*args)


def test_bct_quantile_of_median_is_mu():
    f = make_family(mu=0.7, nu=-0.8, slope=0.3)
    for age in (6, 20, 45, 80):
        assert _normcurves.bct_quantile(f, age, 0.5) == pytest.approx(float(f.mu(math.log(age))[0]), rel=1e-12)


def test_bct_quantile_with_zero_nu_is_lognormal_t():
    f = make_family(mu=2.0, sigma=0.2, nu=0.0, tau=7)
    exp = 2.0 * math.exp(0.2 * stats.t.ppf(0.9, 7))
    assert _normcurves.bct_quantile(f, 30, 0.9) == pytest.approx(exp, rel=1e-10)


def test_bct_quantile_approaches_normal_for_large_tau():
    f = make_family(mu=1.5, sigma=0.1, nu=1.0, tau=1e8)
    for p in (0.05, 0.25, 0.75, 0.95):
        exp = 1.5 * (1 + 0.1 * stats.norm.ppf(p))
        assert _normcurves.bct_quantile(f, 30, p) == pytest.approx(exp, rel=1e-6)


def test_bct_cdf_inverts_bct_quantile():
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = make_family(
            mu=rng.uniform(0.1, 3),
            sigma=rng.uniform(0.02, 0.15),
            nu=rng.uniform(-1.5, 1.5),
            tau=rng.uniform(3, 50),
            slope=rng.uniform(-0.5, 0.5),
        )
        age = rng.uniform(5, 90)
        for p in np.linspace(0.01, 0.99, 25):
            y = _normcurves.bct_quantile(f, age, p)
            assert _normcurves.bct_cdf(f, age, y) == pytest.approx(p, abs=1e-9)


def test_bct_quantile_undoes_offset():
    f = make_family(mu=1.0, offset=0.25)
    assert _normcurves.bct_quantile(f, 30, 0.5) == pytest.approx(0.75)
    assert _normcurves.bct_cdf(f, 30, 0.75) == pytest.approx(0.5)


@pytest.mark.parametrize('p', (0, 1, -0.5, 1.5))
def test_bct_quantile_rejects_invalid_probability(p):
    exp_msg = f'Probability must be in (0, 1): {float(p)!r}'
    with pytest.raises(_errors.ValueError, match=rf'^{re.escape(exp_msg)}$'):
        _normcurves.bct_quantile(make_family(), 30, p)


def test_bct_quantile_outside_support():
    f = make_family(sigma=1.0, nu=2.0, tau=5)
    exp_msg = 'Quantile p=0.01 at age 30 is outside the support of the distribution'
    with pytest.raises(_errors.ValueError, match=rf'^{re.escape(exp_msg)}$'):
        _normcurves.bct_quantile(f, 30, 0.01)


def test_bct_cdf_outside_support():
    with pytest.raises(_errors.ValueError, match=r'^Value is outside the support of the distribution: -1.0$'):
        _normcurves.bct_cdf(make_family(), 30, -1)


def test_ages_are_clamped_to_fitted_range(caplog):
    f = make_family(slope=0.4)
    with caplog.at_level('WARNING'):
        assert _normcurves.bct_quantile(f, 200, 0.5) == pytest.approx(_normcurves.bct_quantile(f, 90, 0.5))
    assert 'Age 200 is outside the fitted range 5-90, using boundary value' in caplog.text


@pytest.mark.parametrize('age', (0, -3))
def test_invalid_age(age):
    with pytest.raises(_errors.ValueError, match=rf'^Invalid age: {float(age)!r}$'):
        _normcurves.bct_quantile(make_family(), age, 0.5)


@pytest.mark.parametrize(
    argnames='values, exp_offset',
    argvalues=(
        ([0.1, 2.0], 0.0),
        ([-1.0, 1.0], 1.0 + 0.1 + 1e-6),
        ([0.0, 0.5], 0.025 + 1e-6),
    ),
)
def test_support_offset(values, exp_offset):
    offset = _normcurves.support_offset(values)
    assert offset == pytest.approx(exp_offset)
    assert all(v + offset > 0 for v in values)


def test_fit_gamlss_recovers_median_curve(recovered):
    _, _, f = recovered
    for age in np.exp(np.linspace(math.log(6), math.log(85), 20)):
        median = _normcurves.bct_quantile(f, age, 0.5)
        assert abs(median - median_curve(age)) / median_curve(age) < 0.03
    assert f.diagnostics.n == 1000
    assert f.diagnostics.iterations <= 200


def test_fit_gamlss_percentiles_are_ordered(recovered):
    curves = _normcurves.NormativeCurveSet({('alpha', 'ge'): recovered[2]})
    table = _normcurves.percentile_table(curves, 'alpha', 'ge', np.linspace(5, 90, 40))
    assert list(table.columns) == ['age', 'p5', 'p25', 'p50', 'p75', 'p95']
    for row in table.itertuples():
        assert row.p5 < row.p25 < row.p50 < row.p75 < row.p95


def test_fit_gamlss_coverage_of_lower_percentile(recovered):
    ages, values, f = recovered
    p5 = np.array([_normcurves.bct_quantile(f, age, 0.05) for age in ages])
    assert 0.02 <= np.mean(values < p5) <= 0.08


def test_fit_gamlss_coverage_of_median(recovered):
    ages, values, f = recovered
    p50 = np.array([_normcurves.bct_quantile(f, age, 0.5) for age in ages])
    assert 0.45 <= np.mean(values < p50) <= 0.55


def test_fit_gamlss_penalized_deviance_does_not_increase(recovered):
    _, _, f = recovered
    trace = np.array(f.diagnostics.trace)
    assert len(trace) >= 2
    assert np.all(np.diff(trace) <= 1e-6 * abs(trace[0]))
    assert f.diagnostics.penalized_deviance == pytest.approx(trace[-1])


def test_fit_gamlss_of_constant_values():
    ages, _ = synthetic_sample(n=200, seed=5)
    f = _normcurves.fit_gamlss(ages, np.full(len(ages), 5.0))
    for age in (6, 12, 30, 80):
        assert _normcurves.bct_quantile(f, age, 0.5) == pytest.approx(5.0, rel=1e-6)
        assert _normcurves.bct_quantile(f, age, 0.95) == pytest.approx(5.0, rel=1e-6)
    assert np.all(f.sigma(np.log([6, 30, 80])) < 1e-3)
    assert f.diagnostics.iterations == 0


def test_fit_gamlss_is_independent_of_age_scale(recovered):
    ages, values, f = recovered
    scaled = _normcurves.fit_gamlss(ages * 2, values)
    for age in (7, 15, 30, 60):
        for p in (0.05, 0.5, 0.95):
            assert _normcurves.bct_quantile(scaled, 2 * age, p) == pytest.approx(
                _normcurves.bct_quantile(f, age, p), rel=1e-6,
            )


def test_fit_gamlss_is_independent_of_sample_order(recovered):
    ages, values, f = recovered
    order = np.random.default_rng(3).permutation(len(ages))
    shuffled = _normcurves.fit_gamlss(ages[order], values[order])
    assert shuffled.as_dict() == f.as_dict()


@pytest.mark.parametrize(
    argnames='ages, values, exp_exception',
    argvalues=(
        ([1, 2], [1], _errors.ValueError('Ages and values must be sequences of equal length')),
        ([1] * 10, [1] * 10, _errors.ValueError('Need at least 50 samples, got 10')),
        ([0] + [1] * 59, [1] * 60, _errors.ValueError('Ages must be positive and finite')),
        (list(range(1, 61)), [0] + [1] * 59, _errors.ValueError('Values must be positive and finite')),
        ([10] * 60, list(range(1, 61)), _errors.ValueError('Ages must not all be equal')),
    ),
    ids=lambda v: str(v)[:20],
)
def test_fit_gamlss_validation(ages, values, exp_exception):
    with pytest.raises(type(exp_exception), match=rf'^{re.escape(str(exp_exception))}$'):
        _normcurves.fit_gamlss(ages, values)


def test_NormativeCurveSet_lookup():
    f = make_family()
    curves = _normcurves.NormativeCurveSet(
        {('alpha', 'cpl'): f, ('beta', 'cpl'): f, ('alpha', 'ge'): f},
        {('beta', 'm'): {'error': 'ConvergenceError', 'message': 'foo'}},
    )
    assert len(curves) == 3
    assert curves.bands == ('alpha', 'beta')
    assert curves.cells == (('alpha', 'cpl'), ('beta', 'cpl'), ('alpha', 'ge'))
    assert curves.family('alpha', 'ge') is f
    with pytest.raises(_errors.ValueError, match=r'^No curve for m in band beta$'):
        curves.family('beta', 'm')


def test_NormativeCurveSet_roundtrip(tmp_path):
    curves = _normcurves.NormativeCurveSet(
        {('alpha', 'cpl'): make_family(nu=-0.3, slope=0.2, offset=0.1)},
        {('alpha', 'm'): {'error': 'ValueError', 'message': 'Need at least 50 samples, got 3'}},
    )
    path = tmp_path / 'curves.json'
    curves.save(path)
    loaded = _normcurves.NormativeCurveSet.load(path)
    assert loaded.as_dict() == curves.as_dict()
    assert _normcurves.bct_quantile(loaded.family('alpha', 'cpl'), 33, 0.3) == pytest.approx(
        _normcurves.bct_quantile(curves.family('alpha', 'cpl'), 33, 0.3), rel=1e-15,
    )


def test_NormativeCurveSet_load_errors(tmp_path):
    path = tmp_path / 'curves.json'
    path.write_text('{"version": 99, "curves": []}')
    with pytest.raises(_errors.FormatError, match=rf'^{re.escape(str(path))}: Unsupported version: 99$'):
        _normcurves.NormativeCurveSet.load(path)

    path.write_text('{"version": 1}')
    with pytest.raises(_errors.FormatError, match=rf"^{re.escape(str(path))}: Invalid curve set: 'curves'$"):
        _normcurves.NormativeCurveSet.load(path)


def test_fit_all_records_failures_per_cell():
    ages, values = synthetic_sample(n=120, seed=5)
    rng = np.random.default_rng(6)
    alpha = pd.DataFrame({
        'subject_id': [f's{i}' for i in range(120)],
        'band': 'alpha',
        'age': ages,
        **{nc: values * rng.uniform(0.5, 2) for nc in _graph.NC_NAMES},
    })
    beta = alpha.iloc[:10].assign(band='beta')
    config = _normcurves.GamlssConfig(mu_knots=5, sigma_knots=3)
    curves = _normcurves.fit_all(pd.concat([alpha, beta], ignore_index=True), config)

    assert curves.bands == ('alpha',)
    assert set(curves.cells) == {('alpha', nc) for nc in _graph.NC_NAMES}
    assert curves.failures == {
        ('beta', nc): {'error': 'ValueError', 'message': 'Need at least 50 samples, got 10'}
        for nc in _graph.NC_NAMES
    }


def test_fit_all_shifts_non_positive_values():
    ages, values = synthetic_sample(n=100, seed=8)
    table = pd.DataFrame({'band': 'alpha', 'age': ages, **{nc: values for nc in _graph.NC_NAMES}})
    table['m'] = values - 0.6
    config = _normcurves.GamlssConfig(mu_knots=5, sigma_knots=3)
    curves = _normcurves.fit_all(table, config)
    f = curves.family('alpha', 'm')
    assert f.offset > 0
    assert _normcurves.bct_quantile(f, 30, 0.5) == pytest.approx(median_curve(30) - 0.6, abs=0.03)


def test_normative_mean_ncs_is_median_of_every_cell():
    families = {('alpha', nc): make_family(mu=0.1 * (i + 1), slope=0.2) for i, nc in enumerate(_graph.NC_NAMES)}
    curves = _normcurves.NormativeCurveSet(families)
    ncs = _normcurves.normative_mean_ncs(curves, 'alpha', 40)
    for nc, value in ncs.as_dict().items():
        assert value == pytest.approx(_normcurves.bct_quantile(families[('alpha', nc)], 40, 0.5))
    with pytest.raises(_errors.ValueError, match=r'^No curve for cpl in band beta$'):
        _normcurves.normative_mean_ncs(curves, 'beta', 40)


@pytest.mark.parametrize(
    argnames='p, exp_column',
    argvalues=((0.05, 'p5'), (0.5, 'p50'), (0.975, 'p97.5')),
)
def test_percentile_column(p, exp_column):
    assert _normcurves.percentile_column(p) == exp_column
