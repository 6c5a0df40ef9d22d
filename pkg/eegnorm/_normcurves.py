"""
Age-dependent percentile curves of network characteristics

Each curve is a Box-Cox-t (BCT) distribution whose location and scale vary
smoothly with log-age (penalized cubic B-splines) while the shape parameters
are scalars.
"""

import dataclasses
import math

import numpy as np
import pandas as pd
import scipy.linalg
from scipy import special
from scipy.interpolate import BSpline

from . import _errors, _graph, _utils

import logging  # isort:skip
_log = logging.getLogger(__name__)


CURVES_VERSION = 1
DEFAULT_PERCENTILES = (0.05, 0.25, 0.5, 0.75, 0.95)

# Below this |nu| the Box-Cox transform is treated as log
_NU_ZERO = 1e-10

# Smallest scale; log values with less residual spread keep this scale unfitted
_SIGMA_FLOOR = 1e-8


@dataclasses.dataclass
class GamlssConfig:
    """Settings for :func:`fit_gamlss`"""

    mu_knots: int = 20
    """Number of interior knots of the location curve"""

    sigma_knots: int = 5
    """Number of interior knots of the scale curve"""

    n_lambdas: int = 20
    """Size of the log-spaced smoothing parameter grid searched by GCV"""

    lambda_range: tuple = (1e-6, 1e4)
    """Smoothing parameter grid bounds relative to ``tr(B'WB) / tr(P)``"""

    max_iter: int = 200
    tol: float = 1e-6
    """Convergence threshold for the change of penalized deviance per observation"""

    gcv_cycles: int = 3
    """Number of initial cycles in which smoothing parameters are re-selected"""

    nu_bounds: tuple = (-4.0, 4.0)
    tau_bounds: tuple = (1.0, 1e4)
    max_halvings: int = 20
    min_samples: int = 50


class SplineModel:
    """
    Cubic B-spline on equally spaced knots over ``[lo, hi]``

    Evaluation outside ``[lo, hi]`` uses the boundary value.

    :param float lo: Lower end of the domain
    :param float hi: Upper end of the domain
    :param int n_interior: Number of interior knots
    :param coef: Basis coefficients (``n_interior + 4`` values); defaults to
        zeros
    :param float lam: Smoothing parameter the coefficients were fitted with
    """

    degree = 3
    penalty_order = 2

    def __init__(self, lo, hi, n_interior, coef=None, lam=0.0):
        self.lo = float(lo)
        self.hi = float(hi)
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.hi > self.lo):
            raise _errors.ValueError(f'Invalid spline domain: [{lo!r}, {hi!r}]')
        self.n_interior = int(n_interior)
        if self.n_interior < 0:
            raise _errors.ValueError(f'Invalid number of knots: {n_interior!r}')
        if coef is None:
            coef = np.zeros(self.size)
        coef = np.asarray(coef, dtype=float)
        if coef.shape != (self.size,):
            raise _errors.ValueError(f'Expected {self.size} coefficients, got {coef.shape}')
        self.coef = coef
        self.lam = float(lam)

    @property
    def size(self):
        """Number of basis functions"""
        return self.n_interior + self.degree + 1

    @_utils.cached_property
    def knots(self):
        k = self.degree
        dx = (self.hi - self.lo) / (self.n_interior + 1)
        return self.lo + dx * np.arange(-k, self.n_interior + 2 + k)

    def design(self, x):
        """Basis matrix of shape ``(len(x), size)``"""
        k = self.degree
        t = self.knots
        x = np.clip(np.atleast_1d(np.asarray(x, dtype=float)), t[k], t[-k - 1])
        return BSpline.design_matrix(x, t, k).toarray()

    @_utils.cached_property
    def penalty(self):
        """Difference penalty matrix ``D'D``"""
        d = np.diff(np.eye(self.size), n=self.penalty_order, axis=0)
        return d.T @ d

    def __call__(self, x):
        return self.design(x) @ self.coef

    def as_dict(self):
        return {
            'lo': self.lo,
            'hi': self.hi,
            'n_interior': self.n_interior,
            'degree': self.degree,
            'coef': [float(c) for c in self.coef],
            'lam': self.lam,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d['lo'], d['hi'], d['n_interior'], coef=d['coef'], lam=d.get('lam', 0.0))


@dataclasses.dataclass
class FitDiagnostics:
    n: int
    iterations: int
    deviance: float
    penalized_deviance: float
    edf_mu: float
    trace: tuple = ()

    def as_dict(self):
        d = dataclasses.asdict(self)
        d['trace'] = [float(v) for v in self.trace]
        return d


class BCTFamily:
    """
    Fitted Box-Cox-t distribution over log-age

    :param mu_curve: :class:`SplineModel` of ``log(mu)``
    :param sigma_curve: :class:`SplineModel` of ``log(sigma)``
    :param float nu: Box-Cox power
    :param float tau: Degrees of freedom of the t distribution
    :param float offset: Added to values before fitting to make them positive
    :param diagnostics: :class:`FitDiagnostics` or `None`
    """

    def __init__(self, mu_curve, sigma_curve, nu, tau, offset=0.0, diagnostics=None):
        self.mu_curve = mu_curve
        self.sigma_curve = sigma_curve
        self.nu = float(nu)
        self.tau = float(tau)
        if not self.tau > 0:
            raise _errors.ValueError(f'Invalid degrees of freedom: {tau!r}')
        self.offset = float(offset)
        self.diagnostics = diagnostics

    @property
    def domain(self):
        """Log-age interval the curves were fitted on"""
        return self.mu_curve.lo, self.mu_curve.hi

    @property
    def age_range(self):
        return math.exp(self.mu_curve.lo), math.exp(self.mu_curve.hi)

    def mu(self, x):
        return np.exp(self.mu_curve(x))

    def sigma(self, x):
        return np.exp(self.sigma_curve(x))

    def log_age(self, ages):
        """
        Return clamped log-ages

        :raise ValueError: if any age is not positive
        """
        ages = np.atleast_1d(np.asarray(ages, dtype=float))
        if np.any(~(ages > 0)):
            raise _errors.ValueError(f'Invalid age: {float(ages[~(ages > 0)][0])!r}')
        x = np.log(ages)
        lo, hi = self.domain
        outside = (x < lo - 1e-12) | (x > hi + 1e-12)
        if np.any(outside):
            amin, amax = self.age_range
            _log.warning(
                'Age %g is outside the fitted range %g-%g, using boundary value',
                float(ages[outside][0]), amin, amax,
            )
        return np.clip(x, lo, hi)

    def as_dict(self):
        return {
            'mu': self.mu_curve.as_dict(),
            'sigma': self.sigma_curve.as_dict(),
            'nu': self.nu,
            'tau': self.tau,
            'offset': self.offset,
            'diagnostics': self.diagnostics.as_dict() if self.diagnostics else None,
        }

    @classmethod
    def from_dict(cls, d):
        diagnostics = d.get('diagnostics')
        if diagnostics is not None:
            diagnostics = FitDiagnostics(**{**diagnostics, 'trace': tuple(diagnostics.get('trace', ()))})
        return cls(
            mu_curve=SplineModel.from_dict(d['mu']),
            sigma_curve=SplineModel.from_dict(d['sigma']),
            nu=d['nu'],
            tau=d['tau'],
            offset=d.get('offset', 0.0),
            diagnostics=diagnostics,
        )

    def __repr__(self):
        return (
            f'<{type(self).__name__} nu={self.nu:.4g} tau={self.tau:.4g} '
            f'offset={self.offset:.4g}>'
        )


def _check_probability(p):
    p = float(p)
    if not 0 < p < 1:
        raise _errors.ValueError(f'Probability must be in (0, 1): {p!r}')
    return p


def _quantiles(f, ages, p):
    x = f.log_age(ages)
    mu = f.mu(x)
    sigma = f.sigma(x)
    z = special.stdtrit(f.tau, p)
    if abs(f.nu) < _NU_ZERO:
        y = mu * np.exp(sigma * z)
    else:
        base = 1 + sigma * f.nu * z
        if np.any(base <= 0):
            age = float(np.atleast_1d(ages)[np.argmax(base <= 0)])
            raise _errors.ValueError(
                f'Quantile p={p:g} at age {age:g} is outside the support of the distribution'
            )
        y = mu * base ** (1 / f.nu)
    return y - f.offset


def bct_quantile(f, age, p):
    """
    Value below which a fraction `p` of the population at `age` lies

    :param f: :class:`BCTFamily`
    :param float age: Age in years; clamped to the fitted range
    :param float p: Probability in ``(0, 1)``

    :raise ValueError: if `p` or `age` is invalid or the quantile is outside
        the distribution's support
    """
    return float(_quantiles(f, age, _check_probability(p))[0])


def bct_cdf(f, age, y):
    """
    Fraction of the population at `age` with a value of at most `y`

    :raise ValueError: if `y` is outside the support
    """
    x = f.log_age(age)
    yy = float(y) + f.offset
    if not yy > 0:
        raise _errors.ValueError(f'Value is outside the support of the distribution: {float(y)!r}')
    mu = f.mu(x)[0]
    sigma = f.sigma(x)[0]
    z = _z(np.log(yy) - np.log(mu), sigma, f.nu)
    return float(special.stdtr(f.tau, z))


def support_offset(values):
    """Shift that makes all `values` positive (0 if they already are)"""
    values = np.asarray(values, dtype=float)
    vmin, vmax = float(np.min(values)), float(np.max(values))
    if vmin > 0:
        return 0.0
    return -vmin + 0.05 * (vmax - vmin) + 1e-6


# Fitting

def _z(logratio, sigma, nu):
    if abs(nu) < _NU_ZERO:
        return logratio / sigma
    return np.expm1(nu * logratio) / (nu * sigma)


class _Backfit:
    """Mutable state of one RS-style fit"""

    def __init__(self, x, y, config):
        self.config = config
        self.x = x
        self.y = y
        self.logy = np.log(y)
        self.n = len(y)
        lo, hi = float(np.min(x)), float(np.max(x))
        if not hi > lo:
            raise _errors.ValueError('Ages must not all be equal')
        self.mu_spline = SplineModel(lo, hi, config.mu_knots)
        self.sigma_spline = SplineModel(lo, hi, config.sigma_knots)
        self.B_mu = self.mu_spline.design(x)
        self.B_sigma = self.sigma_spline.design(x)
        self.lam_grid = np.logspace(
            math.log10(config.lambda_range[0]),
            math.log10(config.lambda_range[1]),
            config.n_lambdas,
        )

        # Location from penalized least squares on log values
        beta, lam = self._select(self.B_mu, self.mu_spline.penalty, np.ones(self.n), self.logy)
        self.beta_mu, self.lam_mu = beta, lam
        resid = self.logy - self.B_mu @ beta
        sigma0 = float(np.std(resid))
        self.degenerate = sigma0 < _SIGMA_FLOOR
        sigma0 = max(sigma0, _SIGMA_FLOOR)
        self.beta_sigma = np.full(self.sigma_spline.size, math.log(sigma0))
        self.lam_sigma = 0.0
        self.nu = 0.0
        self.log_tau = math.log(10.0)

    # Likelihood

    @property
    def tau(self):
        return math.exp(self.log_tau)

    def _params(self):
        eta_mu = self.B_mu @ self.beta_mu
        sigma = np.exp(self.B_sigma @ self.beta_sigma)
        logratio = self.logy - eta_mu
        z = _z(logratio, sigma, self.nu)
        return eta_mu, sigma, logratio, z

    def deviance(self):
        eta_mu, sigma, logratio, z = self._params()
        tau = self.tau
        loglik = (
            (self.nu - 1) * self.logy - self.nu * eta_mu - np.log(sigma)
            + special.gammaln((tau + 1) / 2) - special.gammaln(tau / 2)
            - 0.5 * np.log(np.pi * tau)
            - (tau + 1) / 2 * np.log1p(z ** 2 / tau)
        )
        return float(-2 * np.sum(loglik))

    def penalized_deviance(self):
        return (
            self.deviance()
            + self.lam_mu * float(self.beta_mu @ self.mu_spline.penalty @ self.beta_mu)
            + self.lam_sigma * float(self.beta_sigma @ self.sigma_spline.penalty @ self.beta_sigma)
        )

    # Penalized weighted least squares

    def _select(self, B, P, w, r):
        """Return coefficients and smoothing parameter with minimal GCV"""
        A = (B.T * w) @ B
        rhs = (B.T * w) @ r
        scale = np.trace(A) / np.trace(P)
        best = None
        for rel in self.lam_grid:
            lam = rel * scale
            M = A + lam * P
            beta = _solve(M, rhs)
            edf = float(np.trace(_solve(M, A)))
            resid = r - B @ beta
            rss = float(np.sum(w * resid ** 2))
            gcv = self.n * rss / max(self.n - edf, 1e-9) ** 2
            if best is None or gcv < best[0]:
                best = (gcv, beta, lam)
        return best[1], best[2]

    def _pwls(self, B, P, w, r, lam):
        A = (B.T * w) @ B
        rhs = (B.T * w) @ r
        return _solve(A + lam * P, rhs)

    def _accept(self, name, new, check):
        """Set attribute `name` to `new`, halving the step while deviance increases"""
        old = getattr(self, name)
        if not check:
            setattr(self, name, new)
            return
        before = self.penalized_deviance()
        for _ in range(self.config.max_halvings + 1):
            setattr(self, name, new)
            after = self.penalized_deviance()
            if math.isfinite(after) and after <= before:
                return
            new = 0.5 * (old + new)
        setattr(self, name, old)

    # Block updates

    def update_mu(self, select):
        eta_mu, sigma, logratio, z = self._params()
        tau, nu = self.tau, self.nu
        w = (tau + 1) / (tau + z ** 2)
        u = w * z / sigma + nu * (w * z ** 2 - 1)
        W = (tau + 2 * nu ** 2 * sigma ** 2 * tau + 1) / ((tau + 3) * sigma ** 2)
        r = eta_mu + u / W
        P = self.mu_spline.penalty
        if select:
            beta, self.lam_mu = self._select(self.B_mu, P, W, r)
        else:
            beta = self._pwls(self.B_mu, P, W, r, self.lam_mu)
        self._accept('beta_mu', beta, check=not select)

    def update_sigma(self, select):
        _, sigma, _, z = self._params()
        tau = self.tau
        w = (tau + 1) / (tau + z ** 2)
        u = w * z ** 2 - 1
        W = np.full(self.n, 2 * tau / (tau + 3))
        r = np.log(sigma) + u / W
        P = self.sigma_spline.penalty
        if select:
            beta, self.lam_sigma = self._select(self.B_sigma, P, W, r)
        else:
            beta = self._pwls(self.B_sigma, P, W, r, self.lam_sigma)
        self._accept('beta_sigma', beta, check=not select)

    def update_nu(self, select):
        _, sigma, logratio, z = self._params()
        tau, nu = self.tau, self.nu
        w = (tau + 1) / (tau + z ** 2)
        if abs(nu) < _NU_ZERO:
            shift = logratio ** 2 / (2 * sigma)
            u = w * z * shift - logratio * (w * z ** 2 - 1)
        else:
            # (wz/nu) * (z - log(y/mu)/sigma) without cancellation for small nu
            shift = (np.expm1(nu * logratio) - nu * logratio) / (nu * sigma)
            u = (w * z / nu) * shift - logratio * (w * z ** 2 - 1)
        info = float(np.sum(u ** 2))
        if not info > 0:
            return
        lo, hi = self.config.nu_bounds
        new = float(np.clip(nu + np.sum(u) / info, lo, hi))
        self._accept('nu', new, check=True)

    def update_tau(self, select):
        _, _, _, z = self._params()
        tau = self.tau
        dldt = (
            -0.5 * np.log1p(z ** 2 / tau)
            + (tau + 1) * z ** 2 / (2 * tau * (tau + z ** 2))
            + 0.5 * special.digamma((tau + 1) / 2)
            - 0.5 * special.digamma(tau / 2)
            - 1 / (2 * tau)
        )
        u = tau * dldt
        info = float(np.sum(u ** 2))
        if not info > 0:
            return
        lo, hi = (math.log(b) for b in self.config.tau_bounds)
        new = float(np.clip(self.log_tau + np.sum(u) / info, lo, hi))
        self._accept('log_tau', new, check=True)

    def edf_mu(self):
        _, sigma, _, z = self._params()
        tau, nu = self.tau, self.nu
        W = (tau + 2 * nu ** 2 * sigma ** 2 * tau + 1) / ((tau + 3) * sigma ** 2)
        A = (self.B_mu.T * W) @ self.B_mu
        return float(np.trace(_solve(A + self.lam_mu * self.mu_spline.penalty, A)))

    def run(self):
        cfg = self.config
        trace = []
        previous = None
        if self.degenerate:
            _log.debug('Values have no spread around the median curve, scale fixed at %g', _SIGMA_FLOOR)
            return 0, trace
        for cycle in range(cfg.max_iter):
            select = cycle < cfg.gcv_cycles
            self.update_mu(select)
            self.update_sigma(select)
            self.update_nu(select)
            self.update_tau(select)
            pdev = self.penalized_deviance()
            if not math.isfinite(pdev):
                raise _errors.ConvergenceError(
                    f'Deviance became non-finite in cycle {cycle + 1}',
                    trace=trace,
                )
            _log.debug(
                'Cycle %d: pdev=%.10g nu=%.4g tau=%.4g lam_mu=%.3g lam_sigma=%.3g',
                cycle + 1, pdev, self.nu, self.tau, self.lam_mu, self.lam_sigma,
            )
            if select:
                continue
            trace.append(pdev)
            if previous is not None and abs(previous - pdev) < cfg.tol * self.n:
                return cycle + 1, trace
            previous = pdev
        raise _errors.ConvergenceError(
            f'No convergence after {cfg.max_iter} cycles',
            trace=trace,
        )

    def family(self, iterations, trace, offset):
        mu_curve = SplineModel(
            self.mu_spline.lo, self.mu_spline.hi, self.mu_spline.n_interior,
            coef=self.beta_mu, lam=self.lam_mu,
        )
        sigma_curve = SplineModel(
            self.sigma_spline.lo, self.sigma_spline.hi, self.sigma_spline.n_interior,
            coef=self.beta_sigma, lam=self.lam_sigma,
        )
        return BCTFamily(
            mu_curve=mu_curve,
            sigma_curve=sigma_curve,
            nu=self.nu,
            tau=self.tau,
            offset=offset,
            diagnostics=FitDiagnostics(
                n=self.n,
                iterations=iterations,
                deviance=self.deviance(),
                penalized_deviance=self.penalized_deviance(),
                edf_mu=self.edf_mu(),
                trace=tuple(trace),
            ),
        )


def _solve(M, rhs):
    try:
        return scipy.linalg.solve(M, rhs, assume_a='sym')
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(M, rhs, rcond=None)[0]


def fit_gamlss(ages, values, config=None, offset=0.0):
    """
    Fit :class:`BCTFamily` to `values` against log-age

    Location and scale curves are updated in turn by penalized weighted least
    squares with Fisher scoring weights, the shape parameters by scoring
    steps. Smoothing parameters are chosen by generalized cross-validation in
    the first :attr:`~.GamlssConfig.gcv_cycles` cycles and then fixed.

    :param ages: Ages in years
    :param values: Observed values; ``values + offset`` must be positive
    :param config: :class:`GamlssConfig`
    :param float offset: Shift applied before fitting and undone by
        :func:`bct_quantile`

    :raise ValueError: if there are too few samples or invalid values
    :raise ConvergenceError: if the fit does not converge

    :return: :class:`BCTFamily`
    """
    config = config or GamlssConfig()
    ages = np.asarray(ages, dtype=float)
    values = np.asarray(values, dtype=float) + float(offset)
    if ages.shape != values.shape or ages.ndim != 1:
        raise _errors.ValueError('Ages and values must be sequences of equal length')
    if len(ages) < config.min_samples:
        raise _errors.ValueError(f'Need at least {config.min_samples} samples, got {len(ages)}')
    if np.any(~(ages > 0)) or not np.all(np.isfinite(ages)):
        raise _errors.ValueError('Ages must be positive and finite')
    if np.any(~(values > 0)) or not np.all(np.isfinite(values)):
        raise _errors.ValueError('Values must be positive and finite')

    # Sorting makes the fit independent of sample order
    order = np.lexsort((values, ages))
    fit = _Backfit(np.log(ages[order]), values[order], config)
    iterations, trace = fit.run()
    family = fit.family(iterations, trace, offset)
    _log.debug('Fitted %r in %d cycles', family, iterations)
    return family


class NormativeCurveSet:
    """
    :class:`BCTFamily` per (band, NC) cell

    :param families: Mapping of ``(band, nc)`` to :class:`BCTFamily`
    :param failures: Mapping of ``(band, nc)`` to error record
    """

    def __init__(self, families=None, failures=None):
        self._families = dict(families or {})
        self._failures = dict(failures or {})

    @property
    def cells(self):
        """Fitted ``(band, nc)`` pairs"""
        return tuple(self._families)

    @property
    def failures(self):
        return dict(self._failures)

    @property
    def bands(self):
        bands = []
        for band, _ in self._families:
            if band not in bands:
                bands.append(band)
        return tuple(bands)

    def family(self, band, nc):
        """
        :raise ValueError: if the cell was not fitted
        """
        try:
            return self._families[(str(band), str(nc))]
        except KeyError:
            raise _errors.ValueError(f'No curve for {nc} in band {band}')

    def __len__(self):
        return len(self._families)

    def as_dict(self):
        return {
            'version': CURVES_VERSION,
            'curves': [
                {'band': band, 'nc': nc, 'family': f.as_dict()}
                for (band, nc), f in self._families.items()
            ],
            'failures': [
                {'band': band, 'nc': nc, 'error': record}
                for (band, nc), record in self._failures.items()
            ],
        }

    def save(self, path):
        _utils.write_json(path, self.as_dict())

    @classmethod
    def load(cls, path):
        """
        :raise FormatError: if `path` is not a curve set file
        """
        raw = _utils.read_json(path)
        try:
            if raw['version'] != CURVES_VERSION:
                raise _errors.FormatError(f'{path}: Unsupported version: {raw["version"]!r}', path=path)
            families = {
                (c['band'], c['nc']): BCTFamily.from_dict(c['family'])
                for c in raw['curves']
            }
            failures = {(c['band'], c['nc']): c['error'] for c in raw.get('failures', [])}
        except (KeyError, TypeError, _errors.ValueError) as e:
            raise _errors.FormatError(f'{path}: Invalid curve set: {e}', path=path)
        return cls(families, failures)


def fit_all(table, config=None, jobs=1):
    """
    Fit one curve per band and NC

    :param table: :class:`pandas.DataFrame` as returned by
        :func:`~.nc_table`
    :param config: :class:`GamlssConfig`
    :param int jobs: Number of cells fitted concurrently

    Cells that fail are logged and recorded in
    :attr:`NormativeCurveSet.failures`.

    :return: :class:`NormativeCurveSet`
    """
    config = config or GamlssConfig()
    cells = [
        (str(band), nc)
        for band in pd.unique(table['band'])
        for nc in _graph.NC_NAMES
    ]

    def fit_cell(cell):
        band, nc = cell
        rows = table[table['band'] == band]
        values = rows[nc].to_numpy(dtype=float)
        try:
            offset = support_offset(values) if len(values) else 0.0
            return fit_gamlss(rows['age'].to_numpy(dtype=float), values, config, offset=offset)
        except (_errors.ValueError, _errors.ConvergenceError) as e:
            _log.warning('Fitting %s in band %s failed: %s', nc, band, e)
            return e

    results = _utils.run_jobs(fit_cell, cells, jobs=jobs)
    families, failures = {}, {}
    for cell, result in zip(cells, results):
        if isinstance(result, _errors.Error):
            failures[cell] = result.as_record()
        else:
            families[cell] = result
    return NormativeCurveSet(families, failures)


def percentile_table(curves, band, nc, ages, ps=DEFAULT_PERCENTILES):
    """
    Quantiles of one cell over `ages`

    :param curves: :class:`NormativeCurveSet`
    :param ages: Ages in years
    :param ps: Probabilities

    :return: :class:`pandas.DataFrame` with column ``age`` and one column per
        probability named like ``p5``, ``p50``
    """
    f = curves.family(band, nc)
    ages = np.asarray(ages, dtype=float)
    table = {'age': ages}
    for p in ps:
        table[percentile_column(p)] = _quantiles(f, ages, _check_probability(p))
    return pd.DataFrame(table)


def percentile_column(p):
    return f'p{float(p) * 100:g}'


def normative_mean_ncs(curves, band, age):
    """
    Median of every NC at `age`

    :raise ValueError: if a cell of `band` is missing

    :return: :class:`~.NCVector`
    """
    return _graph.NCVector.from_array([
        bct_quantile(curves.family(band, nc), age, 0.5)
        for nc in _graph.NC_NAMES
    ])
