"""
Deviation of individual networks from the age-matched normative network
"""

import dataclasses
import itertools
import math

import numpy as np
import pandas as pd
from scipy import stats

from . import _cohort, _errors, _generator, _graph, _normcurves, _preprocess

import logging  # isort:skip
_log = logging.getLogger(__name__)


MFCS_MODES = ('absolute', 'signed')

RECORD_COLUMNS = (
    'subject_id', 'group', 'age', 'band', 'mfcs_dev',
    'dcpl', 'dge', 'dcc', 'dle', 'dm', 'dbc', 'dpc',
    'mfcs_signed',
)


@dataclasses.dataclass(frozen=True)
class DeviationRecord:
    """Deviation of one subject in one band"""

    subject_id: str
    group: str
    age: float
    band: str
    mfcs_dev: float
    nc_dev: tuple
    mfcs_signed: float = math.nan

    def as_row(self):
        row = {
            'subject_id': self.subject_id,
            'group': self.group,
            'age': float(self.age),
            'band': self.band,
            'mfcs_dev': float(self.mfcs_dev),
        }
        for name, value in zip(_graph.NC_NAMES, self.nc_dev):
            row[f'd{name}'] = float(value)
        row['mfcs_signed'] = float(self.mfcs_signed)
        return row

    @classmethod
    def from_row(cls, row):
        return cls(
            subject_id=str(row['subject_id']),
            group=str(row['group']),
            age=float(row['age']),
            band=str(row['band']),
            mfcs_dev=float(row['mfcs_dev']),
            nc_dev=tuple(float(row[f'd{name}']) for name in _graph.NC_NAMES),
            mfcs_signed=float(row.get('mfcs_signed', math.nan)),
        )


def mfcs_deviation(subject_fc, norm_fc, mode='absolute'):
    """
    Mean difference between two networks over all ``Nc**2`` cells

    :param subject_fc: :class:`~.WeightedNetwork`
    :param norm_fc: :class:`~.WeightedNetwork`
    :param str mode: ``"absolute"`` averages ``|subject - norm|``,
        ``"signed"`` averages ``subject - norm``

    :raise ValueError: if the networks differ in size or `mode` is unknown
    """
    if subject_fc.n != norm_fc.n:
        raise _errors.ValueError(f'Network sizes differ: {subject_fc.n} != {norm_fc.n}')
    diff = subject_fc.weights - norm_fc.weights
    if mode == 'absolute':
        return float(np.sum(np.abs(diff)) / diff.size)
    elif mode == 'signed':
        return float(np.sum(diff) / diff.size)
    raise _errors.ValueError(f'Unknown mode: {mode}')


def mean_strength(net):
    """Mean connectivity strength over all ``Nc**2`` cells of `net`"""
    return float(np.sum(net.weights) / net.weights.size)


def nc_deviation(subject_ncs, norm_ncs):
    """Signed ``subject - norm`` for every NC as :class:`numpy.ndarray`"""
    return subject_ncs.as_array() - norm_ncs.as_array()


@dataclasses.dataclass
class NormContext:
    """
    Everything needed to generate a normative network

    :param model: Trained :class:`~.DecoderModel`
    :param curves: :class:`~.NormativeCurveSet`
    :param band: :class:`~.BandDefinition`
    :param float tau: Threshold applied to both networks before NCs are
        compared (the MFCS always uses unthresholded networks)
    """

    model: _generator.DecoderModel
    curves: _normcurves.NormativeCurveSet
    band: _cohort.BandDefinition
    tau: float = 0.4
    gamma: float = 1.0
    seed: int = 42
    restarts: int = 10
    mode: str = 'absolute'

    def norm_network(self, age, labels=None):
        ncs = _normcurves.normative_mean_ncs(self.curves, self.band.name, age)
        return _generator.predict_network(self.model, age, ncs, labels=labels)

    def ncs(self, net):
        return _graph.compute_ncs(net, tau=self.tau, gamma=self.gamma, seed=self.seed, restarts=self.restarts)


def score_subject(ctx, t, age, subject_id='', group='HC'):
    """
    Compare one subject with the normative network at the subject's age

    :param ctx: :class:`NormContext`
    :param t: :class:`~.CrossSpectrumTensor` (not yet harmonized)
    :param float age: Age in years

    NC deviations are NaN if either thresholded network has no edges.

    :return: :class:`DeviationRecord`
    """
    harmonized, _ = _preprocess.harmonize(t)
    subject_fc = _preprocess.band_coherence(harmonized, ctx.band)
    norm_fc = ctx.norm_network(age, labels=subject_fc.labels)

    try:
        nc_dev = tuple(nc_deviation(ctx.ncs(subject_fc), ctx.ncs(norm_fc)))
    except _errors.DisconnectedError as e:
        _log.warning('%s: No NC deviation: %s', subject_id or 'subject', e)
        nc_dev = (math.nan,) * len(_graph.NC_NAMES)

    return DeviationRecord(
        subject_id=str(subject_id),
        group=str(group),
        age=float(age),
        band=ctx.band.name,
        mfcs_dev=mfcs_deviation(subject_fc, norm_fc, mode=ctx.mode),
        nc_dev=nc_dev,
        mfcs_signed=mfcs_deviation(subject_fc, norm_fc, mode='signed'),
    )


def records_frame(records):
    return pd.DataFrame([r.as_row() for r in records], columns=list(RECORD_COLUMNS))


def write_records(path, records):
    records_frame(records).to_csv(path, index=False, float_format='%.17g')


def read_records(path):
    """
    :raise FormatError: if `path` is not a records table
    """
    try:
        frame = pd.read_csv(path, dtype={'subject_id': str, 'group': str, 'band': str})
        return [DeviationRecord.from_row(row) for row in frame.to_dict('records')]
    except FileNotFoundError:
        raise _errors.FormatError(f'No such file: {path}', path=path)
    except (OSError, KeyError, ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)


@dataclasses.dataclass
class CohortReport:
    """
    :param groups: Mapping of group name to summary statistics
    :param density: :class:`pandas.DataFrame` with columns ``group``, ``x``
        and ``density``
    :param tests: Sequence of rank-sum test results per group pair
    """

    groups: dict
    density: pd.DataFrame
    tests: list

    def to_dict(self):
        return {'groups': self.groups, 'tests': self.tests}


def _sd(values):
    return float(np.std(values, ddof=1)) if len(values) > 1 else 0.0


def cohort_report(records, groups=None, kde_points=200):
    """
    Summarize MFCS and NC deviations per group

    :param records: Sequence of :class:`DeviationRecord`
    :param groups: Group names to report in that order; defaults to every
        group in `records`. Groups without records are skipped with a warning.
    :param int kde_points: Number of evaluation points of each density

    :return: :class:`CohortReport`
    """
    by_group = {}
    for r in records:
        by_group.setdefault(r.group, []).append(r)
    if groups is None:
        groups = sorted(by_group)

    summaries = {}
    density = []
    for name in groups:
        members = by_group.get(name, [])
        if not members:
            _log.warning('Group %s has no records', name)
            continue
        mfcs = np.array([r.mfcs_dev for r in members])
        nc_dev = np.array([r.nc_dev for r in members], dtype=float)
        summaries[name] = {
            'n': len(members),
            'mfcs_mean': float(np.mean(mfcs)),
            'mfcs_sd': _sd(mfcs),
            'mfcs_median': float(np.median(mfcs)),
            'nc_dev': {
                nc: {
                    'mean': _nanmean(nc_dev[:, i]),
                    'sd': _sd(nc_dev[:, i][np.isfinite(nc_dev[:, i])]),
                }
                for i, nc in enumerate(_graph.NC_NAMES)
            },
        }
        if len(mfcs) > 1 and np.ptp(mfcs) > 0:
            kde = stats.gaussian_kde(mfcs)
            pad = 3 * kde.factor * float(np.std(mfcs, ddof=1))
            x = np.linspace(mfcs.min() - pad, mfcs.max() + pad, int(kde_points))
            density.append(pd.DataFrame({'group': name, 'x': x, 'density': kde(x)}))
        else:
            _log.debug('Group %s: no density for fewer than 2 distinct values', name)

    tests = []
    for a, b in itertools.combinations(summaries, 2):
        result = stats.ranksums(
            [r.mfcs_dev for r in by_group[a]],
            [r.mfcs_dev for r in by_group[b]],
        )
        tests.append({
            'group_a': a,
            'group_b': b,
            'statistic': float(result.statistic),
            'pvalue': float(result.pvalue),
        })

    density = pd.concat(density, ignore_index=True) if density else pd.DataFrame(
        columns=['group', 'x', 'density'],
    )
    return CohortReport(groups=summaries, density=density, tests=tests)


def _nanmean(values):
    finite = values[np.isfinite(values)]
    return float(np.mean(finite)) if len(finite) else math.nan
