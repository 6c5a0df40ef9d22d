"""
Synthetic cohorts with known coherence structure
"""

import dataclasses
import math
import os

import numpy as np
import pandas as pd

from . import _cohort, _errors, _graph, _preprocess, _utils

import logging  # isort:skip
_log = logging.getLogger(__name__)


# Approximate 10/20 electrode positions on the unit sphere (x right, y front, z up)
SCALP_POSITIONS = {
    'Fp1': (-0.31, 0.95, 0.0), 'Fp2': (0.31, 0.95, 0.0),
    'F3': (-0.55, 0.67, 0.5), 'F4': (0.55, 0.67, 0.5),
    'C3': (-0.72, 0.0, 0.69), 'C4': (0.72, 0.0, 0.69),
    'P3': (-0.55, -0.67, 0.5), 'P4': (0.55, -0.67, 0.5),
    'O1': (-0.31, -0.95, 0.0), 'O2': (0.31, -0.95, 0.0),
    'F7': (-0.81, 0.59, 0.0), 'F8': (0.81, 0.59, 0.0),
    'T3': (-1.0, 0.0, 0.0), 'T4': (1.0, 0.0, 0.0),
    'T5': (-0.81, -0.59, 0.0), 'T6': (0.81, -0.59, 0.0),
    'Fz': (0.0, 0.72, 0.69), 'Cz': (0.0, 0.0, 1.0), 'Pz': (0.0, -0.72, 0.69),
}

TRUTH_COLUMNS = (
    'subject_id', 'group', 'age', 'band', 'rho',
    'intended_coherence', 'measured_coherence',
) + _graph.NC_NAMES + tuple(f'intended_{name}' for name in _graph.NC_NAMES)
"""NC columns without prefix are measured on the generated tensor"""


@dataclasses.dataclass(frozen=True)
class EffectSpec:
    """
    Connectivity strength as inverted U over log-age

    ``rho(age) = base + (peak - base) * exp(-(ln age - ln peak_age)**2 / (2 * width**2))``
    """

    base: float
    peak: float
    peak_age: float = 30.0
    width: float = 0.8

    def rho(self, age):
        shape = math.exp(-(math.log(age) - math.log(self.peak_age)) ** 2 / (2 * self.width ** 2))
        return self.base + (self.peak - self.base) * shape


DEFAULT_EFFECTS = {
    'delta': EffectSpec(base=0.5, peak=0.6, peak_age=8.0, width=1.0),
    'theta': EffectSpec(base=0.45, peak=0.55, peak_age=12.0, width=1.0),
    'alpha': EffectSpec(base=0.35, peak=0.9, peak_age=30.0, width=0.8),
    'beta': EffectSpec(base=0.3, peak=0.5, peak_age=40.0, width=1.0),
}


@dataclasses.dataclass
class SynthConfig:
    """
    Settings for :func:`generate`

    :param n_subjects: Number of subjects
    :param age_range: Minimum and maximum age in years
    :param age_law: ``"log-uniform"`` or ``"uniform"``
    :param seed: Root seed; subject ``i`` uses the stream ``(seed, i)``
    :param noise: Standard deviation of the per-subject perturbation of the
        latent correlation structure
    :param effects: Mapping of band name to :class:`EffectSpec`
    :param attenuation: Fraction by which all coherences are reduced
        (e.g. 0.2 for a patient group)
    :param length_scale: Spatial decay of coherence between electrodes
    :param gain_spread: Standard deviation of log channel gains
    :param group: Group label of the generated subjects
    :param id_prefix: Prefix of generated subject IDs
    """

    n_subjects: int = 200
    age_range: tuple = (5.0, 97.0)
    age_law: str = 'log-uniform'
    seed: int = 1
    noise: float = 0.05
    effects: dict = dataclasses.field(default_factory=lambda: dict(DEFAULT_EFFECTS))
    attenuation: float = 0.0
    length_scale: float = 1.5
    gain_spread: float = 0.3
    group: str = 'HC'
    id_prefix: str = 'sub-'
    truth_restarts: int = 1
    bands: tuple = _cohort.DEFAULT_BANDS

    def validate(self):
        """
        :raise ValueError: if any setting is invalid or an effect requests
            coherence outside ``[0, 1]``
        """
        if int(self.n_subjects) < 1:
            raise _errors.ValueError(f'Invalid number of subjects: {self.n_subjects!r}')
        lo, hi = self.age_range
        if not 0 < lo <= hi < 130:
            raise _errors.ValueError(f'Invalid age range: {lo!r}-{hi!r}')
        if self.age_law not in ('log-uniform', 'uniform'):
            raise _errors.ValueError(f'Invalid age law: {self.age_law!r}')
        if not self.noise >= 0:
            raise _errors.ValueError(f'Invalid noise level: {self.noise!r}')
        if not 0 <= self.attenuation < 1:
            raise _errors.ValueError(f'Invalid attenuation: {self.attenuation!r}')
        if not self.length_scale > 0:
            raise _errors.ValueError(f'Invalid length scale: {self.length_scale!r}')
        for name, effect in self.effects.items():
            # Extremes of the inverted U are base and peak
            for value in (effect.base, effect.peak):
                if not 0 <= value <= 1:
                    raise _errors.ValueError(
                        f'Infeasible effect for band {name}: coherence {value!r} is outside [0, 1]'
                    )
            if not (effect.peak_age > 0 and effect.width > 0):
                raise _errors.ValueError(f'Invalid effect for band {name}: {effect!r}')


def _positions(montage):
    try:
        return np.array([SCALP_POSITIONS[name] for name in montage.names], dtype=float)
    except KeyError:
        # Unknown labels: equally spaced on a circle
        angles = np.linspace(0, 2 * np.pi, montage.count, endpoint=False)
        return np.stack([np.cos(angles), np.sin(angles), np.zeros(montage.count)], axis=1)


def _distances(montage):
    pos = _positions(montage)
    return np.sqrt(np.sum((pos[:, None, :] - pos[None, :, :]) ** 2, axis=-1))


def _rho(config, band_name, age):
    effect = config.effects.get(band_name)
    rho = effect.rho(age) if effect else 0.3
    return rho * (1 - config.attenuation)


def latent_correlation(config, band_name, age, montage=None):
    """
    Real correlation matrix whose squared entries are the intended coherence

    ``sqrt(rho) * exp(-d / (2 * length_scale))`` off the diagonal, which is
    positive definite for Euclidean electrode distances ``d``.
    """
    montage = montage or _cohort.ChannelMontage()
    kernel = np.exp(-_distances(montage) / (2 * config.length_scale))
    s = math.sqrt(_rho(config, band_name, age))
    return s * kernel + (1 - s) * np.eye(montage.count)


def latent_coherence(config, band_name, age, montage=None):
    """
    Intended coherence network ``rho(age) * exp(-d / length_scale)``

    :return: :class:`~.WeightedNetwork`
    """
    montage = montage or _cohort.ChannelMontage()
    c = latent_correlation(config, band_name, age, montage) ** 2
    np.fill_diagonal(c, 0.0)
    return _graph.WeightedNetwork(c, labels=montage.names)


def _perturb(r, noise, rng):
    if noise <= 0:
        return r
    n = r.shape[0]
    e = np.triu(rng.normal(0.0, noise, size=(n, n)), 1)
    noisy = r + e + e.T
    vals, vecs = np.linalg.eigh(noisy)
    noisy = (vecs * np.clip(vals, 1e-6, None)) @ vecs.T
    d = np.sqrt(np.diagonal(noisy))
    noisy = noisy / np.outer(d, d)
    return 0.5 * (noisy + noisy.T)


def _sample_age(config, rng):
    lo, hi = (float(a) for a in config.age_range)
    if config.age_law == 'log-uniform':
        return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))
    return float(rng.uniform(lo, hi))


@dataclasses.dataclass
class SynthCohort:
    """
    Generated subjects, their tensors and the ground truth

    :param networks: Mapping of ``(subject_id, band_name)`` to the band
        coherence :class:`~.WeightedNetwork` measured on the tensor
    """

    entries: list
    truth: pd.DataFrame
    config: SynthConfig
    networks: dict = dataclasses.field(default_factory=dict)

    def save(self, manifest_path, truth_path=None, network_dir=None):
        """
        Write manifest, tensors, truth table and measured networks

        :return: :class:`~.DatasetManifest`
        """
        manifest = _cohort.save_dataset(
            manifest_path,
            self.entries,
            provenance={
                'generator': 'eegnorm.synth',
                'seed': self.config.seed,
                'n_subjects': self.config.n_subjects,
                'noise': self.config.noise,
                'attenuation': self.config.attenuation,
                'group': self.config.group,
            },
        )
        if truth_path:
            self.truth.to_csv(truth_path, index=False, float_format='%.17g')
        if network_dir:
            self.save_networks(network_dir)
        return manifest

    def save_networks(self, directory):
        """Write every measured network as ``<subject_id>.<band>.fc`` into `directory`"""
        _utils.makedirs(directory)
        for (subject_id, band_name), net in self.networks.items():
            _graph.write_network(os.path.join(directory, _graph.network_filename(subject_id, band_name)), net)


def _truth_ncs(net, restarts, prefix=''):
    try:
        ncs = _graph.compute_ncs(net, tau=0.0, restarts=restarts).as_dict()
    except _errors.DisconnectedError:
        ncs = dict.fromkeys(_graph.NC_NAMES, math.nan)
    return {f'{prefix}{name}': value for name, value in ncs.items()}


def _generate_subject(config, index, montage, grid):
    rng = _utils.rng(config.seed, index)
    age = _sample_age(config, rng)
    subject = _cohort.SubjectRecord(
        subject_id=f'{config.id_prefix}{index + 1:04d}',
        age=age,
        site='synth',
        sex=(_cohort.Sex.M, _cohort.Sex.F)[int(rng.integers(2))],
        group=config.group,
    )

    # Latent structure per band
    freqs = grid.freqs
    band_of = np.full(grid.count, -1)
    for b_index, b in enumerate(config.bands):
        band_of[b.indexes(grid)] = b_index
    correlations = [
        _perturb(latent_correlation(config, b.name, age, montage), config.noise, rng)
        for b in config.bands
    ]
    fallback = latent_correlation(config, '', age, montage)

    gains = np.exp(rng.normal(0.0, config.gain_spread, size=montage.count))
    scale = math.exp(rng.normal(0.0, 1.0))
    data = np.empty((grid.count, montage.count, montage.count), dtype=complex)
    for k, f in enumerate(freqs):
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=montage.count))
        u = math.sqrt(scale / f) * gains * phases
        r = correlations[band_of[k]] if band_of[k] >= 0 else fallback
        data[k] = u[:, None] * r * np.conj(u)[None, :]
    t = _cohort.CrossSpectrumTensor(data, montage=montage, grid=grid)

    rows, networks = [], {}
    upper = np.triu_indices(montage.count, 1)
    for b in config.bands:
        intended = latent_coherence(config, b.name, age, montage)
        # Truth comes from the tensor after PSD projection, not from the latent structure
        measured = _preprocess.band_coherence(t, b)
        networks[(subject.subject_id, b.name)] = measured
        rows.append({
            'subject_id': subject.subject_id,
            'group': subject.group,
            'age': age,
            'band': b.name,
            'rho': _rho(config, b.name, age),
            'intended_coherence': float(np.mean(intended.weights[upper])),
            'measured_coherence': float(np.mean(measured.weights[upper])),
            **_truth_ncs(measured, config.truth_restarts),
            **_truth_ncs(intended, config.truth_restarts, prefix='intended_'),
        })
    return subject, t, rows, networks


def generate(config=None, montage=None, grid=None, jobs=1):
    """
    Generate synthetic cohort

    Each subject's cross-spectrum at frequency ``f`` is ``u R u^H`` with
    ``u = sqrt(scale / f) * gains * exp(i * phases)`` and ``R`` the
    (perturbed) latent correlation of the band containing ``f``, so the
    coherence of the tensor equals the squared entries of ``R``.

    :param config: :class:`SynthConfig`
    :param int jobs: Number of subjects generated concurrently

    :raise ValueError: if `config` is invalid

    :return: :class:`SynthCohort`
    """
    config = config or SynthConfig()
    config.validate()
    montage = montage or _cohort.ChannelMontage()
    grid = grid or _cohort.FrequencyGrid()

    results = _utils.run_jobs(
        lambda index: _generate_subject(config, index, montage, grid),
        range(int(config.n_subjects)),
        jobs=jobs,
    )
    entries = [(subject, t) for subject, t, _, _ in results]
    truth = pd.DataFrame(
        [row for _, _, rows, _ in results for row in rows],
        columns=list(TRUTH_COLUMNS),
    )
    networks = {key: net for *_, nets in results for key, net in nets.items()}
    _log.debug('Generated %d %s subjects (seed=%d)', len(entries), config.group, config.seed)
    return SynthCohort(entries=entries, truth=truth, config=config, networks=networks)
