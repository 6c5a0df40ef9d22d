import math
import re

import numpy as np
import pandas as pd
import pytest

from eegnorm import _cohort, _errors, _graph, _preprocess, _synth


def test_EffectSpec_is_inverted_u():
    effect = _synth.EffectSpec(base=0.3, peak=0.8, peak_age=30, width=0.5)
    assert effect.rho(30) == pytest.approx(0.8)
    assert effect.rho(10) < effect.rho(20) < effect.rho(30)
    assert effect.rho(30) > effect.rho(50) > effect.rho(90)
    assert effect.rho(1e6) == pytest.approx(0.3)


def test_latent_coherence_decays_with_distance():
    config = _synth.SynthConfig()
    net = _synth.latent_coherence(config, 'alpha', 30)
    montage = _cohort.ChannelMontage()
    assert net.labels == montage.names
    assert np.all(np.diagonal(net.weights) == 0)
    d = _synth._distances(montage)
    rho = config.effects['alpha'].rho(30)
    off = ~np.eye(montage.count, dtype=bool)
    assert np.allclose(net.weights[off], (rho * np.exp(-d / config.length_scale))[off])


@pytest.mark.parametrize('age', (5, 12, 30, 60, 97))
@pytest.mark.parametrize('band', ('delta', 'theta', 'alpha', 'beta'))
def test_latent_correlation_is_positive_definite(band, age):
    r = _synth.latent_correlation(_synth.SynthConfig(), band, age)
    assert np.allclose(np.diagonal(r), 1)
    assert np.min(np.linalg.eigvalsh(r)) > 0


def test_attenuation_scales_coherence():
    healthy = _synth.latent_coherence(_synth.SynthConfig(), 'alpha', 40)
    patient = _synth.latent_coherence(_synth.SynthConfig(attenuation=0.2), 'alpha', 40)
    assert np.allclose(patient.weights, 0.8 * healthy.weights)


@pytest.fixture(scope='module')
def noiseless():
    return _synth.generate(_synth.SynthConfig(n_subjects=3, noise=0, seed=4))


def test_generate_without_noise_reproduces_intended_coherence(noiseless):
    for subject, t in noiseless.entries:
        for b in _cohort.DEFAULT_BANDS:
            intended = _synth.latent_coherence(noiseless.config, b.name, subject.age, t.montage)
            measured = _preprocess.band_coherence(t, b)
            assert np.max(np.abs(measured.weights - intended.weights)) <= 1e-12


def test_generate_produces_valid_tensors(noiseless):
    assert [s.subject_id for s, _ in noiseless.entries] == ['sub-0001', 'sub-0002', 'sub-0003']
    for subject, t in noiseless.entries:
        assert 5 <= subject.age <= 97
        assert subject.group == 'HC'
        assert (t.nc, t.nf) == (19, 47)
        assert _cohort.validate_tensor(t) == []


def test_generate_truth_table(noiseless):
    truth = noiseless.truth
    assert tuple(truth.columns) == _synth.TRUTH_COLUMNS
    assert len(truth) == 3 * 4
    assert np.allclose(truth['intended_coherence'], truth['measured_coherence'], atol=1e-12)
    tensors = {s.subject_id: t for s, t in noiseless.entries}
    for row in truth.itertuples():
        intended = _synth.latent_coherence(noiseless.config, row.band, row.age)
        ncs = _graph.compute_ncs(intended, restarts=1)
        assert row.intended_cpl == pytest.approx(ncs.cpl)
        assert row.intended_ge == pytest.approx(ncs.ge)

        measured = _preprocess.band_coherence(tensors[row.subject_id], _cohort.band(row.band))
        assert noiseless.networks[(row.subject_id, row.band)] == measured
        ncs = _graph.compute_ncs(measured, restarts=1)
        assert row.cpl == ncs.cpl
        assert row.cc == ncs.cc


def test_truth_table_is_measured_after_projection():
    cohort = _synth.generate(_synth.SynthConfig(n_subjects=2, noise=0.05, seed=6))
    for (subject_id, band_name), net in cohort.networks.items():
        row = cohort.truth[(cohort.truth['subject_id'] == subject_id) & (cohort.truth['band'] == band_name)]
        (row,) = row.itertuples()
        upper = np.triu_indices(net.n, 1)
        assert row.measured_coherence == float(np.mean(net.weights[upper]))
        assert row.ge == _graph.compute_ncs(net, restarts=1).ge
        assert row.ge != row.intended_ge


def test_generate_is_deterministic():
    config = _synth.SynthConfig(n_subjects=4, seed=9)
    a = _synth.generate(config)
    b = _synth.generate(config, jobs=2)
    assert [s for s, _ in a.entries] == [s for s, _ in b.entries]
    assert all(ta == tb for (_, ta), (_, tb) in zip(a.entries, b.entries))
    pd.testing.assert_frame_equal(a.truth, b.truth)

    c = _synth.generate(_synth.SynthConfig(n_subjects=4, seed=10))
    assert [s.age for s, _ in a.entries] != [s.age for s, _ in c.entries]


def test_generate_with_noise_stays_near_intended_coherence():
    cohort = _synth.generate(_synth.SynthConfig(n_subjects=5, noise=0.05, seed=2))
    diff = cohort.truth['measured_coherence'] - cohort.truth['intended_coherence']
    assert np.all(np.abs(diff) < 0.1)
    assert np.any(diff != 0)


def test_generate_patient_group():
    config = _synth.SynthConfig(n_subjects=2, attenuation=0.3, group='AD', id_prefix='pat-', seed=3)
    cohort = _synth.generate(config)
    assert [s.subject_id for s, _ in cohort.entries] == ['pat-0001', 'pat-0002']
    assert {s.group for s, _ in cohort.entries} == {'AD'}
    assert set(cohort.truth['group']) == {'AD'}


def test_generate_uniform_age_law():
    cohort = _synth.generate(_synth.SynthConfig(n_subjects=3, age_law='uniform', age_range=(20, 21)))
    assert all(20 <= s.age <= 21 for s, _ in cohort.entries)


def test_alpha_coherence_peaks_in_adulthood():
    config = _synth.SynthConfig()
    ages = np.exp(np.linspace(math.log(5), math.log(97), 200))
    means = [np.mean(_synth.latent_coherence(config, 'alpha', a).weights) for a in ages]
    assert abs(ages[int(np.argmax(means))] - 30) < 1


def test_SynthCohort_save(tmp_path):
    cohort = _synth.generate(_synth.SynthConfig(n_subjects=2, seed=5))
    manifest_path = tmp_path / 'dataset' / 'manifest.json'
    truth_path = tmp_path / 'truth.csv'
    network_dir = tmp_path / 'networks'
    cohort.save(manifest_path, truth_path, network_dir=network_dir)

    dataset = _cohort.load_dataset(manifest_path)
    assert len(dataset) == 2
    assert dataset.provenance['seed'] == 5
    assert dataset.provenance['generator'] == 'eegnorm.synth'
    for subject, t in cohort.entries:
        assert dataset.subject(subject.subject_id) == subject
        assert dataset.tensor(subject.subject_id) == t

    truth = pd.read_csv(truth_path)
    assert tuple(truth.columns) == _synth.TRUTH_COLUMNS
    assert truth['measured_coherence'].tolist() == cohort.truth['measured_coherence'].tolist()

    assert len(list(network_dir.iterdir())) == 2 * 4
    for (subject_id, band_name), net in cohort.networks.items():
        assert _graph.read_network(network_dir / f'{subject_id}.{band_name}.fc') == net


@pytest.mark.parametrize(
    argnames='kwargs, exp_exception',
    argvalues=(
        ({'n_subjects': 0}, _errors.ValueError('Invalid number of subjects: 0')),
        ({'age_range': (10, 5)}, _errors.ValueError('Invalid age range: 10-5')),
        ({'age_range': (0, 5)}, _errors.ValueError('Invalid age range: 0-5')),
        ({'age_law': 'foo'}, _errors.ValueError("Invalid age law: 'foo'")),
        ({'noise': -1}, _errors.ValueError('Invalid noise level: -1')),
        ({'attenuation': 1}, _errors.ValueError('Invalid attenuation: 1')),
        ({'length_scale': 0}, _errors.ValueError('Invalid length scale: 0')),
        (
            {'effects': {'alpha': _synth.EffectSpec(base=0.3, peak=1.2)}},
            _errors.ValueError('Infeasible effect for band alpha: coherence 1.2 is outside [0, 1]'),
        ),
    ),
    ids=lambda v: str(v),
)
def test_SynthConfig_validate(kwargs, exp_exception):
    with pytest.raises(type(exp_exception), match=rf'^{re.escape(str(exp_exception))}$'):
        _synth.generate(_synth.SynthConfig(**kwargs))
