import math
import re

import numpy as np
import pytest

from eegnorm import _cohort, _errors, _preprocess

from .common import random_psd_tensor


@pytest.mark.parametrize('nc', (2, 5, 19))
def test_AvgRefOperator_is_idempotent_projection(nc):
    H = _preprocess.AvgRefOperator(nc).H
    assert np.allclose(H @ H, H, atol=1e-14)
    assert np.allclose(H, H.T)
    assert np.allclose(H @ np.ones(nc), 0, atol=1e-14)


def test_AvgRefOperator_rejects_invalid_channel_count():
    with pytest.raises(_errors.ValueError, match=r'^Invalid number of channels: 0$'):
        _preprocess.AvgRefOperator(0)


def test_average_reference_zeroes_row_sums():
    rng = np.random.default_rng(0)
    for _ in range(20):
        t = random_psd_tensor(rng, nc=int(rng.integers(3, 10)), nf=3)
        referenced = _preprocess.average_reference(t)
        for s_in, s_out in zip(t.data, referenced.data):
            assert np.max(np.abs(s_out.sum(axis=1))) <= 1e-10 * np.linalg.norm(s_in)
        assert _cohort.validate_tensor(referenced) == []


def test_average_reference_is_idempotent():
    t = random_psd_tensor(np.random.default_rng(1), nc=6, nf=4)
    once = _preprocess.average_reference(t)
    twice = _preprocess.average_reference(once)
    assert np.allclose(once.data, twice.data, atol=1e-12 * np.linalg.norm(t.data))


def test_estimate_gsf_is_geometric_mean_of_diagonal():
    data = np.zeros((2, 2, 2), dtype=complex)
    data[0] = np.diag([1.0, 4.0])
    data[1] = np.diag([2.0, 8.0])
    g = _preprocess.estimate_gsf(_cohort.CrossSpectrumTensor(data))
    assert g.value == pytest.approx(math.exp(np.mean(np.log([1, 4, 2, 8]))))


def test_estimate_gsf_is_scale_equivariant():
    t = random_psd_tensor(np.random.default_rng(2), nc=4, nf=3)
    g = _preprocess.estimate_gsf(t).value
    g_scaled = _preprocess.estimate_gsf(t.replace(t.data * 7.5)).value
    assert g_scaled == pytest.approx(7.5 * g, rel=1e-12)


def test_estimate_gsf_rejects_non_positive_power():
    data = np.zeros((1, 2, 2), dtype=complex)
    data[0] = np.diag([1.0, 0.0])
    exp_msg = 'Non-positive diagonal power at frequency 0, channel ch2'
    with pytest.raises(_errors.ValueError, match=rf'^{re.escape(exp_msg)}$'):
        _preprocess.estimate_gsf(_cohort.CrossSpectrumTensor(data))


@pytest.mark.parametrize(
    argnames='value, exp_exception',
    argvalues=(
        (2.5, None),
        (0, _errors.ValueError('Invalid global scale factor: 0.0')),
        (-1, _errors.ValueError('Invalid global scale factor: -1.0')),
        (float('inf'), _errors.ValueError('Invalid global scale factor: inf')),
        ('foo', _errors.ValueError("Invalid global scale factor: 'foo'")),
    ),
)
def test_GlobalScaleFactor_validation(value, exp_exception):
    if exp_exception:
        with pytest.raises(type(exp_exception), match=rf'^{re.escape(str(exp_exception))}$'):
            _preprocess.GlobalScaleFactor(value)
    else:
        assert float(_preprocess.GlobalScaleFactor(value)) == value


def test_harmonize_normalizes_scale():
    t = random_psd_tensor(np.random.default_rng(3), nc=5, nf=4)
    harmonized, g = _preprocess.harmonize(t.replace(t.data * 1e6))
    assert _preprocess.estimate_gsf(harmonized).value == pytest.approx(1.0, rel=1e-12)
    assert g.value > 1e5


def _oracle_coherence(s):
    n = len(s)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                out[i, j] = abs(s[i, j]) ** 2 / (s[i, i].real * s[j, j].real)
    return out


def test_coherence_matches_scalar_oracle():
    rng = np.random.default_rng(4)
    for _ in range(20):
        t = random_psd_tensor(rng, nc=int(rng.integers(2, 8)), nf=3)
        for k in range(t.nf):
            net = _preprocess.coherence(t, k)
            assert np.allclose(net.weights, _oracle_coherence(t.data[k]), rtol=0, atol=1e-12)


def test_coherence_is_invariant_to_scaling_and_channel_gains():
    rng = np.random.default_rng(5)
    for _ in range(100):
        nc = int(rng.integers(2, 8))
        t = random_psd_tensor(rng, nc=nc, nf=2)
        gains = rng.uniform(0.1, 10, size=nc) * np.exp(1j * rng.uniform(0, 2 * np.pi, size=nc))
        scale = rng.uniform(1e-3, 1e3)
        transformed = t.replace(scale * gains[None, :, None] * t.data * np.conj(gains)[None, None, :])
        a = _preprocess.coherence_spectrum(t)
        b = _preprocess.coherence_spectrum(transformed)
        assert np.max(np.abs(a - b)) <= 1e-12


def test_coherence_of_rank_one_matrix_is_one():
    u = np.array([1 + 1j, 2, -0.5j])
    data = (u[:, None] * np.conj(u)[None, :])[None]
    net = _preprocess.coherence(_cohort.CrossSpectrumTensor(data), 0)
    assert np.allclose(net.weights, 1 - np.eye(3))


def test_coherence_rejects_zero_power():
    data = np.zeros((1, 2, 2), dtype=complex)
    data[0] = np.diag([1.0, 0.0])
    exp_msg = 'Diagonal power below 1e-15 at frequency 0, channel ch2'
    with pytest.raises(_errors.ValueError, match=rf'^{re.escape(exp_msg)}$'):
        _preprocess.coherence(_cohort.CrossSpectrumTensor(data), 0)


def test_band_coherence_averages_band_frequencies():
    t = random_psd_tensor(np.random.default_rng(6), nc=4, nf=47)
    alpha = _cohort.band('alpha')
    net = _preprocess.band_coherence(t, alpha)
    exp = np.mean(_preprocess.coherence_spectrum(t)[18:29], axis=0)
    assert np.allclose(net.weights, exp)
    assert net.labels == t.montage.names


def test_band_coherence_of_point_band():
    t = random_psd_tensor(np.random.default_rng(7), nc=4, nf=47)
    net = _preprocess.band_coherence(t, _cohort.BandDefinition.point(10))
    assert np.allclose(net.weights, _preprocess.coherence(t, 23).weights)
