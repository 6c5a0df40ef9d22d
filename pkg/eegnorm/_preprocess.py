"""
Harmonization of cross-spectra and coherence networks
"""

import math

import numpy as np

from . import _cohort, _errors, _graph, _utils

import logging  # isort:skip
_log = logging.getLogger(__name__)


POWER_FLOOR = 1e-15
"""Smallest diagonal power accepted by :func:`coherence`"""


class AvgRefOperator:
    """
    Average reference projection ``H = I - 1 1^T / Nc``

    :param int nc: Number of channels
    """

    def __init__(self, nc):
        nc = int(nc)
        if nc < 1:
            raise _errors.ValueError(f'Invalid number of channels: {nc}')
        self._nc = nc

    @property
    def nc(self):
        return self._nc

    @_utils.cached_property
    def H(self):
        """Real symmetric idempotent matrix of shape ``(Nc, Nc)``"""
        return np.eye(self._nc) - np.full((self._nc, self._nc), 1 / self._nc)

    def apply(self, data):
        """Return ``H S H^T`` for each matrix in `data`"""
        out = self.H @ data @ self.H.T
        return 0.5 * (out + np.conj(np.swapaxes(out, -1, -2)))


def average_reference(t):
    """
    Re-reference :class:`~.CrossSpectrumTensor` to the common average

    :return: New :class:`~.CrossSpectrumTensor`
    """
    return t.replace(AvgRefOperator(t.nc).apply(t.data))


class GlobalScaleFactor:
    """
    Positive amplitude scalar of a recording

    :raise ValueError: if `value` is not positive and finite
    """

    def __init__(self, value):
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise _errors.ValueError(f'Invalid global scale factor: {value!r}')
        if not (value > 0 and math.isfinite(value)):
            raise _errors.ValueError(f'Invalid global scale factor: {value!r}')
        self._value = value

    @property
    def value(self):
        return self._value

    def __float__(self):
        return self._value

    def __eq__(self, other):
        return isinstance(other, GlobalScaleFactor) and self.value == other.value

    def __repr__(self):
        return f'{type(self).__name__}({self._value!r})'


def estimate_gsf(t):
    """
    Geometric mean of all diagonal powers of `t`

    :raise ValueError: if any diagonal power is not positive

    :return: :class:`GlobalScaleFactor`
    """
    diag = t.diagonal()
    if np.any(~(diag > 0)):
        k, ch = np.argwhere(~(diag > 0))[0]
        raise _errors.ValueError(
            f'Non-positive diagonal power at frequency {k}, channel {t.montage.names[ch]}'
        )
    return GlobalScaleFactor(math.exp(float(np.mean(np.log(diag)))))


def apply_gsf(t, g):
    """Divide every matrix of `t` by :class:`GlobalScaleFactor` `g`"""
    return t.replace(t.data / float(g))


def harmonize(t):
    """
    Average reference followed by global scale factor correction

    :return: :class:`tuple` of harmonized :class:`~.CrossSpectrumTensor` and
        :class:`GlobalScaleFactor`
    """
    referenced = average_reference(t)
    g = estimate_gsf(referenced)
    return apply_gsf(referenced, g), g


def _coherence_matrix(s, freq_index, montage):
    power = np.real(np.diagonal(s))
    if np.any(power < POWER_FLOOR):
        ch = int(np.argmin(power))
        raise _errors.ValueError(
            f'Diagonal power below {POWER_FLOOR:g} at frequency {freq_index}, '
            f'channel {montage.names[ch]}'
        )
    coh = np.abs(s) ** 2 / np.outer(power, power)
    coh = np.clip(0.5 * (coh + coh.T), 0.0, 1.0)
    np.fill_diagonal(coh, 0.0)
    return coh


def coherence(t, freq_index):
    """
    Squared coherence ``|S_xy|^2 / (S_xx S_yy)`` at one frequency

    :param t: :class:`~.CrossSpectrumTensor`
    :param int freq_index: Index into the grid of `t`

    :raise ValueError: if any diagonal power at `freq_index` is (nearly) zero

    :return: :class:`~.WeightedNetwork` with zero diagonal
    """
    coh = _coherence_matrix(t.data[freq_index], freq_index, t.montage)
    return _graph.WeightedNetwork(coh, labels=t.montage.names)


def coherence_spectrum(t):
    """Coherence at every frequency as array of shape ``(Nf, Nc, Nc)``"""
    return np.stack([
        _coherence_matrix(s, k, t.montage)
        for k, s in enumerate(t.data)
    ])


def band_coherence(t, b):
    """
    Mean coherence over the grid frequencies of band `b`

    :param t: :class:`~.CrossSpectrumTensor`
    :param b: :class:`~.BandDefinition`

    :raise EmptyBandError: if `b` contains no grid frequency
    :raise ValueError: if any diagonal power in `b` is (nearly) zero

    :return: :class:`~.WeightedNetwork`
    """
    idx = _cohort.band_indexes(t.grid, b)
    mats = [_coherence_matrix(t.data[k], int(k), t.montage) for k in idx]
    coh = np.mean(mats, axis=0)
    np.fill_diagonal(coh, 0.0)
    return _graph.WeightedNetwork(coh, labels=t.montage.names)
