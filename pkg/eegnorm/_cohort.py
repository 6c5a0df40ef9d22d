"""
Subjects, cross-spectral tensors, bands and their on-disk formats
"""

import enum
import math
import os
import struct
import typing

import numpy as np
import pandas as pd

from . import _errors, _utils

import logging  # isort:skip
_log = logging.getLogger(__name__)


DEFAULT_CHANNELS = (
    'Fp1', 'Fp2', 'F3', 'F4', 'C3', 'C4', 'P3', 'P4', 'O1', 'O2',
    'F7', 'F8', 'T3', 'T4', 'T5', 'T6', 'Fz', 'Cz', 'Pz',
)
"""19-channel 10/20 montage"""

MANIFEST_VERSION = 1
"""Schema version written to and accepted from manifest files"""

TENSOR_MAGIC = b'GANORMCS'
TENSOR_VERSION = 1

# See https://docs.python.org/3/library/struct.html#format-strings
# magic, version, Nc, Nf, start_hz, step_hz, padding to 64 bytes
TENSOR_HEADER_FORMAT = '<8sIIIdd28x'
TENSOR_HEADER_SIZE = struct.calcsize(TENSOR_HEADER_FORMAT)
TENSOR_DTYPE = np.dtype('<c16')

HERMITIAN_TOLERANCE = 1e-8
PSD_TOLERANCE = 1e-8


class ChannelMontage:
    """
    Ordered list of electrode labels

    :param names: Sequence of unique channel labels; defaults to
        :data:`DEFAULT_CHANNELS`

    :raise ValueError: if `names` is empty or contains duplicates
    """

    def __init__(self, names=DEFAULT_CHANNELS):
        self.names = names

    @property
    def names(self):
        """Tuple of channel labels"""
        return self._names

    @names.setter
    def names(self, names):
        names = tuple(str(name) for name in names)
        if not names:
            raise _errors.ValueError('Montage must have at least one channel')
        duplicates = sorted({name for name in names if names.count(name) > 1})
        if duplicates:
            raise _errors.ValueError(f'Duplicate channel labels: {", ".join(duplicates)}')
        self._names = names

    @property
    def count(self):
        """Number of channels (Nc)"""
        return len(self._names)

    def __len__(self):
        return self.count

    def __eq__(self, other):
        return isinstance(other, ChannelMontage) and self.names == other.names

    def __repr__(self):
        return f'{type(self).__name__}({list(self.names)!r})'


class FrequencyGrid:
    """
    Equally spaced frequencies ``start_hz + k * step_hz`` for ``k < count``

    Defaults cover 1.17 to 19.14 Hz in 0.39 Hz steps.

    :raise ValueError: if any argument is not positive
    """

    def __init__(self, start_hz=1.17, step_hz=0.39, count=47):
        try:
            self._start_hz = float(start_hz)
            self._step_hz = float(step_hz)
            self._count = int(count)
        except (TypeError, ValueError):
            raise _errors.ValueError(f'Invalid frequency grid: {start_hz!r}, {step_hz!r}, {count!r}')
        if not (self._start_hz > 0 and math.isfinite(self._start_hz)):
            raise _errors.ValueError(f'Invalid start frequency: {start_hz!r}')
        if not (self._step_hz > 0 and math.isfinite(self._step_hz)):
            raise _errors.ValueError(f'Invalid frequency step: {step_hz!r}')
        if self._count < 1:
            raise _errors.ValueError(f'Invalid number of frequencies: {count!r}')

    @property
    def start_hz(self):
        return self._start_hz

    @property
    def step_hz(self):
        return self._step_hz

    @property
    def count(self):
        """Number of frequencies (Nf)"""
        return self._count

    @property
    def freqs(self):
        """:class:`numpy.ndarray` of frequencies in Hz"""
        return self._start_hz + np.arange(self._count) * self._step_hz

    def nearest_index(self, freq_hz):
        """Index of the grid frequency closest to `freq_hz`"""
        return int(np.argmin(np.abs(self.freqs - float(freq_hz))))

    def as_dict(self):
        return {'start_hz': self.start_hz, 'step_hz': self.step_hz, 'count': self.count}

    def __eq__(self, other):
        return (
            isinstance(other, FrequencyGrid)
            and self.start_hz == other.start_hz
            and self.step_hz == other.step_hz
            and self.count == other.count
        )

    def __repr__(self):
        return f'{type(self).__name__}({self.start_hz!r}, {self.step_hz!r}, {self.count!r})'


class Band(enum.Enum):
    """Named frequency band"""

    delta = 'delta'
    theta = 'theta'
    alpha = 'alpha'
    beta = 'beta'

    def __str__(self):
        return self.value


class BandDefinition(typing.NamedTuple):
    """
    Inclusive frequency range

    `name` is a :class:`Band` value or, for single frequency points, a label
    like ``"f9.78"``.
    """

    name: str
    lo_hz: float
    hi_hz: float

    def indexes(self, grid):
        """
        Grid indexes that belong to this band

        A frequency belongs to the band if ``lo - step/2 <= f <= hi + step/2``.
        """
        half = grid.step_hz / 2
        # Absorbs binary representation error of decimal band bounds
        eps = grid.step_hz * 1e-9
        freqs = grid.freqs
        mask = (freqs >= self.lo_hz - half - eps) & (freqs <= self.hi_hz + half + eps)
        return np.flatnonzero(mask)

    @classmethod
    def point(cls, freq_hz):
        """Band that contains only the grid frequency nearest to `freq_hz`"""
        freq_hz = float(freq_hz)
        return cls(point_label(freq_hz), freq_hz, freq_hz)


def point_label(freq_hz):
    """Band name for a single frequency point (e.g. ``"f9.78"``)"""
    return f'f{float(freq_hz):g}'


DEFAULT_BANDS = (
    BandDefinition(Band.delta.value, 1.17, 3.12),
    BandDefinition(Band.theta.value, 3.51, 7.81),
    BandDefinition(Band.alpha.value, 8.20, 12.1),
    BandDefinition(Band.beta.value, 12.5, 19.14),
)


def band(name, bands=DEFAULT_BANDS):
    """
    Return :class:`BandDefinition` by name

    :raise ValueError: if there is no band called `name`
    """
    name = str(name)
    for b in bands:
        if b.name == name:
            return b
    raise _errors.ValueError(f'No such band: {name}')


class Sex(enum.Enum):
    M = 'M'
    F = 'F'
    unknown = 'unknown'

    def __str__(self):
        return self.value


class SubjectRecord:
    """
    Anonymized subject information

    :param str subject_id: Opaque identifier; used in file names, so it must not
        contain path separators or ``..``
    :param float age: Age in years, ``0 < age < 130``
    :param str site: Recording site label
    :param sex: :class:`Sex` or its value
    :param str group: Cohort group label (``"HC"`` for healthy controls)

    :raise ValueError: if any argument is invalid
    """

    def __init__(self, subject_id, age, site='', sex=Sex.unknown, group='HC'):
        self.subject_id = subject_id
        self.age = age
        self.site = site
        self.sex = sex
        self.group = group

    @property
    def subject_id(self):
        return self._subject_id

    @subject_id.setter
    def subject_id(self, subject_id):
        subject_id = str(subject_id)
        if not subject_id:
            raise _errors.ValueError('Subject ID must not be empty')
        if any(s in subject_id for s in ('/', '\\', os.sep, '..')):
            raise _errors.ValueError(f'Invalid subject ID: {subject_id!r}')
        self._subject_id = subject_id

    @property
    def age(self):
        """Age in years"""
        return self._age

    @age.setter
    def age(self, age):
        try:
            age = float(age)
        except (TypeError, ValueError):
            raise _errors.ValueError(f'Invalid age: {age!r}')
        if not 0 < age < 130:
            raise _errors.ValueError(f'Invalid age: {age!r}')
        self._age = age

    @property
    def site(self):
        return self._site

    @site.setter
    def site(self, site):
        self._site = str(site) if site is not None else ''

    @property
    def sex(self):
        """:class:`Sex` enum"""
        return self._sex

    @sex.setter
    def sex(self, sex):
        if sex is None:
            sex = Sex.unknown
        try:
            self._sex = Sex(sex)
        except ValueError:
            raise _errors.ValueError(f'Invalid sex: {sex!r}')

    @property
    def group(self):
        return self._group

    @group.setter
    def group(self, group):
        group = str(group) if group else 'HC'
        self._group = group

    def as_dict(self):
        return {
            'subject_id': self.subject_id,
            'age': self.age,
            'site': self.site,
            'sex': self.sex.value,
            'group': self.group,
        }

    def __eq__(self, other):
        return isinstance(other, SubjectRecord) and self.as_dict() == other.as_dict()

    def __repr__(self):
        return (
            f'{type(self).__name__}({self.subject_id!r}, age={self.age!r}, '
            f'site={self.site!r}, sex={self.sex.value!r}, group={self.group!r})'
        )


class CrossSpectrumTensor:
    """
    Complex cross-spectral matrices of one subject stacked over frequency

    :param data: Complex array of shape ``(Nf, Nc, Nc)``
    :param montage: :class:`ChannelMontage`; defaults to the 19-channel montage
        if it matches ``Nc``
    :param grid: :class:`FrequencyGrid`; defaults to the 47-point grid if it
        matches ``Nf``

    :raise ValueError: if the dimensions of `data`, `montage` and `grid`
        don't agree
    """

    def __init__(self, data, montage=None, grid=None):
        data = np.asarray(data, dtype=complex)
        if data.ndim != 3 or data.shape[1] != data.shape[2]:
            raise _errors.ValueError(f'Expected array of shape (Nf, Nc, Nc), not {data.shape}')
        nf, nc, _ = data.shape
        self.montage = montage if montage is not None else _default_montage(nc)
        self.grid = grid if grid is not None else _default_grid(nf)
        if self.montage.count != nc:
            raise _errors.ValueError(f'Montage has {self.montage.count} channels, data has {nc}')
        if self.grid.count != nf:
            raise _errors.ValueError(f'Grid has {self.grid.count} frequencies, data has {nf}')
        self.data = data

    @property
    def nc(self):
        return self.montage.count

    @property
    def nf(self):
        return self.grid.count

    def diagonal(self):
        """Real diagonal powers as array of shape ``(Nf, Nc)``"""
        return np.real(np.diagonal(self.data, axis1=1, axis2=2))

    def replace(self, data):
        """Return new tensor with the same montage and grid but different `data`"""
        return type(self)(data, montage=self.montage, grid=self.grid)

    def __eq__(self, other):
        return (
            isinstance(other, CrossSpectrumTensor)
            and self.montage == other.montage
            and self.grid == other.grid
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f'<{type(self).__name__} Nc={self.nc} Nf={self.nf}>'


def _default_montage(nc):
    if nc == len(DEFAULT_CHANNELS):
        return ChannelMontage()
    return ChannelMontage([f'ch{i + 1}' for i in range(nc)])


def _default_grid(nf):
    if nf == 47:
        return FrequencyGrid()
    return FrequencyGrid(count=nf)


class Violation(typing.NamedTuple):
    """Tensor invariant that does not hold at one frequency"""

    freq_index: int
    property: str
    detail: str

    def __str__(self):
        return f'frequency {self.freq_index}: {self.property} ({self.detail})'


def validate_tensor(t):
    """
    Check every cross-spectral matrix of `t`

    :param t: :class:`CrossSpectrumTensor`

    :return: :class:`list` of :class:`Violation`; empty if `t` is Hermitian,
        has real non-negative diagonal powers and is positive semidefinite at
        every frequency
    """
    violations = []
    for k, s in enumerate(t.data):
        if not np.all(np.isfinite(s)):
            violations.append(Violation(k, 'non-finite value', 'NaN or infinity in matrix'))
            continue

        norm = np.linalg.norm(s)
        asym = np.linalg.norm(s - s.conj().T)
        if asym > HERMITIAN_TOLERANCE * max(norm, np.finfo(float).tiny):
            violations.append(Violation(k, 'not Hermitian', f'|S - S^H| / |S| = {asym / norm:.3g}'))

        diag = np.diagonal(s)
        imag = np.max(np.abs(diag.imag))
        if imag > HERMITIAN_TOLERANCE * max(norm, np.finfo(float).tiny):
            violations.append(Violation(k, 'complex diagonal', f'max |imag| = {imag:.3g}'))
        if np.any(diag.real < 0):
            worst = int(np.argmin(diag.real))
            violations.append(Violation(
                k, 'negative diagonal power',
                f'channel {t.montage.names[worst]} = {diag.real[worst]:.6g}',
            ))

        herm = 0.5 * (s + s.conj().T)
        min_eig = float(np.linalg.eigvalsh(herm)[0])
        trace = float(np.sum(diag.real))
        if min_eig < -PSD_TOLERANCE * abs(trace):
            violations.append(Violation(
                k, 'not positive semidefinite', f'smallest eigenvalue {min_eig:.6g}',
            ))
    return violations


def band_slice(t, b):
    """
    Restrict `t` to the frequencies of band `b`

    :param t: :class:`CrossSpectrumTensor`
    :param b: :class:`BandDefinition`

    :raise EmptyBandError: if no grid frequency lies in `b`

    :return: :class:`CrossSpectrumTensor` whose grid starts at the first
        retained frequency
    """
    idx = band_indexes(t.grid, b)
    grid = FrequencyGrid(
        start_hz=float(t.grid.freqs[idx[0]]),
        step_hz=t.grid.step_hz,
        count=len(idx),
    )
    return CrossSpectrumTensor(t.data[idx], montage=t.montage, grid=grid)


def band_indexes(grid, b):
    """
    Grid indexes of band `b`

    :raise EmptyBandError: if there are none
    """
    idx = b.indexes(grid)
    if len(idx) < 1:
        raise _errors.EmptyBandError(
            f'Band {b.name} ({b.lo_hz:g}-{b.hi_hz:g} Hz) contains no grid frequency'
        )
    return idx


# Binary tensor container

def write_tensor(path, t):
    """Write :class:`CrossSpectrumTensor` to `path` in the binary container format"""
    header = struct.pack(
        TENSOR_HEADER_FORMAT,
        TENSOR_MAGIC, TENSOR_VERSION,
        t.nc, t.nf,
        t.grid.start_hz, t.grid.step_hz,
    )
    dirpath = os.path.dirname(os.fspath(path))
    if dirpath:
        os.makedirs(dirpath, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(header)
        f.write(np.ascontiguousarray(t.data, dtype=TENSOR_DTYPE).tobytes())


def read_tensor_header(path):
    """
    Read header of binary tensor file

    :raise FormatError: if `path` is not readable or not a tensor file

    :return: :class:`tuple` of ``(Nc, Nf, start_hz, step_hz)``
    """
    try:
        with open(path, 'rb') as f:
            header = f.read(TENSOR_HEADER_SIZE)
    except OSError as e:
        raise _errors.FormatError(f'{path}: {e.strerror or e}', path=path)
    return _unpack_header(path, header)


def _unpack_header(path, header):
    if len(header) < TENSOR_HEADER_SIZE:
        raise _errors.FormatError(f'{path}: Truncated header', path=path)
    magic, version, nc, nf, start_hz, step_hz = struct.unpack(TENSOR_HEADER_FORMAT, header)
    if magic != TENSOR_MAGIC:
        raise _errors.FormatError(f'{path}: Not a cross-spectrum file', path=path)
    if version != TENSOR_VERSION:
        raise _errors.FormatError(f'{path}: Unsupported format version: {version}', path=path)
    return nc, nf, start_hz, step_hz


def read_tensor(path, montage=None):
    """
    Read binary tensor file

    :param montage: :class:`ChannelMontage` to attach; must have ``Nc``
        channels

    :raise FormatError: if `path` is not readable or malformed
    """
    try:
        with open(path, 'rb') as f:
            raw = f.read()
    except OSError as e:
        raise _errors.FormatError(f'{path}: {e.strerror or e}', path=path)

    nc, nf, start_hz, step_hz = _unpack_header(path, raw[:TENSOR_HEADER_SIZE])
    body = raw[TENSOR_HEADER_SIZE:]
    expected = nf * nc * nc * TENSOR_DTYPE.itemsize
    if len(body) != expected:
        raise _errors.FormatError(
            f'{path}: Expected {expected} bytes of data, got {len(body)}',
            path=path,
        )
    data = np.frombuffer(body, dtype=TENSOR_DTYPE).reshape(nf, nc, nc).astype(complex)
    try:
        return CrossSpectrumTensor(
            data,
            montage=montage,
            grid=FrequencyGrid(start_hz, step_hz, nf),
        )
    except _errors.ValueError as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)


# CSV interchange

def import_csv(path, montage=None, grid=None):
    """
    Read tensor from CSV file with one row per frequency

    Each row has ``2 * Nc**2`` columns: the row-major matrix entries as
    interleaved real and imaginary parts. There is no header.

    :raise FormatError: if the file can't be parsed
    """
    try:
        frame = pd.read_csv(path, header=None, dtype=float)
    except FileNotFoundError:
        raise _errors.FormatError(f'No such file: {path}', path=path)
    except (OSError, ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)

    values = frame.to_numpy(dtype=float)
    nf, ncols = values.shape
    nc = math.isqrt(ncols // 2)
    if ncols % 2 or nc * nc * 2 != ncols:
        raise _errors.FormatError(f'{path}: {ncols} columns is not 2 * Nc**2', path=path)
    data = (values[:, 0::2] + 1j * values[:, 1::2]).reshape(nf, nc, nc)
    try:
        return CrossSpectrumTensor(data, montage=montage, grid=grid)
    except _errors.ValueError as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)


def write_tensor_csv(path, t):
    """Inverse of :func:`import_csv`"""
    flat = t.data.reshape(t.nf, t.nc * t.nc)
    values = np.empty((t.nf, 2 * t.nc * t.nc))
    values[:, 0::2] = flat.real
    values[:, 1::2] = flat.imag
    pd.DataFrame(values).to_csv(path, header=False, index=False, float_format='%.17g')


# Manifest

class ManifestEntry(typing.NamedTuple):
    subject: SubjectRecord
    tensor_path: str


class DatasetManifest:
    """
    Subjects of a dataset and where their tensors live

    Tensors are read from disk on each call to :meth:`tensor`; nothing is
    cached, so instances can be shared between workers.
    """

    def __init__(self, entries, montage=None, grid=None, provenance=None, path=None):
        self._entries = tuple(entries)
        self.montage = montage if montage is not None else ChannelMontage()
        self.grid = grid if grid is not None else FrequencyGrid()
        self.provenance = dict(provenance or {})
        self.path = os.fspath(path) if path is not None else None
        self._by_id = {e.subject.subject_id: e for e in self._entries}

    @property
    def entries(self):
        """Sequence of :class:`ManifestEntry`"""
        return self._entries

    @property
    def subjects(self):
        """Sequence of :class:`SubjectRecord`"""
        return tuple(e.subject for e in self._entries)

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self.subjects)

    def subject(self, subject_id):
        try:
            return self._by_id[subject_id].subject
        except KeyError:
            raise _errors.ValueError(f'No such subject: {subject_id}')

    def tensor_path(self, subject_id):
        try:
            return self._by_id[subject_id].tensor_path
        except KeyError:
            raise _errors.ValueError(f'No such subject: {subject_id}')

    def tensor(self, subject_id):
        """
        Load and return :class:`CrossSpectrumTensor` of `subject_id`

        :raise FormatError: if the file is unreadable
        :raise ValidationError: if the tensor does not match the manifest's
            montage and grid
        """
        path = self.tensor_path(subject_id)
        t = read_tensor(path)
        if t.nc != self.montage.count or t.grid != self.grid:
            raise _errors.ValidationError(
                f'{subject_id}: Tensor dimensions do not match manifest',
                subject_id=subject_id,
            )
        return CrossSpectrumTensor(t.data, montage=self.montage, grid=self.grid)

    def filter(self, groups):
        """Return new manifest with only the subjects in `groups`"""
        groups = set(groups)
        return type(self)(
            [e for e in self._entries if e.subject.group in groups],
            montage=self.montage, grid=self.grid,
            provenance=self.provenance, path=self.path,
        )

    def as_dict(self, relative_to=None):
        subjects = []
        for e in self._entries:
            item = e.subject.as_dict()
            tensor_path = e.tensor_path
            if relative_to is not None:
                tensor_path = os.path.relpath(tensor_path, relative_to)
            item['tensor'] = tensor_path
            subjects.append(item)
        return {
            'version': MANIFEST_VERSION,
            'montage': list(self.montage.names),
            'grid': self.grid.as_dict(),
            'subjects': subjects,
            'provenance': self.provenance,
        }


def load_dataset(path, verify=True):
    """
    Read dataset manifest

    :param path: Path to manifest JSON file
    :param bool verify: Whether to read every tensor header and content to
        check it against the manifest

    All problems are collected before raising, each naming its subject.

    :raise FormatError: if the manifest can't be read or parsed
    :raise ValidationError: if any subject is invalid

    :return: :class:`DatasetManifest`
    """
    raw = _utils.read_json(path)
    basedir = os.path.dirname(os.path.abspath(os.fspath(path)))
    if not isinstance(raw, dict):
        raise _errors.FormatError(f'{path}: Manifest must be a JSON object', path=path)
    if raw.get('version') != MANIFEST_VERSION:
        raise _errors.FormatError(
            f'{path}: Unsupported manifest version: {raw.get("version")!r}',
            path=path,
        )

    try:
        montage = ChannelMontage(raw.get('montage', DEFAULT_CHANNELS))
        grid_raw = raw.get('grid', {})
        grid = FrequencyGrid(
            grid_raw.get('start_hz', 1.17),
            grid_raw.get('step_hz', 0.39),
            grid_raw.get('count', 47),
        )
    except (_errors.ValueError, AttributeError) as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)

    subjects = raw.get('subjects', [])
    if not isinstance(subjects, list):
        raise _errors.FormatError(f'{path}: "subjects" must be a list', path=path)

    problems = []
    entries = []
    seen = set()
    for i, item in enumerate(subjects):
        subject_id = item.get('subject_id', f'#{i}') if isinstance(item, dict) else f'#{i}'
        try:
            subject = SubjectRecord(
                subject_id=item['subject_id'],
                age=item['age'],
                site=item.get('site', ''),
                sex=item.get('sex', Sex.unknown.value),
                group=item.get('group', 'HC'),
            )
            tensor_path = item['tensor']
        except (KeyError, TypeError) as e:
            problems.append(f'{subject_id}: Missing field {e}')
            continue
        except _errors.ValueError as e:
            problems.append(f'{subject_id}: {e}')
            continue

        if subject.subject_id in seen:
            problems.append(f'{subject.subject_id}: Duplicate subject ID')
            continue
        seen.add(subject.subject_id)

        tensor_path = os.path.join(basedir, tensor_path)
        entries.append(ManifestEntry(subject, tensor_path))
        if verify:
            problems.extend(_verify_entry(subject.subject_id, tensor_path, montage, grid))

    if problems:
        _log.debug('Invalid manifest %s: %r', path, problems)
        raise _errors.ValidationError(
            f'{path}: {len(problems)} invalid subject(s): {problems[0]}',
            subject_id=problems[0].split(':', 1)[0],
            violations=problems,
        )
    if not entries:
        _log.warning('Manifest %s lists no subjects', path)

    return DatasetManifest(
        entries, montage=montage, grid=grid,
        provenance=raw.get('provenance', {}), path=path,
    )


def _verify_entry(subject_id, tensor_path, montage, grid):
    if not os.path.exists(tensor_path):
        return [f'{subject_id}: Missing tensor file: {tensor_path}']
    try:
        nc, nf, start_hz, step_hz = read_tensor_header(tensor_path)
    except _errors.FormatError as e:
        return [f'{subject_id}: {e}']
    if nc != montage.count or FrequencyGrid(start_hz, step_hz, nf) != grid:
        return [
            f'{subject_id}: Dimension mismatch: tensor has Nc={nc}, Nf={nf}, '
            f'manifest has Nc={montage.count}, Nf={grid.count}'
        ]
    try:
        t = read_tensor(tensor_path, montage=montage)
    except _errors.FormatError as e:
        return [f'{subject_id}: {e}']
    return [f'{subject_id}: {v}' for v in validate_tensor(t)]


def save_dataset(path, entries, provenance=None, tensor_dir='tensors'):
    """
    Write tensors and manifest

    :param path: Path of the manifest JSON file
    :param entries: Sequence of (:class:`SubjectRecord`,
        :class:`CrossSpectrumTensor`) pairs
    :param provenance: JSON-serializable notes stored in the manifest
    :param tensor_dir: Directory for tensor files relative to the manifest

    :raise ValueError: if subject IDs are not unique or tensors don't share
        montage and grid

    :return: :class:`DatasetManifest`
    """
    entries = list(entries)
    basedir = os.path.dirname(os.path.abspath(os.fspath(path)))
    montage = entries[0][1].montage if entries else ChannelMontage()
    grid = entries[0][1].grid if entries else FrequencyGrid()

    manifest_entries = []
    seen = set()
    for subject, t in entries:
        if subject.subject_id in seen:
            raise _errors.ValueError(f'Duplicate subject ID: {subject.subject_id}')
        seen.add(subject.subject_id)
        if t.montage != montage or t.grid != grid:
            raise _errors.ValueError(f'{subject.subject_id}: Tensor montage or grid differs')
        tensor_path = os.path.join(basedir, tensor_dir, f'{subject.subject_id}.cs')
        write_tensor(tensor_path, t)
        manifest_entries.append(ManifestEntry(subject, tensor_path))

    manifest = DatasetManifest(
        manifest_entries, montage=montage, grid=grid,
        provenance=provenance, path=path,
    )
    _utils.write_json(path, manifest.as_dict(relative_to=basedir))
    _log.debug('Wrote manifest with %d subjects: %s', len(manifest), path)
    return manifest
