"""
Run configuration

A TOML file with one table per section. Every key has a default; unknown
keys and values of the wrong type are rejected.
"""

import dataclasses
import os
import tomllib

from . import _cohort, _deviation, _errors, _generator, _normcurves, _utils

import logging  # isort:skip
_log = logging.getLogger(__name__)


OUTPUT_DIR_ENV = 'EEGNORM_OUTPUT_DIR'
"""Environment variable that overrides ``output.dir``"""


@dataclasses.dataclass
class DatasetSection:
    manifest: str = 'dataset/manifest.json'
    verify: bool = True


@dataclasses.dataclass
class OutputSection:
    dir: str = 'out'


@dataclasses.dataclass
class BandsSection:
    delta: tuple = (1.17, 3.12)
    theta: tuple = (3.51, 7.81)
    alpha: tuple = (8.20, 12.1)
    beta: tuple = (12.5, 19.14)

    def definitions(self):
        """Tuple of :class:`~.BandDefinition` in canonical order"""
        return tuple(
            _cohort.BandDefinition(band.value, *getattr(self, band.value))
            for band in _cohort.Band
        )


@dataclasses.dataclass
class ThresholdsSection:
    trajectory: float = 0.0
    """Threshold for NCs that feed the norm curves and the decoder"""

    compare: float = 0.4
    """Threshold for comparing NCs of generated and subject networks"""

    network: float = 0.4
    """Threshold of the thresholded networks emitted by ``generate-norm``"""


@dataclasses.dataclass
class LouvainSection:
    gamma: float = 1.0
    seed: int = 42
    restarts: int = 10


@dataclasses.dataclass
class GamlssSection:
    mu_knots: int = 20
    sigma_knots: int = 5
    n_lambdas: int = 20
    max_iter: int = 200
    tol: float = 1e-6
    gcv_cycles: int = 3
    min_samples: int = 50

    def gamlss_config(self):
        return _normcurves.GamlssConfig(**dataclasses.asdict(self))


@dataclasses.dataclass
class TrainingSection:
    band: str = 'alpha'
    mode: str = 'band'
    """``"band"`` or ``"frequency"``"""

    frequency_hz: float = 10.0
    groups: tuple = ('HC',)
    folds: int = 5
    lr: float = 1e-3
    batch_size: int = 32
    max_epochs: int = 500
    patience: int = 20
    val_fraction: float = 0.1
    seed: int = 0
    sweep: bool = False

    def train_config(self):
        return _generator.TrainConfig(
            lr=self.lr,
            batch_size=self.batch_size,
            max_epochs=self.max_epochs,
            patience=self.patience,
            val_fraction=self.val_fraction,
            seed=self.seed,
        )


@dataclasses.dataclass
class SynthSection:
    n: int = 200
    patients: int = 0
    patient_group: str = 'AD'
    attenuation: float = 0.2
    seed: int = 1
    noise: float = 0.05
    age_min: float = 5.0
    age_max: float = 97.0
    age_law: str = 'log-uniform'


@dataclasses.dataclass
class ScoreSection:
    mode: str = 'absolute'
    """``"absolute"`` or ``"signed"`` MFCS deviation"""

    groups: tuple = ()
    """Groups to score; empty means every subject"""


@dataclasses.dataclass
class ReportSection:
    ages: tuple = ()
    """Ages of percentile tables and NC comparisons; empty means lifespan ages"""

    percentiles: tuple = (0.05, 0.25, 0.5, 0.75, 0.95)
    kde_points: int = 200


@dataclasses.dataclass
class RunSection:
    jobs: int = 1
    timeout: float = 0.0
    """Timeout per stage in seconds; 0 disables the timeout"""


@dataclasses.dataclass
class RunConfig:
    """Effective configuration of a pipeline run"""

    dataset: DatasetSection = dataclasses.field(default_factory=DatasetSection)
    output: OutputSection = dataclasses.field(default_factory=OutputSection)
    bands: BandsSection = dataclasses.field(default_factory=BandsSection)
    thresholds: ThresholdsSection = dataclasses.field(default_factory=ThresholdsSection)
    louvain: LouvainSection = dataclasses.field(default_factory=LouvainSection)
    gamlss: GamlssSection = dataclasses.field(default_factory=GamlssSection)
    training: TrainingSection = dataclasses.field(default_factory=TrainingSection)
    synth: SynthSection = dataclasses.field(default_factory=SynthSection)
    score: ScoreSection = dataclasses.field(default_factory=ScoreSection)
    report: ReportSection = dataclasses.field(default_factory=ReportSection)
    run: RunSection = dataclasses.field(default_factory=RunSection)

    def as_dict(self):
        return dataclasses.asdict(self)

    def write(self, path):
        """Write effective configuration as JSON"""
        _utils.write_json(path, self.as_dict())

    def training_band(self):
        """
        :class:`~.BandDefinition` the decoder is trained and scored on

        :raise ConfigError: if ``training.band`` or ``training.mode`` is invalid
        """
        if self.training.mode == 'frequency':
            return _cohort.BandDefinition.point(self.training.frequency_hz)
        try:
            return _cohort.band(self.training.band, self.bands.definitions())
        except _errors.ValueError:
            raise _errors.ConfigError(f'Unknown band: {self.training.band}', key='training.band')

    def analysis_bands(self):
        """Bands for which networks and NCs are computed"""
        bands = self.bands.definitions()
        if self.training.mode == 'frequency':
            bands += (self.training_band(),)
        return bands

    def validate(self):
        """
        :raise ConfigError: if any value is out of range
        """
        checks = (
            ('training.mode', self.training.mode in ('band', 'frequency')),
            ('score.mode', self.score.mode in _deviation.MFCS_MODES),
            ('synth.age_law', self.synth.age_law in ('log-uniform', 'uniform')),
            ('thresholds.trajectory', 0 <= self.thresholds.trajectory <= 1),
            ('thresholds.compare', 0 <= self.thresholds.compare <= 1),
            ('thresholds.network', 0 <= self.thresholds.network <= 1),
            ('training.folds', self.training.folds >= 2),
            ('training.lr', self.training.lr > 0),
            ('training.batch_size', self.training.batch_size >= 1),
            ('training.val_fraction', 0 <= self.training.val_fraction < 1),
            ('run.jobs', self.run.jobs >= 1),
            ('run.timeout', self.run.timeout >= 0),
            ('synth.n', self.synth.n >= 1),
            ('synth.patients', self.synth.patients >= 0),
            ('synth.attenuation', 0 <= self.synth.attenuation < 1),
            ('synth.noise', self.synth.noise >= 0),
            ('louvain.restarts', self.louvain.restarts >= 1),
            ('gamlss.gcv_cycles', 0 <= self.gamlss.gcv_cycles < self.gamlss.max_iter),
        )
        for key, ok in checks:
            if not ok:
                section, name = key.split('.')
                value = getattr(getattr(self, section), name)
                raise _errors.ConfigError(f'Invalid value for {key}: {value!r}', key=key)
        for name in ('delta', 'theta', 'alpha', 'beta'):
            lo_hi = getattr(self.bands, name)
            if len(lo_hi) != 2 or not 0 < lo_hi[0] <= lo_hi[1]:
                raise _errors.ConfigError(f'Invalid value for bands.{name}: {lo_hi!r}', key=f'bands.{name}')
        if self.training.mode == 'band':
            self.training_band()
        return self


def _coerce(key, default, value):
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
    elif isinstance(default, int):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif isinstance(default, float):
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif isinstance(default, str):
        if isinstance(value, str):
            return value
    elif isinstance(default, tuple):
        if isinstance(value, (list, tuple)):
            return tuple(value)
    raise _errors.ConfigError(
        f'Invalid value for {key}: {value!r} (expected {type(default).__name__})',
        key=key,
    )


def _set(config, key, value):
    try:
        section_name, name = key.split('.')
    except ValueError:
        raise _errors.ConfigError(f'Invalid key: {key}', key=key)
    section = getattr(config, section_name, None)
    if section is None or not dataclasses.is_dataclass(section) or section_name.startswith('_'):
        raise _errors.ConfigError(f'Unknown section: {section_name}', key=key)
    fields = {f.name for f in dataclasses.fields(section)}
    if name not in fields:
        raise _errors.ConfigError(f'Unknown key: {key}', key=key)
    setattr(section, name, _coerce(key, getattr(section, name), value))


def parse_override(override):
    """
    Split ``section.key=value`` into key and TOML-parsed value

    Values that aren't valid TOML are taken as strings.

    :raise ConfigError: if there is no ``=``
    """
    key, sep, raw = override.partition('=')
    key = key.strip()
    if not sep or not key:
        raise _errors.ConfigError(f'Invalid override: {override!r}', key=key or None)
    try:
        value = tomllib.loads(f'v = {raw.strip()}')['v']
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key, value


def load_config(path=None, overrides=(), env=None):
    """
    Build :class:`RunConfig` from defaults, file, environment and overrides

    :param path: TOML file or `None`
    :param overrides: Sequence of ``section.key=value`` strings; applied last
    :param env: Environment mapping; defaults to :data:`os.environ`

    :raise ConfigError: if the file or an override violates the schema
    :raise FormatError: if the file can't be read or parsed
    """
    config = RunConfig()
    if path:
        try:
            with open(path, 'rb') as f:
                raw = tomllib.load(f)
        except FileNotFoundError:
            raise _errors.FormatError(f'No such file: {path}', path=path)
        except OSError as e:
            raise _errors.FormatError(f'{path}: {e.strerror or e}', path=path)
        except tomllib.TOMLDecodeError as e:
            raise _errors.FormatError(f'{path}: Invalid TOML: {e}', path=path)
        for section_name, table in raw.items():
            if not isinstance(table, dict):
                raise _errors.ConfigError(f'Not a section: {section_name}', key=section_name)
            for name, value in table.items():
                _set(config, f'{section_name}.{name}', value)
        _log.debug('Read configuration from %s', path)

    env = os.environ if env is None else env
    if env.get(OUTPUT_DIR_ENV):
        config.output.dir = env[OUTPUT_DIR_ENV]

    for override in overrides:
        _set(config, *parse_override(override))

    return config.validate()
