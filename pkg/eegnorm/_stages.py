"""
Pipeline stages

Every stage reads files written by earlier stages (or the dataset manifest),
writes its own files to ``<output>/<stage name>/`` and finishes with a
``summary.json`` that counts the subjects it read, used and excluded.
"""

import abc
import asyncio
import inspect
import os
import threading

import async_timeout
import numpy as np
import pandas as pd

from . import (_cohort, _deviation, _errors, _generator, _graph, _normcurves, _preprocess,
               _synth, _utils)

import logging  # isort:skip
_log = logging.getLogger(__name__)


PIPELINE = (
    'synth', 'validate', 'preprocess', 'connectivity', 'metrics',
    'fit-norms', 'embed', 'train', 'generate-norm', 'score', 'report',
)
"""Stage names in the order they depend on each other"""

NETWORK_INDEX_COLUMNS = ('subject_id', 'group', 'age', 'band', 'file')


def stages():
    """Return list of :class:`Stage` subclasses in :data:`PIPELINE` order"""
    subclses = set()
    for name, value in inspect.getmembers(inspect.getmodule(Stage)):
        if (
            value is not Stage and
            isinstance(value, type) and
            issubclass(value, Stage)
        ):
            subclses.add(value)
    return sorted(subclses, key=lambda cls: PIPELINE.index(cls.name))


def stage(name, *args, **kwargs):
    """
    Convenience function to instantiate a :class:`Stage` subclass

    :param str name: :attr:`~.Stage.name` of the stage
    :param args: Positional arguments to pass to the :class:`Stage` subclass
    :param kwargs: Keyword arguments to pass to the :class:`Stage` subclass

    :raise ValueError: if there is no :class:`Stage` subclass with a matching
        `name`

    :return: :class:`Stage` instance
    """
    for cls in stages():
        if cls.name == name:
            return cls(*args, **kwargs)
    raise _errors.ValueError(f'No such stage: {name}')


class Stage(abc.ABC):
    """
    Base class for pipeline stages

    :param config: :class:`~.RunConfig`
    """

    def __init__(self, config):
        self._config = config
        self._stop = threading.Event()

    # Abstract methods

    @abc.abstractmethod
    def _run(self):
        """
        Do the work in a worker thread

        :return: JSON-serializable summary
        """

    # Abstract properties

    @property
    @abc.abstractmethod
    def name(self):
        """Lowercase name that is also the output subdirectory"""

    @property
    @abc.abstractmethod
    def label(self):
        """Human-readable :attr:`name`"""

    # Properties

    @property
    def config(self):
        """:class:`~.RunConfig` instance"""
        return self._config

    @property
    def inputs(self):
        """Paths that must exist before the stage can run"""
        return ()

    @property
    def outdir(self):
        """Directory for this stage's outputs"""
        return os.path.join(self.config.output.dir, self.name)

    def path(self, *parts):
        """Path inside :attr:`outdir`"""
        return os.path.join(self.outdir, *parts)

    def stage_path(self, name, *parts):
        """Path inside the output directory of stage `name`"""
        return os.path.join(self.config.output.dir, name, *parts)

    @property
    def manifest_path(self):
        return self.config.dataset.manifest

    @property
    def louvain(self):
        """Keyword arguments for :func:`~.compute_ncs`"""
        return {
            'gamma': self.config.louvain.gamma,
            'seed': self.config.louvain.seed,
            'restarts': self.config.louvain.restarts,
        }

    # Running

    async def run(self):
        """
        Check inputs, run the stage and write ``summary.json``

        :raise MissingInputError: if any of :attr:`inputs` doesn't exist
        :raise TimeoutError: if the stage takes longer than ``run.timeout``
            seconds

        :return: Summary as :class:`dict`
        """
        missing = [p for p in self.inputs if not os.path.exists(p)]
        if missing:
            raise _errors.MissingInputError(
                f'{self.label}: Missing input: {", ".join(missing)}',
                paths=missing,
            )
        _utils.makedirs(self.outdir)
        self.config.write(os.path.join(self.config.output.dir, 'config.json'))

        timeout = self.config.run.timeout or None
        loop = asyncio.get_running_loop()
        _log.info('%s: Running', self.label)
        self._stop.clear()
        try:
            async with async_timeout.timeout(timeout):
                summary = await loop.run_in_executor(None, self._run)

        except asyncio.TimeoutError:
            _log.debug('%s: run(): Timeout', self.label)
            self._stop.set()
            raise _errors.TimeoutError(f'Timeout after {timeout} seconds')

        summary = {'stage': self.name, **summary}
        _utils.write_json(self.path('summary.json'), summary)
        _log.info('%s: Done', self.label)
        return summary

    def _checkpoint(self):
        # Worker threads can't be cancelled; they stop at the next checkpoint
        if self._stop.is_set():
            raise _errors.TimeoutError(f'{self.label}: Cancelled')

    def _map(self, func, items):
        """
        Call `func` for each item on ``run.jobs`` workers

        :class:`~.Error` exceptions are returned instead of raised, except for
        :class:`~.TimeoutError`.
        """
        def job(item):
            self._checkpoint()
            try:
                return func(item)
            except _errors.TimeoutError:
                raise
            except _errors.Error as e:
                return e

        return _utils.run_jobs(job, items, jobs=self.config.run.jobs)

    @staticmethod
    def _counts(read, used, excluded=()):
        """
        :param excluded: Sequence of ``(subject_id, reason)``
        """
        return {
            'subjects': {'read': int(read), 'used': int(used), 'excluded': len(excluded)},
            'excluded': [
                {'subject_id': str(subject_id), 'reason': str(reason)}
                for subject_id, reason in excluded
            ],
        }

    def _load_dataset(self, path=None, verify=None):
        return _cohort.load_dataset(
            path or self.manifest_path,
            verify=self.config.dataset.verify if verify is None else verify,
        )

    def _training_groups(self):
        return tuple(str(g) for g in self.config.training.groups)

    def _load_model(self):
        """
        Trained model and the band it was trained on

        :raise ValueError: if the model was trained on another band than
            ``training`` selects
        """
        model_path = self.stage_path('train', 'model.bin')
        model = _generator.DecoderModel.load(model_path)
        band = self.config.training_band()
        trained_on = _utils.read_json(self.stage_path('train', 'model.json')).get('band')
        if trained_on and trained_on != band.name:
            raise _errors.ValueError(f'Model was trained on band {trained_on}, not {band.name}')
        return model, band

    def __repr__(self):
        return f'<{type(self).__name__} {self.name!r}>'


def _read_table(path, dtype=None):
    try:
        return pd.read_csv(path, dtype=dtype)
    except FileNotFoundError:
        raise _errors.FormatError(f'No such file: {path}', path=path)
    except (OSError, ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise _errors.FormatError(f'{path}: {e}', path=path)


def read_network_index(path):
    """
    Read network index written by the ``connectivity`` stage

    :raise FormatError: if `path` is not a network index
    """
    frame = _read_table(path, dtype={'subject_id': str, 'group': str, 'band': str, 'file': str})
    missing = [c for c in NETWORK_INDEX_COLUMNS if c not in frame.columns]
    if missing:
        raise _errors.FormatError(f'{path}: Missing columns: {", ".join(missing)}', path=path)
    return frame


class SynthStage(Stage):
    """Generate a synthetic cohort as the dataset"""

    name = 'synth'
    label = 'Synthetic cohort'

    def _synth_config(self, n_subjects, seed, group, attenuation, id_prefix):
        s = self.config.synth
        return _synth.SynthConfig(
            n_subjects=n_subjects,
            age_range=(s.age_min, s.age_max),
            age_law=s.age_law,
            seed=seed,
            noise=s.noise,
            attenuation=attenuation,
            group=group,
            id_prefix=id_prefix,
            bands=self.config.bands.definitions(),
        )

    def _run(self):
        s = self.config.synth
        configs = [self._synth_config(s.n, s.seed, 'HC', 0.0, 'sub-')]
        if s.patients:
            configs.append(self._synth_config(
                s.patients, _utils.derive_seed(s.seed, 1), s.patient_group, s.attenuation, 'pat-',
            ))

        entries, truths = [], []
        for synth_config in configs:
            self._checkpoint()
            cohort = _synth.generate(synth_config, jobs=self.config.run.jobs)
            entries.extend(cohort.entries)
            truths.append(cohort.truth)
            cohort.save_networks(self.path('networks'))

        _cohort.save_dataset(
            self.manifest_path,
            entries,
            provenance={
                'generator': 'eegnorm.synth',
                'cohorts': [
                    {
                        'group': c.group,
                        'n_subjects': c.n_subjects,
                        'seed': c.seed,
                        'noise': c.noise,
                        'attenuation': c.attenuation,
                    }
                    for c in configs
                ],
            },
        )
        truth = pd.concat(truths, ignore_index=True)
        truth.to_csv(self.path('truth.csv'), index=False, float_format='%.17g')
        return {
            **self._counts(len(entries), len(entries)),
            'groups': {c.group: c.n_subjects for c in configs},
        }


class ValidateStage(Stage):
    """Check manifest and every tensor"""

    name = 'validate'
    label = 'Validate'

    @property
    def inputs(self):
        return (self.manifest_path,)

    def _run(self):
        try:
            dataset = self._load_dataset(verify=True)
        except _errors.ValidationError as e:
            self._write_violations(e.violations)
            subject_ids = {v.split(':', 1)[0] for v in e.violations}
            _utils.write_json(self.path('summary.json'), {
                'stage': self.name,
                **self._counts(
                    read=len(_utils.read_json(self.manifest_path).get('subjects', [])),
                    used=0,
                    excluded=[(s, 'invalid') for s in sorted(subject_ids)],
                ),
            })
            raise
        self._write_violations(())
        return self._counts(len(dataset), len(dataset))

    def _write_violations(self, violations):
        rows = [v.split(': ', 1) if ': ' in v else ('', v) for v in violations]
        pd.DataFrame(rows, columns=['subject_id', 'violation']).to_csv(
            self.path('violations.csv'), index=False,
        )


class PreprocessStage(Stage):
    """Average reference and global scale factor correction"""

    name = 'preprocess'
    label = 'Preprocess'

    @property
    def inputs(self):
        return (self.manifest_path,)

    def _run(self):
        dataset = self._load_dataset()

        def harmonize(entry):
            harmonized, g = _preprocess.harmonize(dataset.tensor(entry.subject.subject_id))
            return entry.subject, harmonized, float(g)

        results = self._map(harmonize, dataset.entries)
        used, excluded = [], []
        for entry, result in zip(dataset.entries, results):
            if isinstance(result, _errors.Error):
                _log.warning('%s: Excluded: %s', entry.subject.subject_id, result)
                excluded.append((entry.subject.subject_id, result))
            else:
                used.append(result)

        _cohort.save_dataset(
            self.path('manifest.json'),
            [(subject, t) for subject, t, _ in used],
            provenance={'stage': self.name, 'source': dataset.provenance},
        )
        pd.DataFrame(
            [(subject.subject_id, g) for subject, _, g in used],
            columns=['subject_id', 'gsf'],
        ).to_csv(self.path('gsf.csv'), index=False, float_format='%.17g')
        return self._counts(len(dataset), len(used), excluded)


class ConnectivityStage(Stage):
    """Coherence networks per subject and band"""

    name = 'connectivity'
    label = 'Connectivity'

    @property
    def inputs(self):
        return (self.stage_path('preprocess', 'manifest.json'),)

    def _run(self):
        dataset = self._load_dataset(self.stage_path('preprocess', 'manifest.json'), verify=False)
        bands = self.config.analysis_bands()
        netdir = _utils.makedirs(self.path('networks'))

        def networks(entry):
            subject = entry.subject
            t = dataset.tensor(subject.subject_id)
            rows = []
            for b in bands:
                filename = _graph.network_filename(subject.subject_id, b.name)
                _graph.write_network(os.path.join(netdir, filename), _preprocess.band_coherence(t, b))
                rows.append((subject.subject_id, subject.group, subject.age, b.name, f'networks/{filename}'))
            return rows

        results = self._map(networks, dataset.entries)
        rows, excluded = [], []
        for entry, result in zip(dataset.entries, results):
            if isinstance(result, _errors.Error):
                _log.warning('%s: Excluded: %s', entry.subject.subject_id, result)
                excluded.append((entry.subject.subject_id, result))
            else:
                rows.extend(result)

        pd.DataFrame(rows, columns=list(NETWORK_INDEX_COLUMNS)).to_csv(
            self.path('networks.csv'), index=False, float_format='%.17g',
        )
        return {
            **self._counts(len(dataset), len(dataset) - len(excluded), excluded),
            'bands': [b._asdict() for b in bands],
        }


class MetricsStage(Stage):
    """Network characteristics of the training groups at the trajectory threshold"""

    name = 'metrics'
    label = 'Network characteristics'

    @property
    def inputs(self):
        return (self.stage_path('connectivity', 'networks.csv'),)

    def _run(self):
        index = read_network_index(self.stage_path('connectivity', 'networks.csv'))
        read = index['subject_id'].nunique()
        index = index[index['group'].isin(self._training_groups())]
        tau = self.config.thresholds.trajectory

        def ncs(row):
            net = _graph.read_network(self.stage_path('connectivity', row['file']))
            return _graph.compute_ncs(net, tau=tau, **self.louvain)

        records = index.to_dict('records')
        results = self._map(ncs, records)
        rows, excluded = [], {}
        for record, result in zip(records, results):
            if isinstance(result, _errors.Error):
                _log.warning('%s: No NCs in band %s: %s', record['subject_id'], record['band'], result)
                excluded.setdefault(record['subject_id'], f'{record["band"]}: {result}')
            else:
                rows.append((record['subject_id'], record['band'], record['age'], result))

        _graph.write_nc_table(self.path('ncs.csv'), rows)
        used = len({r[0] for r in rows} - set(excluded))
        return {
            **self._counts(read, used, sorted(excluded.items())),
            'groups': list(self._training_groups()),
            'threshold': tau,
        }


class FitNormsStage(Stage):
    """Fit one BCT normative curve per band and NC"""

    name = 'fit-norms'
    label = 'Normative curves'

    @property
    def inputs(self):
        return (self.stage_path('metrics', 'ncs.csv'),)

    def _run(self):
        table = _graph.read_nc_table(self.stage_path('metrics', 'ncs.csv'))
        table = table.dropna(subset=list(_graph.NC_NAMES))
        curves = _normcurves.fit_all(
            table,
            config=self.config.gamlss.gamlss_config(),
            jobs=self.config.run.jobs,
        )
        curves.save(self.path('curves.json'))
        n = table['subject_id'].nunique()
        return {
            **self._counts(n, n),
            'cells': [{'band': band, 'nc': nc} for band, nc in curves.cells],
            'failures': [
                {'band': band, 'nc': nc, 'error': record}
                for (band, nc), record in curves.failures.items()
            ],
        }


class EmbedStage(Stage):
    """Training examples and embedding selection for the training band"""

    name = 'embed'
    label = 'Embedding'

    @property
    def inputs(self):
        return (
            self.stage_path('metrics', 'ncs.csv'),
            self.stage_path('connectivity', 'networks.csv'),
        )

    def _run(self):
        band = self.config.training_band()
        table = _graph.read_nc_table(self.stage_path('metrics', 'ncs.csv'))
        table = table[table['band'] == band.name]
        index = read_network_index(self.stage_path('connectivity', 'networks.csv'))
        files = {
            (row['subject_id'], row['band']): row['file']
            for row in index.to_dict('records')
        }

        examples, excluded = [], []
        for row in table.to_dict('records'):
            self._checkpoint()
            subject_id = row['subject_id']
            values = [row[name] for name in _graph.NC_NAMES]
            if not np.all(np.isfinite(values)):
                excluded.append((subject_id, 'Non-finite NCs'))
                continue
            net = _graph.read_network(self.stage_path('connectivity', files[(subject_id, band.name)]))
            examples.append(_generator.TrainingExample.from_network(
                subject_id, row['age'], _graph.NCVector.from_array(values), net,
            ))

        example_set = _generator.ExampleSet.from_examples(examples)
        example_set.save(self.path('examples.npz'))
        report = _generator.select_embedding(example_set)
        report.save(self.path('embedding.json'), self.path('embedding.csv'))
        return {
            **self._counts(len(table), len(examples), excluded),
            'band': band.name,
            'strong_count': report.strong_count,
        }


class TrainStage(Stage):
    """
    Cross-validate and train the decoder

    :param bool sweep: Whether to compare architecture variants; defaults to
        ``training.sweep``
    """

    name = 'train'
    label = 'Train decoder'

    def __init__(self, config, sweep=None):
        super().__init__(config)
        self._sweep = config.training.sweep if sweep is None else bool(sweep)

    @property
    def inputs(self):
        return (self.path_of_examples, self.stage_path('embed', 'embedding.json'))

    @property
    def path_of_examples(self):
        return self.stage_path('embed', 'examples.npz')

    def _run(self):
        t = self.config.training
        band = self.config.training_band()
        examples = _generator.ExampleSet.load(self.path_of_examples)
        strong_count = int(_utils.read_json(self.stage_path('embed', 'embedding.json'))['strong_count'])
        train_config = t.train_config()
        jobs = self.config.run.jobs

        cv = _generator.kfold_cv(examples, k=t.folds, config=train_config, jobs=jobs)
        _utils.write_json(self.path('cv.json'), cv.to_dict())
        cv.to_frame().to_csv(self.path('cv.csv'), index=False, float_format='%.17g')
        self._checkpoint()

        if self._sweep:
            sweep = _generator.architecture_sweep(examples, k=t.folds, config=train_config, jobs=jobs)
            sweep.to_csv(self.path('sweep.csv'), index=False, float_format='%.17g')
            self._checkpoint()

        model = _generator.build_model(
            strong_count,
            seed=t.seed,
            n_inputs=examples.X.shape[1],
            n_outputs=examples.Y.shape[1],
        )
        result = _generator.train(model, examples, train_config)
        result.model.save(self.path('model.bin'), extra={
            'band': band.name,
            'n_examples': len(examples),
            'epochs': result.epochs,
            'best_epoch': result.best_epoch,
        })
        pd.DataFrame({
            'epoch': np.arange(1, len(result.train_loss) + 1),
            'train': result.train_loss,
            'val': result.val_loss,
        }).to_csv(self.path('loss.csv'), index=False, float_format='%.17g')

        n = len(examples.unique_subjects)
        return {
            **self._counts(n, n),
            'band': band.name,
            'sizes': list(result.model.sizes),
            'cv': cv.summary(),
        }


class GenerateNormStage(Stage):
    """
    Normative networks for given ages

    :param ages: Ages in years; defaults to :func:`~.lifespan_ages`
    :param band: Band name; must be the band the model was trained on
    :param bool lifespan: Whether to add :func:`~.lifespan_ages` to `ages`
    """

    name = 'generate-norm'
    label = 'Generate normative networks'

    def __init__(self, config, ages=(), band=None, lifespan=False):
        super().__init__(config)
        ages = [float(a) for a in ages or ()]
        if lifespan or not ages:
            ages.extend(float(a) for a in _generator.lifespan_ages())
        self._ages = tuple(sorted(set(ages)))
        self._band = band

    @property
    def ages(self):
        return self._ages

    @property
    def inputs(self):
        return (
            self.stage_path('train', 'model.bin'),
            self.stage_path('fit-norms', 'curves.json'),
        )

    def _run(self):
        model, band = self._load_model()
        if self._band and self._band != band.name:
            raise _errors.ValueError(f'Model was trained on band {band.name}, not {self._band}')
        curves = _normcurves.NormativeCurveSet.load(self.stage_path('fit-norms', 'curves.json'))
        thresholds = self.config.thresholds
        netdir = _utils.makedirs(self.path('networks'))

        nc_rows, net_rows = [], []
        for age in self.ages:
            self._checkpoint()
            norm = _normcurves.normative_mean_ncs(curves, band.name, age)
            net = _generator.predict_network(model, age, norm)
            thresholded = _graph.threshold(net, thresholds.network)
            stem = f'age-{age:g}.{band.name}'
            _graph.write_network(os.path.join(netdir, f'{stem}.fc'), net)
            _graph.write_network(os.path.join(netdir, f'{stem}.thr.fc'), thresholded)
            net_rows.append({
                'age': age,
                'band': band.name,
                'mfcs': _deviation.mean_strength(net),
                'mfcs_thresholded': _deviation.mean_strength(thresholded),
                'edges_thresholded': thresholded.edge_count,
            })
            for source, network, tau in (
                ('generated', net, thresholds.trajectory),
                ('thresholded', net, thresholds.network),
            ):
                try:
                    values = _graph.compute_ncs(network, tau=tau, **self.louvain).as_dict()
                except _errors.DisconnectedError as e:
                    _log.warning('Age %g: No NCs for %s network: %s', age, source, e)
                    values = {name: np.nan for name in _graph.NC_NAMES}
                nc_rows.append({'age': age, 'band': band.name, 'source': source, **values})
            nc_rows.append({'age': age, 'band': band.name, 'source': 'normative', **norm.as_dict()})

        pd.DataFrame(net_rows).to_csv(self.path('networks.csv'), index=False, float_format='%.17g')
        pd.DataFrame(nc_rows, columns=['age', 'band', 'source', *_graph.NC_NAMES]).to_csv(
            self.path('ncs.csv'), index=False, float_format='%.17g',
        )
        return {
            'band': band.name,
            'ages': list(self.ages),
            'threshold': thresholds.network,
        }


class ScoreStage(Stage):
    """MFCS and NC deviations of every subject from the age-matched norm"""

    name = 'score'
    label = 'Score subjects'

    @property
    def inputs(self):
        return (
            self.manifest_path,
            self.stage_path('train', 'model.bin'),
            self.stage_path('fit-norms', 'curves.json'),
        )

    def _run(self):
        dataset = self._load_dataset()
        groups = tuple(self.config.score.groups)
        if groups:
            dataset = dataset.filter(groups)
        model, band = self._load_model()
        ctx = _deviation.NormContext(
            model=model,
            curves=_normcurves.NormativeCurveSet.load(self.stage_path('fit-norms', 'curves.json')),
            band=band,
            tau=self.config.thresholds.compare,
            mode=self.config.score.mode,
            **self.louvain,
        )

        def score(entry):
            subject = entry.subject
            return _deviation.score_subject(
                ctx, dataset.tensor(subject.subject_id), subject.age,
                subject_id=subject.subject_id, group=subject.group,
            )

        results = self._map(score, dataset.entries)
        records, excluded = [], []
        for entry, result in zip(dataset.entries, results):
            if isinstance(result, _errors.Error):
                _log.warning('%s: Not scored: %s', entry.subject.subject_id, result)
                excluded.append((entry.subject.subject_id, result))
            else:
                records.append(result)

        _deviation.write_records(self.path('records.csv'), records)
        return {
            **self._counts(len(dataset), len(records), excluded),
            'band': band.name,
            'mode': ctx.mode,
            # MFCS always compares unthresholded networks
            'nc_threshold': ctx.tau,
        }


class ReportStage(Stage):
    """Percentile tables, cohort deviations and NC comparisons as plot data"""

    name = 'report'
    label = 'Report'

    @property
    def inputs(self):
        return (
            self.stage_path('fit-norms', 'curves.json'),
            self.stage_path('score', 'records.csv'),
            self.stage_path('train', 'model.bin'),
        )

    def _ages(self):
        return tuple(self.config.report.ages) or _generator.lifespan_ages()

    def _run(self):
        r = self.config.report
        curves = _normcurves.NormativeCurveSet.load(self.stage_path('fit-norms', 'curves.json'))

        tables = []
        for band, nc in curves.cells:
            ages = r.ages or np.linspace(*curves.family(band, nc).age_range, 50)
            table = _normcurves.percentile_table(curves, band, nc, ages, ps=r.percentiles)
            table.insert(0, 'nc', nc)
            table.insert(0, 'band', band)
            tables.append(table)
        if tables:
            pd.concat(tables, ignore_index=True).to_csv(
                self.path('percentiles.csv'), index=False, float_format='%.17g',
            )
        self._checkpoint()

        records = _deviation.read_records(self.stage_path('score', 'records.csv'))
        report = _deviation.cohort_report(records, kde_points=r.kde_points)
        _utils.write_json(self.path('cohort.json'), {
            **report.to_dict(),
            'mfcs': 'unthresholded',
            'nc_threshold': self.config.thresholds.compare,
        })
        report.density.to_csv(self.path('density.csv'), index=False, float_format='%.17g')
        self._checkpoint()

        model, band = self._load_model()
        compare = _generator.compare_generated_ncs(
            model, curves, band.name, self._ages(),
            tau=self.config.thresholds.compare, **self.louvain,
        )
        compare.to_csv(self.path('compare.csv'), index=False, float_format='%.17g')

        counts = {}
        for name in PIPELINE:
            path = self.stage_path(name, 'summary.json')
            if name != self.name and os.path.exists(path):
                counts[name] = _utils.read_json(path).get('subjects')
        _utils.write_json(self.path('counts.json'), counts)

        n = len({rec.subject_id for rec in records})
        return {
            **self._counts(n, n),
            'groups': sorted(report.groups),
        }
