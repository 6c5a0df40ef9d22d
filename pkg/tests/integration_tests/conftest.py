import os

import pytest

from eegnorm import _config, _utils

SLOW_ENV = 'EEGNORM_SLOW'


def pytest_collection_modifyitems(config, items):
    if os.environ.get(SLOW_ENV):
        return
    skip = pytest.mark.skip(reason=f'Set {SLOW_ENV}=1 to run desktop-scale runs')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip)


def small_config(basedir, n=60, patients=0, seed=1):
    """Configuration of a small but complete synthetic run in `basedir`"""
    config = _config.RunConfig()
    config.dataset.manifest = os.path.join(basedir, 'dataset', 'manifest.json')
    config.output.dir = os.path.join(basedir, 'out')
    config.synth.n = n
    config.synth.patients = patients
    config.synth.seed = seed
    config.gamlss.mu_knots = 8
    config.gamlss.n_lambdas = 8
    config.louvain.restarts = 2
    config.training.folds = 3
    config.training.max_epochs = 15
    config.training.batch_size = 16
    config.report.ages = (8.0, 30.0, 60.0)
    config.run.jobs = 2
    return config.validate()


@pytest.fixture
def make_config(tmp_path):
    def make_config(name='run', **kwargs):
        return small_config(str(tmp_path / name), **kwargs)
    return make_config


def tree_digests(directory, exclude=()):
    """Map relative path of every file below `directory` to its SHA-256"""
    digests = {}
    for root, _, filenames in os.walk(directory):
        for filename in filenames:
            path = os.path.join(root, filename)
            relpath = os.path.relpath(path, directory)
            if relpath in exclude:
                continue
            digests[relpath] = _utils.sha256sum(path)
    return digests
