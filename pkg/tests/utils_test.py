import asyncio
import json
import logging
import re
import threading

import numpy as np
import pytest

from eegnorm import __project_name__, _errors, _utils


def test_cached_property_calls_getter_once():
    calls = []

    class Foo:
        @_utils.cached_property
        def bar(self):
            calls.append(1)
            return 'baz'

    foo = Foo()
    assert foo.bar == 'baz'
    assert foo.bar == 'baz'
    assert calls == [1]


def test_derive_seed_is_deterministic():
    assert _utils.derive_seed(1, 2, 3) == _utils.derive_seed(1, 2, 3)
    assert _utils.derive_seed(1, 2, 3) != _utils.derive_seed(1, 3, 2)
    assert _utils.derive_seed(1) != _utils.derive_seed(2)
    assert 0 <= _utils.derive_seed(7, 0) < 2 ** 32


def test_rng_streams_are_reproducible():
    a = _utils.rng(5, 1).normal(size=10)
    b = _utils.rng(5, 1).normal(size=10)
    c = _utils.rng(5, 2).normal(size=10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize('jobs', (1, 2, 4), ids=lambda v: f'jobs={v}')
async def test_gather_jobs_preserves_order(jobs):
    results = await _utils.gather_jobs(lambda x: x * 10, range(20), jobs=jobs)
    assert results == [x * 10 for x in range(20)]


async def test_gather_jobs_uses_worker_threads():
    threads = set()

    def func(x):
        threads.add(threading.get_ident())
        return x

    await _utils.gather_jobs(func, range(8), jobs=3)
    assert threading.get_ident() not in threads


async def test_gather_jobs_propagates_exception():
    def func(x):
        if x == 3:
            raise _errors.ValueError('three')
        return x

    with pytest.raises(_errors.ValueError, match=r'^three$'):
        await _utils.gather_jobs(func, range(5), jobs=2)


@pytest.mark.parametrize('jobs', (1, 3), ids=lambda v: f'jobs={v}')
def test_run_jobs_without_running_loop(jobs):
    assert _utils.run_jobs(lambda x: x + 1, [1, 2, 3], jobs=jobs) == [2, 3, 4]


async def test_run_jobs_inside_running_loop_runs_sequentially(mocker, caplog):
    caplog.set_level(logging.DEBUG, logger='eegnorm._utils')
    asyncio_run_mock = mocker.patch('asyncio.run')
    assert _utils.run_jobs(lambda x: -x, [1, 2, 3], jobs=4) == [-1, -2, -3]
    assert asyncio_run_mock.call_args_list == []
    assert 'Running 3 jobs sequentially inside running event loop' in caplog.messages


def test_write_json_is_sorted_and_stable(tmp_path):
    path = tmp_path / 'sub' / 'foo.json'
    _utils.write_json(path, {'b': 1, 'a': [1, 2]})
    content = path.read_text()
    assert content.endswith('\n')
    assert content.index('"a"') < content.index('"b"')
    assert json.loads(content) == {'a': [1, 2], 'b': 1}
    digest = _utils.sha256sum(path)
    _utils.write_json(path, {'a': [1, 2], 'b': 1})
    assert _utils.sha256sum(path) == digest


@pytest.mark.parametrize(
    argnames='content, exp_exception',
    argvalues=(
        (None, _errors.FormatError('No such file: {path}')),
        ('{"foo": ', _errors.FormatError('{path}: Invalid JSON: ')),
        ('{"foo": 1}', None),
    ),
)
def test_read_json(content, exp_exception, tmp_path):
    path = tmp_path / 'foo.json'
    if content is not None:
        path.write_text(content)
    if exp_exception:
        msg = str(exp_exception).format(path=path)
        with pytest.raises(type(exp_exception), match=rf'^{re.escape(msg)}'):
            _utils.read_json(path)
    else:
        assert _utils.read_json(path) == {'foo': 1}


def test_makedirs(tmp_path):
    path = tmp_path / 'a' / 'b'
    assert _utils.makedirs(path) == path
    assert path.is_dir()
    _utils.makedirs(path)


def test_project_name():
    assert __project_name__ == 'eegnorm'
