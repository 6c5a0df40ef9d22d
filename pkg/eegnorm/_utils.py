import asyncio
import concurrent.futures
import functools
import hashlib
import json
import os

import numpy as np

from . import _errors

import logging  # isort:skip
_log = logging.getLogger(__name__)


def cached_property(fget):
    """Property that replaces itself with its value on first access"""
    class _cached_property():
        def __init__(self, fget):
            self._fget = fget
            self._property_name = fget.__name__
            self.__doc__ = fget.__doc__

        def __get__(self, obj, cls):
            if obj is None:
                return self
            value = self._fget(obj)
            setattr(obj, self._property_name, value)
            return value

    return _cached_property(fget)


def derive_seed(seed, *keys):
    """
    Return independent 32-bit seed for the stream identified by `keys`

    The same `seed` and `keys` always produce the same value; different `keys`
    produce statistically independent streams.

    :param int seed: Root seed
    :param keys: Non-negative integers (e.g. subject index, fold number)
    """
    sequence = np.random.SeedSequence(
        entropy=int(seed),
        spawn_key=tuple(int(k) for k in keys),
    )
    return int(sequence.generate_state(1)[0])


def rng(seed, *keys):
    """Return :class:`numpy.random.Generator` for :func:`derive_seed` stream"""
    return np.random.default_rng(derive_seed(seed, *keys))


async def gather_jobs(func, items, *, jobs=1):
    """
    Call `func` for each item and return the results in the order of `items`

    :param func: Callable that takes one item
    :param items: Iterable of arguments for `func`
    :param int jobs: Number of worker threads; ``1`` or less runs everything
        sequentially in the current thread

    Exceptions raised by `func` are propagated after all running calls have
    finished.
    """
    items = list(items)
    jobs = int(jobs or 1)
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    loop = asyncio.get_running_loop()
    _log.debug('Running %d jobs on %d workers', len(items), jobs)
    with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as executor:
        futures = [
            loop.run_in_executor(executor, functools.partial(func, item))
            for item in items
        ]
        return list(await asyncio.gather(*futures))


def run_jobs(func, items, *, jobs=1):
    """Synchronous wrapper around :func:`gather_jobs`"""
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        return asyncio.run(gather_jobs(func, items, jobs=jobs))
    else:
        # Already inside a loop (e.g. a running stage); don't nest loops
        _log.debug('Running %d jobs sequentially inside running event loop', len(items))
        return [func(item) for item in items]


def write_json(path, obj):
    """
    Write `obj` as JSON with sorted keys

    Output is byte-identical for equal objects.
    """
    path = os.fspath(path)
    dirpath = os.path.dirname(path)
    if dirpath:
        os.makedirs(dirpath, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(obj, f, indent=2, sort_keys=True, allow_nan=True)
        f.write('\n')


def read_json(path):
    """
    Read JSON file

    :raise FormatError: if `path` can't be read or parsed
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        raise _errors.FormatError(f'No such file: {path}', path=path)
    except OSError as e:
        raise _errors.FormatError(f'{path}: {e.strerror or e}', path=path)
    except json.JSONDecodeError as e:
        raise _errors.FormatError(f'{path}: Invalid JSON: {e}', path=path)


def sha256sum(path):
    """Return hexadecimal SHA-256 digest of file content"""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            digest.update(chunk)
    return digest.hexdigest()


def makedirs(path):
    """Create directory `path` including parents and return it"""
    os.makedirs(path, exist_ok=True)
    return path
