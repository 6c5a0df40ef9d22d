import builtins

import pytest

from eegnorm import _errors


@pytest.mark.parametrize(
    argnames='a, b, exp_equal',
    argvalues=(
        (_errors.Error('foo'), _errors.Error('foo'), True),
        (_errors.Error('foo'), _errors.Error('bar'), False),
        (_errors.Error('foo'), _errors.ValueError('foo'), False),
        (_errors.FormatError('foo', path='a'), _errors.FormatError('foo', path='b'), True),
        (_errors.ValueError('foo'), builtins.ValueError('foo'), False),
    ),
    ids=lambda v: repr(v),
)
def test_Error_equality(a, b, exp_equal):
    assert (a == b) is exp_equal


@pytest.mark.parametrize(
    argnames='exception, exp_bases',
    argvalues=(
        (_errors.ValueError('x'), (_errors.Error, builtins.ValueError)),
        (_errors.EmptyBandError('x'), (_errors.ValueError, builtins.ValueError)),
        (_errors.ConfigError('x'), (_errors.ValueError, builtins.ValueError)),
        (_errors.TimeoutError('x'), (_errors.Error, builtins.TimeoutError)),
        (_errors.DivergenceError('x'), (_errors.ConvergenceError, _errors.Error)),
        (_errors.DisconnectedError('x'), (_errors.Error,)),
        (_errors.MissingInputError('x'), (_errors.Error,)),
    ),
    ids=lambda v: type(v).__name__ if isinstance(v, Exception) else '',
)
def test_exception_hierarchy(exception, exp_bases):
    for base in exp_bases:
        assert isinstance(exception, base)


@pytest.mark.parametrize(
    argnames='exception, exp_record',
    argvalues=(
        (_errors.Error('Oops'), {'error': 'Error', 'message': 'Oops'}),
        (_errors.ConfigError('Bad', key='training.lr'), {'error': 'ConfigError', 'message': 'Bad', 'key': 'training.lr'}),
        (_errors.FormatError('Bad file', path='x.cs'), {'error': 'FormatError', 'message': 'Bad file', 'path': 'x.cs'}),
        (
            _errors.ValidationError('Invalid', subject_id='s1', violations=['a', 'b']),
            {'error': 'ValidationError', 'message': 'Invalid', 'subject_id': 's1', 'violations': ['a', 'b']},
        ),
        (_errors.ConvergenceError('No', trace=[3, 2.5]), {'error': 'ConvergenceError', 'message': 'No', 'trace': [3.0, 2.5]}),
        (_errors.MissingInputError('Gone', paths=['a', 'b']), {'error': 'MissingInputError', 'message': 'Gone', 'paths': ['a', 'b']}),
    ),
    ids=lambda v: repr(v),
)
def test_as_record(exception, exp_record):
    assert exception.as_record() == exp_record
