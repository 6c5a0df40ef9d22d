import builtins as _builtins


class Error(Exception):
    """Base class for all exceptions raised by this package"""

    def __eq__(self, other):
        return (
            type(self) is type(other)
            and str(self) == str(other)
        )

    __hash__ = Exception.__hash__

    def as_record(self):
        """
        Machine-readable description of this exception

        :return: :class:`dict` with the keys ``error`` (class name),
            ``message`` and any additional attributes specific to the subclass
        """
        record = {
            'error': type(self).__name__,
            'message': str(self),
        }
        record.update(self._record_fields())
        return record

    def _record_fields(self):
        return {}


class ValueError(Error, _builtins.ValueError):
    """
    Invalid value (e.g. negative age)

    Besides :class:`Error`, this is also a subclass of :class:`ValueError`.
    """


class EmptyBandError(ValueError):
    """Frequency band does not contain any frequency of the grid"""


class ConfigError(ValueError):
    """
    Configuration does not follow the schema

    :param key: Dotted name of the offending key (e.g. ``"training.lr"``)
    """

    def __init__(self, msg, key=None):
        super().__init__(msg)
        self.key = key

    def _record_fields(self):
        return {'key': self.key}


class FormatError(Error):
    """
    File is missing, unreadable or malformed

    :param path: Path of the offending file
    """

    def __init__(self, msg, path=None):
        super().__init__(msg)
        self.path = str(path) if path is not None else None

    def _record_fields(self):
        return {'path': self.path}


class ValidationError(Error):
    """
    Data violate an invariant (e.g. non-Hermitian cross-spectrum)

    :param subject_id: Subject the data belong to or `None`
    :param violations: Sequence of human-readable violation descriptions
    """

    def __init__(self, msg, subject_id=None, violations=()):
        super().__init__(msg)
        self.subject_id = subject_id
        self.violations = tuple(str(v) for v in violations)

    def _record_fields(self):
        return {
            'subject_id': self.subject_id,
            'violations': list(self.violations),
        }


class DisconnectedError(Error):
    """Network has no edges or no pair of nodes is connected by a path"""


class ConvergenceError(Error):
    """
    Iterative fit did not converge

    :param trace: Sequence of objective values, one per iteration
    """

    def __init__(self, msg, trace=()):
        super().__init__(msg)
        self.trace = tuple(float(v) for v in trace)

    def _record_fields(self):
        return {'trace': list(self.trace)}


class DivergenceError(ConvergenceError):
    """Training loss became NaN or infinite"""


class MissingInputError(Error):
    """
    Files required by a pipeline stage do not exist

    :param paths: Sequence of missing paths
    """

    def __init__(self, msg, paths=()):
        super().__init__(msg)
        self.paths = tuple(str(p) for p in paths)

    def _record_fields(self):
        return {'paths': list(self.paths)}


class TimeoutError(Error, _builtins.TimeoutError):
    """
    Pipeline stage did not finish in time

    Besides :class:`Error`, this is also a subclass of :class:`TimeoutError`.
    """
