"""
Decoder from (age, NCs) to network weights

Includes embedding selection, training with Adam, cross-validation and
normative network prediction.
"""

import copy
import dataclasses
import math
import os
import struct
import typing
import zipfile

import numpy as np
import pandas as pd
from scipy import stats
from sklearn import metrics as skmetrics
from sklearn.model_selection import KFold
from sklearn.preprocessing import StandardScaler

from . import _errors, _graph, _normcurves, _utils

import logging  # isort:skip
_log = logging.getLogger(__name__)


INPUT_NAMES = ('age',) + _graph.NC_NAMES
"""Decoder inputs in order"""

STRONG_R = 0.6
STRONG_P = 0.05
H2_RANGE = (32, 1368)

MODEL_VERSION = 1
MODEL_MAGIC = b'EEGNMODL'

# See https://docs.python.org/3/library/struct.html#format-strings
# magic, version, number of layer sizes, optimizer step (0 = no optimizer state)
MODEL_HEADER_FORMAT = '<8sIIQ'
MODEL_HEADER_SIZE = struct.calcsize(MODEL_HEADER_FORMAT)
MODEL_DTYPE = np.dtype('<f8')

ARCHITECTURES = ('10-10', 'model/4', 'model/2', 'model', 'model*2')
"""Variants accepted by :func:`architecture_hidden`"""


# Network <-> vector

def upper_indices(n):
    """Row-major indexes ``(i, j)`` with ``i < j``"""
    return np.triu_indices(int(n), 1)


def node_count(size):
    """Number of nodes whose upper triangle has `size` entries"""
    n = (1 + math.isqrt(1 + 8 * int(size))) // 2
    if n * (n - 1) // 2 != size:
        raise _errors.ValueError(f'{size} is not the size of an upper triangle')
    return n


def flatten_network(net):
    """Upper triangle of :class:`~.WeightedNetwork` as vector"""
    return net.weights[upper_indices(net.n)].copy()


def unflatten_network(values, labels=None):
    """Inverse of :func:`flatten_network`"""
    values = np.asarray(values, dtype=float)
    n = node_count(values.size)
    w = np.zeros((n, n))
    w[upper_indices(n)] = values
    return _graph.WeightedNetwork(w + w.T, labels=labels)


# Examples

class TrainingExample(typing.NamedTuple):
    subject_id: str
    inputs: np.ndarray
    target: np.ndarray

    @classmethod
    def from_network(cls, subject_id, age, ncs, net):
        return cls(
            subject_id=str(subject_id),
            inputs=np.concatenate([[float(age)], ncs.as_array()]),
            target=flatten_network(net),
        )


class ExampleSet:
    """
    Stacked :class:`TrainingExample` instances

    :param X: Inputs of shape ``(n, 8)``
    :param Y: Targets of shape ``(n, m)``
    :param subject_ids: Sequence of ``n`` subject IDs (duplicates allowed)
    """

    def __init__(self, X, Y, subject_ids):
        self.X = np.asarray(X, dtype=float)
        self.Y = np.asarray(Y, dtype=float)
        self.subject_ids = tuple(str(s) for s in subject_ids)
        if self.X.ndim != 2 or self.Y.ndim != 2:
            raise _errors.ValueError('Inputs and targets must be 2-dimensional')
        if not len(self.X) == len(self.Y) == len(self.subject_ids):
            raise _errors.ValueError('Inputs, targets and subject IDs differ in length')
        if self.Y.size and (np.any(self.Y < 0) or np.any(self.Y > 1)):
            raise _errors.ValueError('Targets must be in [0, 1]')

    @classmethod
    def from_examples(cls, examples):
        examples = list(examples)
        if not examples:
            return cls(np.empty((0, len(INPUT_NAMES))), np.empty((0, 0)), ())
        return cls(
            np.stack([e.inputs for e in examples]),
            np.stack([e.target for e in examples]),
            [e.subject_id for e in examples],
        )

    def __len__(self):
        return len(self.subject_ids)

    def __getitem__(self, index):
        return TrainingExample(self.subject_ids[index], self.X[index], self.Y[index])

    def subset(self, indexes):
        indexes = np.asarray(indexes, dtype=int)
        return type(self)(self.X[indexes], self.Y[indexes], [self.subject_ids[i] for i in indexes])

    @property
    def unique_subjects(self):
        """Subject IDs in order of first appearance"""
        return tuple(dict.fromkeys(self.subject_ids))

    def save(self, path):
        """Write examples as compressed numpy archive"""
        arrays = {
            'X': self.X,
            'Y': self.Y,
            'subject_ids': np.array(self.subject_ids, dtype=str),
        }
        # Fixed member timestamps keep archives of equal examples byte-identical
        with zipfile.ZipFile(path, 'w', compression=zipfile.ZIP_DEFLATED) as archive:
            for name, array in arrays.items():
                info = zipfile.ZipInfo(f'{name}.npy', date_time=(1980, 1, 1, 0, 0, 0))
                info.compress_type = zipfile.ZIP_DEFLATED
                with archive.open(info, 'w', force_zip64=True) as f:
                    np.lib.format.write_array(f, array, allow_pickle=False)

    @classmethod
    def load(cls, path):
        """
        :raise FormatError: if `path` is not a valid archive
        """
        try:
            with np.load(path, allow_pickle=False) as data:
                return cls(data['X'], data['Y'], [str(s) for s in data['subject_ids']])
        except FileNotFoundError:
            raise _errors.FormatError(f'No such file: {path}', path=path)
        except (OSError, KeyError, ValueError) as e:
            raise _errors.FormatError(f'{path}: {e}', path=path)


# Embedding selection

@dataclasses.dataclass
class EmbeddingReport:
    """Correlation of every input with every target entry"""

    r: np.ndarray
    p: np.ndarray
    strong_count: int
    n: int

    def to_dict(self):
        return {
            'n': self.n,
            'strong_count': self.strong_count,
            'strong_per_input': {
                name: int(count) for name, count in zip(INPUT_NAMES, np.sum(self.strong_mask, axis=1))
            },
        }

    @property
    def strong_mask(self):
        return (np.abs(self.r) > STRONG_R) & (self.p < STRONG_P)

    def to_frame(self):
        """Long table with one row per (input, target entry)"""
        n_inputs, n_outputs = self.r.shape
        try:
            rows, cols = upper_indices(node_count(n_outputs))
        except _errors.ValueError:
            rows = cols = np.full(n_outputs, -1)
        names = INPUT_NAMES if n_inputs == len(INPUT_NAMES) else [f'x{i}' for i in range(n_inputs)]
        return pd.DataFrame({
            'input': np.repeat(names, n_outputs),
            'output': np.tile(np.arange(n_outputs), n_inputs),
            'i': np.tile(rows, n_inputs),
            'j': np.tile(cols, n_inputs),
            'r': self.r.ravel(),
            'p': self.p.ravel(),
            'strong': self.strong_mask.ravel(),
        })

    def save(self, json_path, csv_path):
        _utils.write_json(json_path, self.to_dict())
        self.to_frame().to_csv(csv_path, index=False, float_format='%.17g')


def select_embedding(examples):
    """
    Pearson correlation of each input with each target entry

    Constant columns get ``r = 0`` and ``p = 1``. A pair is strong if
    ``|r| > 0.6`` and ``p < 0.05``.

    :param examples: :class:`ExampleSet`

    :raise ValueError: if there are fewer than 3 examples

    :return: :class:`EmbeddingReport`
    """
    n = len(examples)
    if n < 3:
        raise _errors.ValueError(f'Need at least 3 examples, got {n}')
    X, Y = examples.X, examples.Y
    xc = X - X.mean(axis=0)
    yc = Y - Y.mean(axis=0)
    xconst = np.all(X == X[0], axis=0)
    yconst = np.all(Y == Y[0], axis=0)
    xnorm = np.sqrt(np.sum(xc ** 2, axis=0))
    ynorm = np.sqrt(np.sum(yc ** 2, axis=0))
    valid = ~xconst[:, None] & ~yconst[None, :]

    with np.errstate(divide='ignore', invalid='ignore'):
        r = (xc.T @ yc) / np.outer(xnorm, ynorm)
    r = np.where(valid, np.clip(r, -1, 1), 0.0)

    df = n - 2
    with np.errstate(divide='ignore', invalid='ignore'):
        t = r * np.sqrt(df / (1 - r ** 2))
    t = np.where(np.abs(r) >= 1, np.inf, t)
    p = 2 * stats.t.sf(np.abs(t), df) if df > 0 else np.ones_like(r)
    p = np.where(valid, np.clip(p, 0, 1), 1.0)

    report = EmbeddingReport(r=r, p=p, strong_count=0, n=n)
    report.strong_count = int(np.sum(report.strong_mask))
    _log.debug('Embedding: %d strong pairs of %d', report.strong_count, r.size)
    return report


# Model

@dataclasses.dataclass
class AdamState:
    step: int
    m: list
    v: list


class DecoderModel:
    """
    Fully connected network with ReLU hidden layers and linear output

    Inputs are standardized with the stored :attr:`x_mean` and
    :attr:`x_scale` before the first layer.

    :param sizes: Layer sizes including input and output
    :param weights: Sequence of arrays of shape ``(fan_in, fan_out)``
    :param biases: Sequence of arrays of shape ``(fan_out,)``
    """

    def __init__(self, sizes, weights, biases, x_mean=None, x_scale=None,
                 seed=0, strong_count=None, optimizer=None):
        self.sizes = tuple(int(s) for s in sizes)
        if len(self.sizes) < 2 or any(s < 1 for s in self.sizes):
            raise _errors.ValueError(f'Invalid layer sizes: {self.sizes}')
        self.weights = [np.asarray(w, dtype=float) for w in weights]
        self.biases = [np.asarray(b, dtype=float) for b in biases]
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.sizes[i], self.sizes[i + 1]) or b.shape != (self.sizes[i + 1],):
                raise _errors.ValueError(f'Layer {i} has wrong shape')
        if len(self.weights) != len(self.sizes) - 1 or len(self.biases) != len(self.sizes) - 1:
            raise _errors.ValueError('Number of parameter arrays does not match layer sizes')
        self.x_mean = np.zeros(self.n_inputs) if x_mean is None else np.asarray(x_mean, dtype=float)
        self.x_scale = np.ones(self.n_inputs) if x_scale is None else np.asarray(x_scale, dtype=float)
        self.seed = int(seed)
        self.strong_count = strong_count
        self.optimizer = optimizer

    @property
    def n_inputs(self):
        return self.sizes[0]

    @property
    def n_outputs(self):
        return self.sizes[-1]

    @property
    def hidden(self):
        return self.sizes[1:-1]

    @property
    def parameters(self):
        """Weights and biases interleaved per layer"""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend((w, b))
        return params

    def is_finite(self):
        return all(np.all(np.isfinite(p)) for p in self.parameters)

    def copy(self):
        return copy.deepcopy(self)

    def metadata(self):
        return {
            'version': MODEL_VERSION,
            'sizes': list(self.sizes),
            'seed': self.seed,
            'strong_count': self.strong_count,
            'input_names': list(INPUT_NAMES) if self.n_inputs == len(INPUT_NAMES) else None,
            'x_mean': [float(v) for v in self.x_mean],
            'x_scale': [float(v) for v in self.x_scale],
            'optimizer_step': self.optimizer.step if self.optimizer else 0,
        }

    def save(self, path, metadata_path=None, extra=None):
        """
        Write parameters to binary file and metadata to JSON file

        :param path: Binary file path
        :param metadata_path: JSON file path; defaults to `path` with
            ``.json`` extension
        :param extra: Additional JSON-serializable metadata
        """
        metadata_path = metadata_path or os.path.splitext(os.fspath(path))[0] + '.json'
        step = self.optimizer.step if self.optimizer else 0
        chunks = [
            struct.pack(MODEL_HEADER_FORMAT, MODEL_MAGIC, MODEL_VERSION, len(self.sizes), step),
            np.asarray(self.sizes, dtype='<u4').tobytes(),
        ]
        arrays = self.parameters
        if self.optimizer:
            arrays = arrays + self.optimizer.m + self.optimizer.v
        for a in arrays:
            chunks.append(np.ascontiguousarray(a, dtype=MODEL_DTYPE).tobytes())
        with open(path, 'wb') as f:
            f.write(b''.join(chunks))
        metadata = self.metadata()
        if extra:
            metadata.update(extra)
        _utils.write_json(metadata_path, metadata)

    @classmethod
    def load(cls, path, metadata_path=None):
        """
        Read model written by :meth:`save`

        :raise FormatError: if either file is missing or malformed
        """
        metadata_path = metadata_path or os.path.splitext(os.fspath(path))[0] + '.json'
        try:
            with open(path, 'rb') as f:
                raw = f.read()
        except OSError as e:
            raise _errors.FormatError(f'{path}: {e.strerror or e}', path=path)
        if len(raw) < MODEL_HEADER_SIZE:
            raise _errors.FormatError(f'{path}: Truncated header', path=path)
        magic, version, n_sizes, step = struct.unpack(MODEL_HEADER_FORMAT, raw[:MODEL_HEADER_SIZE])
        if magic != MODEL_MAGIC:
            raise _errors.FormatError(f'{path}: Not a model file', path=path)
        if version != MODEL_VERSION:
            raise _errors.FormatError(f'{path}: Unsupported format version: {version}', path=path)
        pos = MODEL_HEADER_SIZE
        sizes = np.frombuffer(raw[pos:pos + 4 * n_sizes], dtype='<u4').astype(int).tolist()
        pos += 4 * n_sizes
        if len(sizes) != n_sizes:
            raise _errors.FormatError(f'{path}: Truncated layer sizes', path=path)

        shapes = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            shapes.extend(((fan_in, fan_out), (fan_out,)))
        if step:
            shapes = shapes * 3
        arrays = []
        for shape in shapes:
            count = int(np.prod(shape))
            end = pos + count * MODEL_DTYPE.itemsize
            if end > len(raw):
                raise _errors.FormatError(f'{path}: Truncated parameters', path=path)
            arrays.append(np.frombuffer(raw[pos:end], dtype=MODEL_DTYPE).reshape(shape).astype(float))
            pos = end
        if pos != len(raw):
            raise _errors.FormatError(f'{path}: Unexpected trailing data', path=path)

        metadata = _utils.read_json(metadata_path)
        nparams = 2 * (len(sizes) - 1)
        optimizer = None
        if step:
            optimizer = AdamState(
                step=int(step),
                m=arrays[nparams:2 * nparams],
                v=arrays[2 * nparams:],
            )
        try:
            return cls(
                sizes,
                weights=arrays[0:nparams:2],
                biases=arrays[1:nparams:2],
                x_mean=metadata['x_mean'],
                x_scale=metadata['x_scale'],
                seed=metadata.get('seed', 0),
                strong_count=metadata.get('strong_count'),
                optimizer=optimizer,
            )
        except (KeyError, TypeError, _errors.ValueError) as e:
            raise _errors.FormatError(f'{metadata_path}: Invalid model metadata: {e}', path=metadata_path)

    def __repr__(self):
        return f'<{type(self).__name__} sizes={list(self.sizes)}>'


def default_hidden(strong_count, n_inputs=len(INPUT_NAMES), n_outputs=171):
    """
    Hidden layer sizes ``(n_inputs * n_outputs, h2, n_outputs)``

    ``h2`` is `strong_count` clamped to ``[32, n_inputs * n_outputs]``.
    """
    h1 = n_inputs * n_outputs
    h2 = int(min(max(int(strong_count), H2_RANGE[0]), h1))
    return (h1, h2, n_outputs)


def architecture_hidden(variant, strong_count, n_inputs=len(INPUT_NAMES), n_outputs=171):
    """
    Hidden layer sizes of an architecture variant

    :param str variant: One of :data:`ARCHITECTURES`

    :raise ValueError: if `variant` is unknown
    """
    h1, h2, h3 = default_hidden(strong_count, n_inputs, n_outputs)
    if variant == '10-10':
        return (10, 10, h3)
    elif variant == 'model':
        return (h1, h2, h3)
    elif variant == 'model/4':
        return (max(1, h1 // 4), max(1, h2 // 4), h3)
    elif variant == 'model/2':
        return (max(1, h1 // 2), max(1, h2 // 2), h3)
    elif variant == 'model*2':
        return (h1 * 2, h2 * 2, h3)
    raise _errors.ValueError(f'Unknown architecture: {variant}')


def build_model(strong_count, seed, hidden=None, n_inputs=len(INPUT_NAMES), n_outputs=171):
    """
    Create model with He-uniform weights and zero biases

    :param int strong_count: Number of strong embedding pairs; determines the
        second hidden layer if `hidden` is not given
    :param int seed: Initialization seed
    :param hidden: Explicit hidden layer sizes

    :return: :class:`DecoderModel`
    """
    if hidden is None:
        hidden = default_hidden(strong_count, n_inputs, n_outputs)
    sizes = (int(n_inputs),) + tuple(int(h) for h in hidden) + (int(n_outputs),)
    rng = np.random.default_rng(int(seed))
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = math.sqrt(6 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return DecoderModel(sizes, weights, biases, seed=seed, strong_count=strong_count)


def _standardize(model, X):
    return (X - model.x_mean) / model.x_scale


def _forward(model, X):
    activations = [_standardize(model, X)]
    pre = []
    last = len(model.weights) - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = activations[-1] @ w + b
        pre.append(z)
        activations.append(z if i == last else np.maximum(z, 0.0))
    return activations, pre


def forward(model, x):
    """
    Raw (unclipped) model output

    :param x: Input vector of shape ``(n_inputs,)`` or batch ``(n, n_inputs)``
    """
    x = np.asarray(x, dtype=float)
    out = _forward(model, np.atleast_2d(x))[0][-1]
    return out[0] if x.ndim == 1 else out


def loss_and_gradients(model, X, Y):
    """
    Mean squared error over all outputs and its gradients

    :return: :class:`tuple` of loss, weight gradients and bias gradients
    """
    activations, pre = _forward(model, X)
    diff = activations[-1] - Y
    loss = float(np.mean(diff ** 2))
    delta = 2 * diff / diff.size
    grad_w = [None] * len(model.weights)
    grad_b = [None] * len(model.biases)
    for i in reversed(range(len(model.weights))):
        grad_w[i] = activations[i].T @ delta
        grad_b[i] = np.sum(delta, axis=0)
        if i > 0:
            delta = (delta @ model.weights[i].T) * (pre[i - 1] > 0)
    return loss, grad_w, grad_b


def mse(model, examples):
    if not len(examples):
        return float('nan')
    return float(np.mean((forward(model, examples.X) - examples.Y) ** 2))


@dataclasses.dataclass
class TrainConfig:
    """Settings for :func:`train`"""

    lr: float = 1e-3
    batch_size: int = 32
    max_epochs: int = 500
    patience: int = 20
    """Stop after this many epochs without validation improvement"""

    val_fraction: float = 0.1
    """Fraction of examples held out for early stopping; 0 disables holdout"""

    seed: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclasses.dataclass
class TrainResult:
    model: DecoderModel
    train_loss: list
    val_loss: list
    best_epoch: int
    epochs: int


def train(model, examples, config=None):
    """
    Minimize mean squared error with Adam

    The returned model is a trained copy; `model` is not modified. Input
    standardization statistics are computed from `examples`.

    :param model: :class:`DecoderModel`
    :param examples: :class:`ExampleSet`
    :param config: :class:`TrainConfig`

    :raise ValueError: if there are fewer than 2 examples
    :raise DivergenceError: if the loss becomes NaN or infinite

    :return: :class:`TrainResult`
    """
    config = config or TrainConfig()
    n = len(examples)
    if n < 2:
        raise _errors.ValueError(f'Need at least 2 examples, got {n}')

    model = model.copy()
    scaler = StandardScaler().fit(examples.X)
    model.x_mean = scaler.mean_.copy()
    model.x_scale = scaler.scale_.copy()

    order = _utils.rng(config.seed, 0).permutation(n)
    n_val = int(round(config.val_fraction * n)) if config.val_fraction > 0 else 0
    n_val = min(max(n_val, 1 if config.val_fraction > 0 else 0), n - 1)
    val = examples.subset(np.sort(order[:n_val]))
    fit = examples.subset(np.sort(order[n_val:]))

    params = model.parameters
    if model.optimizer is None:
        model.optimizer = AdamState(
            step=0,
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )
    state = model.optimizer
    shuffle = _utils.rng(config.seed, 1)
    batch_size = max(1, int(config.batch_size))

    train_trace, val_trace = [], []
    best = (math.inf, 0, [p.copy() for p in params], copy.deepcopy(state))
    since_best = 0
    epoch = 0
    for epoch in range(1, int(config.max_epochs) + 1):
        perm = shuffle.permutation(len(fit))
        for start in range(0, len(fit), batch_size):
            idx = perm[start:start + batch_size]
            _, grad_w, grad_b = loss_and_gradients(model, fit.X[idx], fit.Y[idx])
            grads = [g for pair in zip(grad_w, grad_b) for g in pair]
            state.step += 1
            correction1 = 1 - config.beta1 ** state.step
            correction2 = 1 - config.beta2 ** state.step
            for p, g, m, v in zip(params, grads, state.m, state.v):
                m *= config.beta1
                m += (1 - config.beta1) * g
                v *= config.beta2
                v += (1 - config.beta2) * g * g
                p -= config.lr * (m / correction1) / (np.sqrt(v / correction2) + config.eps)

        train_loss = mse(model, fit)
        val_loss = mse(model, val) if len(val) else train_loss
        train_trace.append(train_loss)
        val_trace.append(val_loss)
        if not (math.isfinite(train_loss) and math.isfinite(val_loss)):
            raise _errors.DivergenceError(f'Loss diverged in epoch {epoch}', trace=train_trace)

        if val_loss < best[0]:
            best = (val_loss, epoch, [p.copy() for p in params], copy.deepcopy(state))
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                _log.debug('Early stop in epoch %d (best epoch %d)', epoch, best[1])
                break
        if epoch % 50 == 0:
            _log.debug('Epoch %d: train=%.6g val=%.6g', epoch, train_loss, val_loss)

    # Restore best parameters
    for p, saved in zip(params, best[2]):
        p[...] = saved
    model.optimizer = best[3]
    return TrainResult(
        model=model,
        train_loss=train_trace,
        val_loss=val_trace,
        best_epoch=best[1],
        epochs=epoch,
    )


# Evaluation

class Metrics(typing.NamedTuple):
    r2: float
    mae: float
    rmse: float


def evaluate(model, examples):
    """
    R², MAE and RMSE over all flattened (example, output) entries

    Raw model outputs are compared with the targets.

    :return: :class:`Metrics`
    """
    if not len(examples):
        raise _errors.ValueError('Cannot evaluate without examples')
    y = examples.Y.ravel()
    yhat = forward(model, examples.X).ravel()
    return Metrics(
        r2=float(skmetrics.r2_score(y, yhat)),
        mae=float(skmetrics.mean_absolute_error(y, yhat)),
        rmse=float(math.sqrt(skmetrics.mean_squared_error(y, yhat))),
    )


@dataclasses.dataclass
class FoldResult:
    fold: int
    n_train: int
    n_test: int
    strong_count: int
    hidden: tuple
    train: Metrics
    test: Metrics
    test_subjects: tuple


@dataclasses.dataclass
class CVReport:
    """Per-fold and summarized cross-validation metrics"""

    folds: list
    variant: str = 'model'

    def summary(self):
        """Mean and sample standard deviation of every metric"""
        out = {}
        for split in ('train', 'test'):
            for name in Metrics._fields:
                values = np.array([getattr(getattr(f, split), name) for f in self.folds])
                sd = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
                out[f'{split}_{name}'] = {'mean': float(np.mean(values)), 'sd': sd}
        return out

    def to_dict(self):
        return {
            'variant': self.variant,
            'k': len(self.folds),
            'summary': self.summary(),
            'folds': [
                {
                    'fold': f.fold,
                    'n_train': f.n_train,
                    'n_test': f.n_test,
                    'strong_count': f.strong_count,
                    'hidden': list(f.hidden),
                    'train': f.train._asdict(),
                    'test': f.test._asdict(),
                    'test_subjects': list(f.test_subjects),
                }
                for f in self.folds
            ],
        }

    def to_frame(self):
        """One row per fold and split"""
        rows = []
        for f in self.folds:
            for split in ('train', 'test'):
                rows.append({
                    'variant': self.variant,
                    'fold': f.fold,
                    'split': split,
                    'n': f.n_train if split == 'train' else f.n_test,
                    **getattr(f, split)._asdict(),
                })
        return pd.DataFrame(rows, columns=['variant', 'fold', 'split', 'n', *Metrics._fields])


def kfold_cv(examples, k=5, config=None, variant='model', jobs=1):
    """
    Subject-level k-fold cross-validation

    Each fold selects its embedding, builds a fresh model and trains it on
    the other folds. Examples of one subject never end up in different
    folds.

    :param examples: :class:`ExampleSet`
    :param int k: Number of folds
    :param config: :class:`TrainConfig`; its seed also seeds the split
    :param str variant: Architecture variant (see :data:`ARCHITECTURES`)
    :param int jobs: Number of folds trained concurrently

    :raise ValueError: if there are fewer subjects than folds

    :return: :class:`CVReport`
    """
    config = config or TrainConfig()
    subjects = np.array(examples.unique_subjects)
    if len(subjects) < k or k < 2:
        raise _errors.ValueError(f'Cannot split {len(subjects)} subjects into {k} folds')

    splitter = KFold(n_splits=k, shuffle=True, random_state=_utils.derive_seed(config.seed, 0))
    splits = list(splitter.split(subjects))
    subject_ids = np.array(examples.subject_ids)

    def run_fold(fold):
        train_subjects, test_subjects = splits[fold]
        train_mask = np.isin(subject_ids, subjects[train_subjects])
        train_set = examples.subset(np.flatnonzero(train_mask))
        test_set = examples.subset(np.flatnonzero(~train_mask))
        strong_count = select_embedding(train_set).strong_count
        hidden = architecture_hidden(variant, strong_count, examples.X.shape[1], examples.Y.shape[1])
        model = build_model(
            strong_count,
            seed=_utils.derive_seed(config.seed, fold, 1),
            hidden=hidden,
            n_inputs=examples.X.shape[1],
            n_outputs=examples.Y.shape[1],
        )
        fold_config = dataclasses.replace(config, seed=_utils.derive_seed(config.seed, fold, 2))
        result = train(model, train_set, fold_config)
        _log.debug('Fold %d: %d epochs, best epoch %d', fold, result.epochs, result.best_epoch)
        return FoldResult(
            fold=fold,
            n_train=len(train_set),
            n_test=len(test_set),
            strong_count=strong_count,
            hidden=hidden,
            train=evaluate(result.model, train_set),
            test=evaluate(result.model, test_set),
            test_subjects=tuple(sorted(subjects[test_subjects].tolist())),
        )

    folds = _utils.run_jobs(run_fold, range(k), jobs=jobs)
    return CVReport(folds=folds, variant=variant)


def architecture_sweep(examples, k=5, config=None, variants=ARCHITECTURES, jobs=1):
    """
    Run :func:`kfold_cv` for each architecture variant

    :return: :class:`pandas.DataFrame` with one row per variant and the mean
        and standard deviation of every metric
    """
    rows = []
    for variant in variants:
        report = kfold_cv(examples, k=k, config=config, variant=variant, jobs=jobs)
        row = {'variant': variant, 'hidden': '-'.join(str(h) for h in report.folds[0].hidden)}
        for key, value in report.summary().items():
            row[f'{key}_mean'] = value['mean']
            row[f'{key}_sd'] = value['sd']
        rows.append(row)
    return pd.DataFrame(rows)


# Prediction

def predict_network(model, age, ncs, labels=None):
    """
    Generate network for `age` and :class:`~.NCVector` `ncs`

    Outputs are clipped to ``[0, 1]`` and mirrored into a symmetric matrix.

    :return: :class:`~.WeightedNetwork`
    """
    x = np.concatenate([[float(age)], ncs.as_array()])
    out = np.clip(forward(model, x), 0.0, 1.0)
    return unflatten_network(out, labels=labels)


def lifespan_ages():
    """Ages 5 to 17 every 3 years and 25 to 85 every 10 years"""
    return (5, 8, 11, 14, 17) + tuple(range(25, 86, 10))


def compare_generated_ncs(model, curves, band, ages, tau=0.4, gamma=1.0, seed=42, restarts=10,
                          labels=None):
    """
    Compare median NCs fed to the decoder with NCs of the generated networks

    :param curves: :class:`~.NormativeCurveSet`
    :param ages: Ages in years
    :param float tau: Threshold applied to generated networks

    :return: :class:`pandas.DataFrame` with columns ``age``, ``nc``,
        ``normative``, ``generated`` and ``rel_error``
    """
    rows = []
    for age in ages:
        norm = _normcurves.normative_mean_ncs(curves, band, age)
        net = predict_network(model, age, norm, labels=labels)
        try:
            generated = _graph.compute_ncs(net, tau=tau, gamma=gamma, seed=seed, restarts=restarts)
        except _errors.DisconnectedError as e:
            _log.warning('Generated network for age %g: %s', age, e)
            generated = None
        for name in _graph.NC_NAMES:
            expected = getattr(norm, name)
            actual = getattr(generated, name) if generated else math.nan
            rel = abs(actual - expected) / abs(expected) if expected else math.nan
            rows.append({
                'age': float(age),
                'nc': name,
                'normative': expected,
                'generated': actual,
                'rel_error': rel,
            })
    return pd.DataFrame(rows, columns=['age', 'nc', 'normative', 'generated', 'rel_error'])
