import itertools
import math

import numpy as np

from eegnorm import _cohort, _generator, _graph, _normcurves


def random_psd_tensor(rng, nc=5, nf=4, rank=None):
    """Hermitian positive semidefinite cross-spectra with positive diagonal"""
    rank = rank or nc
    a = rng.normal(size=(nf, nc, rank)) + 1j * rng.normal(size=(nf, nc, rank))
    data = a @ np.conj(np.swapaxes(a, 1, 2))
    data = 0.5 * (data + np.conj(np.swapaxes(data, 1, 2)))
    return _cohort.CrossSpectrumTensor(data)


def random_network(rng, n, density=0.6, low=0.05):
    """Random weighted network with at least one edge"""
    while True:
        w = np.triu(rng.uniform(low, 1.0, size=(n, n)) * (rng.uniform(size=(n, n)) < density), 1)
        if np.count_nonzero(w):
            return _graph.WeightedNetwork(w + w.T)


def path_network(n=3, weight=1.0):
    w = np.zeros((n, n))
    for i in range(n - 1):
        w[i, i + 1] = w[i + 1, i] = weight
    return _graph.WeightedNetwork(w)


# Brute force reference implementations

def oracle_distances(w):
    n = len(w)
    d = [[0.0 if i == j else (1 / w[i][j] if w[i][j] > 0 else math.inf) for j in range(n)] for i in range(n)]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def oracle_cpl(w):
    d = oracle_distances(w)
    finite = [d[i][j] for i in range(len(w)) for j in range(len(w)) if i != j and math.isfinite(d[i][j])]
    return sum(finite) / len(finite)


def oracle_efficiency(w):
    n = len(w)
    if n < 2:
        return 0.0
    d = oracle_distances(w)
    total = sum(1 / d[i][j] for i in range(n) for j in range(n) if i != j and math.isfinite(d[i][j]))
    return total / (n * (n - 1))


def oracle_cc(w):
    n = len(w)
    wmax = max(max(row) for row in w)
    values = []
    for i in range(n):
        k = sum(1 for j in range(n) if w[i][j] > 0)
        if k < 2:
            values.append(0.0)
            continue
        total = 0.0
        for j in range(n):
            for h in range(n):
                total += (w[i][j] * w[j][h] * w[h][i] / wmax ** 3) ** (1 / 3)
        values.append(total / (k * (k - 1)))
    return sum(values) / n


def oracle_le(w):
    n = len(w)
    values = []
    for i in range(n):
        neighbours = [j for j in range(n) if w[i][j] > 0]
        if len(neighbours) < 2:
            values.append(0.0)
        else:
            sub = [[w[a][b] for b in neighbours] for a in neighbours]
            values.append(oracle_efficiency(sub))
    return sum(values) / n


def oracle_path_counts(w, d):
    """Number of shortest paths between every pair"""
    n = len(w)
    sigma = [[0] * n for _ in range(n)]
    for s in range(n):
        sigma[s][s] = 1
        for x in sorted(range(n), key=lambda x: d[s][x]):
            if x == s or not math.isfinite(d[s][x]):
                continue
            sigma[s][x] = sum(
                sigma[s][u] for u in range(n)
                if w[u][x] > 0 and math.isclose(d[s][u] + 1 / w[u][x], d[s][x], rel_tol=1e-12)
            )
    return sigma


def oracle_bc(w):
    n = len(w)
    d = oracle_distances(w)
    sigma = oracle_path_counts(w, d)
    values = [0.0] * n
    for s, t in itertools.combinations(range(n), 2):
        if not math.isfinite(d[s][t]):
            continue
        for v in range(n):
            if v in (s, t):
                continue
            if math.isclose(d[s][v] + d[v][t], d[s][t], rel_tol=1e-12):
                values[v] += sigma[s][v] * sigma[v][t] / sigma[s][t]
    return sum(values) / n


def oracle_modularity(w, assignment, gamma=1.0):
    n = len(w)
    s = [sum(row) for row in w]
    two_t = sum(s)
    q = 0.0
    for i in range(n):
        for j in range(n):
            if assignment[i] == assignment[j]:
                q += w[i][j] - gamma * s[i] * s[j] / two_t
    return q / two_t


def oracle_pc(w, assignment):
    n = len(w)
    values = []
    for i in range(n):
        strength = sum(w[i])
        if strength == 0:
            values.append(0.0)
            continue
        total = 0.0
        for c in set(assignment):
            total += (sum(w[i][j] for j in range(n) if assignment[j] == c) / strength) ** 2
        values.append(1 - total)
    return sum(values) / n


def make_family(mu=0.5, sigma=0.1, nu=0.5, tau=10.0, offset=0.0, slope=0.0, age_range=(5, 90)):
    """Box-Cox t family with log-linear median over `age_range`"""
    lo, hi = (math.log(a) for a in age_range)
    n_interior = 3
    size = n_interior + 4
    # Coefficients on a line give a linear spline
    coef_mu = math.log(mu) + slope * np.linspace(-1, 1, size)
    return _normcurves.BCTFamily(
        mu_curve=_normcurves.SplineModel(lo, hi, n_interior, coef=coef_mu),
        sigma_curve=_normcurves.SplineModel(lo, hi, n_interior, coef=np.full(size, math.log(sigma))),
        nu=nu,
        tau=tau,
        offset=offset,
    )


def make_curves(band='alpha', **kwargs):
    """Curve set with one family per NC of `band`"""
    return _normcurves.NormativeCurveSet({
        (band, nc): make_family(mu=0.1 * (i + 1), **kwargs)
        for i, nc in enumerate(_graph.NC_NAMES)
    })


def constant_model(values, n_inputs=8):
    """Decoder whose output is `values` for every input"""
    values = np.asarray(values, dtype=float)
    return _generator.DecoderModel(
        (n_inputs, 2, len(values)),
        weights=[np.zeros((n_inputs, 2)), np.zeros((2, len(values)))],
        biases=[np.zeros(2), values],
    )
