"""Synthetic structural causal models: benchmark builders, observational and
oracle interventional sampling, and exact conditional scores for the
linear-Gaussian case (the test oracle).

Each node j is a d_j-dimensional block generated as mechanism(parents) plus
additive Gaussian noise with a per-node covariance.  Mechanisms come from a
small fixed registry so experiments are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .dag import Dag, validate_dag
from .errors import (
    DimensionError,
    NotLinearGaussianError,
    RangeError,
    UnknownBenchmarkError,
)

__all__ = [
    "Root",
    "LinearGaussian",
    "NonlinearAdditive",
    "InteractionAdditive",
    "ScmSpec",
    "Dataset",
    "Intervention",
    "NONLINEAR_FAMILIES",
    "BENCHMARK_NAMES",
    "build_benchmark",
    "sample_observational",
    "sample_interventional_oracle",
    "analytic_conditional_score",
    "standardize_linear_spec",
    "linear_gaussian_moments",
]

NONLINEAR_FAMILIES = ("tanh-linear", "sine-linear", "quadratic-saturating")


@dataclass(frozen=True)
class Root:
    """Parentless block: mean plus correlated Gaussian noise."""

    mean: np.ndarray
    cov: np.ndarray


@dataclass(frozen=True)
class LinearGaussian:
    weight: np.ndarray       # (d_j, r_j)
    bias: np.ndarray         # (d_j,)


@dataclass(frozen=True)
class NonlinearAdditive:
    family: str              # one of NONLINEAR_FAMILIES
    weight: np.ndarray
    bias: np.ndarray
    scale: float = 1.0


@dataclass(frozen=True)
class InteractionAdditive:
    """Two parent groups with separate strengths plus an interaction term:
    mean = gamma*tanh(A xa) + eta*tanh(B xb) + gamma*eta*tanh(C [xa, xb])."""

    gamma: float
    eta: float
    w_a: np.ndarray          # (d_j, r_a)
    w_b: np.ndarray          # (d_j, r_b)
    w_ab: np.ndarray         # (d_j, r_a + r_b)


def _mechanism_mean(mech, x_pa):
    if isinstance(mech, Root):
        return np.broadcast_to(mech.mean, (x_pa.shape[0], mech.mean.size)).copy()
    if isinstance(mech, LinearGaussian):
        return x_pa @ mech.weight.T + mech.bias
    if isinstance(mech, NonlinearAdditive):
        u = x_pa @ mech.weight.T
        if mech.family == "tanh-linear":
            return mech.scale * np.tanh(u) + mech.bias
        if mech.family == "sine-linear":
            return mech.scale * np.sin(u) + 0.5 * u + mech.bias
        if mech.family == "quadratic-saturating":
            return mech.scale * u / (1.0 + np.abs(u)) + mech.bias
        raise UnknownBenchmarkError(f"unknown nonlinear family {mech.family!r}")
    if isinstance(mech, InteractionAdditive):
        r_a = mech.w_a.shape[1]
        xa, xb = x_pa[:, :r_a], x_pa[:, r_a:]
        out = mech.gamma * np.tanh(xa @ mech.w_a.T)
        out += mech.eta * np.tanh(xb @ mech.w_b.T)
        out += mech.gamma * mech.eta * np.tanh(x_pa @ mech.w_ab.T)
        return out
    raise TypeError(f"not a mechanism: {mech!r}")


def _mech_io_dims(mech):
    if isinstance(mech, Root):
        return mech.mean.size, 0
    if isinstance(mech, (LinearGaussian, NonlinearAdditive)):
        return mech.weight.shape
    if isinstance(mech, InteractionAdditive):
        return mech.w_ab.shape[0], mech.w_ab.shape[1]
    raise TypeError(f"not a mechanism: {mech!r}")


@dataclass(frozen=True)
class ScmSpec:
    dag: Dag
    mechanisms: tuple
    noise_covs: tuple

    def __post_init__(self):
        dag = self.dag
        if len(self.mechanisms) != dag.p or len(self.noise_covs) != dag.p:
            raise DimensionError("need one mechanism and one noise covariance per node")
        for j in range(1, dag.p + 1):
            d_out, d_in = _mech_io_dims(self.mechanisms[j - 1])
            if d_out != dag.dim(j) or d_in != dag.parent_dim(j):
                raise DimensionError(
                    f"mechanism for node {j} maps {d_in}->{d_out}, "
                    f"graph wants {dag.parent_dim(j)}->{dag.dim(j)}")
            cov = self.noise_covs[j - 1]
            if cov.shape != (dag.dim(j), dag.dim(j)):
                raise DimensionError(f"noise covariance shape mismatch at node {j}")
            if not np.allclose(cov, cov.T):
                raise DimensionError(f"noise covariance at node {j} not symmetric")
            if np.linalg.eigvalsh(cov).min() <= 0:
                raise DimensionError(f"noise covariance at node {j} not positive definite")

    def is_linear_gaussian(self) -> bool:
        return all(isinstance(m, (Root, LinearGaussian)) for m in self.mechanisms)


@dataclass
class Dataset:
    """Row-major sample matrix with the block layout of its graph."""

    values: np.ndarray
    dag: Dag
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[1] != self.dag.d:
            raise DimensionError(
                f"data width {self.values.shape} does not match graph width {self.dag.d}")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def block(self, j: int) -> np.ndarray:
        return self.values[:, self.dag.block_cols(j)]

    def parent_block(self, j: int) -> np.ndarray:
        return self.values[:, self.dag.parent_cols(j)]


@dataclass(frozen=True)
class Intervention:
    """do(X_S = x*): held-fixed nodes and their target vectors."""

    targets: tuple
    values: tuple

    @classmethod
    def from_dict(cls, assignments: dict, dag: Dag) -> "Intervention":
        targets = tuple(sorted(int(j) for j in assignments))
        if len(set(targets)) != len(targets):
            raise DimensionError("intervention targets must be distinct")
        vals = []
        for j in targets:
            v = np.atleast_1d(np.asarray(assignments[j], dtype=float))
            if v.shape != (dag.dim(j),):
                raise DimensionError(
                    f"intervention value for node {j} has shape {v.shape}, "
                    f"expected ({dag.dim(j)},)")
            vals.append(v)
        return cls(targets=targets, values=tuple(vals))

    def value_of(self, j: int) -> np.ndarray:
        return self.values[self.targets.index(j)]


# -- benchmark registry -------------------------------------------------------

BENCHMARK_NAMES = ("chain", "hub", "random", "sachs", "fork", "chain3")

SACHS_LABELS = ("Raf", "Mek", "PLCg", "PIP2", "PIP3", "Erk", "Akt", "PKA",
                "PKC", "p38", "JNK")

# Reconstructed 11-protein signalling network (17 directed edges).
SACHS_NETWORK_EDGES = (
    ("PIP3", "PIP2"), ("PLCg", "PIP2"), ("Mek", "Erk"), ("PKA", "Erk"),
    ("PKA", "Akt"), ("PKA", "Mek"), ("PKA", "Raf"), ("PKA", "JNK"),
    ("PKA", "p38"), ("PKC", "Mek"), ("PKC", "Raf"), ("PKC", "JNK"),
    ("PKC", "p38"), ("Raf", "Mek"), ("PLCg", "PIP3"), ("Erk", "Akt"),
    ("PKC", "PKA"),
)


def _ar_cov(dim: int, rho: float) -> np.ndarray:
    idx = np.arange(dim)
    return rho ** np.abs(idx[:, None] - idx[None, :])


def _draw_weights(key, d_out, d_in, scale=1.0):
    """Entries are sign * U[0.5, 1.5] * scale, so every input matters."""
    mag = 0.5 + rng.uniform(rng.substream(key, "mag"), (d_out, d_in))
    sign = np.where(rng.uniform(rng.substream(key, "sign"), (d_out, d_in)) < 0.5,
                    -1.0, 1.0)
    return sign * mag * scale


def _make_mechanism(key, nonlinearity, d_out, d_in):
    if nonlinearity == "linear":
        w = _draw_weights(key, d_out, d_in, scale=1.0 / np.sqrt(d_in))
        return LinearGaussian(weight=w, bias=np.zeros(d_out))
    if nonlinearity not in NONLINEAR_FAMILIES:
        raise UnknownBenchmarkError(f"unknown nonlinearity {nonlinearity!r}")
    w = _draw_weights(key, d_out, d_in)
    return NonlinearAdditive(family=nonlinearity, weight=w, bias=np.zeros(d_out),
                             scale=1.0)


def build_benchmark(name, edge_prob=0.5, nonlinearity="tanh-linear",
                    within_slate_corr=0.5, seed=0, gamma=1.0, eta=0.0) -> ScmSpec:
    """Construct one of the named benchmark systems.

    chain / hub / random: six 5-dimensional slates (chain Y1->...->Y6; hub
    Y1 -> each downstream slate; random draws each forward edge with
    probability ``edge_prob``).  sachs: the 11-protein signalling network
    with unit-dimensional nodes.  chain3 / fork: three 10-dimensional slates
    used for size and power studies; for fork, ``gamma`` and ``eta`` set the
    strengths of the Y1 and Y2 effects on Y3 (eta nonzero adds the Y2 -> Y3
    edge and an interaction term).

    ``nonlinearity`` picks the mechanism family ("linear" gives
    linear-Gaussian mechanisms, useful as an exactly solvable oracle).
    Root blocks are zero-mean Gaussian with covariance
    Sigma_ij = within_slate_corr ** |i - j|; downstream noise reuses the
    same within-slate covariance.
    """
    key = rng.as_key(seed)
    rho = float(within_slate_corr)

    if name in ("chain", "hub", "random"):
        dims = [5] * 6
        labels = [f"Y{i}" for i in range(1, 7)]
        if name == "chain":
            edges = [(i, i + 1) for i in range(1, 6)]
        elif name == "hub":
            edges = [(1, k) for k in range(2, 7)]
        else:
            edges = []
            draw = rng.uniform(rng.substream(key, "edges"), (6, 6))
            for i in range(1, 7):
                for j in range(i + 1, 7):
                    if draw[i - 1, j - 1] < edge_prob:
                        edges.append((i, j))
    elif name == "sachs":
        dims = [1] * 11
        labels = list(SACHS_LABELS)
        lab_ix = {s: i + 1 for i, s in enumerate(labels)}
        edges = [(lab_ix[a], lab_ix[b]) for a, b in SACHS_NETWORK_EDGES]
    elif name in ("chain3", "fork"):
        dims = [10] * 3
        labels = ["Y1", "Y2", "Y3"]
        if name == "chain3":
            edges = [(1, 2), (2, 3)]
        else:
            edges = [(1, 2), (1, 3)] + ([(2, 3)] if eta != 0.0 else [])
    else:
        raise UnknownBenchmarkError(f"unknown benchmark {name!r}; "
                                    f"choose from {BENCHMARK_NAMES}")

    dag = validate_dag(dims, edges, labels)
    mechanisms, covs = [], []
    for j in range(1, dag.p + 1):
        d_j, r_j = dag.dim(j), dag.parent_dim(j)
        cov = _ar_cov(d_j, rho)
        node_key = rng.substream(key, "mech", j)
        if r_j == 0:
            mech = Root(mean=np.zeros(d_j), cov=cov)
        elif name == "fork" and j == 3 and eta != 0.0:
            r1 = dag.dim(1)
            mech = InteractionAdditive(
                gamma=float(gamma), eta=float(eta),
                w_a=_draw_weights(rng.substream(node_key, "wa"), d_j, r1),
                w_b=_draw_weights(rng.substream(node_key, "wb"), d_j, dag.dim(2)),
                w_ab=_draw_weights(rng.substream(node_key, "wab"),
                                   d_j, r1 + dag.dim(2)))
        elif name == "fork" and j == 3 and nonlinearity != "linear":
            # null fork: Y3 depends on Y1 only, with strength gamma
            mech = NonlinearAdditive(
                family="tanh-linear",
                weight=_draw_weights(rng.substream(node_key, "wa"), d_j, r_j),
                bias=np.zeros(d_j), scale=float(gamma))
        else:
            mech = _make_mechanism(node_key, nonlinearity, d_j, r_j)
        mechanisms.append(mech)
        covs.append(cov)
    return ScmSpec(dag=dag, mechanisms=tuple(mechanisms), noise_covs=tuple(covs))


# -- sampling ------------------------------------------------------------------

def _noise(spec, j, n, key):
    cov = spec.noise_covs[j - 1]
    z = rng.gaussian(rng.substream(key, "noise", j), (n, cov.shape[0]))
    return z @ np.linalg.cholesky(cov).T


def sample_observational(spec: ScmSpec, n: int, seed) -> Dataset:
    """n i.i.d. rows generated in topological order; reproducible per seed."""
    if n < 1:
        raise RangeError("n must be >= 1")
    key = rng.as_key(seed)
    dag = spec.dag
    X = np.empty((n, dag.d))
    for j in dag.topo_order:
        x_pa = X[:, dag.parent_cols(j)]
        X[:, dag.block_cols(j)] = _mechanism_mean(spec.mechanisms[j - 1], x_pa) \
            + _noise(spec, j, n, key)
    return Dataset(values=X, dag=dag,
                   meta={"provenance": "observational", "seed": repr(seed), "n": n})


def sample_interventional_oracle(spec: ScmSpec, intervention: Intervention,
                                 n: int, seed) -> Dataset:
    """Ground-truth draws under do(X_S = x*): intervened blocks are pinned,
    every other mechanism is applied unchanged to the realised parent values."""
    if n < 1:
        raise RangeError("n must be >= 1")
    key = rng.as_key(seed)
    dag = spec.dag
    targets = set(intervention.targets)
    if any(not (1 <= j <= dag.p) for j in targets):
        raise DimensionError("intervention target out of range")
    X = np.empty((n, dag.d))
    for j in dag.topo_order:
        if j in targets:
            X[:, dag.block_cols(j)] = intervention.value_of(j)
            continue
        x_pa = X[:, dag.parent_cols(j)]
        X[:, dag.block_cols(j)] = _mechanism_mean(spec.mechanisms[j - 1], x_pa) \
            + _noise(spec, j, n, key)
    return Dataset(values=X, dag=dag,
                   meta={"provenance": "do", "seed": repr(seed), "n": n,
                         "targets": sorted(targets)})


# -- analytic scores (linear-Gaussian oracle) ----------------------------------

def analytic_conditional_score(spec: ScmSpec, j: int, x_prime, x_pa, t: float):
    """Exact conditional score of the noised block j given clean parents.

    In a linear-Gaussian system the block's conditional law stays Gaussian
    along the forward noising, N(a_t mu(x_pa), a_t^2 Sigma_j + s_t^2 I), so
    the score is -(a_t^2 Sigma_j + s_t^2 I)^{-1} (x' - a_t mu(x_pa)).
    """
    mech = spec.mechanisms[j - 1]
    if not isinstance(mech, (Root, LinearGaussian)):
        raise NotLinearGaussianError(f"node {j} mechanism is {type(mech).__name__}")
    if t <= 0:
        raise RangeError("t must be positive")
    x_prime = np.asarray(x_prime, dtype=float)
    single = x_prime.ndim == 1
    xp = np.atleast_2d(x_prime)
    xpa = np.atleast_2d(np.asarray(x_pa, dtype=float))
    if xpa.size == 0:
        xpa = np.zeros((xp.shape[0], 0))
    a = np.exp(-t / 2.0)
    s2 = 1.0 - a * a
    mu = _mechanism_mean(mech, xpa)
    cov_t = a * a * spec.noise_covs[j - 1] + s2 * np.eye(spec.dag.dim(j))
    score = -np.linalg.solve(cov_t, (xp - a * mu).T).T
    return score[0] if single else score


def standardize_linear_spec(spec: ScmSpec, mean, std) -> ScmSpec:
    """The linear-Gaussian system of z = (x - mean) / std; exact, since
    coordinatewise affine maps keep the model linear-Gaussian."""
    if not spec.is_linear_gaussian():
        raise NotLinearGaussianError("only linear-Gaussian systems can be restandardised")
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    dag = spec.dag
    mechs, covs = [], []
    for j in range(1, dag.p + 1):
        cols = dag.block_cols(j)
        pcols = dag.parent_cols(j)
        d_inv = 1.0 / std[cols]
        mech = spec.mechanisms[j - 1]
        cov = d_inv[:, None] * spec.noise_covs[j - 1] * d_inv[None, :]
        if isinstance(mech, Root):
            mechs.append(Root(mean=d_inv * (mech.mean - mean[cols]), cov=cov))
        else:
            w = d_inv[:, None] * mech.weight * std[pcols][None, :]
            b = d_inv * (mech.weight @ mean[pcols] + mech.bias - mean[cols])
            mechs.append(LinearGaussian(weight=w, bias=b))
        covs.append(cov)
    return ScmSpec(dag=dag, mechanisms=tuple(mechs), noise_covs=tuple(covs))


def linear_gaussian_moments(spec: ScmSpec, intervention: Intervention | None = None):
    """Closed-form joint mean and covariance, optionally under do(X_S = x*).

    Forward recursion over the topological order; intervened blocks are
    constants.  Independent of any sampling code path, so tests can use it
    as an oracle.
    """
    if not spec.is_linear_gaussian():
        raise NotLinearGaussianError("moments only available for linear-Gaussian systems")
    dag = spec.dag
    d = dag.d
    mean = np.zeros(d)
    cov = np.zeros((d, d))
    targets = set(intervention.targets) if intervention is not None else set()
    for j in dag.topo_order:
        cols = np.arange(dag.d)[dag.block_cols(j)]
        if j in targets:
            mean[cols] = intervention.value_of(j)
            continue
        mech = spec.mechanisms[j - 1]
        pcols = np.asarray(dag.parent_cols(j), dtype=int)
        if isinstance(mech, Root):
            mean[cols] = mech.mean
            cov[np.ix_(cols, cols)] = spec.noise_covs[j - 1]
            continue
        B = mech.weight
        mean[cols] = B @ mean[pcols] + mech.bias
        cross = B @ cov[np.ix_(pcols, np.arange(d))]
        cov[cols, :] = cross
        cov[:, cols] = cross.T
        cov[np.ix_(cols, cols)] = B @ cov[np.ix_(pcols, pcols)] @ B.T \
            + spec.noise_covs[j - 1]
    return mean, cov
