"""Structural causal models over a DAG of latent causal variables.

Two mechanism families are supported: linear additive noise
(``z_j = sum_i w_ij z_i + e_j``) and a location-scale family
(``z_j = loc(pa) + scale(pa) * e_j``) whose location and scale functions are
random tanh-feature expansions. Sampling walks the topological order; every
node draws its noise from its own stream derived from ``(seed, node)``, so
adding a node never changes the draws of the others.
"""

import heapq
from dataclasses import dataclass, field

import numpy as np

from ._utils import rng_for
from .exceptions import ConfigError, CycleError

N_FEATURES = 16
SCALE_FLOOR = 0.1
NOISE_FAMILIES = ("gaussian", "uniform", "laplace")


@dataclass(frozen=True)
class Dag:
    n_nodes: int
    edges: frozenset

    def __init__(self, n_nodes, edges=()):
        n_nodes = int(n_nodes)
        if n_nodes < 1:
            raise ConfigError("a DAG needs at least one node")
        edge_list = [(int(p), int(c)) for p, c in edges]
        if len(set(edge_list)) != len(edge_list):
            raise ConfigError("duplicate edges")
        for p, c in edge_list:
            if not (0 <= p < n_nodes and 0 <= c < n_nodes):
                raise ConfigError(f"edge ({p}, {c}) out of range for {n_nodes} nodes")
            if p == c:
                raise ConfigError(f"self-loop on node {p}")
        object.__setattr__(self, "n_nodes", n_nodes)
        object.__setattr__(self, "edges", frozenset(edge_list))

    def parents(self, node):
        return sorted(p for p, c in self.edges if c == node)

    def adjacency(self):
        a = np.zeros((self.n_nodes, self.n_nodes), dtype=int)
        for p, c in self.edges:
            a[p, c] = 1
        return a

    @classmethod
    def from_adjacency(cls, a):
        a = np.asarray(a)
        return cls(a.shape[0], [(int(p), int(c)) for p, c in zip(*np.nonzero(a))])


def topological_order(dag):
    """Kahn's algorithm with ties broken by the smallest ready index."""
    indeg = [0] * dag.n_nodes
    children = [[] for _ in range(dag.n_nodes)]
    for p, c in dag.edges:
        indeg[c] += 1
        children[p].append(c)
    ready = [i for i in range(dag.n_nodes) if indeg[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for c in children[node]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != dag.n_nodes:
        raise CycleError("graph contains a directed cycle")
    return order


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise; ``scale`` is the standard deviation of the draw."""

    family: str = "gaussian"
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.family not in NOISE_FAMILIES:
            raise ConfigError(f"unknown noise family {self.family!r}")
        if self.scale < 0:
            raise ConfigError("noise scale must be nonnegative")

    def draw(self, rng, n):
        if self.family == "gaussian":
            e = rng.standard_normal(n)
        elif self.family == "uniform":
            e = rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), n)
        else:
            e = rng.laplace(0.0, 1.0 / np.sqrt(2.0), n)
        return self.shift + self.scale * e


@dataclass(frozen=True)
class FeatureMap:
    """``x -> out_weights @ tanh(weights @ x + biases)`` over the parent vector."""

    weights: np.ndarray  # (N_FEATURES, n_parents)
    biases: np.ndarray
    out_weights: np.ndarray

    def __call__(self, parents):
        return np.tanh(parents @ self.weights.T + self.biases) @ self.out_weights

    def to_dict(self):
        return {"weights": self.weights.tolist(), "biases": self.biases.tolist(),
                "out_weights": self.out_weights.tolist()}

    @classmethod
    def from_dict(cls, d, n_parents):
        b = np.asarray(d["biases"], dtype=float)
        w = np.asarray(d["weights"], dtype=float).reshape(len(b), n_parents)
        return cls(w, b, np.asarray(d["out_weights"], dtype=float))


def softplus(x):
    return np.logaddexp(0.0, x)


@dataclass(frozen=True)
class Mechanism:
    kind: str
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    weights: np.ndarray = None
    location: FeatureMap = None
    scale: FeatureMap = None

    def __post_init__(self):
        if self.kind not in ("linear", "location_scale"):
            raise ConfigError(f"unknown mechanism kind {self.kind!r}")
        if self.kind == "linear" and self.weights is None:
            raise ConfigError("linear mechanism needs weights")
        if self.kind == "location_scale" and (self.location is None or self.scale is None):
            raise ConfigError("location_scale mechanism needs location and scale maps")

    @property
    def n_parents(self):
        if self.kind == "linear":
            return len(self.weights)
        return self.location.weights.shape[1]

    def conditional_sd(self, parents):
        """Conditional standard deviation of the node given its parents."""
        parents = np.atleast_2d(parents)
        if self.kind == "linear":
            return np.full(parents.shape[0], self.noise.scale)
        return (softplus(self.scale(parents)) + SCALE_FLOOR) * self.noise.scale

    def evaluate(self, parents, noise):
        if self.kind == "linear":
            return parents @ self.weights + noise
        return self.location(parents) + (softplus(self.scale(parents)) + SCALE_FLOOR) * noise

    def to_dict(self):
        d = {"kind": self.kind, "noise": {"family": self.noise.family,
                                          "scale": self.noise.scale, "shift": self.noise.shift}}
        if self.kind == "linear":
            d["weights"] = np.asarray(self.weights, dtype=float).tolist()
        else:
            d["location"] = self.location.to_dict()
            d["scale"] = self.scale.to_dict()
        return d

    @classmethod
    def from_dict(cls, d, n_parents):
        try:
            kind = d["kind"]
            noise = NoiseSpec(**d.get("noise", {}))
            if kind == "linear":
                return cls(kind, noise, weights=np.asarray(d["weights"], dtype=float))
            if kind == "location_scale":
                return cls(kind, noise, location=FeatureMap.from_dict(d["location"], n_parents),
                           scale=FeatureMap.from_dict(d["scale"], n_parents))
        except KeyError as exc:
            raise ConfigError(f"mechanism is missing key {exc.args[0]!r}") from None
        except TypeError as exc:
            raise ConfigError(f"bad mechanism entry: {exc}") from None
        raise ConfigError(f"unknown mechanism kind {kind!r}")


@dataclass(frozen=True)
class ScmSpec:
    dag: Dag
    mechanisms: tuple
    observed: tuple = None

    def __post_init__(self):
        mechs = tuple(self.mechanisms)
        object.__setattr__(self, "mechanisms", mechs)
        if len(mechs) != self.dag.n_nodes:
            raise ConfigError(f"{len(mechs)} mechanisms for {self.dag.n_nodes} nodes")
        for node, mech in enumerate(mechs):
            if mech.n_parents != len(self.dag.parents(node)):
                raise ConfigError(
                    f"node {node}: mechanism has {mech.n_parents} parents, "
                    f"graph has {len(self.dag.parents(node))}"
                )
        observed = self.observed if self.observed is not None else (False,) * self.dag.n_nodes
        if len(observed) != self.dag.n_nodes:
            raise ConfigError("observed flags must have one entry per node")
        object.__setattr__(self, "observed", tuple(bool(o) for o in observed))

    @property
    def n_nodes(self):
        return self.dag.n_nodes

    def to_dict(self):
        return {
            "n_nodes": self.dag.n_nodes,
            "edges": sorted([list(e) for e in self.dag.edges]),
            "mechanisms": [m.to_dict() for m in self.mechanisms],
            "observed": list(self.observed),
        }

    @classmethod
    def from_dict(cls, d):
        for key in ("n_nodes", "edges", "mechanisms"):
            if key not in d:
                raise ConfigError(f"SCM spec is missing key {key!r}")
        dag = Dag(d["n_nodes"], [tuple(e) for e in d["edges"]])
        mechs = [Mechanism.from_dict(m, len(dag.parents(i))) for i, m in enumerate(d["mechanisms"])]
        return cls(dag, tuple(mechs), tuple(d.get("observed", [False] * dag.n_nodes)))


def sample_scm(spec, n, seed, noise=None):
    """Draw ``n`` i.i.d. rows from the SCM.

    Parameters
    ----------
    spec : ScmSpec
    n : int
    seed : int
    noise : dict, optional
        Debug hook mapping node index to a fixed length-``n`` noise vector
        (or a scalar), used instead of that node's random draw.

    Returns
    -------
    ndarray of shape (n, n_nodes)
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be positive")
    noise = noise or {}
    z = np.zeros((n, spec.n_nodes))
    for node in topological_order(spec.dag):
        mech = spec.mechanisms[node]
        if node in noise:
            e = np.broadcast_to(np.asarray(noise[node], dtype=float), (n,)).copy()
        else:
            e = mech.noise.draw(rng_for(seed, "noise", node), n)
        z[:, node] = mech.evaluate(z[:, spec.dag.parents(node)], e)
    return z


def random_dag(n_nodes, edge_prob, seed):
    """Erdos-Renyi DAG with edges only from lower to higher index."""
    if not 0.0 <= edge_prob <= 1.0:
        raise ConfigError("edge_prob must lie in [0, 1]")
    rng = rng_for(seed, "dag")
    iu = np.triu_indices(n_nodes, k=1)
    keep = rng.random(iu[0].shape[0]) < edge_prob
    return Dag(n_nodes, zip(iu[0][keep].tolist(), iu[1][keep].tolist()))


def _random_feature_map(rng, n_parents, out_scale):
    return FeatureMap(
        weights=rng.normal(0.0, 1.0 / np.sqrt(max(n_parents, 1)), (N_FEATURES, n_parents)),
        biases=rng.uniform(-1.0, 1.0, N_FEATURES),
        out_weights=rng.normal(0.0, out_scale / np.sqrt(N_FEATURES), N_FEATURES),
    )


def random_scm(dag, kind="linear", coef_range=(0.5, 2.0), noise_range=(1.0, 1.0), seed=0,
               random_sign=False, noise_family="gaussian", observed=None):
    """Random mechanisms over ``dag``.

    Linear weights are drawn from ``Unif[coef_range]`` (with a random sign
    if ``random_sign``); noise scales from ``Unif[noise_range]``. For the
    location-scale family ``coef_range[1]`` sets the magnitude of the
    location function's output weights.
    """
    lo, hi = coef_range
    nlo, nhi = noise_range
    if not (0 <= lo <= hi) or not (0 < nlo <= nhi):
        raise ConfigError("coef_range and noise_range must be valid positive intervals")
    mechs = []
    for node in range(dag.n_nodes):
        rng = rng_for(seed, "mechanism", node)
        k = len(dag.parents(node))
        noise = NoiseSpec(noise_family, float(rng.uniform(nlo, nhi)))
        if kind == "linear":
            w = rng.uniform(lo, hi, k)
            if random_sign:
                w = w * rng.choice([-1.0, 1.0], k)
            mechs.append(Mechanism("linear", noise, weights=w))
        elif kind == "location_scale":
            mechs.append(Mechanism(
                "location_scale", noise,
                location=_random_feature_map(rng, k, hi),
                scale=_random_feature_map(rng, k, 1.0),
            ))
        else:
            raise ConfigError(f"unknown mechanism kind {kind!r}")
    return ScmSpec(dag, tuple(mechs), observed)


# Coefficient matrix of the five-variable linear simulation: row = child,
# column = parent, so z = B z + e.
SIMULATION_B = np.array([
    [0, 0, 0, 0, 0],
    [1, 0, 0, 0, 1],
    [1, 1, 0, 0, 0],
    [1, 0, 0, 0, 0],
    [1, 0, 0, 1, 0],
], dtype=float)


def linear_scm_from_matrix(B, noise_scale=1.0, observed=None):
    """Linear-Gaussian SCM ``z = B z + e`` with ``B[child, parent]`` weights."""
    B = np.asarray(B, dtype=float)
    dag = Dag.from_adjacency((B.T != 0).astype(int))
    mechs = [
        Mechanism("linear", NoiseSpec("gaussian", noise_scale), weights=B[j, dag.parents(j)])
        for j in range(B.shape[0])
    ]
    return ScmSpec(dag, tuple(mechs), observed)


def simulation_scm(noise_scale=1.0):
    """The five-variable confounding design; z4 and z5 are observed directly."""
    return linear_scm_from_matrix(SIMULATION_B, noise_scale,
                                  observed=(False, False, False, True, True))
