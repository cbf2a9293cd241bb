"""Measurement models: blocks of measurement variables computed from latent parents.

A :class:`MeasurementModel` lists ``M`` blocks. Block ``j`` has a parent set
``pa_j`` among the ``N`` latents, a dimension ``D_j`` and a measurement
function. Its adjacency matrix ``V`` has shape ``(N, M)`` with
``V[i, j] = 1`` iff latent ``i`` is a parent of block ``j`` (rows are
latents, columns are blocks throughout the package).

Post-hoc corruptions (adding a linear combination of latents to a
one-dimensional block) are kept apart from the declared structure. They
change the block's effective parents, which is what the oracle test sees,
but not the hypothesized ``V``.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._utils import as_matrix, rng_for
from .exceptions import ArityError, ConfigError, DataError, DimError

FN_KINDS = ("identity", "linear_mix", "monotone_diffeo", "composed")


@dataclass(frozen=True)
class MeasurementFn:
    """A map from ``R^in_dim`` to ``R^out_dim``.

    ``monotone_diffeo`` computes ``t = mix @ x`` and then applies
    ``a * t + b * tanh(c * t)`` per output coordinate; ``a > |b * c|``
    makes each scalar map strictly increasing.
    """

    kind: str
    matrix: np.ndarray = None  # linear_mix / monotone_diffeo mixing, shape (out, in)
    a: np.ndarray = None
    b: np.ndarray = None
    c: np.ndarray = None
    parts: tuple = ()
    noise_scale: float = 0.0
    in_dim: int = None

    def __post_init__(self):
        if self.kind not in FN_KINDS:
            raise ConfigError(f"unknown measurement function kind {self.kind!r}")
        if self.noise_scale < 0:
            raise ConfigError("noise_scale must be nonnegative")
        if self.kind in ("linear_mix", "monotone_diffeo"):
            if self.matrix is None:
                raise ConfigError(f"{self.kind} needs a mixing matrix")
            m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
            object.__setattr__(self, "matrix", m)
            if m.shape[0] <= m.shape[1] and np.linalg.matrix_rank(m) < m.shape[0]:
                raise ConfigError("mixing matrix must have full row rank")
        if self.kind == "monotone_diffeo":
            out = self.matrix.shape[0]
            a, b, c = (np.broadcast_to(np.asarray(v, dtype=float), (out,)).copy()
                       for v in (self.a, self.b, self.c))
            if np.any(a <= np.abs(b * c)):
                raise ConfigError("monotone_diffeo requires a > |b * c|")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)
            object.__setattr__(self, "c", c)
        if self.kind == "composed":
            if not self.parts:
                raise ConfigError("composed function needs at least one part")
            object.__setattr__(self, "parts", tuple(self.parts))
            for first, second in zip(self.parts, self.parts[1:]):
                if first.output_dim(None) is not None and second.input_dim() is not None \
                        and first.output_dim(None) != second.input_dim():
                    raise ArityError("composed parts do not chain")

    def input_dim(self):
        if self.kind in ("linear_mix", "monotone_diffeo"):
            return self.matrix.shape[1]
        if self.kind == "composed":
            return self.parts[0].input_dim()
        return self.in_dim

    def output_dim(self, in_dim):
        if self.kind in ("linear_mix", "monotone_diffeo"):
            return self.matrix.shape[0]
        if self.kind == "composed":
            d = in_dim
            for part in self.parts:
                d = part.output_dim(d)
            return d
        return in_dim

    def __call__(self, x):
        x = as_matrix(x, name="parents")
        expected = self.input_dim()
        if expected is not None and x.shape[1] != expected:
            raise ArityError(f"{self.kind} expects {expected} inputs, got {x.shape[1]}")
        if self.kind == "identity":
            return x.copy()
        if self.kind == "linear_mix":
            return x @ self.matrix.T
        if self.kind == "monotone_diffeo":
            t = x @ self.matrix.T
            return self.a * t + self.b * np.tanh(self.c * t)
        for part in self.parts:
            x = part(x)
        return x

    def derivative_bounds(self):
        """Lower bound of each monotone scalar map's slope (``a - |b c|``)."""
        return self.a - np.abs(self.b * self.c)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.noise_scale:
            d["noise_scale"] = self.noise_scale
        if self.kind in ("linear_mix", "monotone_diffeo"):
            d["matrix"] = self.matrix.tolist()
        if self.kind == "monotone_diffeo":
            d.update(a=self.a.tolist(), b=self.b.tolist(), c=self.c.tolist())
        if self.kind == "composed":
            d["parts"] = [p.to_dict() for p in self.parts]
        return d

    @classmethod
    def from_dict(cls, d):
        if "kind" not in d:
            raise ConfigError("measurement function is missing key 'kind'")
        kind = d["kind"]
        extra = set(d) - {"kind", "matrix", "a", "b", "c", "parts", "noise_scale"}
        if extra:
            raise ConfigError(f"unknown measurement function keys: {sorted(extra)}")
        try:
            if kind == "composed":
                return cls(kind, parts=tuple(cls.from_dict(p) for p in d["parts"]),
                           noise_scale=float(d.get("noise_scale", 0.0)))
            if kind in ("linear_mix", "monotone_diffeo") and "matrix" not in d:
                raise ConfigError(f"{kind} function is missing key 'matrix'")
            if kind == "monotone_diffeo":
                for key in ("a", "b", "c"):
                    if key not in d:
                        raise ConfigError(f"monotone_diffeo function is missing key {key!r}")
            return cls(kind, matrix=d.get("matrix"), a=d.get("a"), b=d.get("b"), c=d.get("c"),
                       noise_scale=float(d.get("noise_scale", 0.0)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad measurement function: {exc}") from None


def identity():
    return MeasurementFn("identity")


def linear_mix(matrix, noise_scale=0.0):
    return MeasurementFn("linear_mix", matrix=matrix, noise_scale=noise_scale)


def monotone_diffeo(a, b, c, mix=None, n_inputs=1, noise_scale=0.0):
    """Elementwise ``a t + b tanh(c t)`` after mixing the parents with ``mix``.

    With ``mix=None`` the parents are summed (or passed through for a
    single parent).
    """
    if mix is None:
        mix = np.ones((1, n_inputs))
    return MeasurementFn("monotone_diffeo", matrix=mix, a=a, b=b, c=c, noise_scale=noise_scale)


@dataclass(frozen=True)
class MeasurementBlock:
    parents: tuple
    dim: int
    fn: MeasurementFn

    def __post_init__(self):
        parents = tuple(sorted(int(p) for p in self.parents))
        if not parents:
            raise ConfigError("a measurement block needs at least one parent")
        if len(set(parents)) != len(parents):
            raise ConfigError("duplicate parents in a measurement block")
        object.__setattr__(self, "parents", parents)
        expected_in = self.fn.input_dim()
        if expected_in is not None and expected_in != len(parents):
            raise ArityError(f"function takes {expected_in} inputs, block has {len(parents)} parents")
        if self.fn.output_dim(len(parents)) != self.dim:
            raise ArityError(
                f"function produces {self.fn.output_dim(len(parents))} outputs, block dim is {self.dim}"
            )


@dataclass(frozen=True)
class Corruption:
    """Add ``sum_i coefs[i] * z_i`` to a one-dimensional block after measurement."""

    block: int
    coefs: dict = field(default_factory=dict)

    def to_dict(self):
        return {"block": self.block, "coefs": {str(k): v for k, v in self.coefs.items()}}


@dataclass(frozen=True)
class MeasurementModel:
    n_latents: int
    blocks: tuple
    corruptions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "corruptions", tuple(self.corruptions))
        if not self.blocks:
            raise ConfigError("a measurement model needs at least one block")
        for j, blk in enumerate(self.blocks):
            if max(blk.parents) >= self.n_latents or min(blk.parents) < 0:
                raise ConfigError(f"block {j} has a parent outside [0, {self.n_latents})")
        for cor in self.corruptions:
            if not 0 <= cor.block < len(self.blocks):
                raise ConfigError(f"corruption targets unknown block {cor.block}")
            if any(not 0 <= i < self.n_latents for i in cor.coefs):
                raise ConfigError("corruption references an unknown latent")

    @property
    def n_blocks(self):
        return len(self.blocks)

    @property
    def dims(self):
        return [b.dim for b in self.blocks]

    def effective_parents(self, j):
        """Declared parents plus latents added by post-hoc corruption (nonzero coefficients)."""
        parents = set(self.blocks[j].parents)
        for cor in self.corruptions:
            if cor.block == j:
                parents.update(i for i, c in cor.coefs.items() if c != 0)
        return tuple(sorted(parents))

    def without_corruptions(self):
        return MeasurementModel(self.n_latents, self.blocks)

    def to_dict(self):
        d = {
            "n_latents": self.n_latents,
            "blocks": [{"parents": list(b.parents), "dim": b.dim, "fn": b.fn.to_dict()}
                       for b in self.blocks],
        }
        if self.corruptions:
            d["corruptions"] = [c.to_dict() for c in self.corruptions]
        return d

    @classmethod
    def from_dict(cls, d):
        for key in ("n_latents", "blocks"):
            if key not in d:
                raise ConfigError(f"measurement model is missing key {key!r}")
        blocks = []
        for j, b in enumerate(d["blocks"]):
            for key in ("parents", "dim", "fn"):
                if key not in b:
                    raise ConfigError(f"block {j} is missing key {key!r}")
            fn = MeasurementFn.from_dict(b["fn"])
            blocks.append(MeasurementBlock(tuple(b["parents"]), int(b["dim"]), fn))
        cors = []
        for c in d.get("corruptions", []):
            if "block" not in c or "coefs" not in c:
                raise ConfigError("corruption entries need 'block' and 'coefs'")
            cors.append(Corruption(int(c["block"]), {int(k): float(v) for k, v in c["coefs"].items()}))
        return cls(int(d["n_latents"]), tuple(blocks), tuple(cors))


@dataclass(frozen=True)
class PairedDataset:
    z: np.ndarray
    zhat: np.ndarray
    block_offsets: tuple

    def __post_init__(self):
        z = as_matrix(self.z, name="z")
        zhat = as_matrix(self.zhat, n_rows=z.shape[0], name="zhat")
        offsets = tuple(int(o) for o in self.block_offsets)
        if offsets[0] != 0 or any(b <= a for a, b in zip(offsets, offsets[1:])) \
                or offsets[-1] != zhat.shape[1]:
            raise DataError(f"invalid block offsets {offsets} for {zhat.shape[1]} columns")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "zhat", zhat)
        object.__setattr__(self, "block_offsets", offsets)

    @property
    def n(self):
        return self.z.shape[0]

    @property
    def n_latents(self):
        return self.z.shape[1]

    @property
    def n_blocks(self):
        return len(self.block_offsets) - 1

    def block(self, j):
        return self.zhat[:, self.block_offsets[j]:self.block_offsets[j + 1]]

    def header(self):
        cols = [f"z{i + 1}" for i in range(self.n_latents)]
        for j in range(self.n_blocks):
            dim = self.block_offsets[j + 1] - self.block_offsets[j]
            cols += [f"zhat_{j + 1}_{k + 1}" for k in range(dim)]
        return cols


def offsets_from_dims(dims):
    return tuple(np.concatenate([[0], np.cumsum(dims)]).astype(int).tolist())


def adjacency(model):
    """Binary ``(N, M)`` matrix with ``V[i, j] = 1`` iff latent ``i`` is a declared parent of block ``j``."""
    V = np.zeros((model.n_latents, model.n_blocks), dtype=int)
    for j, blk in enumerate(model.blocks):
        V[list(blk.parents), j] = 1
    return V


def apply_measurements(model, z, seed=0):
    """Compute every block from its parents and return the paired dataset.

    Additive Gaussian noise (``fn.noise_scale > 0``) comes from a stream
    derived from ``(seed, block)``. Post-hoc corruptions are *not*
    applied here; see :func:`realize`.
    """
    z = as_matrix(z, name="z")
    if z.shape[1] != model.n_latents:
        raise DimError(f"z has {z.shape[1]} columns, model has {model.n_latents} latents")
    cols = []
    for j, blk in enumerate(model.blocks):
        out = blk.fn(z[:, list(blk.parents)])
        if out.shape[1] != blk.dim:
            raise ArityError(f"block {j} produced {out.shape[1]} columns, expected {blk.dim}")
        if blk.fn.noise_scale > 0:
            out = out + blk.fn.noise_scale * rng_for(seed, "measurement", j).standard_normal(out.shape)
        cols.append(out)
    return PairedDataset(z, np.hstack(cols), offsets_from_dims(model.dims))


def corrupt_mix(ds, block_index, coefs):
    """Return a copy of ``ds`` with ``sum_i coefs[i] * z_i`` added to a one-dimensional block."""
    lo, hi = ds.block_offsets[block_index], ds.block_offsets[block_index + 1]
    if hi - lo != 1:
        raise DimError(f"block {block_index} has dimension {hi - lo}; corruption needs 1")
    zhat = ds.zhat.copy()
    for i, c in coefs.items():
        zhat[:, lo] += c * ds.z[:, int(i)]
    return PairedDataset(ds.z, zhat, ds.block_offsets)


def realize(model, z, seed=0):
    """Apply the measurement functions and then every post-hoc corruption."""
    ds = apply_measurements(model, z, seed)
    for cor in model.corruptions:
        ds = corrupt_mix(ds, cor.block, cor.coefs)
    return ds


# Model variants of the five-variable simulation. All measure z1 (index 0)
# through a smooth increasing map. B stands in for an under-trained encoder:
# a weak admixture of z2 and z3 plus measurement noise, tuned so the tests
# catch the admixture only part of the time. C adds a post-hoc linear
# corruption to A.
MODEL_C_CORRUPTION = {1: 0.2, 2: -0.1}
MODEL_B_MIXING = 0.02
MODEL_B_NOISE = 0.5


def _diffeo_params(seed):
    rng = rng_for(seed, "diffeo")
    a = rng.uniform(1.0, 1.5)
    c = rng.uniform(0.5, 1.5)
    b = rng.uniform(0.2, 0.6) * a / c
    return a, b, c


def make_model_abc(variant, seed=0, n_latents=5, b_mixing=MODEL_B_MIXING, b_noise=MODEL_B_NOISE):
    """Generative measurement model for variant ``"A"``, ``"B"`` or ``"C"``.

    The diffeomorphism parameters are drawn from ``seed`` and shared by all
    three variants. ``b_mixing`` sets the weight of z2 and z3 inside
    variant B and ``b_noise`` its additive noise; with ``b_mixing=0`` variant
    B equals variant A.

    Returns
    -------
    MeasurementModel
        Variant C carries its corruption plan in ``corruptions``.
    """
    a, b, c = _diffeo_params(seed)
    variant = variant.upper()
    if variant in ("A", "C") or (variant == "B" and b_mixing == 0 and b_noise == 0):
        block = MeasurementBlock((0,), 1, monotone_diffeo(a, b, c))
    elif variant == "B":
        block = MeasurementBlock((0, 1, 2), 1,
                                 monotone_diffeo(a, b, c, mix=[[1.0, b_mixing, b_mixing]],
                                                 noise_scale=b_noise))
    else:
        raise ConfigError(f"unknown model variant {variant!r}")
    cors = (Corruption(0, dict(MODEL_C_CORRUPTION)),) if variant == "C" else ()
    return MeasurementModel(n_latents, (block,), cors)


def exclusive_hypothesis(n_latents=5, latent=0):
    """Hypothesized model with one block exclusively measuring ``latent``."""
    return MeasurementModel(n_latents, (MeasurementBlock((latent,), 1, identity()),))


class MeasurementTransformer(TransformerMixin, BaseEstimator):
    """Scikit-learn transformer wrapper: latent samples in, measurement columns out.

    Parameters
    ----------
    model : MeasurementModel
    seed : int, default=0
        Seed for additive measurement noise.
    corrupt : bool, default=True
        Apply the model's post-hoc corruptions.
    """

    def __init__(self, model=None, seed=0, corrupt=True):
        self.model = model
        self.seed = seed
        self.corrupt = corrupt

    def fit(self, Z, y=None):
        Z = as_matrix(Z, name="Z")
        if self.model is None:
            raise ConfigError("MeasurementTransformer needs a model")
        if Z.shape[1] != self.model.n_latents:
            raise DimError(f"Z has {Z.shape[1]} columns, model has {self.model.n_latents} latents")
        self.n_features_in_ = Z.shape[1]
        self.block_offsets_ = offsets_from_dims(self.model.dims)
        return self

    def transform(self, Z):
        check_is_fitted(self, "block_offsets_")
        run = realize if self.corrupt else apply_measurements
        return run(self.model, Z, self.seed).zhat
