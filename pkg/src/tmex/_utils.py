"""Seed derivation and array validation helpers."""

import zlib

import numpy as np

from .exceptions import DimError, ShapeError


def _as_int(key):
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    key = int(key)
    if key < 0:
        raise ValueError("seed keys must be nonnegative")
    return key


def derive_seed(seed, *keys):
    """Derive a child seed from ``seed`` and a path of int/str keys.

    Uses numpy's SeedSequence hashing, so the result depends only on the
    inputs and never on call order or any global stream.
    """
    entropy = [_as_int(seed)] + [_as_int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


def rng_for(seed, *keys):
    return np.random.default_rng(derive_seed(seed, *keys))


def as_matrix(a, n_rows=None, name="array"):
    """Coerce to a 2-D float array; 1-D input becomes a single column."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2:
        raise DimError(f"{name} must be 1-D or 2-D, got {a.ndim}-D")
    if n_rows is not None and a.shape[0] != n_rows:
        raise ShapeError(f"{name} has {a.shape[0]} rows, expected {n_rows}")
    return a


def as_vector(a, n=None, name="vector"):
    a = np.asarray(a, dtype=float)
    if a.ndim == 2 and a.shape[1] == 1:
        a = a[:, 0]
    if a.ndim != 1:
        raise DimError(f"{name} must be 1-D")
    if n is not None and a.shape[0] != n:
        raise ShapeError(f"{name} has length {a.shape[0]}, expected {n}")
    return a


def empty_design(n):
    return np.zeros((n, 0))
