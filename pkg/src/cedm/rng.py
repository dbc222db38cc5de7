"""Keyed, splittable random streams built on the Philox counter-based generator.

Every stochastic operation in the package draws from a :class:`StreamKey`,
which is a pure value: a master seed plus a derivation path of (tag, index)
pairs.  Distinct paths give statistically independent streams, the same path
always gives the same draws, and no draw depends on evaluation order or
thread count.

Conventions (fixed so output is bit-stable):

* the Philox key is the 128-bit BLAKE2b digest of the serialised path;
* uniforms are the generator's 53-bit doubles shifted by 2**-54 so they lie
  strictly inside (0, 1);
* gaussians are uniforms mapped through the inverse normal CDF (``ndtri``);
* permutations use the generator's Fisher-Yates shuffle.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

__all__ = [
    "StreamKey",
    "master",
    "as_key",
    "substream",
    "gaussian",
    "uniform",
    "permutation",
    "integers",
]


@dataclass(frozen=True)
class StreamKey:
    """One independent random stream: master seed plus derivation path."""

    seed: int
    path: tuple = field(default_factory=tuple)


def master(seed: int) -> StreamKey:
    """Root stream for a run; everything else is derived from it."""
    return StreamKey(int(seed), ())


def as_key(seed) -> StreamKey:
    """Accept either a plain integer seed or an existing StreamKey."""
    return seed if isinstance(seed, StreamKey) else master(seed)


def substream(key: StreamKey, tag: str, index: int = 0) -> StreamKey:
    """Derive the child stream named (tag, index); collision-free in practice
    because the final Philox key is a 128-bit keyed digest of the whole path."""
    return StreamKey(key.seed, key.path + ((str(tag), int(index)),))


def _philox_key(key: StreamKey) -> int:
    h = hashlib.blake2b(digest_size=16)
    h.update(int(key.seed).to_bytes(16, "little", signed=True))
    for tag, index in key.path:
        h.update(tag.encode("utf-8"))
        h.update(b"\x00")
        h.update(int(index).to_bytes(8, "little", signed=True))
    return int.from_bytes(h.digest(), "little")


def _generator(key: StreamKey) -> Generator:
    return Generator(Philox(key=_philox_key(key)))


def uniform(key: StreamKey, shape=()) -> np.ndarray:
    """I.i.d. uniforms strictly inside (0, 1)."""
    u = _generator(key).random(size=shape)
    return u + 2.0 ** -54


def gaussian(key: StreamKey, shape=()) -> np.ndarray:
    """I.i.d. standard normals via the inverse-CDF map of :func:`uniform`."""
    return ndtri(uniform(key, shape))


def permutation(key: StreamKey, n: int) -> np.ndarray:
    """A uniformly random permutation of range(n)."""
    return _generator(key).permutation(n)


def integers(key: StreamKey, low: int, high: int, shape=()) -> np.ndarray:
    """I.i.d. integers in [low, high)."""
    return _generator(key).integers(low, high, size=shape)
