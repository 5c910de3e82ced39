"""Labelled seed derivation.

A :class:`Seed` wraps a 64-bit master value. Child streams are derived by
hashing the master together with a label path, so any phase of any trial
can be replayed on its own.
"""

from __future__ import annotations

import hashlib
import random
from typing import Union

_MASK = (1 << 64) - 1


def derive(master: int, *labels) -> int:
    """64-bit child seed for ``(master, *labels)``."""
    key = repr((int(master) & _MASK,) + tuple(labels)).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


class Seed:
    __slots__ = ("master",)

    def __init__(self, master: int):
        self.master = int(master) & _MASK

    def child(self, *labels) -> "Seed":
        return Seed(derive(self.master, *labels))

    def rng(self, *labels) -> random.Random:
        """Independent ``random.Random`` stream for the given label path."""
        return random.Random(derive(self.master, *labels))

    def __eq__(self, other) -> bool:
        return isinstance(other, Seed) and other.master == self.master

    def __hash__(self) -> int:
        return hash(self.master)

    def __repr__(self) -> str:
        return f"Seed({self.master})"


SeedLike = Union[int, Seed]


def as_seed(seed: SeedLike) -> Seed:
    if isinstance(seed, Seed):
        return seed
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise TypeError(f"seed must be an int or Seed, got {type(seed).__name__}")
    return Seed(seed)
