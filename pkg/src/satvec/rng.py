"""Deterministic random-stream derivation.

One master seed drives every experiment. Independent substreams are
derived from (seed, *path) where path elements are trial indices and
purpose tags, so adding a new random quantity never perturbs the draws
of existing ones and trials can run concurrently on isolated streams.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _path_token(part) -> int:
    """Stable 64-bit token for one path element (int or str)."""
    if isinstance(part, (int, np.integer)):
        return int(part) & _MASK64
    digest = hashlib.blake2s(str(part).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, *path) -> np.random.Generator:
    """Generator for the substream identified by (seed, *path)."""
    entropy = [int(seed) & _MASK64] + [_path_token(p) for p in path]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(seed: int, *path) -> int:
    """Collapse (seed, *path) into a single 64-bit child seed."""
    h = hashlib.blake2s(digest_size=8)
    h.update(str(int(seed) & _MASK64).encode())
    for p in path:
        h.update(b"/")
        h.update(str(_path_token(p)).encode())
    return int.from_bytes(h.digest(), "little")
