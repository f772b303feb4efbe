"""Deterministic RNG streams derived from hashable token tuples.

Every source of randomness in the package is an explicit
``numpy.random.Generator``.  Streams are derived from (seed, name, index)
style token tuples through SHA-256 onto a counter-based Philox key, so the
stream attached to a given instance does not depend on execution order and
is reproducible across platforms and processes.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _token_text(token) -> str:
    if isinstance(token, (str, int, np.integer)):
        return str(token)
    if isinstance(token, float):
        return repr(token)
    raise TypeError(f"rng tokens must be str, int, or float, got {type(token)!r}")


def rng_from_tokens(*tokens) -> np.random.Generator:
    """Return an independent generator keyed by the token tuple."""
    material = "\x1f".join(_token_text(t) for t in tokens).encode()
    digest = hashlib.sha256(material).digest()
    key = np.frombuffer(digest[:16], dtype=np.uint64).copy()
    return np.random.Generator(np.random.Philox(key=key))


def stable_digest(arrays) -> str:
    """Short content hash of a sequence of float arrays, for instance ids."""
    h = hashlib.sha1()
    for arr in arrays:
        a = np.ascontiguousarray(np.asarray(arr, dtype=float))
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:12]
