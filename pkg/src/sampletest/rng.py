"""Counter-based random streams.

Every random draw in the package is a pure function of a ``(seed, stream)``
pair.  Work item ``i`` of a sweep or of the solver's sampling loop uses the
stream id ``base ^ i``, so any partition of the indices across workers
reproduces the single-threaded draws exactly.

Two kinds of draws are offered:

* :meth:`RandomStream.generator` returns a fresh numpy ``Generator`` keyed by
  Philox on ``(seed, stream)``.  Used by the samplers that need a variable
  number of draws (clauses, Poisson counts, subsets).
* :func:`counter_words` hashes ``(seed, stream, counter)`` with a SplitMix64
  finaliser.  Used for uniform assignments, where the solver needs to
  materialise thousands of independent streams at once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    # SplitMix64 step; uint64 arithmetic wraps mod 2**64
    with np.errstate(over="ignore"):
        z = z + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MUL1
        z = (z ^ (z >> np.uint64(27))) * _MUL2
    return z ^ (z >> np.uint64(31))


def counter_words(seed: int, streams, n_words: int) -> np.ndarray:
    """Return ``n_words`` 64-bit words for each stream id in ``streams``.

    Output has shape ``(len(streams), n_words)`` and dtype uint64.  Row ``r``
    depends only on ``(seed, streams[r])``.
    """
    streams = np.atleast_1d(np.asarray(streams, dtype=np.uint64))
    key = _mix(np.full(streams.shape, seed & MASK64, dtype=np.uint64))
    key = _mix(key ^ streams)
    counters = np.arange(n_words, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(key[:, None] ^ (counters[None, :] * _MUL2))


@dataclass(frozen=True)
class RandomStream:
    seed: int
    stream: int = 0

    def __post_init__(self):
        object.__setattr__(self, "seed", int(self.seed) & MASK64)
        object.__setattr__(self, "stream", int(self.stream) & MASK64)

    def derive(self, index: int) -> RandomStream:
        """Stream for work item ``index``: ``stream ^ index``."""
        return RandomStream(self.seed, self.stream ^ (int(index) & MASK64))

    def child(self, tag: int) -> RandomStream:
        """Stream for an independent sub-purpose inside one work item.

        Unlike :meth:`derive`, the tag is hashed, so ``child(1)`` of stream 0
        does not collide with ``derive(1)``.
        """
        word = counter_words(self.seed ^ 0xA5A5A5A5A5A5A5A5, [self.stream], int(tag) + 1)
        return RandomStream(self.seed, int(word[0, -1]))

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=np.array([self.seed, self.stream], dtype=np.uint64)))

    def words(self, n_words: int) -> np.ndarray:
        return counter_words(self.seed, [self.stream], n_words)[0]
