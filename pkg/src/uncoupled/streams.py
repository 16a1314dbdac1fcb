"""Labeled, per-run random streams.

Every stream is a numpy ``PCG64`` generator seeded from
``SeedSequence(master_seed, spawn_key=(run_id, player, purpose))``. A run's
draws therefore depend only on its own id, never on which other runs share a
batch, and adding a new purpose never shifts an existing stream.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

PRNG_NAME = f"numpy.random.PCG64 via SeedSequence(master, spawn_key=(run, player, purpose)); numpy {np.__version__}"

ACTIONS = 0  # engine-side sampling of pure actions
RULE = 1  # rule per-period coins (fixed count per period)
EVENTS = 2  # rule draws of variable size (simplex redraws, frame shuffles)


def generator(master_seed: int, run_id: int, player: int, purpose: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(run_id, player, purpose))
    return np.random.Generator(np.random.PCG64(ss))


class UniformStream:
    """Buffered U[0,1) draws for a set of lockstep runs.

    ``take(k)`` returns shape ``(R, k)``. Consumption is sequential per run, so
    the values seen are independent of how the draws are chunked.
    """

    def __init__(self, gens: Sequence[np.random.Generator], chunk: int = 4096):
        self.gens = list(gens)
        self.chunk = chunk
        self._buf = np.empty((len(self.gens), 0))
        self._pos = 0

    @property
    def runs(self) -> int:
        return len(self.gens)

    def take(self, k: int) -> np.ndarray:
        avail = self._buf.shape[1] - self._pos
        if k <= avail:
            out = self._buf[:, self._pos:self._pos + k]
            self._pos += k
            return out
        head = self._buf[:, self._pos:]
        need = k - avail
        fill = max(need, self.chunk)
        fresh = np.stack([g.random(fill) for g in self.gens])
        self._buf = fresh
        self._pos = need
        return np.concatenate([head, fresh[:, :need]], axis=1)

    def take1(self) -> np.ndarray:
        """One draw per run, shape ``(R,)``."""
        return self.take(1)[:, 0]
