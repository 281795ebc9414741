"""Seedable, splittable random number source for simulation runs.

Wraps a counter-based bit generator (Philox) behind the two draw shapes the
simulator needs: bounded integers and unit-interval floats.  Draws are
buffered in blocks so the per-draw cost stays small in the round loop.
A run is fully determined by its seed; independent streams for sweep cells
are derived by spawning.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

_BLOCK = 8192


class SimRng:
    """Deterministic random source with inclusive-bound integer draws."""

    def __init__(self, seed):
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            self._seq = np.random.SeedSequence(seed)
        self._gen = np.random.Generator(np.random.Philox(self._seq))
        self._ints: Sequence[int] = ()
        self._int_pos = 0
        self._floats: Sequence[float] = ()
        self._float_pos = 0

    def spawn(self, n: int) -> list["SimRng"]:
        """Derive ``n`` independent child streams."""
        return [SimRng(s) for s in self._seq.spawn(n)]

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in ``[low, high]`` (both inclusive)."""
        if high < low:
            raise ValueError(f"empty range [{low}, {high}]")
        span = high - low + 1
        if span == 1:
            return low
        if self._int_pos >= len(self._ints):
            self._ints = self._gen.integers(0, 1 << 62, size=_BLOCK).tolist()
            self._int_pos = 0
        x = self._ints[self._int_pos]
        self._int_pos += 1
        # span is tiny relative to 2**62: modulo bias is far below test resolution
        return low + x % span

    def random(self) -> float:
        """Uniform float in ``[0, 1)``."""
        if self._float_pos >= len(self._floats):
            self._floats = self._gen.random(size=_BLOCK).tolist()
            self._float_pos = 0
        x = self._floats[self._float_pos]
        self._float_pos += 1
        return x
