"""Seedable, splittable random streams.

A stream is identified by (master_seed, stream_id) and an internal draw
counter; output i is mix64(state0 + i*GAMMA), a counter-based splitmix64.
Identical identity and counter give bit-identical draws on every platform
and backend.  Child streams derive their id from a stable hash of a string
label, so parallel batches can be assigned non-overlapping randomness
deterministically.
"""

from __future__ import annotations

from . import backend
from ._rngcore import GAMMA, MASK64, child_id, draws_between, mix64, stream_state

__all__ = ["RngStream"]


class RngStream:
    """One independent uniform stream; every sampler advances it explicitly."""

    __slots__ = ("master_seed", "stream_id", "_init", "_pos")

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = master_seed & MASK64
        self.stream_id = stream_id & MASK64
        self._init = stream_state(master_seed, stream_id)
        self._pos = self._init

    @property
    def counter(self) -> int:
        """Number of draws consumed so far."""
        return draws_between(self._init, self._pos)

    def seek(self, counter: int) -> None:
        """Reposition to an absolute draw count (0 = freshly created)."""
        self._pos = (self._init + (counter & MASK64) * GAMMA) & MASK64

    def child(self, label: str) -> "RngStream":
        """Independent stream addressed by a stable string label."""
        return RngStream(self.master_seed, child_id(self.stream_id, label))

    def clone(self) -> "RngStream":
        s = RngStream(self.master_seed, self.stream_id)
        s._pos = self._pos
        return s

    def __repr__(self) -> str:
        return (f"RngStream(master_seed={self.master_seed:#x}, "
                f"stream_id={self.stream_id:#x}, counter={self.counter})")

    # draw primitives; distribution samplers live in crglimits.dist

    def next_u64(self) -> int:
        self._pos = (self._pos + GAMMA) & MASK64
        return mix64(self._pos)

    def uniform(self) -> float:
        u, self._pos = backend.impl.uniform(self._pos)
        return u

    def uniforms(self, n: int):
        u, self._pos = backend.impl.uniform_array(self._pos, n)
        return u

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n); modulo bias is below n/2**64."""
        if n <= 0:
            raise ValueError("randbelow needs a positive bound")
        return self.next_u64() % n
