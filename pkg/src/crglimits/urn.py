"""Continuous balls-in-urns process and the coupled discrete Polya urn.

A state holds m color lengths (continuous mass) and m odd ball counts.
Each step picks a color size-biased by length, adds the next
inhomogeneous-Poisson gap to it, and gives it two more balls; growing a
tree from a core by stick-breaking drives exactly this process on the
per-core-edge totals, through the same engine.
"""

from __future__ import annotations

import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import backend
from .dist import ParameterError
from .limit_sampler import CoreLengths
from .rng import RngStream

__all__ = [
    "UrnState",
    "UrnTrajectory",
    "PolyaTrajectory",
    "make_urn_state",
    "urn_init",
    "urn_step",
    "urn_run",
    "urn_finals",
    "polya_run",
    "polya_finals",
]

STATE_TOL = 1e-9


class UrnState(NamedTuple):
    n: int
    lengths: Tuple[float, ...]
    counts: Tuple[int, ...]
    total: float

    @property
    def m(self) -> int:
        return len(self.lengths)

    def proportions(self) -> Tuple[float, ...]:
        return tuple(l / self.total for l in self.lengths)


def make_urn_state(n: int, lengths: Sequence[float],
                   counts: Sequence[int]) -> UrnState:
    lengths = tuple(float(x) for x in lengths)
    counts = tuple(int(c) for c in counts)
    m = len(lengths)
    if m < 2 or len(counts) != m:
        raise ParameterError("need matching lengths and counts, m >= 2")
    if any(x <= 0.0 for x in lengths):
        raise ParameterError("urn lengths must be positive")
    if any(c < 1 or c % 2 == 0 for c in counts):
        raise ParameterError("urn counts must be odd and at least 1")
    if n < 0 or sum(counts) != m + 2 * n:
        raise ParameterError(f"counts sum to {sum(counts)}, "
                             f"want m + 2n = {m + 2 * n}")
    total = math.fsum(lengths)
    return UrnState(n, lengths, counts, total)


def urn_init(core: CoreLengths) -> UrnState:
    """Step-0 state from a surplus >= 2 core: its lengths, one ball each."""
    if core.surplus < 2:
        raise ParameterError("the urn starts from a core with surplus >= 2 "
                             f"(m = 3k-3 >= 3 colors), got k={core.surplus}")
    return make_urn_state(0, core.lengths, (1,) * len(core.lengths))


class UrnTrajectory(NamedTuple):
    states: List[UrnState]
    checkpoints: Tuple[int, ...]
    picks: np.ndarray
    gaps: np.ndarray


def _norm_checkpoints(n_steps: int, checkpoints) -> Tuple[int, ...]:
    if checkpoints is None:
        return tuple(range(n_steps + 1))
    pts = sorted({int(c) for c in checkpoints})
    if pts and (pts[0] < 0 or pts[-1] > n_steps):
        raise ParameterError("checkpoints must lie in [0, n_steps]")
    return tuple(pts)


def urn_run(stream: RngStream, s0: UrnState, n_steps: int,
            checkpoints=None) -> UrnTrajectory:
    """Run the urn, retaining states at the requested step counts.

    Checkpoints are absolute step counts relative to s0 (0 = s0 itself);
    default keeps every step.  Picks and gaps for all steps come back
    regardless, so per-color arrival sequences can be reconstructed.
    """
    if n_steps < 0:
        raise ParameterError("n_steps must be non-negative")
    pts = _norm_checkpoints(n_steps, checkpoints)
    L_traj, N_traj, picks, gaps, stream._pos = backend.impl.urn_engine(
        stream._pos, list(s0.lengths), n_steps)
    states = []
    for c in pts:
        lengths = tuple(float(x) for x in L_traj[c])
        counts = tuple(int(s0.counts[j]) + int(N_traj[c, j]) - 1
                       for j in range(s0.m))
        states.append(UrnState(s0.n + c, lengths, counts,
                               math.fsum(lengths)))
    return UrnTrajectory(states, pts, picks, gaps)


def urn_step(stream: RngStream, s: UrnState) -> UrnState:
    """One transition: size-biased color gains the next gap and two balls."""
    return urn_run(stream, s, 1, checkpoints=(1,)).states[0]


def _child_states(stream: RngStream, label: str, n_trials: int) -> np.ndarray:
    out = np.empty(n_trials, dtype=np.uint64)
    for i in range(n_trials):
        out[i] = stream.child(f"{label}{i}")._pos
    return out


def urn_finals(stream: RngStream, lengths0: np.ndarray, n_steps: int,
               label: str = "urn-") -> Tuple[np.ndarray, np.ndarray]:
    """Final (lengths, counts) for one urn run per row of lengths0.

    Row i runs on the child stream label+str(i), so results do not depend
    on the parent stream's position and match per-trial urn_run calls.
    """
    lengths0 = np.asarray(lengths0, dtype=np.float64)
    if lengths0.ndim != 2:
        raise ParameterError("lengths0 must be (n_trials, m)")
    states = _child_states(stream, label, lengths0.shape[0])
    L, N, _ = backend.impl.urn_bulk_engine(states, lengths0, n_steps)
    return L, N


class PolyaTrajectory(NamedTuple):
    checkpoints: Tuple[int, ...]
    counts: np.ndarray  # (len(checkpoints), m)


def polya_run(stream: RngStream, m: int, n_steps: int,
              checkpoints=None) -> PolyaTrajectory:
    """Discrete urn from one ball per color; the picked color gains two."""
    if m < 2:
        raise ParameterError(f"need at least two colors, got {m}")
    if n_steps < 0:
        raise ParameterError("n_steps must be non-negative")
    pts = _norm_checkpoints(n_steps, checkpoints)
    states = np.array([stream._pos], dtype=np.uint64)
    counts = np.ones((1, m), dtype=np.int64)
    out = np.empty((len(pts), m), dtype=np.int64)
    done = 0
    for row, c in enumerate(pts):
        counts, states = backend.impl.polya_bulk_engine(states, counts,
                                                        c - done)
        done = c
        out[row] = counts[0]
    if done < n_steps:
        counts, states = backend.impl.polya_bulk_engine(states, counts,
                                                        n_steps - done)
    stream._pos = int(states[0])
    return PolyaTrajectory(pts, out)


def polya_finals(stream: RngStream, m: int, n_steps: int, n_trials: int,
                 label: str = "polya-") -> np.ndarray:
    """Final counts of n_trials independent discrete urns, one child
    stream per trial."""
    if m < 2:
        raise ParameterError(f"need at least two colors, got {m}")
    states = _child_states(stream, label, n_trials)
    counts0 = np.ones((n_trials, m), dtype=np.int64)
    counts, _ = backend.impl.polya_bulk_engine(states, counts0, n_steps)
    return counts
