"""Integer mixing primitives shared by the stream object and both kernel backends.

The generator is counter-based: draw i of a stream is mix64(state0 + i*GAMMA)
where state0 encodes (master_seed, stream_id).  Everything here is exact
64-bit integer arithmetic, so Python ints, numpy uint64 and C uint64 agree.
"""

MASK64 = (1 << 64) - 1

# Weyl increment of splitmix64; odd, hence invertible mod 2**64.
GAMMA = 0x9E3779B97F4A7C15
GAMMA_INV = pow(GAMMA, -1, 1 << 64)

_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# Salt keeping stream-id space distinct from seed space.
_STREAM_SALT = 0x6A09E667F3BCC909

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(z: int) -> int:
    """splitmix64 finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & MASK64
    return h


def stream_state(master_seed: int, stream_id: int) -> int:
    """Counter-zero position of stream (master_seed, stream_id)."""
    return mix64(mix64(master_seed & MASK64) ^ mix64((stream_id ^ _STREAM_SALT) & MASK64))


def child_id(parent_id: int, label: str) -> int:
    """Stable id for a child stream; identical label -> identical child."""
    return mix64((parent_id ^ fnv1a64(label.encode("utf-8"))) & MASK64)


def draws_between(pos_from: int, pos_to: int) -> int:
    """Number of draws separating two positions of the same stream."""
    return ((pos_to - pos_from) * GAMMA_INV) & MASK64
