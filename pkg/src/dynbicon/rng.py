"""Deterministic 64-bit randomness (splitmix64).

Every random decision in the package flows through this generator so that
runs are reproducible bit-for-bit across platforms from a single seed.
"""

MASK64 = (1 << 64) - 1


def splitmix64(state):
    """Advance a splitmix64 state once; returns (value, new_state)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), state


def mix64(*words):
    """Hash a tuple of integers to a 64-bit value (stateless, seedable)."""
    acc = 0x243F6A8885A308D3
    for w in words:
        acc = (acc ^ (w & MASK64)) & MASK64
        acc, _ = splitmix64(acc)
    return acc


class SplitMix64:
    """Sequential generator over the splitmix64 stream."""

    __slots__ = ("state",)

    def __init__(self, seed):
        self.state = seed & MASK64

    def next64(self):
        value, self.state = splitmix64(self.state)
        return value

    def randrange(self, n):
        # Modulo bias is irrelevant at our range sizes (< 2^32 vs 2^64).
        return self.next64() % n

    def choice(self, seq):
        return seq[self.next64() % len(seq)]
