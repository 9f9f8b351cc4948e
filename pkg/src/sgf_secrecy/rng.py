"""Counter-based random number streams for reproducible parallel Monte Carlo.

Every variate is a pure function of ``(seed, trial, slot)``, so any subrange
of trials can be generated on any worker, in any order, with bit-identical
results.  The generator is the SplitMix64 finalizer applied to a Weyl
sequence, indexed by a flat 64-bit counter ``trial * slots + slot``.
Exponential variates come from inverse-CDF on the uniform stream.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = 0xFFFFFFFFFFFFFFFF
_INV53 = 1.0 / float(1 << 53)


def _mix64_scalar(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def derive_seed(seed: int, index: int) -> int:
    """Decorrelated child seed, e.g. one per sweep point."""
    return _mix64_scalar(_mix64_scalar(seed) ^ _mix64_scalar(0xA5A5A5A5 + index))


class CounterStream:
    """Random-access uniform/exponential stream over (trial, slot) pairs.

    ``slots`` is the number of variates consumed per trial; it is part of
    the stream identity so estimators with different layouts decorrelate.
    """

    def __init__(self, seed: int, slots: int):
        if slots < 1:
            raise ValueError("slots must be >= 1")
        self.seed = int(seed)
        self.slots = int(slots)
        self._key = np.uint64(
            _mix64_scalar(_mix64_scalar(seed) ^ _mix64_scalar(slots * 0x0BAD5EED + 1))
        )

    def uniform_block(self, start_trial: int, n_trials: int) -> np.ndarray:
        """Uniforms in [0, 1) with shape (n_trials, slots)."""
        lo = np.uint64(start_trial * self.slots)
        idx = lo + np.arange(n_trials * self.slots, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = _mix64_array(self._key + (idx + np.uint64(1)) * _GOLDEN)
        u = (z >> np.uint64(11)).astype(np.float64) * _INV53
        return u.reshape(n_trials, self.slots)

    def exponential_block(self, start_trial: int, n_trials: int) -> np.ndarray:
        """Unit-mean exponentials with shape (n_trials, slots)."""
        u = self.uniform_block(start_trial, n_trials)
        return -np.log1p(-u)

    def uniform(self, trial: int, slot: int) -> float:
        """Scalar access, mainly for tests."""
        i = (trial * self.slots + slot) & _MASK
        z = _mix64_scalar((int(self._key) + ((i + 1) * 0x9E3779B97F4A7C15)) & _MASK)
        return (z >> 11) * _INV53
