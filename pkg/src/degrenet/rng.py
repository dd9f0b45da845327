"""Seeded random streams.

Every stochastic routine takes an integer ``seed`` and an optional
``replica`` index. The stream for ``(seed, replica)`` is PCG64 seeded by
``SeedSequence(seed, spawn_key=(replica,))``, which is what
``SeedSequence(seed).spawn(n)[replica]`` produces. The mapping is part of the
public contract: changing it changes every seeded result.
"""
import numpy as np

BATCH = 4096


def make_rng(seed, replica=0):
    if replica < 0:
        raise ValueError("replica index must be non-negative")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(replica),))
    return np.random.Generator(np.random.PCG64(ss))


class RandomStream:
    """Buffered unit exponentials and uniforms drawn from one generator.

    Scalar draws from a ``Generator`` are slow in a Python event loop, so
    values are pulled in fixed-size blocks. The block size is fixed, which
    keeps the sequence a pure function of the seed.
    """

    __slots__ = ("rng", "_exp", "_ie", "_uni", "_iu")

    def __init__(self, rng):
        self.rng = rng
        self._exp = []
        self._ie = 0
        self._uni = []
        self._iu = 0

    def exponential(self):
        if self._ie == len(self._exp):
            self._exp = self.rng.standard_exponential(BATCH).tolist()
            self._ie = 0
        x = self._exp[self._ie]
        self._ie += 1
        return x

    def uniform(self):
        if self._iu == len(self._uni):
            self._uni = self.rng.random(BATCH).tolist()
            self._iu = 0
        x = self._uni[self._iu]
        self._iu += 1
        return x
