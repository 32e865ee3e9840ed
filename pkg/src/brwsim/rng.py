"""Counter-based, splittable random streams.

Every stream is a Philox generator whose key is derived from
``(master_seed, stream, index)``.  A trial's draws therefore depend only on
its own key, never on how trials are scheduled across workers.
"""
import numpy as np

# stream ids
SIMULATE = 0
SPINE = 1
WALK = 2
BOOTSTRAP = 3
EXTRA = 4


def stream(seed, kind, index=0, *sub):
    """Independent Generator for (seed, kind, index, *sub)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(kind), int(index), *map(int, sub)))
    return np.random.Generator(np.random.Philox(ss))


def trial_rng(seed, trial):
    return stream(seed, SIMULATE, trial)


# Fixed chunking for vectorised estimators: chunk c covers items
# [c*CHUNK, (c+1)*CHUNK) and owns stream (seed, kind, c).
CHUNK = 4096


def chunks(total, chunk=CHUNK):
    """Yield (chunk_index, size) covering ``total`` items."""
    c = 0
    start = 0
    while start < total:
        size = min(chunk, total - start)
        yield c, size
        c += 1
        start += size
