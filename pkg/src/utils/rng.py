"""
Seeded random streams.

Every (master_seed, seed, tag) triple maps to its own PCG64 stream through
a SeedSequence spawn key, so runs never share state and a run's stream does
not depend on which other runs were requested or in what order.
"""

import numpy as np

# Stream tags; "shared" is used where PG and CAPG must see identical draws.
STREAM_TAGS = {
    "pg": 0,
    "capg": 1,
    "shared": 2,
    "verify": 3,
}


def derive_rng(master_seed: int, seed: int, tag: str, *extra: int) -> np.random.Generator:
    """
    Build an independent generator for one experiment cell.

    Args:
        master_seed: experiment-wide seed
        seed: per-run seed value (not its position in the seed list)
        tag: one of STREAM_TAGS
        *extra: further non-negative integers, e.g. a grid-point index

    Returns:
        numpy Generator backed by PCG64
    """
    if tag not in STREAM_TAGS:
        raise ValueError(f"Unknown stream tag: {tag}")
    spawn_key = (int(seed), STREAM_TAGS[tag]) + tuple(int(e) for e in extra)
    sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(sequence))
