"""Named, reproducible random streams.

Every run owns one integer seed.  Each consumer of randomness gets its
own stream derived from (seed, stream id), so the warmup draws are
identical across algorithms sharing a seed regardless of what each
algorithm does afterwards, and any single stream can be replayed in
isolation.

Experiment-level run seeds derive from (master seed, run index) only:
the same run index gives every algorithm the same seed, which pairs
their warmup phases for lower-variance comparisons.
"""

from __future__ import annotations

import numpy as np

# stable stream ids; never reorder or reuse
STREAMS = {
    "warmup-sampling": 0,   # uniform draws during warmup (and all of random search)
    "dn-sampling": 1,       # candidate batches in the sampling-based search
    "gan-latent": 2,        # noise for candidates proposed in the search loop
    "net-init": 3,          # network weight initialization
    "gan-train": 4,         # shuffles and noise inside training rounds
    "fallback-sampling": 5, # uniform draws when the generator stalls
}


def stream_rng(seed: int, stream: str) -> np.random.Generator:
    """Independent generator for one named stream of one run."""
    return np.random.default_rng(np.random.SeedSequence((seed, STREAMS[stream])))


def derive_run_seed(master_seed: int, run_index: int) -> int:
    """Per-run seed shared by all algorithms at the same run index."""
    ss = np.random.SeedSequence((master_seed, run_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
