"""Synthetic datasets and brute-force oracles."""

from .generator import (BUNDLED, FILES, MANIFEST, RNG_ALGORITHM, SynthConfig, SyntheticDataset,
                        bundled, generate)
from .oracles import (oracle_exposed_value, oracle_exposure, oracle_hhi,
                      oracle_regional_index, oracle_similarity)

__all__ = [
    "BUNDLED", "FILES", "MANIFEST", "RNG_ALGORITHM", "SynthConfig", "SyntheticDataset", "bundled", "generate",
    "oracle_exposed_value", "oracle_exposure", "oracle_hhi", "oracle_regional_index",
    "oracle_similarity",
]
