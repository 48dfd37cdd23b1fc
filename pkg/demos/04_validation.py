"""Checking the skill representation and the state ranking against outside signals."""

from iceberg.capability import capability_profile
from iceberg.econdata import METRIC_NAMES
from iceberg.index import ALL_SCOPE, SURFACE_SCOPE, all_levels, compute_exposures
from iceberg.synth import bundled
from iceberg.validation import (default_tier_sizes, pairwise_similarity, rank_to_tiers, regress,
                                tier_agreement, transition_recall)

ds = bundled()
matrix = ds.load_taxonomy()

# %% Do similar skill profiles line up with observed career moves?
sims = pairwise_similarity(matrix)
network = ds.load_transitions(set(matrix.codes))
for p in (0.05, 0.10, 0.25):
    rep = transition_recall(sims, network, percentile=p)
    print(f"top {p:.0%} of {len(sims)} pairs: recall {rep.recall:.2f}, "
          f"precision {rep.precision:.2f}")

# %% Tier agreement between our ranking and an external one
table = ds.load_employment()
ex = compute_exposures(matrix, capability_profile(ds.load_tool_catalog()))
surface = {s.region.id: s.index for s in all_levels(ex, table, SURFACE_SCOPE)[1]}
iceberg = {s.region.id: s.index for s in all_levels(ex, table, ALL_SCOPE)[1]}
ours = rank_to_tiers(surface, default_tier_sizes(len(surface)))
agree = tier_agreement(ours, ds.load_external_tiers())
print(f"\ntier agreement {agree['matched']}/{agree['total']} = {agree['overall']:.0%}")

# %% Do traditional metrics explain the index?
metrics = ds.load_state_metrics()
for name in METRIC_NAMES:
    fit = regress({s: getattr(metrics[s], name) for s in iceberg}, iceberg)
    print(f"iceberg ~ {name:18s} slope {fit.slope:+.3e}  r2 {fit.r2:.3f}")
