"""Where each state's exposed wage value lands by industry, and how concentrated it is."""

from iceberg.capability import capability_profile
from iceberg.concentration import hhi, hhi_tier, industry_shares, state_concentration
from iceberg.index import compute_exposures
from iceberg.synth import bundled

# %% Two small worked cases first
print("one industry:", hhi(industry_shares({"manufacturing": 5e9})).value)
print("four equal  :", hhi(industry_shares({k: 1.0 for k in "ABCD"})).value)
for v in (1580, 1581, 1737, 1738):
    print(f"  HHI {v} -> {hhi_tier(v)}")

# %% Every state in the synthetic dataset
ds = bundled()
matrix = ds.load_taxonomy()
ex = compute_exposures(matrix, capability_profile(ds.load_tool_catalog()))
industry_of = {o.code: o.industry for o in matrix.occupations}
for rec in state_concentration(ex, ds.load_employment(), industry_of):
    top = max(rec["shares"].items(), key=lambda kv: kv[1])
    print(f"{rec['state']}  HHI {rec['hhi']:7.1f}  {rec['tier']:18s} "
          f"largest {top[0]} at {top[1]:.1%}")
