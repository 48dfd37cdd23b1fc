"""Occupation exposure and regional indices on the bundled synthetic dataset.

Run with ``python3 demos/01_exposure_and_indices.py``.
"""

from iceberg.capability import capability_profile
from iceberg.index import ALL_SCOPE, SURFACE_SCOPE, all_levels, compute_exposures
from iceberg.synth import bundled

ds = bundled("synth_seed42")
matrix = ds.load_taxonomy()
table = ds.load_employment()
print(f"{matrix.n_occupations} occupations, {matrix.n_skills} skills, "
      f"{len(table.counties)} counties in {len(table.states)} states")

# %% Skill automatability: best tool confidence per skill
auto = capability_profile(ds.load_tool_catalog())
covered = sum(1 for s in matrix.skills if auto[s.id] > 0)
print(f"{covered} of {matrix.n_skills} skills have at least one tool")

# %% Exposure per occupation, most exposed first
ex = compute_exposures(matrix, auto)
ranked = sorted(zip(ex.codes, ex.values), key=lambda p: -p[1])
for code, value in ranked[:5]:
    print(f"  {code}  {value:.3f}")

# %% County, state and national indices for the full scope and the technology scope
for scope in (ALL_SCOPE, SURFACE_SCOPE):
    counties, states, nation = all_levels(ex, table, scope)
    print(f"\nscope {scope.name}: national {nation.index:.4f} "
          f"(${nation.exposed_wage_value / 1e6:,.1f}M of ${nation.wage_base / 1e6:,.1f}M)")
    for s in states:
        print(f"  {s.region.id}  {s.index:.4f}")
