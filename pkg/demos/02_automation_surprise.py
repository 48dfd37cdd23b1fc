"""How much exposure sits outside technology occupations, state by state."""

from iceberg.capability import capability_profile
from iceberg.econdata import RegionScope
from iceberg.index import ALL_SCOPE, SURFACE_SCOPE, automation_surprise, compute_exposures, \
    regional_index
from iceberg.synth import bundled

ds = bundled()
table = ds.load_employment()
ex = compute_exposures(ds.load_taxonomy(), capability_profile(ds.load_tool_catalog()))

print("state  surface  iceberg   gap   ratio")
for st in table.states:
    region = RegionScope.state(st)
    surface = regional_index(ex, table, SURFACE_SCOPE, region)
    iceberg = regional_index(ex, table, ALL_SCOPE, region)
    gap = automation_surprise(surface, iceberg)
    ratio = iceberg.index / surface.index if surface.index else float("inf")
    print(f"{st:5s}  {surface.index:7.4f}  {iceberg.index:7.4f}  {gap:6.4f}  {ratio:5.1f}")

# %% The same comparison under the boolean reduction (a skill counts fully once a tool
# reaches confidence 0.5)
ex_bool = compute_exposures(ds.load_taxonomy(),
                            capability_profile(ds.load_tool_catalog(), "boolean", 0.5))
nat_max = regional_index(ex, table, ALL_SCOPE).index
nat_bool = regional_index(ex_bool, table, ALL_SCOPE).index
print(f"\nnational index: max reduction {nat_max:.4f}, boolean reduction {nat_bool:.4f}")
