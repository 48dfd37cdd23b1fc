"""Industry concentration of exposed wage value (Herfindahl-Hirschman index)."""

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping

import numpy as np

from .econdata import EmploymentTable
from .errors import InputError, NotFoundError

MOST_DISTRIBUTED = "most-distributed"
MODERATE = "moderate"
MOST_CONCENTRATED = "most-concentrated"
TIERS = (MOST_DISTRIBUTED, MODERATE, MOST_CONCENTRATED)

# inclusive upper bounds on the rounded HHI
DISTRIBUTED_MAX = 1580
MODERATE_MAX = 1737


@dataclass(frozen=True)
class IndustryShares:
    region: str
    shares: Dict[str, float]

    def __post_init__(self):
        if not self.shares:
            raise InputError(f"{self.region}: no industry shares")
        for ind, s in self.shares.items():
            if not (0.0 <= s <= 1.0):
                raise InputError(f"{self.region}: share of {ind} is {s!r}, outside [0, 1]")
        total = math.fsum(self.shares.values())
        if abs(total - 1.0) > 1e-9:
            raise InputError(f"{self.region}: shares sum to {total!r}, not 1")


@dataclass(frozen=True)
class HHIScore:
    region: str
    value: float
    tier: str


def industry_shares(exposed_by_industry: Mapping[str, float], region="") -> IndustryShares:
    """Each industry's fraction of the total exposed wage value.

    Industries contributing nothing are left out of the result.
    """
    for ind, v in exposed_by_industry.items():
        if not v >= 0:
            raise InputError(f"{region}: industry {ind} has negative exposed value {v!r}")
    total = math.fsum(exposed_by_industry.values())
    if total <= 0:
        raise InputError(f"{region}: total exposed value is zero")
    return IndustryShares(region, {ind: v / total for ind, v in sorted(exposed_by_industry.items())
                                   if v > 0})


def round_half_up(x) -> int:
    return int(math.floor(x + 0.5))


def hhi_tier(value) -> str:
    """Tier of an HHI on the 0-10,000 scale, applied to the value rounded half-up."""
    v = round_half_up(value)
    if v <= DISTRIBUTED_MAX:
        return MOST_DISTRIBUTED
    if v <= MODERATE_MAX:
        return MODERATE
    return MOST_CONCENTRATED


def hhi(shares: IndustryShares) -> HHIScore:
    value = 10000.0 * math.fsum(s * s for s in shares.shares.values())
    return HHIScore(shares.region, value, hhi_tier(value))


def exposed_by_industry(exposures, table: EmploymentTable, industry_of: Mapping[str, str]
                        ) -> Dict[str, Dict[str, float]]:
    """state -> industry -> exposed wage value (exposure x employment x wage)."""
    per_occ = np.zeros(len(table.occupations))
    ind_names = sorted({industry_of[c] for c in table.occupations if c in industry_of})
    ind_pos = {name: i for i, name in enumerate(ind_names)}
    occ_ind = np.empty(len(table.occupations), dtype=np.int64)
    for i, code in enumerate(table.occupations):
        if code not in exposures:
            raise NotFoundError(f"missing exposure for occupation {code}")
        if code not in industry_of:
            raise NotFoundError(f"occupation {code} has no industry")
        per_occ[i] = exposures[code]
        occ_ind[i] = ind_pos[industry_of[code]]
    exposed = per_occ[table.occ_idx] * table.wage_value
    cell_ind = occ_ind[table.occ_idx]
    n_ind = max(len(ind_names), 1)
    group = table.cell_state_idx * n_ind + cell_ind
    order = np.argsort(group, kind="stable")
    group_sorted = group[order]
    exposed_sorted = exposed[order]
    keys, starts = np.unique(group_sorted, return_index=True)
    ends = np.append(starts[1:], len(group_sorted))
    states = table.geography.states
    out: Dict[str, Dict[str, float]] = {}
    for k, lo, hi in zip(keys.tolist(), starts.tolist(), ends.tolist()):
        st, ind = states[k // n_ind], ind_names[k % n_ind]
        out.setdefault(st, {})[ind] = math.fsum(exposed_sorted[lo:hi].tolist())
    return dict(sorted(out.items()))


def state_concentration(exposures, table: EmploymentTable, industry_of: Mapping[str, str]
                        ) -> List[dict]:
    """Concentration record for every state, sorted by state code."""
    records = []
    for st, by_ind in exposed_by_industry(exposures, table, industry_of).items():
        shares = industry_shares(by_ind, st)
        score = hhi(shares)
        records.append({"state": st, "hhi": score.value, "tier": score.tier,
                        "shares": shares.shares})
    return records
