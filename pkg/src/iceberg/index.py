"""Occupation exposure and wage-weighted regional indices.

An occupation's exposure is the weighted mean automatability of the skills it
requires.  A region's index is the exposure-weighted wage value of in-scope
occupations divided by the wage value of *all* occupations in the region, so
a narrow scope (the technology occupations behind the Surface Index) and the
unrestricted scope (the Iceberg Index) share one denominator.
"""

import logging
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

import numpy as np

from ._io import read_table
from .capability import AutomatabilityMap
from .econdata import EmploymentTable, Geography, RegionScope, wage_base
from .errors import InputError, NotFoundError, ParseError, RangeError
from .taxonomy import SkillRequirementMatrix, get_weight_policy

log = logging.getLogger(__name__)

SCOPE_COLUMNS = ("scope_name", "occupation_code_or_prefix")
ALL = "all"
SURFACE = "surface"

_CODE_RE = re.compile(r"^\d{2}-\d{4}$")
_PREFIX_RE = re.compile(r"^\d{1,2}(-\d{0,3})?$")


@dataclass(frozen=True)
class ExposureScore:
    occupation: str
    value: float

    def __post_init__(self):
        if not (0.0 <= self.value <= 1.0):
            raise RangeError(f"exposure of {self.occupation} is {self.value!r}, outside [0, 1]")


@dataclass(frozen=True)
class ScopeFilter:
    """A named set of occupations given by exact codes and/or code prefixes.

    The reserved scope ``all`` matches every occupation.
    """
    name: str
    codes: FrozenSet[str] = frozenset()
    prefixes: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if self.name != ALL and not (self.codes or self.prefixes):
            raise InputError(f"scope {self.name!r} has an empty predicate")

    def matches(self, code) -> bool:
        if self.name == ALL:
            return True
        return code in self.codes or any(code.startswith(p) for p in self.prefixes)

    def mask(self, codes) -> np.ndarray:
        return np.fromiter((self.matches(c) for c in codes), dtype=bool, count=len(codes))

    def entries(self) -> List[str]:
        return sorted(self.codes | self.prefixes)


ALL_SCOPE = ScopeFilter(ALL)
SURFACE_SCOPE = ScopeFilter(SURFACE, prefixes=frozenset({"15"}))


def default_scopes() -> Dict[str, ScopeFilter]:
    return {ALL: ALL_SCOPE, SURFACE: SURFACE_SCOPE}


def load_scopes(source) -> Dict[str, ScopeFilter]:
    """Read a scope file; ``all`` is always present and cannot be redefined."""
    df = read_table(source, SCOPE_COLUMNS)
    codes: Dict[str, set] = {}
    prefixes: Dict[str, set] = {}
    for i, (name, entry) in enumerate(zip(df["scope_name"], df["occupation_code_or_prefix"])):
        if name == ALL:
            raise ParseError("scope name 'all' is reserved", source, i + 2)
        if _CODE_RE.match(entry):
            codes.setdefault(name, set()).add(entry)
        elif _PREFIX_RE.match(entry):
            prefixes.setdefault(name, set()).add(entry)
        else:
            raise ParseError(f"{entry!r} is neither an occupation code nor a code prefix",
                             source, i + 2)
    scopes = {ALL: ALL_SCOPE}
    for name in sorted(set(codes) | set(prefixes)):
        scopes[name] = ScopeFilter(name, frozenset(codes.get(name, ())),
                                   frozenset(prefixes.get(name, ())))
    return scopes


@dataclass
class ExposureTable:
    """Exposure of every occupation in a taxonomy, aligned to ``codes``."""
    codes: Tuple[str, ...]
    values: np.ndarray
    zero_weight: List[str] = field(default_factory=list)

    def __post_init__(self):
        self._pos = {c: i for i, c in enumerate(self.codes)}

    def __getitem__(self, code) -> float:
        try:
            return float(self.values[self._pos[code]])
        except KeyError:
            raise NotFoundError(f"no exposure for occupation {code!r}") from None

    def __contains__(self, code):
        return code in self._pos

    def __len__(self):
        return len(self.codes)

    def scores(self) -> List[ExposureScore]:
        return [ExposureScore(c, float(v)) for c, v in zip(self.codes, self.values)]

    def as_dict(self) -> Dict[str, float]:
        return {c: float(v) for c, v in zip(self.codes, self.values)}


def occupation_exposure(matrix: SkillRequirementMatrix, auto: AutomatabilityMap, occupation,
                        weight_policy=None) -> ExposureScore:
    """Weighted mean automatability over the skills ``occupation`` requires.

    An occupation whose skill weights sum to zero gets exposure 0.
    """
    sl = matrix.entry_slice(occupation)
    w = get_weight_policy(weight_policy)(matrix.importance[sl], matrix.level[sl])
    a = auto.vector(matrix.skills)[matrix.skill_idx[sl]]
    total = float(np.sum(w))
    if total == 0.0:
        log.warning("occupation %s has zero total skill weight; exposure set to 0", occupation)
        return ExposureScore(occupation, 0.0)
    return ExposureScore(occupation, float(np.sum(w * a)) / total)


def compute_exposures(matrix: SkillRequirementMatrix, auto: AutomatabilityMap,
                      weight_policy=None, transfer: Optional[Mapping[str, float]] = None
                      ) -> ExposureTable:
    """Exposure of every occupation at once.

    ``transfer`` optionally damps selected occupations by a factor in [0, 1]
    (scenario knob; by default skills transfer fully across occupations).
    """
    w = matrix.entry_weights(weight_policy)
    a = auto.vector(matrix.skills)[matrix.skill_idx]
    n = matrix.n_occupations
    num = np.bincount(matrix.occ_idx, weights=w * a, minlength=n)
    den = np.bincount(matrix.occ_idx, weights=w, minlength=n)
    zero = den == 0.0
    values = np.divide(num, den, out=np.zeros(n), where=~zero)
    codes = tuple(matrix.codes)
    zero_weight = [codes[i] for i in np.flatnonzero(zero)]
    for code in zero_weight:
        log.warning("occupation %s has zero total skill weight; exposure set to 0", code)
    if transfer:
        pos = {c: i for i, c in enumerate(codes)}
        for code, factor in transfer.items():
            if code not in pos:
                raise NotFoundError(f"transfer factor for unknown occupation {code!r}")
            if not (0.0 <= factor <= 1.0):
                raise RangeError(f"transfer factor {factor!r} for {code} outside [0, 1]")
            values[pos[code]] *= factor
    values.setflags(write=False)
    return ExposureTable(codes, values, zero_weight)


@dataclass(frozen=True)
class RegionalIndex:
    region: RegionScope
    scope: str
    index: float
    exposed_wage_value: float
    wage_base: float

    def __post_init__(self):
        if not self.wage_base > 0:
            raise InputError(f"zero wage base for {self.region}")
        if not (0.0 <= self.index <= 1.0):
            raise RangeError(f"index {self.index!r} for {self.region} outside [0, 1]")

    def to_dict(self):
        return {"level": self.region.level, "region": self.region.id or "US",
                "scope": self.scope, "index": self.index,
                "exposed_wage_value": self.exposed_wage_value, "wage_base": self.wage_base}


def _make_index(region, scope, exposed, base):
    # exposure <= 1 per cell, so exposed <= base up to rounding of the two sums
    return RegionalIndex(region, scope, min(exposed / base, 1.0), exposed, base)


def _cell_exposure(exposures, table: EmploymentTable, scope: ScopeFilter) -> np.ndarray:
    """Per-cell exposure (0 outside ``scope``), erroring on uncovered in-scope occupations."""
    occ_in_scope = scope.mask(table.occupations)
    per_occ = np.zeros(len(table.occupations))
    for i in np.flatnonzero(occ_in_scope):
        code = table.occupations[i]
        if code not in exposures:
            raise NotFoundError(f"missing exposure for in-scope occupation {code}")
        per_occ[i] = exposures[code]
    return per_occ[table.occ_idx]


def regional_index(exposures, employment: EmploymentTable, scope: ScopeFilter,
                   region: RegionScope = RegionScope.national()) -> RegionalIndex:
    """Index of one region under one occupation scope."""
    mask = employment.scope_mask(region)
    base = wage_base(employment, region)
    cell = _cell_exposure(exposures, employment, scope)
    exposed = math.fsum((cell[mask] * employment.wage_value[mask]).tolist())
    return _make_index(region, scope.name, exposed, base)


def _county_sums(args):
    exposed, value, bounds = args
    return [(math.fsum(exposed[lo:hi].tolist()), math.fsum(value[lo:hi].tolist()))
            for lo, hi in bounds]


def county_indices(exposures, employment: EmploymentTable, scope: ScopeFilter,
                   workers=1) -> List[RegionalIndex]:
    """Index of every county present in ``employment``, sorted by FIPS.

    Counties are split into contiguous blocks for ``workers`` processes; each
    county's sums are correctly rounded, so results do not depend on the split.
    """
    cell = _cell_exposure(exposures, employment, scope)
    order = np.lexsort((employment.occ_idx, employment.county_idx))
    county = employment.county_idx[order]
    exposed = (cell * employment.wage_value)[order]
    value = employment.wage_value[order]
    n = len(employment.counties)
    starts = np.searchsorted(county, np.arange(n + 1))
    bounds = list(zip(starts[:-1].tolist(), starts[1:].tolist()))

    if workers > 1 and n > 1:
        blocks = np.array_split(np.arange(n), min(workers, n))
        jobs = []
        for blk in blocks:
            lo, hi = starts[blk[0]], starts[blk[-1] + 1]
            jobs.append((exposed[lo:hi], value[lo:hi],
                         [(a - lo, b - lo) for a, b in bounds[blk[0]:blk[-1] + 1]]))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            sums = [s for part in pool.map(_county_sums, jobs) for s in part]
    else:
        sums = _county_sums((exposed, value, bounds))

    out = []
    for fips, (e, b) in zip(employment.counties, sums):
        out.append(_make_index(RegionScope.county(fips), scope.name, e, b))
    return out


def aggregate(county_results: List[RegionalIndex], geography: Geography
              ) -> Tuple[List[RegionalIndex], RegionalIndex]:
    """Roll county results up to states and the nation.

    Parents sum their children's exposed values and wage bases and recompute
    the index from those sums.
    """
    if not county_results:
        raise InputError("nothing to aggregate")
    scopes = {r.scope for r in county_results}
    if len(scopes) > 1:
        raise InputError(f"cannot aggregate mixed scopes {sorted(scopes)}")
    scope = scopes.pop()
    by_state: Dict[str, List[RegionalIndex]] = {}
    for r in county_results:
        if r.region.level != "county":
            raise InputError(f"aggregate expects county results, got {r.region}")
        by_state.setdefault(geography.state_of(r.region.id), []).append(r)
    states = []
    for st in sorted(by_state):
        kids = by_state[st]
        states.append(_make_index(RegionScope.state(st), scope,
                                  math.fsum(k.exposed_wage_value for k in kids),
                                  math.fsum(k.wage_base for k in kids)))
    national = _make_index(RegionScope.national(), scope,
                           math.fsum(s.exposed_wage_value for s in states),
                           math.fsum(s.wage_base for s in states))
    return states, national


def all_levels(exposures, employment: EmploymentTable, scope: ScopeFilter, workers=1):
    """County, state and national indices for one scope."""
    counties = county_indices(exposures, employment, scope, workers=workers)
    states, national = aggregate(counties, employment.geography)
    return counties, states, national


def automation_surprise(surface: RegionalIndex, iceberg: RegionalIndex) -> float:
    """Iceberg index minus Surface index for the same region."""
    if surface.region != iceberg.region:
        raise InputError(f"region mismatch: {surface.region} vs {iceberg.region}")
    return iceberg.index - surface.index
