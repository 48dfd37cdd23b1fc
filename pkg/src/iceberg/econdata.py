"""Employment, wage, geography, and state-metric tables.

All dollar sums go through :func:`math.fsum`, which is correctly rounded and
therefore independent of summation order; parent totals equal the sum of
child totals to within one rounding of the final result.
"""

import math
import re
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from ._io import fmt_float, read_table, write_csv
from .errors import DuplicateError, InputError, NotFoundError, ParseError, RangeError

EMPLOYMENT_COLUMNS = ("occupation_code", "county_fips", "employment", "median_wage")
GEOGRAPHY_COLUMNS = ("county_fips", "state")
STATE_METRIC_COLUMNS = ("state", "gdp", "per_capita_income", "unemployment_rate")
METRIC_NAMES = STATE_METRIC_COLUMNS[1:]

_FIPS_RE = re.compile(r"^\d{5}$")


@dataclass(frozen=True)
class Region:
    county_fips: str
    state: str


@dataclass(frozen=True)
class EmploymentRecord:
    occupation: str
    region: str
    employment: int
    median_wage: float


@dataclass(frozen=True)
class StateMetrics:
    state: str
    gdp: float
    per_capita_income: float
    unemployment_rate: float


@dataclass(frozen=True)
class RegionScope:
    """A geographic filter: one county, one state, or the whole nation."""
    level: str
    id: Optional[str] = None

    def __post_init__(self):
        if self.level not in ("county", "state", "national"):
            raise InputError(f"unknown region level {self.level!r}")
        if (self.level == "national") != (self.id is None):
            raise InputError(f"region level {self.level!r} with id {self.id!r}")

    @classmethod
    def county(cls, fips):
        return cls("county", fips)

    @classmethod
    def state(cls, code):
        return cls("state", code)

    @classmethod
    def national(cls):
        return cls("national")

    def __str__(self):
        return "national" if self.id is None else f"{self.level}:{self.id}"


class Geography:
    """County FIPS -> state mapping."""

    def __init__(self, regions):
        regions = sorted(regions, key=lambda r: r.county_fips)
        self.county_state: Dict[str, str] = {}
        for r in regions:
            if not _FIPS_RE.match(r.county_fips):
                raise InputError(f"county FIPS {r.county_fips!r} is not 5 digits")
            if not r.state:
                raise InputError(f"county {r.county_fips} has an empty state")
            if r.county_fips in self.county_state:
                raise DuplicateError(f"county {r.county_fips} listed twice")
            self.county_state[r.county_fips] = r.state
        self.counties: Tuple[str, ...] = tuple(self.county_state)
        self.states: Tuple[str, ...] = tuple(sorted(set(self.county_state.values())))

    def state_of(self, fips):
        try:
            return self.county_state[fips]
        except KeyError:
            raise NotFoundError(f"county {fips!r} not in geography") from None

    def regions(self):
        return [Region(c, s) for c, s in self.county_state.items()]

    def to_csv(self, path):
        write_csv(path, GEOGRAPHY_COLUMNS, self.county_state.items())

    def __eq__(self, other):
        return isinstance(other, Geography) and self.county_state == other.county_state

    def __len__(self):
        return len(self.county_state)


class EmploymentTable:
    """Employment and median wage per (occupation, county) cell.

    Cells are stored as parallel arrays sorted by occupation code then FIPS.
    Missing cells mean zero employment.
    """

    def __init__(self, geography: Geography, occupations, counties, occ_idx, county_idx,
                 employment, median_wage):
        self.geography = geography
        self.occupations: Tuple[str, ...] = tuple(occupations)
        self.counties: Tuple[str, ...] = tuple(counties)
        self.occ_idx = np.asarray(occ_idx, dtype=np.int64)
        self.county_idx = np.asarray(county_idx, dtype=np.int64)
        self.employment = np.asarray(employment, dtype=np.int64)
        self.median_wage = np.asarray(median_wage, dtype=np.float64)
        if np.any(self.employment < 0) or np.any(self.median_wage < 0):
            raise RangeError("employment and median wage must be nonnegative")
        if list(self.occupations) != sorted(set(self.occupations)):
            raise InputError("occupations must be sorted and unique")
        if list(self.counties) != sorted(set(self.counties)):
            raise InputError("counties must be sorted and unique")
        key = self.occ_idx * max(len(self.counties), 1) + self.county_idx
        if len(key) > 1 and not np.all(np.diff(key) > 0):
            raise InputError("cells must be sorted and unique by (occupation, county)")
        self.cell_state_idx = np.array(
            [geography.states.index(geography.state_of(c)) for c in self.counties],
            dtype=np.int64)[self.county_idx] if len(self.counties) else np.zeros(0, np.int64)
        self.wage_value = self.employment.astype(np.float64) * self.median_wage
        for arr in (self.occ_idx, self.county_idx, self.employment, self.median_wage,
                    self.cell_state_idx, self.wage_value):
            arr.setflags(write=False)

    @classmethod
    def from_records(cls, records, geography: Geography):
        records = list(records)
        seen = set()
        for r in records:
            if r.employment < 0 or r.median_wage < 0 or not math.isfinite(r.median_wage):
                raise RangeError(f"record ({r.occupation}, {r.region}) has negative or "
                                 f"non-finite values")
            geography.state_of(r.region)
            if (r.occupation, r.region) in seen:
                raise DuplicateError(f"duplicate record ({r.occupation}, {r.region})")
            seen.add((r.occupation, r.region))
        records.sort(key=lambda r: (r.occupation, r.region))
        occs = sorted({r.occupation for r in records})
        counties = sorted({r.region for r in records})
        op = {c: i for i, c in enumerate(occs)}
        cp = {c: i for i, c in enumerate(counties)}
        return cls(geography, occs, counties,
                   [op[r.occupation] for r in records], [cp[r.region] for r in records],
                   [r.employment for r in records], [r.median_wage for r in records])

    @property
    def states(self):
        present = {self.geography.county_state[c] for c in self.counties}
        return tuple(s for s in self.geography.states if s in present)

    @property
    def total_employment(self) -> int:
        return int(self.employment.sum())

    def __len__(self):
        return len(self.occ_idx)

    def records(self):
        for o, c, e, w in zip(self.occ_idx, self.county_idx, self.employment, self.median_wage):
            yield EmploymentRecord(self.occupations[o], self.counties[c], int(e), float(w))

    def scope_mask(self, scope: RegionScope) -> np.ndarray:
        if scope.level == "national":
            return np.ones(len(self), dtype=bool)
        if scope.level == "county":
            if scope.id not in self.geography.county_state:
                raise NotFoundError(f"county {scope.id!r} not in geography")
            try:
                ci = self.counties.index(scope.id)
            except ValueError:
                return np.zeros(len(self), dtype=bool)
            return self.county_idx == ci
        if scope.id not in self.geography.states:
            raise NotFoundError(f"state {scope.id!r} not in geography")
        return self.cell_state_idx == self.geography.states.index(scope.id)

    def to_csv(self, path):
        rows = ((self.occupations[o], self.counties[c], str(int(e)), fmt_float(w))
                for o, c, e, w in zip(self.occ_idx, self.county_idx,
                                      self.employment, self.median_wage))
        write_csv(path, EMPLOYMENT_COLUMNS, rows)

    def __eq__(self, other):
        if not isinstance(other, EmploymentTable):
            return NotImplemented
        return (self.geography == other.geography and self.occupations == other.occupations
                and self.counties == other.counties
                and all(np.array_equal(getattr(self, a), getattr(other, a))
                        for a in ("occ_idx", "county_idx", "employment", "median_wage")))

    def __repr__(self):
        return (f"EmploymentTable({len(self)} cells, {len(self.occupations)} occupations, "
                f"{len(self.counties)} counties)")


def load_geography(source) -> Geography:
    df = read_table(source, GEOGRAPHY_COLUMNS)
    fips = df["county_fips"].to_numpy()
    for i, f in enumerate(fips):
        if not _FIPS_RE.match(f):
            raise ParseError(f"county FIPS {f!r} is not 5 digits", source, i + 2)
    dup = df.duplicated("county_fips").to_numpy()
    if dup.any():
        i = int(np.flatnonzero(dup)[0])
        raise DuplicateError(f"{source}:{i + 2}: county {fips[i]} listed twice")
    return Geography(Region(c, s) for c, s in zip(fips, df["state"]))


def load_employment(source, geography: Geography) -> EmploymentTable:
    """Load the employment file; every county must resolve through ``geography``."""
    df = read_table(source, EMPLOYMENT_COLUMNS, numeric=("employment", "median_wage"))
    emp = df["employment"].to_numpy()
    wage = df["median_wage"].to_numpy()
    for name, vals in (("employment", emp), ("median_wage", wage)):
        bad = np.flatnonzero(vals < 0)
        if bad.size:
            i = int(bad[0])
            raise RangeError(f"{source}:{i + 2}: {name} {float(vals[i])!r} is negative")
    bad = np.flatnonzero(emp != np.floor(emp))
    if bad.size:
        i = int(bad[0])
        raise ParseError(f"employment {emp[i]!r} is not a whole number", source, i + 2)

    occ_codes, occ_idx = np.unique(df["occupation_code"].to_numpy(), return_inverse=True)
    fips, county_idx = np.unique(df["county_fips"].to_numpy(), return_inverse=True)
    for c in fips:
        if c not in geography.county_state:
            raise NotFoundError(f"{source}: county {c!r} does not resolve to a state "
                                f"in the geography file")
    key = occ_idx.astype(np.int64) * len(fips) + county_idx
    order = np.argsort(key, kind="stable")
    key = key[order]
    dup = np.flatnonzero(np.diff(key) == 0)
    if dup.size:
        i = int(order[dup[0] + 1])
        raise DuplicateError(f"{source}:{i + 2}: duplicate record "
                             f"({df['occupation_code'].iat[i]}, {df['county_fips'].iat[i]})")
    return EmploymentTable(geography, occ_codes.tolist(), fips.tolist(),
                           occ_idx[order], county_idx[order],
                           emp[order].astype(np.int64), wage[order])


def load_state_metrics(source) -> Dict[str, StateMetrics]:
    df = read_table(source, STATE_METRIC_COLUMNS,
                    numeric=("gdp", "per_capita_income", "unemployment_rate"))
    out = {}
    for i, row in enumerate(df.itertuples(index=False, name=None)):
        m = StateMetrics(*row)
        if not (0.0 <= m.unemployment_rate <= 1.0):
            raise RangeError(f"{source}:{i + 2}: state {m.state} unemployment_rate "
                             f"{m.unemployment_rate!r} outside [0, 1]")
        if m.state in out:
            raise DuplicateError(f"{source}:{i + 2}: state {m.state} listed twice")
        out[m.state] = m
    return dict(sorted(out.items()))


def wage_base(table: EmploymentTable, scope: RegionScope = RegionScope.national()) -> float:
    """Total employment x median wage over the cells in ``scope``."""
    mask = table.scope_mask(scope)
    if not mask.any():
        raise InputError(f"wage base of {scope} is over an empty scope")
    total = math.fsum(table.wage_value[mask].tolist())
    if total <= 0:
        raise InputError(f"wage base of {scope} is zero")
    return total
