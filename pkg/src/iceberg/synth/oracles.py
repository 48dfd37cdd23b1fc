"""Naive reference computations over a dataset directory.

These re-read the raw CSV files with the :mod:`csv` module and evaluate each
quantity straight from its definition with plain loops.  Nothing here calls
the engine's loaders or aggregation code; the only shared pieces are the
domain types (:class:`ScopeFilter`, :class:`RegionScope`).
"""

import csv
import math

from ..econdata import RegionScope
from ..errors import InputError, NotFoundError
from ..index import ALL_SCOPE, SURFACE_SCOPE, ScopeFilter
from .generator import FILES


class _Raw:
    def __init__(self, directory):
        def rows(kind):
            with open(directory / FILES[kind], newline="", encoding="utf-8") as fh:
                return list(csv.DictReader(fh))

        self.requirements = {}
        self.industry = {}
        for r in rows("taxonomy"):
            self.requirements.setdefault(r["occupation_code"], []).append(
                (r["skill_id"], float(r["importance"]), float(r["level"])))
            self.industry[r["occupation_code"]] = r["industry"]
        self.tool_conf = {}
        for r in rows("tools"):
            self.tool_conf.setdefault(r["skill_id"], []).append(float(r["confidence"]))
        self.county_state = {r["county_fips"]: r["state"] for r in rows("geography")}
        self.employment = [(r["occupation_code"], r["county_fips"], int(float(r["employment"])),
                            float(r["median_wage"])) for r in rows("employment")]


def _raw(dataset):
    if getattr(dataset, "_oracle_cache", None) is None:
        dataset._oracle_cache = _Raw(dataset.directory)
    return dataset._oracle_cache


def _automatability(raw, skill, reduction, tau):
    confs = raw.tool_conf.get(skill, [])
    if not confs:
        return 0.0
    if reduction == "max":
        best = 0.0
        for c in confs:
            if c > best:
                best = c
        return best
    for c in confs:
        if c >= tau:
            return 1.0
    return 0.0


def oracle_exposure(dataset, occupation, reduction="max", tau=0.5):
    """sum(importance * level * a) / sum(importance * level) over required skills."""
    raw = _raw(dataset)
    if occupation not in raw.requirements:
        raise NotFoundError(f"unknown occupation {occupation!r}")
    num = 0.0
    den = 0.0
    for skill, imp, lev in raw.requirements[occupation]:
        w = imp * lev
        num += w * _automatability(raw, skill, reduction, tau)
        den += w
    return num / den if den else 0.0


def _in_region(raw, county, region):
    if region.level == "national":
        return True
    if region.level == "county":
        return county == region.id
    return raw.county_state[county] == region.id


def oracle_regional_index(dataset, scope=ALL_SCOPE, region=RegionScope.national(),
                          reduction="max", tau=0.5):
    """Exposed wage value of in-scope cells over the region's full wage base."""
    raw = _raw(dataset)
    if isinstance(scope, str):
        scope = {"all": ALL_SCOPE, "surface": SURFACE_SCOPE}[scope]
    if isinstance(region, tuple):
        region = RegionScope(*region)
    exposure = {}
    exposed = 0.0
    base = 0.0
    for occ, county, emp, wage in raw.employment:
        if not _in_region(raw, county, region):
            continue
        value = emp * wage
        base += value
        if scope.matches(occ):
            if occ not in exposure:
                exposure[occ] = oracle_exposure(dataset, occ, reduction, tau)
            exposed += exposure[occ] * value
    if base == 0:
        raise InputError(f"zero wage base for {region}")
    return exposed / base


def oracle_exposed_value(dataset, scope=ALL_SCOPE, region=RegionScope.national()):
    raw = _raw(dataset)
    total = 0.0
    for occ, county, emp, wage in raw.employment:
        if _in_region(raw, county, region) and scope.matches(occ):
            total += oracle_exposure(dataset, occ) * emp * wage
    return total


def oracle_hhi(dataset, state):
    """10000 * sum of squared industry shares of the state's exposed wage value."""
    raw = _raw(dataset)
    by_industry = {}
    for occ, county, emp, wage in raw.employment:
        if raw.county_state[county] != state:
            continue
        ind = raw.industry[occ]
        by_industry[ind] = by_industry.get(ind, 0.0) + oracle_exposure(dataset, occ) * emp * wage
    total = sum(by_industry.values())
    if total <= 0:
        raise InputError(f"state {state} has no exposed value")
    return 10000.0 * sum((v / total) ** 2 for v in by_industry.values())


def oracle_similarity(dataset, pair):
    """Cosine of the two occupations' importance*level skill vectors."""
    raw = _raw(dataset)
    a, b = pair
    for code in (a, b):
        if code not in raw.requirements:
            raise NotFoundError(f"unknown occupation {code!r}")
    va = {s: i * l for s, i, l in raw.requirements[a]}
    vb = {s: i * l for s, i, l in raw.requirements[b]}
    dot = 0.0
    for s in va:
        if s in vb:
            dot += va[s] * vb[s]
    na = math.sqrt(sum(x * x for x in va.values()))
    nb = math.sqrt(sum(x * x for x in vb.values()))
    if na == 0 or nb == 0:
        raise InputError("zero skill vector")
    return dot / (na * nb)
