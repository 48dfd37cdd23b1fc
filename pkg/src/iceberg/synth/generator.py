"""Seeded synthetic datasets in the engine's file formats.

Randomness comes from a single ``numpy.random.Generator`` over the PCG64 bit
generator, seeded with the configured 64-bit seed and consumed in a fixed
order, so a (seed, config) pair always yields byte-identical files.
"""

import json
import math
import os
from importlib import resources
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd

from .._io import write_csv
from ..capability import TOOL_COLUMNS, TOOL_SOURCES, load_tool_catalog
from ..econdata import (EMPLOYMENT_COLUMNS, GEOGRAPHY_COLUMNS, STATE_METRIC_COLUMNS,
                        load_employment, load_geography, load_state_metrics)
from ..errors import InputError
from ..taxonomy import SKILL_CATEGORIES, TAXONOMY_COLUMNS, load_taxonomy
from ..validation import (TIER_COLUMNS, TRANSITION_COLUMNS, default_tier_sizes, load_tiers,
                          load_transitions, rank_to_tiers)

RNG_ALGORITHM = "numpy.random.PCG64"

FILES = {
    "taxonomy": "taxonomy.csv",
    "tools": "tools.csv",
    "employment": "employment.csv",
    "geography": "geography.csv",
    "state_metrics": "state_metrics.csv",
    "transitions": "transitions.csv",
    "external_tiers": "external_tiers.csv",
}
MANIFEST = "manifest.json"

# USPS codes for the 50 states, DC and Puerto Rico
STATE_CODES = (
    "AK", "AL", "AR", "AZ", "CA", "CO", "CT", "DC", "DE", "FL", "GA", "HI", "IA", "ID",
    "IL", "IN", "KS", "KY", "LA", "MA", "MD", "ME", "MI", "MN", "MO", "MS", "MT", "NC",
    "ND", "NE", "NH", "NJ", "NM", "NV", "NY", "OH", "OK", "OR", "PA", "PR", "RI", "SC",
    "SD", "TN", "TX", "UT", "VA", "VT", "WA", "WI", "WV", "WY",
)
MAJOR_GROUPS = ("11", "13", "15", "17", "19", "21", "23", "25", "27", "29", "31", "33",
                "35", "37", "39", "41", "43", "45", "47", "49", "51", "53")
TECH_GROUP = "15"
SKILLS_PER_OCCUPATION = (3, 15)
TOP_DECILE_SHARE = 0.7


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 42
    n_occupations: int = 50
    n_skills: int = 120
    n_tools: int = 200
    n_counties: int = 30
    n_states: int = 5
    n_industries: int = 8
    wage_range: Tuple[float, float] = (25000.0, 150000.0)
    employment_range: Tuple[float, float] = (1.0, 500.0)
    # fraction of (occupation, county) cells that carry a record
    density: float = 1.0
    # defaults to n_occupations
    n_transitions: int = field(default=-1)

    def validate(self):
        for name in ("n_occupations", "n_skills", "n_tools", "n_counties", "n_states",
                     "n_industries"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")
        if not (0 <= self.seed < 2 ** 64):
            raise InputError("seed must fit in 64 bits")
        if self.n_states > self.n_counties:
            raise InputError(f"infeasible config: {self.n_states} states but only "
                             f"{self.n_counties} counties")
        if self.n_states > len(STATE_CODES):
            raise InputError(f"at most {len(STATE_CODES)} states are supported")
        if self.n_skills < SKILLS_PER_OCCUPATION[0]:
            raise InputError(f"need at least {SKILLS_PER_OCCUPATION[0]} skills")
        if self.n_skills > self.n_occupations * SKILLS_PER_OCCUPATION[1]:
            raise InputError(f"infeasible config: {self.n_skills} skills cannot all be "
                             f"required by {self.n_occupations} occupations")
        if self.n_occupations > len(MAJOR_GROUPS) * 9000:
            raise InputError("too many occupations for the code space")
        for name in ("wage_range", "employment_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi and math.isfinite(hi)):
                raise InputError(f"{name} must be a nonempty positive interval")
        if not (0 < self.density <= 1):
            raise InputError("density must lie in (0, 1]")
        return self

    @property
    def transitions(self):
        return self.n_occupations if self.n_transitions < 0 else self.n_transitions


class SyntheticDataset:
    """A generated dataset directory plus its manifest."""

    def __init__(self, directory):
        self.directory = Path(directory)
        with open(self.directory / MANIFEST, encoding="utf-8") as fh:
            self.manifest = json.load(fh)
        self._oracle_cache = None

    def path(self, kind) -> Path:
        return self.directory / FILES[kind]

    def load_taxonomy(self):
        return load_taxonomy(self.path("taxonomy"))

    def load_tool_catalog(self):
        return load_tool_catalog(self.path("tools"))

    def load_geography(self):
        return load_geography(self.path("geography"))

    def load_employment(self, geography=None):
        return load_employment(self.path("employment"), geography or self.load_geography())

    def load_state_metrics(self):
        return load_state_metrics(self.path("state_metrics"))

    def load_transitions(self, known=None):
        return load_transitions(self.path("transitions"), known)

    def load_external_tiers(self):
        return load_tiers(self.path("external_tiers"))

    def __repr__(self):
        return f"SyntheticDataset({str(self.directory)!r})"


def _money(x):
    return f"{x:.2f}"


def generate(config: SynthConfig, directory) -> SyntheticDataset:
    """Write a synthetic dataset for ``config`` into ``directory``."""
    config.validate()
    rng = np.random.Generator(np.random.PCG64(config.seed))
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    n_occ, n_sk = config.n_occupations, config.n_skills

    # -- skills
    skill_ids = [f"SK{j:05d}" for j in range(n_sk)]
    skill_cat = [SKILL_CATEGORIES[j % 3] for j in range(n_sk)]

    # -- occupations: first one is always a technology occupation
    groups = rng.choice(len(MAJOR_GROUPS), size=n_occ)
    groups[0] = MAJOR_GROUPS.index(TECH_GROUP)
    per_group = {}
    codes = []
    for g in groups.tolist():
        k = per_group.get(g, 0)
        per_group[g] = k + 1
        codes.append(f"{MAJOR_GROUPS[g]}-{1011 + k:04d}")
    industries = [f"IND{i + 1:02d}" for i in range(config.n_industries)]
    home_industry = rng.integers(config.n_industries, size=len(MAJOR_GROUPS))
    stray = rng.random(n_occ) < 0.3
    stray_ind = rng.integers(config.n_industries, size=n_occ)
    occ_industry = [industries[stray_ind[i] if stray[i] else home_industry[groups[i]]]
                    for i in range(n_occ)]

    # -- requirements: ~60% of each occupation's skills come from its group's pool
    pool_size = min(20, n_sk)
    pools = [rng.choice(n_sk, size=pool_size, replace=False) for _ in MAJOR_GROUPS]
    lo_k, hi_k = SKILLS_PER_OCCUPATION
    chosen = []
    for i in range(n_occ):
        k = int(rng.integers(lo_k, min(hi_k, n_sk) + 1))
        n_core = min(int(round(0.6 * k)), pool_size)
        core = rng.choice(pools[groups[i]], size=n_core, replace=False)
        rest_pool = np.setdiff1d(np.arange(n_sk), core)
        rest = rng.choice(rest_pool, size=k - n_core, replace=False)
        chosen.append(set(core.tolist()) | set(rest.tolist()))
    # every declared skill must be required somewhere so the taxonomy carries all of them
    used = set().union(*chosen)
    for s in range(n_sk):
        if s in used:
            continue
        room = [i for i in range(n_occ) if len(chosen[i]) < hi_k]
        chosen[room[int(rng.integers(len(room)))]].add(s)
    req_rows = []
    weights = np.zeros((n_occ, n_sk))
    for i in range(n_occ):
        skills = sorted(chosen[i])
        imp = np.round(rng.uniform(1.0, 5.0, size=len(skills)), 2)
        lev = np.round(rng.uniform(0.1, 7.0, size=len(skills)), 2)
        for s, a, b in zip(skills, imp.tolist(), lev.tolist()):
            req_rows.append((codes[i], f"Occupation {codes[i]}", occ_industry[i],
                             skill_ids[s], f"Skill {s}", skill_cat[s], f"{a:.2f}", f"{b:.2f}"))
            weights[i, s] = a * b

    # -- tools: only a "digital" half of the skill space is reachable by tools
    digital = rng.choice(n_sk, size=max(1, n_sk // 2), replace=False)
    tool_rows = []
    for t in range(config.n_tools):
        k = int(rng.integers(1, min(5, len(digital)) + 1))
        skills = np.sort(rng.choice(digital, size=k, replace=False))
        conf = np.round(rng.uniform(0.0, 1.0, size=k), 3)
        for s, c in zip(skills.tolist(), conf.tolist()):
            tool_rows.append((f"T{t:05d}", f"Tool {t}", TOOL_SOURCES[t % 3],
                              skill_ids[s], f"{c:.3f}"))

    # -- geography
    states = STATE_CODES[:config.n_states]
    county_state = np.concatenate([np.arange(config.n_states),
                                   rng.integers(config.n_states,
                                                size=config.n_counties - config.n_states)])
    seq = [0] * config.n_states
    fips = []
    for st in county_state.tolist():
        seq[st] += 1
        fips.append(f"{st + 1:02d}{2 * seq[st] - 1:03d}")
    geo_rows = sorted(zip(fips, (states[s] for s in county_state.tolist())))

    # -- employment
    emp_lo, emp_hi = config.employment_range
    wage_lo, wage_hi = config.wage_range
    occ_wage = rng.uniform(wage_lo, wage_hi, size=n_occ)
    county_factor = rng.uniform(0.8, 1.2, size=config.n_counties)
    wage = np.clip(np.outer(occ_wage, county_factor), wage_lo, wage_hi).round(2)
    emp = rng.integers(math.ceil(emp_lo), math.floor(emp_hi) + 1,
                       size=(n_occ, config.n_counties))
    keep = rng.random((n_occ, config.n_counties)) < config.density
    # every county keeps at least one cell so its wage base is positive
    keep[rng.integers(n_occ, size=config.n_counties), np.arange(config.n_counties)] = True
    order_occ = np.argsort(np.array(codes))
    order_cty = np.argsort(np.array(fips))
    keep = keep[order_occ][:, order_cty]
    emp = emp[order_occ][:, order_cty]
    wage = wage[order_occ][:, order_cty]
    oi, ci = np.nonzero(keep)
    emp_df = pd.DataFrame({
        "occupation_code": np.array(codes)[order_occ][oi],
        "county_fips": np.array(fips)[order_cty][ci],
        "employment": emp[oi, ci],
        "median_wage": wage[oi, ci],
    })
    total_employment = int(emp_df["employment"].sum())

    # -- state metrics, independent of everything above
    gdp = np.round(np.exp(rng.normal(np.log(2e11), 1.0, size=config.n_states)), 0)
    income = np.round(rng.uniform(40000, 90000, size=config.n_states), 2)
    unemp = np.round(rng.uniform(0.02, 0.08, size=config.n_states), 4)
    metric_rows = [(st, f"{g:.0f}", _money(inc), f"{u:.4f}")
                   for st, g, inc, u in zip(states, gdp, income, unemp)]

    # -- transitions: 70% from the top decile of similarity, rest uniform
    trans_rows = []
    n_pairs = n_occ * (n_occ - 1) // 2
    if n_pairs:
        norms = np.linalg.norm(weights, axis=1)
        unit = weights / np.where(norms > 0, norms, 1.0)[:, None]
        iu, ju = np.triu_indices(n_occ, k=1)
        sims = (unit @ unit.T)[iu, ju]
        n_edges = min(config.transitions, n_pairs)
        top = np.argsort(-sims, kind="stable")[:max(1, math.ceil(0.1 * n_pairs))]
        n_top = min(int(round(TOP_DECILE_SHARE * n_edges)), len(top))
        picked = set(rng.choice(top, size=n_top, replace=False).tolist())
        rest = np.setdiff1d(np.arange(n_pairs), np.fromiter(picked, dtype=np.int64))
        picked.update(rng.choice(rest, size=n_edges - n_top, replace=False).tolist())
        pairs = sorted(tuple(sorted((codes[iu[p]], codes[ju[p]]))) for p in picked)
        trans_rows = pairs

    # -- external adoption tiers from a noisy usage signal
    usage = rng.random(config.n_states)
    tiers = rank_to_tiers(dict(zip(states, usage.tolist())),
                          default_tier_sizes(config.n_states))

    req_rows.sort(key=lambda r: (r[0], r[3]))
    write_csv(out / FILES["taxonomy"], TAXONOMY_COLUMNS, req_rows)
    write_csv(out / FILES["tools"], TOOL_COLUMNS, tool_rows)
    write_csv(out / FILES["geography"], GEOGRAPHY_COLUMNS, geo_rows)
    tmp = out / (FILES["employment"] + f".tmp{os.getpid()}")
    emp_df.to_csv(tmp, index=False, float_format="%.2f", lineterminator="\n",
                  columns=list(EMPLOYMENT_COLUMNS))
    os.replace(tmp, out / FILES["employment"])
    write_csv(out / FILES["state_metrics"], STATE_METRIC_COLUMNS, metric_rows)
    write_csv(out / FILES["transitions"], TRANSITION_COLUMNS, trans_rows)
    write_csv(out / FILES["external_tiers"], TIER_COLUMNS, tiers.items())

    manifest = {
        "generator": RNG_ALGORITHM,
        "config": asdict(config),
        "files": dict(FILES),
        "n_occupations": n_occ,
        "n_skills": n_sk,
        "n_requirements": len(req_rows),
        "n_tools": config.n_tools,
        "n_tool_edges": len(tool_rows),
        "n_counties": config.n_counties,
        "n_states": config.n_states,
        "n_industries": len(set(occ_industry)),
        "n_employment_records": len(emp_df),
        "total_employment": total_employment,
        "n_transitions": len(trans_rows),
        "tier_sizes": list(default_tier_sizes(config.n_states)),
    }
    with open(out / MANIFEST, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return SyntheticDataset(out)


BUNDLED = {"synth_seed42": SynthConfig(seed=42)}


def bundled(name="synth_seed42") -> SyntheticDataset:
    """A dataset shipped with the package (regenerable from ``BUNDLED[name]``)."""
    if name not in BUNDLED:
        raise InputError(f"no bundled dataset {name!r}; have {sorted(BUNDLED)}")
    return SyntheticDataset(Path(str(resources.files("iceberg") / "data" / name)))
