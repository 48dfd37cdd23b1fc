"""Acceptance criteria 1-10.

Each test records one PASS/FAIL line (shown in the terminal summary, and on
stdout with ``-s``) before asserting, so a failing criterion still reports
what it measured.
"""

import json
import math
import resource
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from iceberg.capability import ToolSkillEdge, capability_profile
from iceberg.cli import main
from iceberg.concentration import (MOST_CONCENTRATED, MOST_DISTRIBUTED, hhi, hhi_tier,
                                   industry_shares, round_half_up, state_concentration)
from iceberg.econdata import (EmploymentRecord, EmploymentTable, Geography, Region, RegionScope,
                              wage_base)
from iceberg.index import (ALL_SCOPE, SURFACE_SCOPE, all_levels, automation_surprise,
                           compute_exposures, regional_index)
from iceberg.synth import (SynthConfig, generate, oracle_exposure, oracle_hhi,
                           oracle_regional_index, oracle_similarity)
from iceberg.taxonomy import Occupation, Skill, SkillRequirement, build_matrix
from iceberg.validation import pairwise_similarity, regress, tier_agreement, LEADING, ASPIRING, \
    EMERGING

from conftest import ACCEPTANCE
from test_validation import fifty_two_state_fixture

SEEDS = range(1, 101)


def report(n, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {title} ({detail})"
    ACCEPTANCE.append((n, line))
    print(line)
    return ok


def rel_err(got, want):
    if want == 0:
        return abs(got)
    return abs(got - want) / abs(want)


@pytest.fixture(scope="module")
def hundred(tmp_path_factory):
    t0 = time.perf_counter()
    root = tmp_path_factory.mktemp("seeds")
    sets = [generate(SynthConfig(seed=s), root / f"s{s}") for s in SEEDS]
    return sets, time.perf_counter() - t0


def test_01_oracle_equivalence(hundred):
    datasets, gen_seconds = hundred
    t0 = time.perf_counter()
    worst = {"exposure": 0.0, "index": 0.0, "hhi": 0.0, "similarity": 0.0}
    for ds in datasets:
        m, t = ds.load_taxonomy(), ds.load_employment()
        ex = compute_exposures(m, capability_profile(ds.load_tool_catalog()))
        for code in m.codes:
            worst["exposure"] = max(worst["exposure"], rel_err(ex[code], oracle_exposure(ds, code)))
        for scope in (ALL_SCOPE, SURFACE_SCOPE):
            for region in [RegionScope.national(), *map(RegionScope.state, t.states)]:
                got = regional_index(ex, t, scope, region).index
                worst["index"] = max(worst["index"],
                                     rel_err(got, oracle_regional_index(ds, scope, region)))
        industry_of = {o.code: o.industry for o in m.occupations}
        for rec in state_concentration(ex, t, industry_of):
            worst["hhi"] = max(worst["hhi"], rel_err(rec["hhi"], oracle_hhi(ds, rec["state"])))
        sims = pairwise_similarity(m)
        for (a, b), v in sims:
            worst["similarity"] = max(worst["similarity"], rel_err(v, oracle_similarity(ds, (a, b))))
    total = gen_seconds + time.perf_counter() - t0
    ok = all(v <= 1e-9 for v in worst.values()) and total < 60
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f"; {total:.1f}s for 100 seeds"
    assert report(1, "engine matches naive oracles", ok, detail)


def test_02_conservation(hundred):
    datasets, _ = hundred
    worst = 0.0
    for ds in datasets:
        m, t = ds.load_taxonomy(), ds.load_employment()
        ex = compute_exposures(m, capability_profile(ds.load_tool_catalog()))
        geo = t.geography
        for scope in (ALL_SCOPE, SURFACE_SCOPE):
            counties, states, nat = all_levels(ex, t, scope)
            for total in (math.fsum(c.exposed_wage_value for c in counties),
                          math.fsum(s.exposed_wage_value for s in states)):
                worst = max(worst, rel_err(total, nat.exposed_wage_value))
            for s in states:
                kids = [c.exposed_wage_value for c in counties
                        if geo.county_state[c.region.id] == s.region.id]
                worst = max(worst, rel_err(math.fsum(kids), s.exposed_wage_value))
        base = wage_base(t)
        state_bases = [wage_base(t, RegionScope.state(s)) for s in t.states]
        county_bases = [wage_base(t, RegionScope.county(c)) for c in t.counties]
        worst = max(worst, rel_err(math.fsum(state_bases), base),
                    rel_err(math.fsum(county_bases), base))
    assert report(2, "county = state = national exposed value and wage base",
                  worst <= 1e-9, f"max relative gap {worst:.1e}")


def _economy(cells, automated):
    """Engine inputs for a hand-built economy.

    ``cells`` are (occupation, fips, state, employment, wage); occupations in
    ``automated`` need only a skill that a tool fully covers, the rest only a
    skill no tool touches.
    """
    occs = sorted({c[0] for c in cells})
    matrix = build_matrix(
        [Occupation(o, o, "IND") for o in occs],
        [Skill("AUTO", "auto", "skill"), Skill("MANUAL", "manual", "skill")],
        [SkillRequirement(o, "AUTO" if o in automated else "MANUAL", 4.0, 5.0) for o in occs])
    auto = capability_profile([ToolSkillEdge("T1", "AUTO", 1.0)])
    ex = compute_exposures(matrix, auto)
    geo = Geography({Region(f, s) for _, f, s, _, _ in cells})
    table = EmploymentTable.from_records([EmploymentRecord(o, f, e, w)
                                          for o, f, _, e, w in cells], geo)
    return ex, table


# $9.4T wage base split as $211B of technology work plus the rest, $100k median wage
NATIONAL = [
    ("15-1252", "01001", "AL", 2_110_000, 100_000.0),
    ("43-4051", "01001", "AL", 8_888_000, 100_000.0),
    ("51-2092", "06001", "CA", 83_002_000, 100_000.0),
]


def test_03_surface_fixture():
    ex, t = _economy(NATIONAL, {"15-1252", "43-4051"})
    r = regional_index(ex, t, SURFACE_SCOPE)
    exact = Fraction(211_000_000_000, 9_400_000_000_000)
    pct = r.index * 100
    ok = (r.exposed_wage_value == 211e9 and r.wage_base == 9.4e12
          and r.index == float(exact) and round(pct, 3) == 2.245 and round(pct, 1) == 2.2)
    assert report(3, "Surface fixture 211B / 9.4T", ok,
                  f"index {pct:.4f}% -> {round(pct, 3)}% -> {round(pct, 1)}%")


def test_04_iceberg_fixture():
    ex, t = _economy(NATIONAL, {"15-1252", "43-4051"})
    r = regional_index(ex, t, ALL_SCOPE)
    exposed_from_index = 0.117 * 9.4e12
    ok = (r.index == 0.117 and r.exposed_wage_value == 1.0998e12
          and math.isclose(exposed_from_index, 1.0998e12, rel_tol=1e-12)
          and abs(r.exposed_wage_value / 1.2e12 - 1) <= 0.10)
    assert report(4, "Iceberg fixture 11.7% of 9.4T", ok,
                  f"index {r.index * 100:.1f}%, exposed ${r.exposed_wage_value / 1e12:.4f}T, "
                  f"{(r.exposed_wage_value / 1.2e12 - 1) * 100:+.1f}% vs $1.2T")


def test_05_surprise_fixture():
    # Tennessee: $100B base, $1.3B technology exposure, $10.3B elsewhere
    ex, t = _economy([("15-1252", "47001", "TN", 13_000, 100_000.0),
                      ("43-4051", "47001", "TN", 103_000, 100_000.0),
                      ("51-2092", "47003", "TN", 884_000, 100_000.0)],
                     {"15-1252", "43-4051"})
    tn = RegionScope.state("TN")
    surface = regional_index(ex, t, SURFACE_SCOPE, tn)
    iceberg = regional_index(ex, t, ALL_SCOPE, tn)
    gap_pp = automation_surprise(surface, iceberg) * 100
    exact_pp = (Fraction(iceberg.exposed_wage_value) - Fraction(surface.exposed_wage_value)) \
        / Fraction(iceberg.wage_base) * 100
    ratio = iceberg.index / surface.index
    ok = (surface.index == 0.013 and iceberg.index == 0.116 and exact_pp == Fraction(103, 10)
          and round(gap_pp, 1) == 10.3 and round(ratio, 1) == 8.9 and ratio <= 10)
    assert report(5, "Tennessee surprise gap", ok,
                  f"{iceberg.index * 100:.1f} - {surface.index * 100:.1f} = {float(exact_pp)} pp, "
                  f"ratio {ratio:.2f}")


def test_06_hhi():
    single = hhi(industry_shares({"A": 123.0}))
    equal = {n: hhi(industry_shares({f"I{k}": 7.0 for k in range(n)})).value for n in (2, 4, 8, 16)}
    iowa = [2341, 1971, 1464, 1201, 816, 576, 485, 432, 406, 308]
    delaware = [3052, 2082, 1362, 758, 568, 524, 515, 487, 423, 229]
    results = {}
    for name, bp in (("Iowa", iowa), ("Delaware", delaware)):
        score = hhi(industry_shares({f"I{k}": float(b) for k, b in enumerate(bp)}))
        exact = Fraction(sum(b * b for b in bp), 10000)
        results[name] = (round_half_up(score.value), score.tier,
                         math.isclose(score.value, exact, rel_tol=1e-12))
    ok = (single.value == 10000.0 and single.tier == MOST_CONCENTRATED
          and all(v == 10000 / n for n, v in equal.items())
          and results["Iowa"] == (1463, MOST_DISTRIBUTED, True)
          and results["Delaware"] == (1741, MOST_CONCENTRATED, True)
          and hhi_tier(1580) == MOST_DISTRIBUTED and hhi_tier(1738) == MOST_CONCENTRATED)
    assert report(6, "HHI values and tiers", ok,
                  f"single {single.value:.0f}, equal {sorted(equal.values())}, "
                  f"Iowa {results['Iowa'][:2]}, Delaware {results['Delaware'][:2]}")


def test_07_tier_agreement():
    ours, ext = fifty_two_state_fixture()
    res = tier_agreement(ours, ext)
    per = res["per_tier"]
    ok = (per[LEADING]["matched"] == 8 and per[LEADING]["first"] == 13
          and per[ASPIRING]["matched"] == 9 and per[ASPIRING]["first"] == 13
          and per[EMERGING]["first"] == per[EMERGING]["second"] == 26
          and abs(res["matched"] - 0.69 * 52) <= 1)
    assert report(7, "52-state tier agreement", ok,
                  f"leading 8/13, aspiring 9/13, overall {res['matched']}/52 = "
                  f"{res['overall'] * 100:.1f}%")


def _uncorrelated_states(seed=6, n=52):
    """Three state metrics and two index series with near-zero correlation."""
    rng = np.random.default_rng(seed)
    states = [f"S{k:02d}" for k in range(n)]
    metrics = {"gdp": np.exp(rng.normal(np.log(2e11), 1.0, n)),
               "per_capita_income": rng.uniform(40000, 90000, n),
               "unemployment_rate": rng.uniform(0.02, 0.08, n)}
    X = np.column_stack([v - v.mean() for v in metrics.values()])
    series = {}
    for name, lo, hi in (("surface_index", 0.01, 0.04), ("iceberg_index", 0.08, 0.15)):
        y = rng.uniform(lo, hi, n)
        yc = y - y.mean()
        resid = yc - X @ np.linalg.lstsq(X, yc, rcond=None)[0]
        # keep a tenth of the original correlated part
        series[name] = y.mean() + resid + 0.1 * (yc - resid)
    return states, metrics, series


def test_08_regression():
    xs = [1.5, 2.0, 3.25, 4.0, 7.5]
    ys = [0.12, 0.08, 0.15, 0.11, 0.2]
    fit = regress(dict(zip("abcde", xs)), dict(zip("abcde", ys)))
    X, Y = [Fraction(v) for v in xs], [Fraction(v) for v in ys]
    n, sx, sy = 5, sum(X), sum(Y)
    sxx, syy = sum(v * v for v in X), sum(v * v for v in Y)
    sxy = sum(a * b for a, b in zip(X, Y))
    det = n * sxx - sx * sx
    oracle = ((n * sxy - sx * sy) / det, (sxx * sy - sx * sxy) / det,
              (n * sxy - sx * sy) ** 2 / (det * (n * syy - sy * sy)))
    closed = max(rel_err(g, float(w)) for g, w in zip((fit.slope, fit.intercept, fit.r2), oracle))

    linear = regress({"a": 1.0, "b": 2.0, "c": 3.0, "d": 4.0},
                     {"a": 0.5, "b": 0.75, "c": 1.0, "d": 1.25}).r2
    orthogonal = regress({"a": 1.0, "b": 2.0, "c": 3.0}, {"a": 1.0, "b": 2.0, "c": 1.0}).r2

    states, metrics, series = _uncorrelated_states()
    r2s = [regress(dict(zip(states, metrics[m].tolist())), dict(zip(states, y.tolist()))).r2
           for m in metrics for y in series.values()]
    ok = closed <= 1e-12 and linear == 1.0 and orthogonal == 0.0 and max(r2s) < 0.05
    assert report(8, "OLS fits", ok,
                  f"oracle gap {closed:.1e}, linear r2 {linear}, orthogonal r2 {orthogonal}, "
                  f"regime max r2 {max(r2s):.4f} over {len(r2s)} fits")


def test_09_determinism(tmp_path, capsys):
    data = tmp_path / "data"
    assert main(["synth", "--seed", "9", "--n-occupations", "300", "--n-skills", "200",
                 "--n-counties", "400", "--n-states", "20", "--output", str(data)]) == 0
    outputs = {}
    for cmd in ("compute", "validate"):
        runs = []
        for k, workers in enumerate((1, 1, 4)):
            out = tmp_path / f"{cmd}{k}"
            assert main([cmd, "--data", str(data), "--output", str(out),
                         "--workers", str(workers)]) == 0
            runs.append(next(out.glob("*.json")).read_bytes())
        outputs[cmd] = runs
    capsys.readouterr()
    ok = all(r[0] == r[1] == r[2] for r in outputs.values())
    assert report(9, "byte-identical reports across runs and workers", ok,
                  ", ".join(f"{c}: {len(r[0])} bytes x3" for c, r in outputs.items()))


@pytest.mark.slow
def test_10_scale(tmp_path):
    data = tmp_path / "national"
    generate(SynthConfig(seed=7, n_occupations=923, n_skills=500, n_counties=3000,
                         n_states=52, n_tools=2000, n_industries=20), data)
    before = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "iceberg.cli", "compute", "--data", str(data),
                           "--output", str(tmp_path / "out")], capture_output=True, text=True)
    seconds = time.perf_counter() - t0
    # ru_maxrss is the largest child so far, in KiB on Linux
    peak_mb = max(resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss, before) / 1024
    records = None
    if proc.returncode == 0:
        rep = json.loads((tmp_path / "out" / "exposure_report.json").read_text())
        records = rep["metadata"]["n_occupations"], len(rep["regions"])
    ok = proc.returncode == 0 and seconds < 300 and peak_mb < 4096
    assert report(10, "923 x 3000 x 500 compute", ok,
                  f"exit {proc.returncode}, {seconds:.1f}s, peak RSS {peak_mb:.0f} MB, "
                  f"occupations/regions {records}"), proc.stderr
