import math

import pytest

from iceberg.econdata import (EmploymentRecord, EmploymentTable, Geography, Region, RegionScope,
                              load_employment, load_geography, load_state_metrics, wage_base)
from iceberg.errors import DuplicateError, InputError, NotFoundError, ParseError, RangeError

from conftest import write

GEO = """
county_fips,state
01001,AL
01003,AL
06001,CA
"""

EMP = """
occupation_code,county_fips,employment,median_wage
15-1252,01001,10,50000
15-1252,06001,20,120000
43-4051,01001,30,35000
43-4051,06001,40,40000
"""


@pytest.fixture
def geo(tmp_path):
    return load_geography(write(tmp_path / "geo.csv", GEO))


def test_load_employment_two_by_two(tmp_path, geo):
    t = load_employment(write(tmp_path / "emp.csv", EMP), geo)
    assert len(t) == 4
    assert t.occupations == ("15-1252", "43-4051")
    assert t.counties == ("01001", "06001")
    assert t.total_employment == 100
    assert list(t.records())[0] == EmploymentRecord("15-1252", "01001", 10, 50000.0)


def test_negative_employment(tmp_path, geo):
    with pytest.raises(RangeError, match="employment -5"):
        load_employment(write(tmp_path / "emp.csv", EMP.replace(",30,", ",-5,")), geo)


def test_fractional_employment(tmp_path, geo):
    with pytest.raises(ParseError, match="whole number"):
        load_employment(write(tmp_path / "emp.csv", EMP.replace(",30,", ",3.5,")), geo)


def test_unresolvable_county(tmp_path, geo):
    with pytest.raises(NotFoundError, match="99999"):
        load_employment(write(tmp_path / "emp.csv", EMP.replace("06001,20", "99999,20")), geo)


def test_duplicate_cell(tmp_path, geo):
    with pytest.raises(DuplicateError, match="15-1252, 01001"):
        load_employment(write(tmp_path / "emp.csv", EMP + "15-1252,01001,1,1\n"), geo)


def test_zero_employment_retained(tmp_path, geo):
    t = load_employment(write(tmp_path / "emp.csv", EMP.replace(",30,", ",0,")), geo)
    assert len(t) == 4
    assert wage_base(t, RegionScope.county("01001")) == 500000.0


def test_geography_rejects_bad_fips(tmp_path):
    with pytest.raises(ParseError, match="5 digits"):
        load_geography(write(tmp_path / "geo.csv", GEO.replace("01003", "1003")))


def test_state_metrics(tmp_path):
    m = load_state_metrics(write(tmp_path / "m.csv", """
state,gdp,per_capita_income,unemployment_rate
CA,3.9e12,85000,0.05
AL,2.8e11,52000,0.03
"""))
    assert list(m) == ["AL", "CA"]
    assert m["CA"].unemployment_rate == 0.05
    with pytest.raises(RangeError):
        load_state_metrics(write(tmp_path / "m.csv", "state,gdp,per_capita_income,"
                                 "unemployment_rate\nCA,1,1,5.0\n"))


def test_wage_base_single_record():
    geo = Geography([Region("01001", "AL")])
    t = EmploymentTable.from_records([EmploymentRecord("15-1252", "01001", 10, 50000.0)], geo)
    assert wage_base(t) == 500000.0


def test_wage_base_scopes(tmp_path, geo):
    t = load_employment(write(tmp_path / "emp.csv", EMP), geo)
    al = wage_base(t, RegionScope.state("AL"))
    ca = wage_base(t, RegionScope.state("CA"))
    assert al == 10 * 50000 + 30 * 35000
    assert ca == 20 * 120000 + 40 * 40000
    assert wage_base(t) == al + ca
    with pytest.raises(InputError, match="empty scope"):
        wage_base(t, RegionScope.county("01003"))
    with pytest.raises(NotFoundError):
        wage_base(t, RegionScope.state("TX"))


def test_seed42_national_base_matches_double_loop(seed42):
    t = seed42.load_employment()
    occs = sorted({r.occupation for r in t.records()})
    counties = sorted({r.region for r in t.records()})
    cell = {(r.occupation, r.region): (r.employment, r.median_wage) for r in t.records()}
    naive = 0.0
    for o in occs:
        for c in counties:
            e, w = cell.get((o, c), (0, 0.0))
            naive += e * w
    assert math.isclose(wage_base(t), naive, rel_tol=1e-12)
    assert t.total_employment == seed42.manifest["total_employment"]


def test_additivity_over_partitions(seed42):
    t = seed42.load_employment()
    geo = t.geography
    national = wage_base(t)
    states = [wage_base(t, RegionScope.state(s)) for s in t.states]
    assert math.isclose(math.fsum(states), national, rel_tol=1e-9)
    for s in t.states:
        counties = [wage_base(t, RegionScope.county(c)) for c in t.counties
                    if geo.county_state[c] == s]
        assert math.isclose(math.fsum(counties), wage_base(t, RegionScope.state(s)),
                            rel_tol=1e-9)


def test_round_trip(tmp_path, seed42):
    t = seed42.load_employment()
    t.to_csv(tmp_path / "emp.csv")
    t.geography.to_csv(tmp_path / "geo.csv")
    again = load_employment(tmp_path / "emp.csv", load_geography(tmp_path / "geo.csv"))
    assert again == t
    again.to_csv(tmp_path / "emp2.csv")
    assert (tmp_path / "emp.csv").read_bytes() == (tmp_path / "emp2.csv").read_bytes()
