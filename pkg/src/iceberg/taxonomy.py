"""Occupation/skill taxonomy: loading, validation, and skill-requirement vectors.

The taxonomy file is one CSV row per (occupation, skill) requirement::

    occupation_code,occupation_title,industry,skill_id,skill_name,skill_category,importance,level

Occupations and skills are induced from the rows and stored in sorted order,
so two files holding the same records in different orders load to identical
matrices.
"""

import re
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np

from ._io import read_table
from .errors import DuplicateError, InputError, NotFoundError, ParseError, RangeError

TAXONOMY_COLUMNS = (
    "occupation_code", "occupation_title", "industry", "skill_id",
    "skill_name", "skill_category", "importance", "level",
)
SKILL_CATEGORIES = ("work-activity", "skill", "knowledge")
IMPORTANCE_RANGE = (1.0, 5.0)
LEVEL_RANGE = (0.0, 7.0)

_CODE_RE = re.compile(r"^\d{2}-\d{4}$")


@dataclass(frozen=True)
class Skill:
    id: str
    name: str
    category: str


@dataclass(frozen=True)
class Occupation:
    code: str
    title: str
    industry: str

    @property
    def major_group(self) -> str:
        return self.code[:2]


@dataclass(frozen=True)
class SkillRequirement:
    occupation: str
    skill: str
    importance: float
    level: float


@dataclass(frozen=True)
class WeightPolicy:
    """Combines a skill's importance and level ratings into one weight.

    ``func`` must accept numpy arrays and be nondecreasing in both arguments.
    """
    name: str
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def __call__(self, importance, level):
        return self.func(np.asarray(importance, dtype=np.float64),
                         np.asarray(level, dtype=np.float64))


WEIGHT_POLICIES: Dict[str, WeightPolicy] = {
    p.name: p for p in (
        WeightPolicy("importance_x_level", lambda i, l: i * l),
        WeightPolicy("importance", lambda i, l: i * 1.0),
        WeightPolicy("level", lambda i, l: l * 1.0),
    )
}
DEFAULT_WEIGHT_POLICY = "importance_x_level"


def get_weight_policy(policy=None) -> WeightPolicy:
    if policy is None:
        policy = DEFAULT_WEIGHT_POLICY
    if isinstance(policy, WeightPolicy):
        return policy
    try:
        return WEIGHT_POLICIES[policy]
    except KeyError:
        raise InputError(f"unknown weight policy {policy!r}; "
                         f"choose from {sorted(WEIGHT_POLICIES)}") from None


class SkillRequirementMatrix:
    """Sparse occupation x skill requirement ratings.

    Entries are held as parallel arrays sorted by (occupation, skill) index:
    ``occ_idx``, ``skill_idx``, ``importance``, ``level``.  Instances are
    treated as immutable once built.
    """

    def __init__(self, occupations, skills, occ_idx, skill_idx, importance, level):
        self.occupations: Tuple[Occupation, ...] = tuple(occupations)
        self.skills: Tuple[Skill, ...] = tuple(skills)
        self.occ_idx = np.asarray(occ_idx, dtype=np.int64)
        self.skill_idx = np.asarray(skill_idx, dtype=np.int64)
        self.importance = np.asarray(importance, dtype=np.float64)
        self.level = np.asarray(level, dtype=np.float64)
        self._occ_pos = {o.code: i for i, o in enumerate(self.occupations)}
        self._skill_pos = {s.id: i for i, s in enumerate(self.skills)}
        for arr in (self.occ_idx, self.skill_idx, self.importance, self.level):
            arr.setflags(write=False)
        self._validate()

    def _validate(self):
        if len(self._occ_pos) != len(self.occupations):
            raise DuplicateError("duplicate occupation codes")
        if len(self._skill_pos) != len(self.skills):
            raise DuplicateError("duplicate skill ids")
        n = len(self.occ_idx)
        if not (len(self.skill_idx) == len(self.importance) == len(self.level) == n):
            raise InputError("entry arrays differ in length")
        if n and (self.occ_idx.min() < 0 or self.occ_idx.max() >= len(self.occupations)
                  or self.skill_idx.min() < 0 or self.skill_idx.max() >= len(self.skills)):
            raise InputError("entry references an undeclared occupation or skill")
        key = self.occ_idx * max(len(self.skills), 1) + self.skill_idx
        if n > 1 and not np.all(np.diff(key) > 0):
            raise InputError("entries must be sorted and unique by (occupation, skill)")
        counts = np.bincount(self.occ_idx, minlength=len(self.occupations))
        if np.any(counts == 0):
            missing = self.occupations[int(np.flatnonzero(counts == 0)[0])].code
            raise InputError(f"occupation {missing} has no skill requirements")

    @property
    def n_occupations(self):
        return len(self.occupations)

    @property
    def n_skills(self):
        return len(self.skills)

    @property
    def codes(self):
        return [o.code for o in self.occupations]

    def occupation_index(self, code) -> int:
        try:
            return self._occ_pos[code]
        except KeyError:
            raise NotFoundError(f"unknown occupation {code!r}") from None

    def skill_index(self, skill_id) -> int:
        try:
            return self._skill_pos[skill_id]
        except KeyError:
            raise NotFoundError(f"unknown skill {skill_id!r}") from None

    def occupation(self, code) -> Occupation:
        return self.occupations[self.occupation_index(code)]

    def entry_slice(self, code) -> slice:
        i = self.occupation_index(code)
        lo, hi = np.searchsorted(self.occ_idx, [i, i + 1])
        return slice(int(lo), int(hi))

    def requirements(self, code):
        sl = self.entry_slice(code)
        return [SkillRequirement(code, self.skills[s].id, float(imp), float(lev))
                for s, imp, lev in zip(self.skill_idx[sl], self.importance[sl], self.level[sl])]

    def entry_weights(self, weight_policy=None) -> np.ndarray:
        """Weight of every stored entry under ``weight_policy``."""
        return np.asarray(get_weight_policy(weight_policy)(self.importance, self.level),
                          dtype=np.float64)

    def weight_matrix(self, weight_policy=None) -> np.ndarray:
        """Dense (occupations x skills) weight matrix on the shared skill basis."""
        out = np.zeros((self.n_occupations, self.n_skills), dtype=np.float64)
        out[self.occ_idx, self.skill_idx] = self.entry_weights(weight_policy)
        return out

    def __eq__(self, other):
        if not isinstance(other, SkillRequirementMatrix):
            return NotImplemented
        return (self.occupations == other.occupations and self.skills == other.skills
                and all(np.array_equal(getattr(self, a), getattr(other, a))
                        for a in ("occ_idx", "skill_idx", "importance", "level")))

    def __repr__(self):
        return (f"SkillRequirementMatrix({self.n_occupations} occupations, "
                f"{self.n_skills} skills, {len(self.occ_idx)} entries)")


def build_matrix(occupations, skills, requirements) -> SkillRequirementMatrix:
    """Assemble a matrix from domain objects, validating ranges and references."""
    occupations = sorted(occupations, key=lambda o: o.code)
    skills = sorted(skills, key=lambda s: s.id)
    for o in occupations:
        _check_code(o.code)
    for s in skills:
        _check_category(s.category, s.id)
    occ_pos = {o.code: i for i, o in enumerate(occupations)}
    skill_pos = {s.id: i for i, s in enumerate(skills)}
    if len(occ_pos) != len(occupations):
        raise DuplicateError("duplicate occupation codes")
    if len(skill_pos) != len(skills):
        raise DuplicateError("duplicate skill ids")
    rows = []
    seen = set()
    for r in requirements:
        if r.occupation not in occ_pos:
            raise NotFoundError(f"requirement references unknown occupation {r.occupation!r}")
        if r.skill not in skill_pos:
            raise NotFoundError(f"requirement references unknown skill {r.skill!r}")
        if (r.occupation, r.skill) in seen:
            raise DuplicateError(f"duplicate requirement ({r.occupation}, {r.skill})")
        seen.add((r.occupation, r.skill))
        _check_rating(r.occupation, r.skill, "importance", r.importance, IMPORTANCE_RANGE)
        _check_rating(r.occupation, r.skill, "level", r.level, LEVEL_RANGE)
        rows.append((occ_pos[r.occupation], skill_pos[r.skill], float(r.importance), float(r.level)))
    rows.sort()
    arr = list(zip(*rows)) if rows else [(), (), (), ()]
    return SkillRequirementMatrix(occupations, skills, *arr)


def load_taxonomy(source) -> SkillRequirementMatrix:
    """Load and validate a taxonomy CSV.

    Raises :class:`ParseError` (with line number) for malformed records,
    :class:`RangeError` naming occupation, skill and value for out-of-range
    ratings, and :class:`DuplicateError` for repeated (occupation, skill) rows.
    """
    df = read_table(source, TAXONOMY_COLUMNS, numeric=("importance", "level"))
    if len(df) == 0:
        raise ParseError("taxonomy has no rows", source)

    codes = df["occupation_code"].to_numpy()
    for i, code in enumerate(codes):
        if not _CODE_RE.match(code):
            raise ParseError(f"occupation code {code!r} does not match NN-NNNN", source, i + 2)
    cats = df["skill_category"].to_numpy()
    bad = np.flatnonzero(~np.isin(cats, SKILL_CATEGORIES))
    if bad.size:
        i = int(bad[0])
        raise ParseError(f"skill category {cats[i]!r} not in {SKILL_CATEGORIES}", source, i + 2)

    for col, (lo, hi) in (("importance", IMPORTANCE_RANGE), ("level", LEVEL_RANGE)):
        vals = df[col].to_numpy()
        bad = np.flatnonzero((vals < lo) | (vals > hi))
        if bad.size:
            i = int(bad[0])
            raise RangeError(f"{source}:{i + 2}: occupation {codes[i]} skill "
                             f"{df['skill_id'].iat[i]}: {col} {float(vals[i])!r} outside [{lo:g}, {hi:g}]")

    dup = df.duplicated(["occupation_code", "skill_id"], keep="first").to_numpy()
    if dup.any():
        i = int(np.flatnonzero(dup)[0])
        raise DuplicateError(f"{source}:{i + 2}: duplicate requirement "
                             f"({codes[i]}, {df['skill_id'].iat[i]})")

    occupations = _unique_records(df, "occupation_code", ("occupation_title", "industry"), source)
    skills = _unique_records(df, "skill_id", ("skill_name", "skill_category"), source)
    occupations = [Occupation(code, title, ind) for code, (title, ind) in sorted(occupations.items())]
    skills = [Skill(sid, name, cat) for sid, (name, cat) in sorted(skills.items())]

    occ_pos = {o.code: i for i, o in enumerate(occupations)}
    skill_pos = {s.id: i for i, s in enumerate(skills)}
    occ_idx = df["occupation_code"].map(occ_pos).to_numpy(np.int64)
    skill_idx = df["skill_id"].map(skill_pos).to_numpy(np.int64)
    order = np.lexsort((skill_idx, occ_idx))
    return SkillRequirementMatrix(
        occupations, skills, occ_idx[order], skill_idx[order],
        df["importance"].to_numpy()[order], df["level"].to_numpy()[order])


def occupation_vector(matrix: SkillRequirementMatrix, occupation, weight_policy=None) -> np.ndarray:
    """Dense weight vector of one occupation over the matrix's full skill list."""
    sl = matrix.entry_slice(occupation)
    out = np.zeros(matrix.n_skills, dtype=np.float64)
    policy = get_weight_policy(weight_policy)
    out[matrix.skill_idx[sl]] = policy(matrix.importance[sl], matrix.level[sl])
    return out


def _unique_records(df, key, attrs, source):
    sub = df[[key, *attrs]].drop_duplicates()
    clash = sub.duplicated(key, keep=False).to_numpy()
    if clash.any():
        k = sub[key].to_numpy()[np.flatnonzero(clash)[0]]
        raise ParseError(f"{key} {k!r} appears with conflicting {'/'.join(attrs)}", source)
    return {row[0]: tuple(row[1:]) for row in sub.itertuples(index=False, name=None)}


def _check_code(code):
    if not _CODE_RE.match(code):
        raise InputError(f"occupation code {code!r} does not match NN-NNNN")


def _check_category(category, skill_id):
    if category not in SKILL_CATEGORIES:
        raise InputError(f"skill {skill_id}: category {category!r} not in {SKILL_CATEGORIES}")


def _check_rating(occ, skill, name, value, bounds):
    lo, hi = bounds
    if not (np.isfinite(value) and lo <= value <= hi):
        raise RangeError(f"occupation {occ} skill {skill}: {name} {value!r} outside [{lo:g}, {hi:g}]")
