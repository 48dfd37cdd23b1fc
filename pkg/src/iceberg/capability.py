"""AI tool catalog and per-skill automatability.

The catalog is the output of an upstream tool-to-skill mapping step: one row
per (tool, skill) edge with a confidence in [0, 1]::

    tool_id,tool_name,source,skill_id,confidence
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping

import numpy as np

from ._io import read_table
from .errors import DuplicateError, InputError, ParseError, RangeError

TOOL_COLUMNS = ("tool_id", "tool_name", "source", "skill_id", "confidence")
TOOL_SOURCES = ("protocol-implementation", "workflow-platform", "directory")
REDUCTION_POLICIES = ("max", "boolean")
DEFAULT_TAU = 0.5


@dataclass(frozen=True)
class Tool:
    id: str
    name: str
    source: str


@dataclass(frozen=True)
class ToolSkillEdge:
    tool: str
    skill: str
    confidence: float


class AutomatabilityMap(Mapping[str, float]):
    """skill id -> automatability score in [0, 1]; absent skills read as 0.

    ``policy`` and ``tau`` record how the scores were produced.
    """

    def __init__(self, scores: Dict[str, float], policy="max", tau=None):
        for skill, a in scores.items():
            if not (0.0 <= a <= 1.0):
                raise RangeError(f"automatability of {skill!r} is {a!r}, outside [0, 1]")
        self._scores = dict(sorted(scores.items()))
        self.policy = policy
        self.tau = tau

    def __getitem__(self, skill):
        return self._scores.get(skill, 0.0)

    def __contains__(self, skill):
        return skill in self._scores

    def __iter__(self):
        return iter(self._scores)

    def __len__(self):
        return len(self._scores)

    def vector(self, skills) -> np.ndarray:
        """Scores aligned to a skill list (ids or :class:`Skill` objects)."""
        return np.array([self[getattr(s, "id", s)] for s in skills], dtype=np.float64)

    def __repr__(self):
        return f"AutomatabilityMap({len(self)} skills, policy={self.policy!r})"


def load_tool_catalog(source) -> List[ToolSkillEdge]:
    """Load tool-to-skill edges, sorted by (tool, skill)."""
    df = read_table(source, TOOL_COLUMNS, numeric=("confidence",))
    srcs = df["source"].to_numpy()
    bad = np.flatnonzero(~np.isin(srcs, TOOL_SOURCES))
    if bad.size:
        i = int(bad[0])
        raise ParseError(f"tool source {srcs[i]!r} not in {TOOL_SOURCES}", source, i + 2)
    conf = df["confidence"].to_numpy()
    bad = np.flatnonzero((conf < 0.0) | (conf > 1.0))
    if bad.size:
        i = int(bad[0])
        raise RangeError(f"{source}:{i + 2}: edge ({df['tool_id'].iat[i]}, "
                         f"{df['skill_id'].iat[i]}) confidence {float(conf[i])!r} outside [0, 1]")
    dup = df.duplicated(["tool_id", "skill_id"]).to_numpy()
    if dup.any():
        i = int(np.flatnonzero(dup)[0])
        raise DuplicateError(f"{source}:{i + 2}: duplicate edge "
                             f"({df['tool_id'].iat[i]}, {df['skill_id'].iat[i]})")
    tools = df[["tool_id", "tool_name", "source"]].drop_duplicates()
    if tools["tool_id"].duplicated().any():
        tid = tools["tool_id"][tools["tool_id"].duplicated()].iat[0]
        raise ParseError(f"tool {tid!r} appears with conflicting name/source", source)
    edges = [ToolSkillEdge(t, s, float(c)) for t, s, c in
             zip(df["tool_id"], df["skill_id"], conf)]
    edges.sort(key=lambda e: (e.tool, e.skill))
    return edges


def load_tools(source) -> List[Tool]:
    df = read_table(source, TOOL_COLUMNS, numeric=("confidence",))
    tools = df[["tool_id", "tool_name", "source"]].drop_duplicates()
    return sorted((Tool(*r) for r in tools.itertuples(index=False, name=None)),
                  key=lambda t: t.id)


def capability_profile(edges, policy="max", tau=DEFAULT_TAU) -> AutomatabilityMap:
    """Reduce tool edges to one automatability score per skill.

    ``max`` keeps the best confidence of any tool for the skill (one capable
    tool suffices); ``boolean`` scores 1 when any edge reaches ``tau``.
    """
    if policy not in REDUCTION_POLICIES:
        raise InputError(f"unknown reduction policy {policy!r}; choose from {REDUCTION_POLICIES}")
    if policy == "boolean" and not (0.0 <= tau <= 1.0):
        raise InputError(f"tau {tau!r} outside [0, 1]")
    best: Dict[str, float] = {}
    for e in edges:
        if not (0.0 <= e.confidence <= 1.0):
            raise RangeError(f"edge ({e.tool}, {e.skill}) confidence {e.confidence!r} outside [0, 1]")
        if e.confidence > best.get(e.skill, -1.0):
            best[e.skill] = e.confidence
    if policy == "max":
        return AutomatabilityMap(best, policy="max")
    return AutomatabilityMap({s: 1.0 if c >= tau else 0.0 for s, c in best.items()},
                             policy="boolean", tau=tau)
