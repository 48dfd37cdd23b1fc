"""Validation diagnostics: skill-similarity recall against career transitions,
tier agreement between two state rankings, and simple OLS fits of index values
on traditional economic metrics.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from ._io import read_table
from .errors import InputError, NotFoundError, ParseError
from .taxonomy import SkillRequirementMatrix

LEADING, EMERGING, ASPIRING = "leading", "emerging", "aspiring"
TIER_NAMES = (LEADING, EMERGING, ASPIRING)
TRANSITION_COLUMNS = ("occupation_a", "occupation_b")
TIER_COLUMNS = ("state", "tier")

# fixed so the block partition (and hence every float) is independent of worker count
_BLOCK_ROWS = 128


class PairSimilarities:
    """Cosine similarity for every unordered occupation pair.

    Pairs are ordered lexicographically by (code_a, code_b) with code_a < code_b.
    """

    def __init__(self, codes, i_idx, j_idx, values):
        self.codes: Tuple[str, ...] = tuple(codes)
        self.i_idx = np.asarray(i_idx, dtype=np.int64)
        self.j_idx = np.asarray(j_idx, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.float64)
        self._pos = {c: i for i, c in enumerate(self.codes)}

    def __len__(self):
        return len(self.values)

    def __iter__(self) -> Iterator[Tuple[Tuple[str, str], float]]:
        for i, j, v in zip(self.i_idx.tolist(), self.j_idx.tolist(), self.values.tolist()):
            yield (self.codes[i], self.codes[j]), v

    def pair_index(self, a, b) -> int:
        if a == b:
            raise InputError(f"self-pair ({a}, {a}) has no similarity entry")
        try:
            i, j = sorted((self._pos[a], self._pos[b]))
        except KeyError as exc:
            raise NotFoundError(f"unknown occupation {exc.args[0]!r}") from None
        n = len(self.codes)
        return i * (2 * n - i - 1) // 2 + (j - i - 1)

    def get(self, a, b) -> float:
        return float(self.values[self.pair_index(a, b)])

    def keys(self) -> List[Tuple[str, str]]:
        return [(self.codes[i], self.codes[j]) for i, j in zip(self.i_idx.tolist(),
                                                                  self.j_idx.tolist())]


def pairwise_similarity(matrix: SkillRequirementMatrix, weight_policy=None,
                        workers=1) -> PairSimilarities:
    """All-pairs cosine similarity of occupation skill vectors."""
    n = matrix.n_occupations
    if n < 2:
        raise InputError("pairwise similarity needs >= 2 occupations")
    w = matrix.weight_matrix(weight_policy)
    norms = np.sqrt(np.einsum("ij,ij->i", w, w))
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise InputError(f"occupation {matrix.codes[int(zero[0])]} has a zero skill vector")
    unit = w / norms[:, None]

    def block(lo):
        hi = min(lo + _BLOCK_ROWS, n)
        sims = unit[lo:hi] @ unit.T
        rows = []
        for r in range(lo, hi):
            rows.append(sims[r - lo, r + 1:])
        return np.concatenate(rows) if rows else np.zeros(0)

    starts = list(range(0, n, _BLOCK_ROWS))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, starts))
    else:
        parts = [block(lo) for lo in starts]
    values = np.clip(np.concatenate(parts), -1.0, 1.0)
    i_idx, j_idx = np.triu_indices(n, k=1)
    return PairSimilarities(matrix.codes, i_idx, j_idx, values)


class TransitionNetwork:
    """Observed career moves as unordered occupation pairs (stored sorted)."""

    def __init__(self, edges, known=None):
        norm = set()
        for a, b in edges:
            if a == b:
                raise InputError(f"self-transition {a}-{b}")
            if known is not None:
                for c in (a, b):
                    if c not in known:
                        raise NotFoundError(f"transition references unknown occupation {c!r}")
            norm.add((a, b) if a < b else (b, a))
        self.edges: FrozenSet[Tuple[str, str]] = frozenset(norm)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))


def load_transitions(source, known=None) -> TransitionNetwork:
    df = read_table(source, TRANSITION_COLUMNS)
    for i, (a, b) in enumerate(zip(df["occupation_a"], df["occupation_b"])):
        if a == b:
            raise ParseError(f"self-transition {a}", source, i + 2)
        if known is not None and (a not in known or b not in known):
            bad = a if a not in known else b
            raise ParseError(f"unknown occupation {bad!r}", source, i + 2)
    return TransitionNetwork(zip(df["occupation_a"], df["occupation_b"]), known)


@dataclass(frozen=True)
class SimilarityReport:
    pairs: List[Tuple[Tuple[str, str], float]]
    selector: str
    threshold: float
    recall: float
    precision: float
    hits: int
    n_edges: int

    @property
    def selected_count(self):
        return len(self.pairs)


def select_pairs(similarities: PairSimilarities, threshold=None, percentile=None) -> np.ndarray:
    """Indices of selected pairs, either ``sim >= threshold`` or the top
    ``percentile`` fraction (rounded up) ordered by similarity then pair key."""
    if (threshold is None) == (percentile is None):
        raise InputError("give exactly one of threshold or percentile")
    if threshold is not None:
        return np.flatnonzero(similarities.values >= threshold)
    if not (0.0 < percentile <= 1.0):
        raise InputError(f"percentile {percentile!r} outside (0, 1]")
    k = math.ceil(percentile * len(similarities))
    # pairs are already in key order, so a stable sort on -sim breaks ties by key
    order = np.argsort(-similarities.values, kind="stable")
    return np.sort(order[:k])


def transition_recall(similarities: PairSimilarities, network: TransitionNetwork,
                      threshold: Optional[float] = None,
                      percentile: Optional[float] = None) -> SimilarityReport:
    if len(network) == 0:
        raise InputError("transition network is empty")
    idx = select_pairs(similarities, threshold, percentile)
    if idx.size == 0:
        raise InputError("selector chose no pairs")
    keys = similarities.keys()
    pairs = [(keys[i], float(similarities.values[i])) for i in idx.tolist()]
    hits = sum(1 for k, _ in pairs if k in network.edges)
    if threshold is not None:
        selector, cut = f"threshold>={threshold!r}", float(threshold)
    else:
        selector, cut = f"top-fraction={percentile!r}", min(v for _, v in pairs)
    return SimilarityReport(pairs, selector, cut, hits / len(network), hits / len(pairs),
                            hits, len(network))


class TierAssignment(dict):
    """state -> tier, one of ``leading``, ``emerging``, ``aspiring``."""

    def __init__(self, mapping=()):
        super().__init__(sorted(dict(mapping).items()))
        for st, t in self.items():
            if t not in TIER_NAMES:
                raise InputError(f"state {st}: tier {t!r} not in {TIER_NAMES}")


def load_tiers(source) -> TierAssignment:
    df = read_table(source, TIER_COLUMNS)
    seen = {}
    for i, (st, t) in enumerate(zip(df["state"], df["tier"])):
        if st in seen:
            raise ParseError(f"state {st} listed twice", source, i + 2)
        if t not in TIER_NAMES:
            raise ParseError(f"tier {t!r} not in {TIER_NAMES}", source, i + 2)
        seen[st] = t
    return TierAssignment(seen)


def tier_agreement(ours: Mapping[str, str], external: Mapping[str, str]) -> dict:
    """Fraction of states placed in the same tier by both assignments."""
    a, b = set(ours), set(external)
    if a != b:
        raise InputError(f"state sets differ: only in first {sorted(a - b)}, "
                         f"only in second {sorted(b - a)}")
    if not a:
        raise InputError("no states to compare")
    per_tier = {}
    for t in TIER_NAMES:
        per_tier[t] = {
            "matched": sum(1 for s in a if ours[s] == t and external[s] == t),
            "first": sum(1 for s in a if ours[s] == t),
            "second": sum(1 for s in a if external[s] == t),
        }
    matched = sum(1 for s in a if ours[s] == external[s])
    return {"overall": matched / len(a), "matched": matched, "total": len(a),
            "per_tier": per_tier}


def rank_to_tiers(values: Mapping[str, float], sizes) -> TierAssignment:
    """Split states into leading/emerging/aspiring by descending value.

    Ties are broken by state code (alphabetically earlier ranks higher).
    """
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) != 3 or any(s < 0 for s in sizes):
        raise InputError(f"tier sizes must be three nonnegative integers, got {sizes}")
    if sum(sizes) != len(values):
        raise InputError(f"tier sizes {sizes} sum to {sum(sizes)}, but there are "
                         f"{len(values)} states")
    ranked = sorted(values, key=lambda s: (-values[s], s))
    out = {}
    for k, st in enumerate(ranked):
        out[st] = LEADING if k < sizes[0] else EMERGING if k < sizes[0] + sizes[1] else ASPIRING
    return TierAssignment(out)


def default_tier_sizes(n_states) -> Tuple[int, int, int]:
    """Quarter / half / quarter split, e.g. (13, 26, 13) for 52 states."""
    q = n_states // 4
    return q, n_states - 2 * q, q


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r2: float
    n: int


def regress(x: Mapping[str, float], y: Mapping[str, float]) -> RegressionFit:
    """Ordinary least squares of ``y`` on ``x`` over their shared keys.

    ``r2`` is the squared Pearson correlation; it is 0 when ``y`` is constant.
    """
    if set(x) != set(y):
        raise InputError(f"x and y cover different states: {sorted(set(x) ^ set(y))}")
    keys = sorted(x)
    n = len(keys)
    if n < 2:
        raise InputError("regression needs at least 2 observations")
    xs = [float(x[k]) for k in keys]
    ys = [float(y[k]) for k in keys]
    mx, my = math.fsum(xs) / n, math.fsum(ys) / n
    dx = [v - mx for v in xs]
    dy = [v - my for v in ys]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    if sxx == 0:
        raise InputError("x is constant; slope undefined")
    slope = sxy / sxx
    intercept = my - slope * mx
    r2 = 0.0 if syy == 0 else min(max(sxy * sxy / (sxx * syy), 0.0), 1.0)
    return RegressionFit(slope, intercept, r2, n)
