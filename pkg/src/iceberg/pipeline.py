"""End-to-end runs: load inputs, compute, and assemble JSON/CSV reports.

Reports carry the engine version, sha256 digests of every input file, and all
policy choices, and contain no timestamps or absolute paths, so identical
inputs give byte-identical reports.
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from . import __version__
from ._io import file_digest, fmt_float, write_csv
from .capability import DEFAULT_TAU, REDUCTION_POLICIES, capability_profile, load_tool_catalog
from .concentration import hhi_tier, state_concentration
from .econdata import METRIC_NAMES, load_employment, load_geography, load_state_metrics
from .errors import InputError
from .index import (ALL, SURFACE, all_levels, automation_surprise, compute_exposures,
                    default_scopes, load_scopes)
from .synth.generator import FILES
from .taxonomy import DEFAULT_WEIGHT_POLICY, get_weight_policy, load_taxonomy
from .validation import (default_tier_sizes, load_tiers, load_transitions, pairwise_similarity,
                         rank_to_tiers, regress, tier_agreement, transition_recall)

log = logging.getLogger(__name__)

DEFAULT_PERCENTILE = 0.10
EXPOSURE_REPORT = "exposure_report.json"
CONCENTRATION_REPORT = "concentration_report.json"
VALIDATION_REPORT = "validation_report.json"
_INPUTS = ("taxonomy", "tools", "employment", "geography", "state_metrics", "transitions",
           "external_tiers", "scopes")


@dataclass
class RunConfig:
    taxonomy: Optional[str] = None
    tools: Optional[str] = None
    employment: Optional[str] = None
    geography: Optional[str] = None
    state_metrics: Optional[str] = None
    transitions: Optional[str] = None
    external_tiers: Optional[str] = None
    scopes: Optional[str] = None
    weight_policy: str = DEFAULT_WEIGHT_POLICY
    reduction: str = "max"
    tau: float = DEFAULT_TAU
    surface_scope: str = SURFACE
    threshold: Optional[float] = None
    percentile: Optional[float] = None
    tier_sizes: Optional[Tuple[int, int, int]] = None
    transfer: Dict[str, float] = field(default_factory=dict)
    output: str = "iceberg-out"
    workers: int = 1

    @classmethod
    def from_file(cls, path):
        """Read a JSON config; relative input paths resolve against its directory."""
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise InputError(f"{path}: config file not found") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from None
        known = {f.name for f in fields(cls)} | {"data"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise InputError(f"{path}: unknown config keys {unknown}")
        base = path.parent
        cfg = cls.from_data_dir(base / raw.pop("data")) if "data" in raw else cls()
        for key in _INPUTS + ("output",):
            if raw.get(key) is not None:
                raw[key] = str(base / raw[key])
        if raw.get("tier_sizes") is not None:
            raw["tier_sizes"] = tuple(raw["tier_sizes"])
        return replace(cfg, **raw)

    @classmethod
    def from_data_dir(cls, directory, **kw):
        """Config pointing at a dataset directory laid out like ``iceberg synth`` output."""
        d = Path(directory)
        paths = {k: str(d / name) for k, name in FILES.items()}
        return cls(**paths, **kw)

    def check(self, *required):
        for name in required:
            value = getattr(self, name)
            if value is None:
                raise InputError(f"no {name} file configured")
            if not Path(value).exists():
                raise InputError(f"{name} file not found: {value}")
        get_weight_policy(self.weight_policy)
        if self.reduction not in REDUCTION_POLICIES:
            raise InputError(f"unknown reduction {self.reduction!r}; choose from "
                             f"{REDUCTION_POLICIES}")
        if not (0.0 <= self.tau <= 1.0):
            raise InputError(f"tau {self.tau!r} outside [0, 1]")
        if self.workers < 1:
            raise InputError("workers must be >= 1")
        return self

    def selector(self):
        if self.threshold is not None and self.percentile is not None:
            raise InputError("configure either threshold or percentile, not both")
        if self.threshold is None and self.percentile is None:
            return {"percentile": DEFAULT_PERCENTILE}
        if self.threshold is not None:
            return {"threshold": self.threshold}
        return {"percentile": self.percentile}

    def metadata(self, used):
        inputs = {}
        for name in used:
            p = getattr(self, name)
            if p is not None:
                inputs[name] = {"file": os.path.basename(p), "sha256": file_digest(p)}
        return {
            "engine": "iceberg",
            "version": __version__,
            "inputs": inputs,
            "policies": {
                "weight_policy": get_weight_policy(self.weight_policy).name,
                "reduction": self.reduction,
                "tau": self.tau if self.reduction == "boolean" else None,
                "transfer": dict(sorted(self.transfer.items())),
                "surface_scope": self.surface_scope,
            },
        }


class Inputs:
    """Everything the compute path needs, loaded once."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.matrix = load_taxonomy(cfg.taxonomy)
        self.edges = load_tool_catalog(cfg.tools)
        self.auto = capability_profile(self.edges, cfg.reduction, cfg.tau)
        self.geography = load_geography(cfg.geography)
        self.employment = load_employment(cfg.employment, self.geography)
        self.scopes = load_scopes(cfg.scopes) if cfg.scopes else default_scopes()
        if cfg.surface_scope not in self.scopes:
            raise InputError(f"scope {cfg.surface_scope!r} is not defined; have "
                             f"{sorted(self.scopes)}")
        self.exposures = compute_exposures(self.matrix, self.auto, cfg.weight_policy,
                                           cfg.transfer or None)
        self._levels = {}

    def levels(self, scope_name):
        if scope_name not in self._levels:
            self._levels[scope_name] = all_levels(self.exposures, self.employment,
                                                  self.scopes[scope_name], self.cfg.workers)
        return self._levels[scope_name]

    def state_index(self, scope_name):
        return {r.region.id: r.index for r in self.levels(scope_name)[1]}


def _dump_json(obj, path):
    text = json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def exposure_report(inp: Inputs) -> dict:
    cfg = inp.cfg
    regions = []
    for name in sorted(inp.scopes):
        counties, states, national = inp.levels(name)
        regions.extend(r.to_dict() for r in (*counties, *states, national))
    surprise = []
    surf, ice = inp.levels(cfg.surface_scope), inp.levels(ALL)
    for s_list, i_list in ((surf[0], ice[0]), (surf[1], ice[1]), ([surf[2]], [ice[2]])):
        for s, i in zip(s_list, i_list):
            surprise.append({"level": s.region.level, "region": s.region.id or "US",
                             "surface_index": s.index, "iceberg_index": i.index,
                             "gap": automation_surprise(s, i)})
    warnings = [f"occupation {c} has zero total skill weight; exposure set to 0"
                for c in inp.exposures.zero_weight]
    meta = cfg.metadata(("taxonomy", "tools", "employment", "geography", "scopes"))
    meta["scopes"] = {n: s.entries() for n, s in sorted(inp.scopes.items())}
    meta["total_employment"] = inp.employment.total_employment
    meta["n_occupations"] = inp.matrix.n_occupations
    meta["n_skills"] = inp.matrix.n_skills
    return {
        "metadata": meta,
        "warnings": warnings,
        "occupations": [{"occupation": c, "title": o.title, "industry": o.industry,
                         "exposure": float(v)}
                        for c, o, v in zip(inp.exposures.codes, inp.matrix.occupations,
                                           inp.exposures.values)],
        "regions": regions,
        "surprise": surprise,
    }


def concentration_report(inp: Inputs) -> dict:
    industry_of = {o.code: o.industry for o in inp.matrix.occupations}
    meta = inp.cfg.metadata(("taxonomy", "tools", "employment", "geography"))
    return {"metadata": meta,
            "records": state_concentration(inp.exposures, inp.employment, industry_of)}


def validation_report(inp: Inputs) -> dict:
    cfg = inp.cfg.check("transitions", "external_tiers", "state_metrics")
    sims = pairwise_similarity(inp.matrix, cfg.weight_policy, workers=cfg.workers)
    network = load_transitions(cfg.transitions, set(inp.matrix.codes))
    sel = cfg.selector()
    rec = transition_recall(sims, network, **sel)

    surface = inp.state_index(cfg.surface_scope)
    iceberg = inp.state_index(ALL)
    sizes = cfg.tier_sizes or default_tier_sizes(len(surface))
    ours = rank_to_tiers(surface, sizes)
    external = load_tiers(cfg.external_tiers)
    agreement = tier_agreement(ours, external)

    metrics = load_state_metrics(cfg.state_metrics)
    regressions = []
    for x_name in METRIC_NAMES:
        x = {st: getattr(metrics[st], x_name) for st in surface if st in metrics}
        if set(x) != set(surface):
            missing = sorted(set(surface) - set(x))
            raise InputError(f"state metrics missing for {missing}")
        for y_name, y in ((f"{cfg.surface_scope}_index", surface), ("iceberg_index", iceberg)):
            fit = regress(x, y)
            regressions.append({"x_name": x_name, "y_name": y_name, "slope": fit.slope,
                                "intercept": fit.intercept, "r2": fit.r2, "n": fit.n})

    meta = cfg.metadata(_INPUTS)
    meta["selector"] = sel
    return {
        "metadata": meta,
        "recall": rec.recall,
        "precision": rec.precision,
        "selected_count": rec.selected_count,
        "hits": rec.hits,
        "n_edges": rec.n_edges,
        "selector": rec.selector,
        "threshold": rec.threshold,
        "agreement": agreement["overall"],
        "agreement_matched": agreement["matched"],
        "agreement_total": agreement["total"],
        "per_tier": agreement["per_tier"],
        "tier_sizes": list(sizes),
        "our_tiers": dict(ours),
        "regressions": regressions,
    }


def run_compute(cfg: RunConfig) -> Path:
    cfg.check("taxonomy", "tools", "employment", "geography")
    inp = Inputs(cfg)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(exposure_report(inp), out / EXPOSURE_REPORT)
    return out / EXPOSURE_REPORT


def run_hhi(cfg: RunConfig) -> Path:
    cfg.check("taxonomy", "tools", "employment", "geography")
    inp = Inputs(cfg)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(concentration_report(inp), out / CONCENTRATION_REPORT)
    return out / CONCENTRATION_REPORT


def run_validate(cfg: RunConfig) -> Path:
    cfg.check("taxonomy", "tools", "employment", "geography", "transitions",
              "external_tiers", "state_metrics")
    inp = Inputs(cfg)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    _dump_json(validation_report(inp), out / VALIDATION_REPORT)
    return out / VALIDATION_REPORT


def run_plotdata(cfg: RunConfig) -> Dict[str, Path]:
    """Plot-ready CSV tables: state choropleth values, metric scatter, tier maps."""
    cfg.check("taxonomy", "tools", "employment", "geography", "state_metrics")
    inp = Inputs(cfg)
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}

    rows = []
    for name in sorted(inp.scopes):
        for r in inp.levels(name)[1]:
            rows.append((r.region.id, name, fmt_float(r.index),
                         fmt_float(r.exposed_wage_value), fmt_float(r.wage_base)))
    paths["choropleth"] = out / "choropleth.csv"
    write_csv(paths["choropleth"], ("state", "scope", "index", "exposed_wage_value",
                                    "wage_base"), rows)

    surface = inp.state_index(cfg.surface_scope)
    iceberg = inp.state_index(ALL)
    surf_states = {r.region.id: r for r in inp.levels(cfg.surface_scope)[1]}
    ice_states = {r.region.id: r for r in inp.levels(ALL)[1]}
    paths["surprise"] = out / "surprise.csv"
    write_csv(paths["surprise"], ("state", "surface_index", "iceberg_index", "gap"),
              [(st, fmt_float(surface[st]), fmt_float(iceberg[st]),
                fmt_float(automation_surprise(surf_states[st], ice_states[st])))
               for st in sorted(surface)])

    metrics = load_state_metrics(cfg.state_metrics)
    paths["scatter"] = out / "scatter.csv"
    write_csv(paths["scatter"], ("state", *METRIC_NAMES, "surface_index", "iceberg_index"),
              [(st, *(fmt_float(getattr(metrics[st], m)) for m in METRIC_NAMES),
                fmt_float(surface[st]), fmt_float(iceberg[st]))
               for st in sorted(surface) if st in metrics])

    industry_of = {o.code: o.industry for o in inp.matrix.occupations}
    conc = {r["state"]: r for r in state_concentration(inp.exposures, inp.employment,
                                                       industry_of)}
    sizes = cfg.tier_sizes or default_tier_sizes(len(surface))
    ours = rank_to_tiers(surface, sizes)
    external = load_tiers(cfg.external_tiers) if cfg.external_tiers and \
        Path(cfg.external_tiers).exists() else {}
    paths["tiers"] = out / "tiers.csv"
    write_csv(paths["tiers"], ("state", "index_tier", "external_tier", "hhi", "hhi_tier"),
              [(st, ours[st], external.get(st, ""), fmt_float(conc[st]["hhi"]),
                hhi_tier(conc[st]["hhi"])) for st in sorted(surface)])
    return paths


def load_schema(report):
    """JSON schema for ``exposure_report``, ``concentration_report`` or ``validation_report``."""
    from importlib import resources
    text = (resources.files("iceberg") / "schemas" / f"{report}.schema.json").read_text("utf-8")
    return json.loads(text)
