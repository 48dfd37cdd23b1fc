"""Skills-based AI exposure indices over occupations and regions.

Typical use::

    from iceberg import load_taxonomy, load_tool_catalog, capability_profile, compute_exposures

    matrix = load_taxonomy("taxonomy.csv")
    auto = capability_profile(load_tool_catalog("tools.csv"))
    exposures = compute_exposures(matrix, auto)
"""

__version__ = "0.1.0"

from .capability import (AutomatabilityMap, Tool, ToolSkillEdge, capability_profile,
                         load_tool_catalog)
from .concentration import HHIScore, IndustryShares, hhi, hhi_tier, industry_shares
from .econdata import (EmploymentRecord, EmploymentTable, Geography, Region, RegionScope,
                       StateMetrics, load_employment, load_geography, load_state_metrics,
                       wage_base)
from .errors import (DuplicateError, IcebergError, InputError, NotFoundError, ParseError,
                     RangeError)
from .index import (ExposureScore, ExposureTable, RegionalIndex, ScopeFilter, aggregate,
                    automation_surprise, compute_exposures, county_indices, load_scopes,
                    occupation_exposure, regional_index)
from .taxonomy import (Occupation, Skill, SkillRequirement, SkillRequirementMatrix,
                       WeightPolicy, load_taxonomy, occupation_vector)
from .validation import (PairSimilarities, RegressionFit, SimilarityReport, TierAssignment,
                         TransitionNetwork, pairwise_similarity, rank_to_tiers, regress,
                         tier_agreement, transition_recall)
