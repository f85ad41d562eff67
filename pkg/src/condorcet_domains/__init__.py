"""Condorcet domains: construction, verification, analysis and inductive search."""

from .analysis import (
    IncompleteRecords,
    PropertyReport,
    abundance_profile,
    connectivity_and_diameter,
    core,
    first_last_counts,
    has_maximum_width,
    is_ample,
    is_peak_pit,
    min_non_13_31,
    property_report,
    subdomain_census,
)
from .canonical import CanonicalForm, canonical_form, canonical_relabelling, dedup, is_isomorphic, is_self_dual
from .constructions import (
    CompositionSpec,
    GrowthBound,
    best_liminf_bound,
    compose_s1,
    compose_s2,
    fishburn_domain,
    fishburn_scheme,
    liminf_bound,
)
from .formats import ParseError, parse_domain, parse_rules, read_domain, read_rules, write_domain, write_rules
from .orders import Domain, InvalidArgument, dual, relabel, restrict
from .records import RecordConflict, RecordEntry, RecordStore, SizeFunctionTable
from .rules import (
    ALL_RULES,
    PEAK_PIT_RULES,
    SEARCH_RULES,
    NeverRule,
    NotCondorcet,
    RuleAssignment,
    extract_rules,
    generate_domain,
    is_condorcet,
    is_copious,
    is_full,
    is_maximal,
    verify_by_profiles,
)
from .search import Infeasible, SearchConfig, bootstrap, exhaustive_maximal, extend, instantiate, merge_compatible, select_seeds

__version__ = "0.1.0"
