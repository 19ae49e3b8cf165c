"""Relation registry and verification harness for wave-particle duality relations."""

from .relations import (
    ENTROPIC,
    RELATIONS,
    SATURATION,
    SQUARED,
    TOLERANCE,
    Relation,
    UnsupportedRelationError,
    WpdrReport,
    check,
    entropic_terms,
    evaluate,
    quantities_for,
    relation_quantities,
)
from .samplers import SAMPLERS, eur_terms, random_tripartite
from .suite import (
    IdentityCheck,
    RelationSummary,
    SuiteReport,
    equivalence_checks,
    visibility_identity_deviation,
    reference_identity_deviation,
    randomized_suite,
    run_sample,
    worker_count,
)
