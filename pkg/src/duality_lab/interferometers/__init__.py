"""Scenario builders and duality-quantity calculators for binary interferometers."""

from .erasure import (
    ErasureResult,
    PathIsometry,
    banaszek_operational_v,
    banaszek_quantities,
    bloch_projectors,
    choi_state,
    erasure_coherence,
    erasure_quantities,
)
from .frameworks import (
    DualityQuantities,
    VisibilityError,
    analytic_visibility,
    click_probability,
    compress,
    effective_detection,
    fringe_visibility_from,
    fringe_visibility_sweep,
    hybrid_quantities,
    hybrid_state,
    interfering_input,
    predictive_quantities,
    retrodictive_quantities,
    retrodictive_state,
    scenario_quantities,
    state_at_t2,
    unbiased_weight,
)
from .qbs import (
    optimal_polarization_observable,
    pguess_in_basis,
    polarization_conditionals,
    qbs_closed_forms,
    qbs_simulated,
    qbs_visibility_formula,
)
from .scenario import (
    FRAMEWORKS,
    PRESETS,
    SWEEP_PARAMETERS,
    QbsSpec,
    Scenario,
    ScenarioError,
    double_slit,
    franson,
    franson_phase,
    mzi,
    port_detection,
    qbs_scenario,
    with_parameter,
    xy_detection,
)
