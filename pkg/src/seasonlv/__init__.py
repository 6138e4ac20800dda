"""Seasonal-succession Lotka-Volterra competition: Poincare map toolkit.

Typical use::

    from seasonlv import bundled_scenario, classify, inventory, analyze_orbit

    scen = bundled_scenario("class29")
    classify(scen.params).class_id.id          # 29
    inv = inventory(scen.params)               # all fixed points with indices
    trace, report = analyze_orbit(scen.params, scen.x0)
    report.verdict                             # "closed_curve"
"""
from .attractor import (LimitSetReport, OrbitTrace, analyze_limit_set, analyze_orbit, iterate,
                        ordered_pairs, simplex_mesh)
from .classify import (BoundarySignature, ClassId, canonical_class, class_table, classify,
                       expected_positive_fp, heteroclinic_theta, signature)
from .errors import (Degenerate, Inadmissible, InvalidConfig, InvalidParams, InvalidState,
                     NewtonDivergence, NonFiniteState, NonHyperbolic, SeasonLVError,
                     StepBudgetExceeded, UnknownSignature, WrongClass)
from .fixedpoints import (FixedPointRecord, Inventory, axial_fixed_point, inventory,
                          planar_fixed_point, positive_fixed_points, stability_and_index,
                          verify_index_formula)
from .flow import DEFAULT_CONFIG, FlowResult, IntegratorConfig, linear_phase, lv_flow, poincare
from .model import (DerivedParams, ModelParams, Scenario, bundled_scenario, derive, load_scenario,
                    sample_params, validate)
from .oracle import LGMap, lg_apply, lg_signature

__version__ = "0.1.0"

__all__ = [
    "BoundarySignature", "ClassId", "DEFAULT_CONFIG", "Degenerate", "DerivedParams",
    "FixedPointRecord", "FlowResult", "Inadmissible", "IntegratorConfig", "InvalidConfig",
    "InvalidParams", "InvalidState", "Inventory", "LGMap", "LimitSetReport", "ModelParams",
    "NewtonDivergence", "NonFiniteState", "NonHyperbolic", "OrbitTrace", "Scenario",
    "SeasonLVError", "StepBudgetExceeded", "UnknownSignature", "WrongClass",
    "analyze_limit_set", "analyze_orbit", "axial_fixed_point", "bundled_scenario",
    "canonical_class", "class_table", "classify", "derive", "expected_positive_fp",
    "heteroclinic_theta", "inventory", "iterate", "lg_apply", "lg_signature", "linear_phase",
    "load_scenario", "lv_flow", "ordered_pairs", "planar_fixed_point", "poincare",
    "positive_fixed_points", "sample_params", "signature", "simplex_mesh",
    "stability_and_index", "validate", "verify_index_formula",
]
