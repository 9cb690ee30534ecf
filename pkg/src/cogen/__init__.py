"""Generators, cogenerators and the phi_s / e_s / e_{s,r} functional calculus."""

from .cogen import (
    GAP_TOL,
    LIMIT_S_VALUES,
    RADIAL_R_VALUES,
    Cogenerator,
    EigenvalueGap,
    GeneratorPair,
    cogenerator_commutation_check,
    cogenerator_from_generator,
    cogenerator_limit_check,
    e_s_apply,
    e_sr_apply,
    eigenvalue_one_check,
    phi_s_apply,
    radial_limit_check,
    require_dissipative,
)

__all__ = [
    "Cogenerator",
    "EigenvalueGap",
    "GAP_TOL",
    "GeneratorPair",
    "LIMIT_S_VALUES",
    "RADIAL_R_VALUES",
    "cogenerator_commutation_check",
    "cogenerator_from_generator",
    "cogenerator_limit_check",
    "e_s_apply",
    "e_sr_apply",
    "eigenvalue_one_check",
    "phi_s_apply",
    "radial_limit_check",
    "require_dissipative",
]
