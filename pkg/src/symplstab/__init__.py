"""Stability of linear torus and GL(r) actions, with moment-map certificates."""
from . import flow, harness, momentum, reductive, representation, stability
from .flow import FlowResult, find_zero_shift, inf_moment_norm, kn_descent
from .harness import Instance, compare, gallery, generate_random, load_instance
from .momentum import energy, kempf_ness, limit_point, maximal_weight, moment_vector
from .representation import (
    Representation,
    Symplectization,
    adjoint_representation,
    named_representation,
    standard_representation,
    symmetric_power_representation,
    torus_representation,
)
from .stability import Verdict, analytic_verdict, degeneration_certificate

__version__ = "0.1.0"

__all__ = [
    "flow", "harness", "momentum", "reductive", "representation", "stability",
    "FlowResult", "find_zero_shift", "inf_moment_norm", "kn_descent",
    "Instance", "compare", "gallery", "generate_random", "load_instance",
    "energy", "kempf_ness", "limit_point", "maximal_weight", "moment_vector",
    "Representation", "Symplectization", "adjoint_representation", "named_representation",
    "standard_representation", "symmetric_power_representation", "torus_representation",
    "Verdict", "analytic_verdict", "degeneration_certificate",
]
