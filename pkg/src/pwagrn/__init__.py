"""Discrete-time piecewise-affine models of gene regulatory networks."""
from .errors import (
    AnalyticDomainError,
    AssumptionViolatedError,
    InvalidNetworkError,
    PwagrnError,
    SymmetryInapplicableError,
    UndecidedError,
)
from .network import (
    CircuitSpec,
    Edge,
    Heaviside,
    RegulatoryNetwork,
    circuit,
    circuit_symmetry,
    fixed_point_of_code,
    flip_node,
    iterate,
    negative_2circuit,
    normalize,
    positive_2circuit,
    self_activator,
    self_inhibitor,
    step,
    symbols_of,
)
from .symbolic import (
    AdmissibilityVerdict,
    Code,
    Verdict,
    code_of_trajectory,
    is_admissible,
    parse_code,
    periodic_orbit_from_code,
    transition_graph,
)

__version__ = "0.1.0"
