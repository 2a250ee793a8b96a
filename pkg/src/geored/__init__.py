"""Exact, brute-force checking of geometry-preserving reductions between CSPs."""

__version__ = "0.1.0"

from .covers import enumerate_covers, is_cover, is_cover_boolean, is_cover_general, is_true_cover  # noqa: E402
from .csp import (  # noqa: E402
    BudgetExceeded,
    CspInstance,
    Domain,
    Graph,
    ParseError,
    enumerate_solutions,
    overlap,
    parse_dimacs,
    parse_graph,
)
from .reductions import REDUCTIONS, Reduction, compose  # noqa: E402
from .verify import VerificationReport, emit_report, verify_reduction  # noqa: E402

__all__ = [
    "BudgetExceeded",
    "CspInstance",
    "Domain",
    "Graph",
    "ParseError",
    "REDUCTIONS",
    "Reduction",
    "VerificationReport",
    "compose",
    "emit_report",
    "enumerate_covers",
    "enumerate_solutions",
    "is_cover",
    "is_cover_boolean",
    "is_cover_general",
    "is_true_cover",
    "overlap",
    "parse_dimacs",
    "parse_graph",
    "verify_reduction",
    "__version__",
]
