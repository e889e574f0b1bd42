"""K-Center Global Solver - exact branch and bound for K-center clustering.

This package provides functionality to:
- Load CSV datasets and generate synthetic Gaussian mixtures
- Compute closed-form lower and upper bounds over center boxes
- Run a Farthest First Traversal baseline
- Solve the "centers on samples" K-center problem to a relative gap
- Verify small instances against a brute-force oracle

Example:
    >>> from kcenter_global import generate_gaussian, solve
    >>> d = generate_gaussian(60, 3, 2, seed=7)
    >>> report = solve(d, 3)
    >>> report.gap_pct <= 0.1
    True
"""

__version__ = "1.0.0"
__author__ = "K-Center Global Solver Team"
__license__ = "MIT"

from .dataset import Box, CenterRegion, Dataset, generate_gaussian, load_csv, write_csv
from .heuristic import CenterSet, fft, fft_multistart
from .oracle import OracleResult, brute_force
from .search import KCenterSolver, SolveReport, SolverConfig, Termination, solve

__all__ = [
    "Box",
    "CenterRegion",
    "CenterSet",
    "Dataset",
    "KCenterSolver",
    "OracleResult",
    "SolveReport",
    "SolverConfig",
    "Termination",
    "brute_force",
    "fft",
    "fft_multistart",
    "generate_gaussian",
    "load_csv",
    "solve",
    "write_csv",
]
