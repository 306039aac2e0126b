"""Spectral solvers for first-order elliptic systems A:Du = f on the periodic cell.

Fields are numpy arrays of shape (components, G, ..., G); axis k+1 is coordinate x_{k+1}.
"""

from ._ellsys import (
    DimensionError,
    DivergenceError,
    DomainError,
    Error,
    EvaluationError,
    FormatError,
    InputError,
    LookupError,
    NonEllipticError,
    Operator,
    SizeCapError,
    Tensor,
    apply_operator,
    brute_nu,
    campanato_solve,
    catalog,
    ellipticity,
    evaluate_operator,
    gradient,
    nearness,
    norm_l2,
    random_band_limited,
    read_efof,
    solve_dense,
    solve_linear,
    solve_representation,
    verify_apriori,
    verify_comparison,
    write_efof,
)

__version__ = "0.1.0"
