"""Meshless Poisson solvers built on generalized moving least squares.

The heavy lifting lives in the compiled ``_core`` module; this package adds a
small convenience layer for convergence studies.
"""

from __future__ import annotations

import math

from ._core import (  # noqa: F401
    Box,
    CoefficientRow,
    ConfigError,
    MonomialBasis,
    NodeSet,
    QuadratureRule,
    Rectangle,
    ShapeFunctionValues,
    SolverError,
    UnisolvencyError,
    WeightFunction,
    circle_boundary,
    disk,
    evaluate_solution,
    fill_distance,
    franke,
    franke_dx,
    franke_dy,
    franke_laplacian,
    gauss_legendre,
    generate_grid,
    gmls_derivative_row,
    load_nodes,
    mls_shape_values,
    rectangle_boundary,
    save_nodes,
    separation_distance,
    solve_franke,
    solve_poisson,
    tag_boundary,
    tensor_rectangle,
    unit_square,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["convergence"]


def convergence(method="dmlpg5", degree=2, h_list=(0.2, 0.1, 0.05, 0.025), **kwargs):
    """Run the Franke benchmark over a list of spacings.

    Returns a list of per-level dicts as produced by :func:`solve_franke`,
    each augmented with the observed order ``ratio`` (log2 of the error drop)
    from the second level on.
    """
    results = []
    for h in h_list:
        result = solve_franke(method=method, degree=degree, h=h, **kwargs)
        result["h"] = h
        if results:
            prev = results[-1]
            result["ratio"] = math.log2(prev["max_error"] / result["max_error"])
        else:
            result["ratio"] = None
        results.append(result)
    return results
