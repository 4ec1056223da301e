"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import petrovkit as pk


def test_solve_franke_defaults():
    result = pk.solve_franke(h=0.1)
    assert result["method"] == "dmlpg5"
    assert result["degree"] == 2
    assert len(result["values"]) == 121
    assert len(result["boundary_tags"]) == 121
    assert result["residual"] <= 1e-8
    assert 1e-3 < result["max_error"] < 5e-2


def test_convergence_helper_reports_ratios():
    levels = pk.convergence(h_list=(0.2, 0.1))
    assert len(levels) == 2
    assert levels[0]["ratio"] is None
    assert 0.8 < levels[1]["ratio"] < 2.5
    assert levels[1]["max_error"] < levels[0]["max_error"]


def test_invalid_configurations_raise_value_error():
    with pytest.raises(ValueError):
        pk.solve_franke(method="bogus")
    with pytest.raises(pk.ConfigError, match="zero"):
        pk.solve_franke(method="dmlpg5", degree=1)
    assert issubclass(pk.ConfigError, ValueError)


def test_custom_poisson_problem_patch_test():
    result = pk.solve_poisson(
        f=lambda x: 2.0,
        u_D=lambda x: x[0] ** 2,
        exact=lambda x: x[0] ** 2,
        h=0.1,
        workers=4,  # callbacks re-enter python from several assembly threads
    )
    assert result["max_error"] <= 1e-8


def test_harmonic_solution_is_exact():
    result = pk.solve_poisson(
        f=lambda x: 0.0,
        u_D=lambda x: x[0] ** 2 - x[1] ** 2,
        exact=lambda x: x[0] ** 2 - x[1] ** 2,
        method="dmlpg2",
        h=0.1,
    )
    assert result["max_error"] <= 1e-9


def test_derivative_row_reproduces_polynomials():
    nodes = pk.generate_grid(pk.unit_square(), 0.1)
    y = np.array([0.47, 0.53])
    basis = pk.MonomialBasis(2, 2, y, 0.1)
    weight = pk.WeightFunction.scaled(0.6, 4.0, 0.1)
    row = pk.gmls_derivative_row(nodes, y, [1, 0], basis, weight)

    points = np.asarray(nodes.points)
    data = 3 * points[:, 0] ** 2 - 2 * points[:, 0] * points[:, 1] + points[:, 1]
    expected = 6 * y[0] - 2 * y[1]
    assert abs(row.apply(data) - expected) <= 1e-9


def test_shape_functions_partition_unity():
    nodes = pk.generate_grid(pk.unit_square(), 0.1)
    x = np.array([0.415, 0.67])
    shapes = pk.mls_shape_values(nodes, x, 2, 0.1, pk.WeightFunction.scaled(0.6, 4.0, 0.1))
    assert abs(np.sum(shapes.values) - 1.0) <= 1e-12
    points = np.asarray(nodes.points)[shapes.neighbors]
    assert np.allclose(shapes.values @ points, x, atol=1e-12)


def test_quadrature_rules_have_consistent_mass():
    gl = pk.gauss_legendre(5)
    assert abs(np.sum(gl.weights) - 2.0) <= 1e-14

    ball = pk.disk(6, 16, np.array([0.4, 0.6]), 0.1)
    assert abs(np.sum(ball.weights) - math.pi * 0.1**2) <= 1e-12

    box = pk.Box(np.array([0.3, 0.3]), np.array([0.5, 0.5]))
    edge = pk.rectangle_boundary(3, box)
    assert edge.has_normals()
    assert abs(np.sum(edge.weights) - 0.8) <= 1e-13


def test_franke_surface_values():
    x = np.array([0.5, 0.5])
    assert abs(pk.franke(x) - 0.11201159918660236) <= 1e-12
    step = 1e-5
    fd = (
        pk.franke(np.array([0.5 + step, 0.5])) - pk.franke(np.array([0.5 - step, 0.5]))
    ) / (2 * step)
    assert abs(pk.franke_dx(x) - fd) <= 1e-6


def test_node_sets_round_trip_through_files(tmp_path):
    nodes = pk.generate_grid(pk.unit_square(), 0.25)
    assert nodes.size == 25
    assert nodes.count_boundary() == 16
    path = str(tmp_path / "nodes.txt")
    pk.save_nodes(nodes, path)
    loaded = pk.load_nodes(path, spacing_hint=0.25)
    assert loaded.size == nodes.size
    assert np.allclose(np.asarray(loaded.points), np.asarray(nodes.points))
    assert [loaded.boundary_tag(i) for i in range(loaded.size)] == [
        nodes.boundary_tag(i) for i in range(nodes.size)
    ]


def test_evaluate_solution_reproduces_quadratics():
    nodes = pk.generate_grid(pk.unit_square(), 0.1)
    points = np.asarray(nodes.points)
    values = 0.3 * points[:, 0] ** 2 + points[:, 0] * points[:, 1] - 0.7 * points[:, 1] ** 2
    weight = pk.WeightFunction.scaled(0.6, 4.0, 0.1)
    x = np.array([0.385, 0.61])
    expected = 0.3 * x[0] ** 2 + x[0] * x[1] - 0.7 * x[1] ** 2
    assert abs(pk.evaluate_solution(nodes, values, x, 2, weight) - expected) <= 1e-9
