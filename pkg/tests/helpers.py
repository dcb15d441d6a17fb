"""Shared model builders for the test suite."""

from toricfiber.complexes import HierModel, graph_complex, split
from toricfiber.configs import Grading, MoveSet, matrix_configuration
from toricfiber.products import product_config


def binary_graph_model(vertices, edges):
    return HierModel.of(graph_complex(vertices, edges), (2,) * len(vertices))


def c4_model():
    # four-cycle in the order 1-2-4-3-1 so opposite corners are 1,4 and 2,3
    return binary_graph_model(range(1, 5), [(1, 2), (1, 3), (2, 4), (3, 4)])


def c4_split():
    model = c4_model()
    return model, split(model, {1, 2, 3}, {2, 3, 4})


def c4_product():
    model, sp = c4_split()
    return model, sp, product_config(sp.x_config, sp.y_config, sp.grading)


def segre_product(s, t):
    """Trivial one-class grading: sides are single rows of ones."""
    left = matrix_configuration([[1] * s], sizes=(s,))
    right = matrix_configuration([[1] * t], sizes=(t,))
    return product_config(left, right, Grading(((1,),)))


def two_k4_split():
    """K5 minus the edge 15, split into two K4 models over S={2,3,4}."""
    edges = [(i, j) for i in range(1, 6) for j in range(i + 1, 6)
             if (i, j) != (1, 5)]
    model = binary_graph_model(range(1, 6), edges)
    return model, split(model, {1, 2, 3, 4}, {2, 3, 4, 5})


def gap_instance():
    """Codim-1 product whose true Markov basis needs a glued move that the
    slow-varying and CPP checks both reject: the left side only moves its
    margin in steps of 3h."""
    left = matrix_configuration([[1, 1, 1], [0, 3, 1]], sizes=(2, 1))
    right = matrix_configuration([[1, 1]], sizes=(1, 1))
    grading = Grading(((1,), (1,)))
    product = product_config(left, right, grading)
    moves_f = MoveSet.of([(2, 1, -3)])
    moves_g = MoveSet.of([(1, -1)])
    return moves_f, moves_g, product
