"""Markov bases, toric fiber products, and hierarchical model tooling."""

from .configs import (GradedVariables, Grading, Move, MoveSet,
                      VectorConfiguration, kernel_basis, matrix_configuration)
from .errors import (BudgetExceeded, FiberCapExceeded, InputError,
                     ResourceError, ToricError)
from .complexes import (HierModel, ModelSplit, SimplicialComplex, cone_basis,
                        cone_lift, graph_complex, hier_codim, model_matrix,
                        parity_move, product_cell_map, side_cell_map, simplex,
                        simplex_boundary, simplex_boundary_move, split)
from .fibers import Fiber, FiberGraph, ProjectedGraph, enumerate_fiber
from .markov import (MarkovResult, MinimalDegrees, Verdict, connects_fiber,
                     markov_basis, markov_width, minimal_degrees,
                     verify_markov)
from .products import (AssemblyResult, CPPVerdict, ProductConfiguration,
                       SlowVaryingVerdict, TildeProduct, assemble,
                       codim0_basis, cpp_check, glue_pair, glue_sets,
                       lift_moves, product_config, quad_moves,
                       slow_varying_check, tilde_extend)

__all__ = [
    "GradedVariables", "Grading", "Move", "MoveSet", "VectorConfiguration",
    "kernel_basis", "matrix_configuration",
    "ToricError", "InputError", "ResourceError", "FiberCapExceeded",
    "BudgetExceeded",
    "HierModel", "ModelSplit", "SimplicialComplex", "cone_basis", "cone_lift",
    "graph_complex", "hier_codim", "model_matrix", "parity_move",
    "product_cell_map", "side_cell_map", "simplex", "simplex_boundary",
    "simplex_boundary_move", "split",
    "Fiber", "FiberGraph", "ProjectedGraph", "enumerate_fiber",
    "MarkovResult", "MinimalDegrees", "Verdict", "connects_fiber",
    "markov_basis", "markov_width", "minimal_degrees", "verify_markov",
    "ProductConfiguration", "TildeProduct", "AssemblyResult", "CPPVerdict",
    "SlowVaryingVerdict", "product_config", "tilde_extend", "quad_moves",
    "lift_moves", "codim0_basis", "glue_pair", "glue_sets",
    "slow_varying_check", "cpp_check", "assemble",
]
