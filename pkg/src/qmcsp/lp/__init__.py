"""Dense LP kernel: simplex and vertex enumeration."""
from .simplex import LinearProgram, LpSolution, LpStatus, dump_lp, solve_lp
from .vertices import EmptyPolyhedronError, VertexList, enumerate_vertices, vertex_adjacency

__all__ = ["LinearProgram", "LpSolution", "LpStatus", "solve_lp", "dump_lp",
           "VertexList", "enumerate_vertices", "vertex_adjacency", "EmptyPolyhedronError"]
