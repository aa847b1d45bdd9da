"""Independence invariants of graphs through the LCP ``(A + I) x - e``.

The package covers graph construction and parsing, exact optimisation over
the solution set of a linear complementarity problem, brute-force oracles,
binary and mixed-integer programs over MAXIS(G), and semidefinite bounds
from the Lovasz-Schrijver N+ lift.
"""

from .graph import Graph, GraphError, from_edge_list, gen_erdos_renyi, named_graph, parse_graph
from .lcp import lcp_from_graph, max_weighted_norm, min_l1_norm, optimize_over_sol
from .milp import alpha_via_ilp, beta_via_ilp, maxis_polytope, frac_polytope
from .theta import ThetaReport, theta, theta_frac, theta_lovasz, theta_prime, theta_star

__all__ = [
    "Graph",
    "GraphError",
    "ThetaReport",
    "alpha_via_ilp",
    "beta_via_ilp",
    "frac_polytope",
    "from_edge_list",
    "gen_erdos_renyi",
    "lcp_from_graph",
    "max_weighted_norm",
    "maxis_polytope",
    "min_l1_norm",
    "named_graph",
    "optimize_over_sol",
    "parse_graph",
    "theta",
    "theta_frac",
    "theta_lovasz",
    "theta_prime",
    "theta_star",
]
