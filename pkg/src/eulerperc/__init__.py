"""Even (Eulerian) bond percolation on Z^2.

Samples come from Ising contours on the dual lattice; exact tables come from
cycle-space enumeration.  See ``eulerperc.cli`` for the command-line tools.
"""
from .contour import EdgeConfig, coloring_of, contours, is_even, star_chain_from_path
from .coupling import build_table, check_P2, check_P3, conditional_flip, couple_even_box
from .evenperc import exact_even_measure, sample_mu_p, verify_lemmeimage
from .exactgraph import (FiniteGraph, build_figure_graph, covariance_numerator, event_poly,
                         partition_poly)
from .ising import IsingParams, SpinConfig, beta_of_p, checkerboard_transform, sample_gibbs
from .cli import version as _version
from .kernels import BACKEND
from .lattice import BoxGeometry, build_box
from .polyarith import IntPolynomial, count_positive_roots

__version__ = _version()

__all__ = [
    "BACKEND", "BoxGeometry", "EdgeConfig", "FiniteGraph", "IntPolynomial", "IsingParams",
    "SpinConfig", "beta_of_p", "build_box", "build_figure_graph", "build_table", "check_P2",
    "check_P3", "checkerboard_transform", "coloring_of", "conditional_flip", "contours",
    "count_positive_roots", "couple_even_box", "covariance_numerator", "event_poly",
    "exact_even_measure", "is_even", "partition_poly", "sample_gibbs", "sample_mu_p",
    "star_chain_from_path", "verify_lemmeimage",
]
