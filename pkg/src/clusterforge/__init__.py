"""Entangler-based cluster-state schedules with tableau and state-vector verification."""

from .compiler import (
    PrimOp,
    ResourceCount,
    Schedule,
    TimedSchedule,
    add_photon,
    build_box_type1,
    build_box_type2,
    build_lattice,
    build_star,
    build_string,
    count_resources,
    cz_expansion,
    parallelize,
)
from .graphs import Graph, PauliString, box_graph, graph_stabilizers, grid_graph, star_graph, string_graph
from .stabsim import Tableau, canonical_form
from .verify import VerificationReport, verify_schedule

__version__ = "0.1.0"
