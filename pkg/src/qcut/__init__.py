"""Partition-aware MCX decomposition and circuit cutting."""

from .cutter import CutPlan, SubcircuitPair, enumerate_all, instantiate, plan_cuts
from .estimate import Estimate, overhead_table, reconstruct_exact, reconstruct_mc
from .ir import Circuit, Gate, GateKind, PauliObservable, parse_circuit, serialize_circuit
from .mcx_decompose import Strategy, decompose_mcx, verify_decomposition
from .qpd import cx_cut_basis, overhead_per_cut, wire_cut_basis

__all__ = [
    "Circuit", "CutPlan", "Estimate", "Gate", "GateKind", "PauliObservable", "Strategy",
    "SubcircuitPair", "cx_cut_basis", "decompose_mcx", "enumerate_all", "instantiate",
    "overhead_per_cut", "overhead_table", "parse_circuit", "plan_cuts", "reconstruct_exact",
    "reconstruct_mc", "serialize_circuit", "verify_decomposition", "wire_cut_basis",
]
