"""Quasi-probability term tables for CX/CZ gate cuts and wire cuts.

A basis is a list of terms ``c_i * F_i^A (x) F_i^B``. Each local op is a short
gate sequence acting on a single placeholder qubit (index 0) that the cutter
maps onto the real endpoint. A term whose op contains a MEASURE_Z with
``SIGN_FROM_MEASUREMENT`` contributes with an extra factor of -1 whenever
that measurement reads 1.

Sampling overhead is ``gamma**2`` with ``gamma = sum(|c_i|)``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from .ir import Gate, GateKind, PrepState, gate_to_dict


class CutKind(str, Enum):
    GATE_CX = "gate_cx"
    WIRE = "wire"


class SignRule(str, Enum):
    NONE = "none"
    SIGN_FROM_MEASUREMENT = "sign_from_measurement"


@dataclass(frozen=True)
class LocalOp:
    """Gates on one cut endpoint. For wire cuts endpoint A is upstream."""

    side: str
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        if any(g.qubits != (0,) for g in self.gates):
            raise ValueError("local ops act on the single placeholder qubit 0")

    @property
    def measures(self) -> bool:
        return any(g.kind is GateKind.MEASURE_Z for g in self.gates)


@dataclass(frozen=True)
class QpdTerm:
    coefficient: Fraction
    op_a: LocalOp
    op_b: LocalOp
    sign_rule: SignRule = SignRule.NONE

    def __post_init__(self):
        if self.coefficient == 0:
            raise ValueError("QPD coefficients must be nonzero")


@dataclass(frozen=True)
class QpdBasis:
    kind: CutKind
    terms: tuple[QpdTerm, ...]

    @property
    def gamma(self) -> Fraction:
        return sum((abs(t.coefficient) for t in self.terms), Fraction(0))

    def __len__(self):
        return len(self.terms)


def _ops(side, *kinds, state=None):
    gates = []
    for k in kinds:
        if k is GateKind.PREP:
            gates.append(Gate(k, (0,), state=state))
        else:
            gates.append(Gate(k, (0,)))
    return LocalOp(side, tuple(gates))


HALF = Fraction(1, 2)
S, SDG, H, M, PREP = GateKind.S, GateKind.SDG, GateKind.H, GateKind.MEASURE_Z, GateKind.PREP
_SIGNED = SignRule.SIGN_FROM_MEASUREMENT


@lru_cache(maxsize=None)
def cz_cut_basis() -> QpdBasis:
    """Six-term decomposition of the CZ channel into local ops.

    ``S S`` on one qubit is a Z gate up to global phase.
    """
    return QpdBasis(CutKind.GATE_CX, (
        QpdTerm(HALF, _ops("A", S), _ops("B", S)),
        QpdTerm(HALF, _ops("A", SDG), _ops("B", SDG)),
        QpdTerm(HALF, _ops("A", M), _ops("B"), _SIGNED),
        QpdTerm(-HALF, _ops("A", M), _ops("B", S, S), _SIGNED),
        QpdTerm(HALF, _ops("A"), _ops("B", M), _SIGNED),
        QpdTerm(-HALF, _ops("A", S, S), _ops("B", M), _SIGNED),
    ))


def cx_cut_basis() -> QpdBasis:
    """CX cuts share the CZ table; the cutter wraps the target endpoint in H."""
    return cz_cut_basis()


@lru_cache(maxsize=None)
def wire_cut_basis() -> QpdBasis:
    """Measure-and-prepare decomposition of the identity channel.

    Upstream reads out Tr(P rho) for P in {I, X, Y, Z}; downstream prepares
    the matching eigenstates. The two trace terms discard the upstream qubit
    without measuring it.
    """
    P = PrepState
    return QpdBasis(CutKind.WIRE, (
        QpdTerm(HALF, _ops("A"), _ops("B", PREP, state=P.ZERO)),
        QpdTerm(HALF, _ops("A"), _ops("B", PREP, state=P.ONE)),
        QpdTerm(HALF, _ops("A", H, M), _ops("B", PREP, state=P.PLUS), _SIGNED),
        QpdTerm(-HALF, _ops("A", H, M), _ops("B", PREP, state=P.MINUS), _SIGNED),
        QpdTerm(HALF, _ops("A", SDG, H, M), _ops("B", PREP, state=P.PLUS_I), _SIGNED),
        QpdTerm(-HALF, _ops("A", SDG, H, M), _ops("B", PREP, state=P.MINUS_I), _SIGNED),
        QpdTerm(HALF, _ops("A", M), _ops("B", PREP, state=P.ZERO), _SIGNED),
        QpdTerm(-HALF, _ops("A", M), _ops("B", PREP, state=P.ONE), _SIGNED),
    ))


def basis_for(kind: CutKind) -> QpdBasis:
    return cx_cut_basis() if CutKind(kind) is CutKind.GATE_CX else wire_cut_basis()


def overhead_per_cut(kind: CutKind, classical_comm: bool = False) -> int:
    """Sampling overhead (gamma squared) contributed by one cut.

    With classical communication a CX cut drops to gamma = 2. Wire cuts keep
    gamma = 4 here because joint wire-cut reduction is not implemented; a
    warning flags that case.
    """
    kind = CutKind(kind)
    if kind is CutKind.GATE_CX:
        return 4 if classical_comm else int(cx_cut_basis().gamma ** 2)
    if classical_comm:
        warnings.warn("no classical-communication reduction for wire cuts; reporting 16",
                      stacklevel=2)
    return int(wire_cut_basis().gamma ** 2)


def gamma_per_cut(kind: CutKind, classical_comm: bool = False) -> int:
    return math.isqrt(overhead_per_cut(kind, classical_comm))


def basis_to_dict(basis: QpdBasis) -> dict:
    def op(o: LocalOp):
        return [gate_to_dict(g) for g in o.gates]

    return {
        "kind": basis.kind.value,
        "gamma": str(basis.gamma),
        "terms": [
            {"coefficient": str(t.coefficient), "op_a": op(t.op_a), "op_b": op(t.op_b),
             "sign_rule": t.sign_rule.value}
            for t in basis.terms
        ],
    }


def dump_tables() -> str:
    return json.dumps({"cx": basis_to_dict(cx_cut_basis()),
                       "wire": basis_to_dict(wire_cut_basis())}, indent=2)
