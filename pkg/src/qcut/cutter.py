"""Split a partitioned circuit into index-matched subcircuit pairs.

Every boundary-crossing CX/CZ becomes a gate cut and every ``wire_cut``
marker a wire cut. Choosing one term per cut (a term assignment) replaces
each cut by that term's local ops and yields two standalone circuits.

Subcircuit qubits: first the original qubits starting on that side, by
original index, then one fresh qubit per wire-cut downstream segment in the
order the cuts occur. ``mapping_a``/``mapping_b`` record ``(original qubit,
segment)`` for every local qubit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .errors import InvalidAssignment, ObservableSpansCut, UncuttableCrossing
from .ir import Circuit, Gate, GateKind, PauliObservable, circuit_to_dict, validate_partition
from .qpd import CutKind, LocalOp, QpdBasis, SignRule, basis_for


@dataclass(frozen=True)
class Cut:
    kind: CutKind
    gate_index: int
    qubit: int | None = None  # wire cuts only

    @property
    def basis(self) -> QpdBasis:
        return basis_for(self.kind)


@dataclass(frozen=True)
class CutPlan:
    cuts: tuple[Cut, ...] = ()

    @property
    def gamma(self) -> Fraction:
        return math.prod((c.basis.gamma for c in self.cuts), start=Fraction(1))

    @property
    def term_counts(self) -> tuple[int, ...]:
        return tuple(len(c.basis) for c in self.cuts)

    @property
    def num_pairs(self) -> int:
        return math.prod(self.term_counts)

    def count(self, kind: CutKind) -> int:
        return sum(c.kind is kind for c in self.cuts)


@dataclass(frozen=True)
class SubcircuitPair:
    assignment: tuple[int, ...]
    circuit_a: Circuit
    circuit_b: Circuit
    coefficient: Fraction
    sign_rules: tuple[tuple[int, str], ...]  # (classbit, side)
    mapping_a: tuple[tuple[int, int], ...]
    mapping_b: tuple[tuple[int, int], ...]

    def circuit(self, side: str) -> Circuit:
        return self.circuit_a if side == "A" else self.circuit_b

    def sign_bits(self, side: str) -> tuple[int, ...]:
        return tuple(b for b, s in self.sign_rules if s == side)

    def split_observable(self, obs: PauliObservable) -> tuple[PauliObservable, PauliObservable]:
        """Translate an observable on the original qubits into one per side.

        Each original qubit is read from its last segment.
        """
        last = {}
        for side, mapping in (("A", self.mapping_a), ("B", self.mapping_b)):
            for local, (orig, seg) in enumerate(mapping):
                if orig not in last or seg > last[orig][2]:
                    last[orig] = (side, local, seg)
        parts = {"A": [], "B": []}
        for q, p in obs.factors:
            if q not in last:
                raise ObservableSpansCut(f"observable qubit {q} is not in either subcircuit")
            side, local, _ = last[q]
            parts[side].append((local, p))
        return PauliObservable(tuple(parts["A"])), PauliObservable(tuple(parts["B"]))


def plan_cuts(c: Circuit) -> CutPlan:
    """One cut per boundary crossing, in circuit order."""
    found = validate_partition(c)
    cuts = []
    for i in found.gates:
        g = c.gates[i]
        if g.kind not in (GateKind.CX, GateKind.CZ):
            raise UncuttableCrossing(
                f"gate {i} ({g.kind.value}) crosses the partition; decompose it first")
        cuts.append(Cut(CutKind.GATE_CX, i))
    for w in found.wires:
        cuts.append(Cut(CutKind.WIRE, w.gate_index, w.qubit))
    return CutPlan(tuple(sorted(cuts, key=lambda cut: cut.gate_index)))


def _segments(c: Circuit, plan: CutPlan):
    """Assign every wire segment a side and a local qubit index."""
    wire_at = {cut.gate_index: cut for cut in plan.cuts if cut.kind is CutKind.WIRE}
    side_of = {}  # (qubit, segment) -> side
    order = {"A": [], "B": []}
    for q in range(c.num_qubits):
        side_of[(q, 0)] = c.partition[q]
        order[c.partition[q]].append((q, 0))
    seg = [0] * c.num_qubits
    for i, g in enumerate(c.gates):
        if g.kind is GateKind.WIRE_CUT:
            if i not in wire_at:
                raise InvalidAssignment(f"wire_cut marker at gate {i} is not in the cut plan")
            q = g.qubits[0]
            prev = side_of[(q, seg[q])]
            seg[q] += 1
            side_of[(q, seg[q])] = "B" if prev == "A" else "A"
            order[side_of[(q, seg[q])]].append((q, seg[q]))
    local = {}
    for side in ("A", "B"):
        for k, key in enumerate(order[side]):
            local[key] = k
    return side_of, local, order


class _SideBuilder:
    def __init__(self, side: str):
        self.side = side
        self.gates: list[Gate] = []
        self.nbits = 0

    def add(self, g: Gate, qubits) -> int | None:
        """Append ``g`` on ``qubits``; returns the classbit of a measurement."""
        if g.kind is GateKind.MEASURE_Z:
            self.gates.append(Gate(g.kind, tuple(qubits), cbit=self.nbits))
            self.nbits += 1
            return self.nbits - 1
        self.gates.append(Gate(g.kind, tuple(qubits), angle=g.angle, state=g.state))
        return None

    def add_local(self, op_gates, qubit: int) -> list[int]:
        bits = []
        for g in op_gates:
            b = self.add(g, (qubit,))
            if b is not None:
                bits.append(b)
        return bits


_H = Gate(GateKind.H, (0,))


def instantiate(c: Circuit, plan: CutPlan, assignment) -> SubcircuitPair:
    assignment = tuple(int(t) for t in assignment)
    if len(assignment) != len(plan.cuts):
        raise InvalidAssignment(f"{len(plan.cuts)} cuts but {len(assignment)} term indices")
    for t, cut in zip(assignment, plan.cuts):
        if not 0 <= t < len(cut.basis):
            raise InvalidAssignment(f"term {t} out of range for a {cut.kind.value} cut")
    side_of, local, order = _segments(c, plan)
    term_at = {cut.gate_index: (cut, cut.basis.terms[t]) for cut, t in zip(plan.cuts, assignment)}
    builders = {"A": _SideBuilder("A"), "B": _SideBuilder("B")}
    seg = [0] * c.num_qubits
    coefficient = Fraction(1)
    sign_rules = []

    def where(q):
        key = (q, seg[q])
        return side_of[key], local[key]

    for i, g in enumerate(c.gates):
        if i in term_at:
            cut, term = term_at[i]
            coefficient *= term.coefficient
            if cut.kind is CutKind.WIRE:
                q = g.qubits[0]
                up_side, up_q = where(q)
                seg[q] += 1
                down_side, down_q = where(q)
                placed = [(up_side, up_q, term.op_a), (down_side, down_q, term.op_b)]
            else:
                placed = []
                for role, q in enumerate(g.qubits):
                    side, lq = where(q)
                    op = term.op_a if side == "A" else term.op_b
                    if g.kind is GateKind.CX and role == 1:
                        op = LocalOp(op.side, (_H, *op.gates, _H))
                    placed.append((side, lq, op))
            for side, lq, op in placed:
                bits = builders[side].add_local(op.gates, lq)
                if term.sign_rule is SignRule.SIGN_FROM_MEASUREMENT:
                    sign_rules.extend((b, side) for b in bits)
            continue
        locs = [where(q) for q in g.qubits]
        sides = {s for s, _ in locs}
        if len(sides) != 1:
            raise UncuttableCrossing(f"gate {i} crosses the partition but has no cut")
        builders[sides.pop()].add(g, [lq for _, lq in locs])

    def build(side):
        names = tuple(c.qubit_names[q] if s == 0 else f"{c.qubit_names[q]}#{s}"
                      for q, s in order[side])
        return Circuit(names, tuple(builders[side].gates))

    return SubcircuitPair(assignment, build("A"), build("B"), coefficient, tuple(sign_rules),
                          tuple(order["A"]), tuple(order["B"]))


def enumerate_all(c: Circuit, plan: CutPlan) -> Iterator[tuple[tuple[int, ...], SubcircuitPair]]:
    """Every joint term assignment with its pair, in lexicographic order."""
    for t in itertools.product(*(range(n) for n in plan.term_counts)):
        yield t, instantiate(c, plan, t)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def pair_to_dict(p: SubcircuitPair) -> dict:
    return {
        "assignment": list(p.assignment),
        "coefficient": float(p.coefficient),
        "sign_rules": [[b, s] for b, s in p.sign_rules],
        "mapping_a": [list(m) for m in p.mapping_a],
        "mapping_b": [list(m) for m in p.mapping_b],
        "circuit_a": circuit_to_dict(p.circuit_a),
        "circuit_b": circuit_to_dict(p.circuit_b),
    }


def plan_to_dict(plan: CutPlan) -> dict:
    return {
        "cuts": [{"kind": cut.kind.value, "gate_index": cut.gate_index, "qubit": cut.qubit,
                  "terms": len(cut.basis)} for cut in plan.cuts],
        "gamma": float(plan.gamma),
        "num_pairs": plan.num_pairs,
    }
