"""Circuit IR, validation, partition crossings and the JSON interchange format.

Qubit 0 is the least-significant bit of every computational-basis label.
Controlled gates list their controls first and the target last.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Iterator

from .errors import PartitionMissing, SchemaError, ValidationError, ObservableError

FORMAT = "qcut-1"
SIDES = ("A", "B")


class GateKind(str, Enum):
    X = "x"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RZ = "rz"
    CX = "cx"
    CZ = "cz"
    CCX = "ccx"
    MCX = "mcx"
    MEASURE_Z = "measure_z"
    PREP = "prep"
    # Moves a qubit's wire to the other partition; identity when simulated uncut.
    WIRE_CUT = "wire_cut"


class PrepState(str, Enum):
    ZERO = "zero"
    ONE = "one"
    PLUS = "plus"
    MINUS = "minus"
    PLUS_I = "plus_i"
    MINUS_I = "minus_i"


_FIXED_ARITY = {
    GateKind.X: 1, GateKind.H: 1, GateKind.S: 1, GateKind.SDG: 1,
    GateKind.T: 1, GateKind.TDG: 1, GateKind.RZ: 1,
    GateKind.CX: 2, GateKind.CZ: 2, GateKind.CCX: 3,
    GateKind.MEASURE_Z: 1, GateKind.PREP: 1, GateKind.WIRE_CUT: 1,
}
CONTROLLED_X = (GateKind.CX, GateKind.CCX, GateKind.MCX)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None
    cbit: int | None = None
    state: PrepState | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.state is not None:
            object.__setattr__(self, "state", PrepState(self.state))
        n = len(self.qubits)
        if self.kind is GateKind.MCX:
            if n < 2:
                raise ValidationError(f"mcx needs at least 2 qubits, got {n}")
        elif n != _FIXED_ARITY[self.kind]:
            raise ValidationError(
                f"{self.kind.value} takes {_FIXED_ARITY[self.kind]} qubit(s), got {n}")
        if len(set(self.qubits)) != n:
            raise ValidationError(f"duplicate qubit in {self.kind.value} {list(self.qubits)}")
        if any(q < 0 for q in self.qubits):
            raise ValidationError("negative qubit index")
        if self.kind is GateKind.RZ and self.angle is None:
            raise ValidationError("rz requires an angle")
        if self.kind is GateKind.PREP and self.state is None:
            raise ValidationError("prep requires a state")

    @property
    def num_controls(self) -> int:
        return len(self.qubits) - 1 if self.kind in CONTROLLED_X else 0

    @property
    def controls(self) -> tuple[int, ...]:
        return self.qubits[:-1]

    @property
    def target(self) -> int:
        return self.qubits[-1]


def mcx(controls: Iterable[int], target: int) -> Gate:
    """Controlled-X on any number of controls, normalized to CX/CCX where possible."""
    qs = (*controls, target)
    kind = {2: GateKind.CX, 3: GateKind.CCX}.get(len(qs), GateKind.MCX)
    return Gate(kind, qs)


@dataclass(frozen=True)
class Circuit:
    qubit_names: tuple[str, ...]
    gates: tuple[Gate, ...] = ()
    partition: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubit_names", tuple(self.qubit_names))
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.partition is not None:
            object.__setattr__(self, "partition", tuple(self.partition))
        n = len(self.qubit_names)
        if len(set(self.qubit_names)) != n:
            raise ValidationError("qubit names must be unique")
        for i, g in enumerate(self.gates):
            if any(q >= n for q in g.qubits):
                raise ValidationError(f"gate {i} ({g.kind.value}) references a qubit >= {n}")
        if self.partition is not None:
            if len(self.partition) != n:
                raise ValidationError("partition must label every qubit")
            bad = set(self.partition) - set(SIDES)
            if bad:
                raise ValidationError(f"partition labels must be A or B, got {sorted(bad)}")

    @property
    def num_qubits(self) -> int:
        return len(self.qubit_names)

    def with_gates(self, gates: Iterable[Gate]) -> Circuit:
        return replace(self, gates=tuple(gates))

    def count(self, kind: GateKind) -> int:
        return sum(g.kind is kind for g in self.gates)

    def num_measurements(self) -> int:
        return self.count(GateKind.MEASURE_Z)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

_PAULI_TOKEN = re.compile(r"^([IXYZ])(\d+)$")


@dataclass(frozen=True)
class PauliObservable:
    """Tensor product of single-qubit Paulis; identity factors are dropped."""

    factors: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        items = dict(self.factors)
        for q, p in items.items():
            if p not in "IXYZ" or len(p) != 1:
                raise ObservableError(f"unknown Pauli {p!r}")
            if q < 0:
                raise ObservableError(f"negative qubit {q}")
        object.__setattr__(self, "factors",
                           tuple(sorted((int(q), p) for q, p in items.items() if p != "I")))

    @classmethod
    def parse(cls, text: str) -> PauliObservable:
        """Parse ``"Z3"`` or ``"Z0*X2"`` style strings."""
        factors = {}
        for tok in text.replace(" ", "").split("*"):
            m = _PAULI_TOKEN.match(tok)
            if not m:
                raise ObservableError(f"cannot parse observable token {tok!r}")
            q = int(m.group(2))
            if q in factors:
                raise ObservableError(f"qubit {q} appears twice in observable")
            factors[q] = m.group(1)
        return cls(tuple(factors.items()))

    def as_dict(self) -> dict[int, str]:
        return dict(self.factors)

    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.factors)

    def __str__(self):
        return "*".join(f"{p}{q}" for q, p in self.factors) or "I"


# ---------------------------------------------------------------------------
# Partition crossings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WireCrossing:
    qubit: int
    gate_index: int  # index of the wire_cut marker
    upstream: str
    downstream: str


@dataclass(frozen=True)
class Crossings:
    gates: tuple[int, ...] = ()
    wires: tuple[WireCrossing, ...] = ()

    def within(self, start: int, stop: int) -> Crossings:
        return Crossings(
            tuple(i for i in self.gates if start <= i < stop),
            tuple(w for w in self.wires if start <= w.gate_index < stop),
        )


def _other(side: str) -> str:
    return "B" if side == "A" else "A"


def iter_sides(c: Circuit) -> Iterator[tuple[int, Gate, tuple[str, ...]]]:
    """Yield ``(index, gate, sides)`` where ``sides`` is the partition in force at the gate.

    Wire-cut markers flip their qubit's side; the yielded sides are those
    before the marker takes effect.
    """
    if c.partition is None:
        raise PartitionMissing()
    sides = list(c.partition)
    for i, g in enumerate(c.gates):
        yield i, g, tuple(sides)
        if g.kind is GateKind.WIRE_CUT:
            q = g.qubits[0]
            sides[q] = _other(sides[q])


def sides_at(c: Circuit, gate_index: int) -> tuple[str, ...]:
    if c.partition is None:
        raise PartitionMissing()
    for i, _, sides in iter_sides(c):
        if i == gate_index:
            return sides
    return final_sides(c)


def final_sides(c: Circuit) -> tuple[str, ...]:
    if c.partition is None:
        raise PartitionMissing()
    sides = list(c.partition)
    for g in c.gates:
        if g.kind is GateKind.WIRE_CUT:
            sides[g.qubits[0]] = _other(sides[g.qubits[0]])
    return tuple(sides)


def validate_partition(c: Circuit) -> Crossings:
    """Find every gate spanning both sides and every explicit wire crossing."""
    gates, wires = [], []
    for i, g, sides in iter_sides(c):
        if g.kind is GateKind.WIRE_CUT:
            s = sides[g.qubits[0]]
            wires.append(WireCrossing(g.qubits[0], i, s, _other(s)))
        elif len({sides[q] for q in g.qubits}) > 1:
            gates.append(i)
    return Crossings(tuple(gates), tuple(wires))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def gate_to_dict(g: Gate) -> dict:
    d = {"gate": g.kind.value, "qubits": list(g.qubits)}
    if g.angle is not None:
        d["angle"] = g.angle
    if g.cbit is not None:
        d["cbit"] = g.cbit
    if g.state is not None:
        d["state"] = g.state.value
    return d


def gate_from_dict(d: dict) -> Gate:
    if not isinstance(d, dict):
        raise SchemaError("gate entries must be objects")
    try:
        kind = GateKind(d["gate"])
    except KeyError:
        raise SchemaError("gate entry missing 'gate'") from None
    except ValueError:
        raise SchemaError(f"unknown gate kind {d['gate']!r}") from None
    qubits = d.get("qubits")
    if not isinstance(qubits, list) or not all(isinstance(q, int) and not isinstance(q, bool)
                                                for q in qubits):
        raise SchemaError(f"{kind.value}: 'qubits' must be a list of integers")
    angle = d.get("angle")
    if kind is GateKind.RZ and not isinstance(angle, (int, float)):
        raise SchemaError("rz requires a numeric 'angle'")
    state = d.get("state")
    if kind is GateKind.PREP:
        try:
            state = PrepState(state)
        except ValueError:
            raise SchemaError(f"unknown prep state {state!r}") from None
    cbit = d.get("cbit")
    if cbit is not None and not isinstance(cbit, int):
        raise SchemaError("'cbit' must be an integer")
    return Gate(kind, tuple(qubits),
                angle=float(angle) if kind is GateKind.RZ else None,
                cbit=cbit if kind is GateKind.MEASURE_Z else None,
                state=state if kind is GateKind.PREP else None)


def circuit_to_dict(c: Circuit) -> dict:
    d = {"format": FORMAT, "qubits": list(c.qubit_names),
         "gates": [gate_to_dict(g) for g in c.gates]}
    if c.partition is not None:
        d["partition"] = dict(zip(c.qubit_names, c.partition))
    return d


def circuit_from_dict(d: dict) -> Circuit:
    if not isinstance(d, dict):
        raise SchemaError("circuit document must be a JSON object")
    fmt = d.get("format", FORMAT)
    if fmt != FORMAT:
        raise SchemaError(f"unsupported format {fmt!r}")
    names = d.get("qubits")
    gates = d.get("gates")
    if not isinstance(names, list) or not all(isinstance(x, str) for x in names):
        raise SchemaError("'qubits' must be a list of strings")
    if not isinstance(gates, list):
        raise SchemaError("'gates' must be a list")
    partition = d.get("partition")
    if partition is not None:
        if not isinstance(partition, dict):
            raise SchemaError("'partition' must map qubit names to labels")
        unknown = set(partition) - set(names)
        if unknown:
            raise ValidationError(f"partition names unknown qubits {sorted(unknown)}")
        missing = [x for x in names if x not in partition]
        if missing:
            raise ValidationError(f"partition does not cover qubits {missing}")
        partition = tuple(partition[x] for x in names)
    return Circuit(tuple(names), tuple(gate_from_dict(g) for g in gates), partition)


def parse_circuit(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON: {e}") from None
    return circuit_from_dict(doc)


def serialize_circuit(c: Circuit, indent: int | None = 2) -> str:
    return json.dumps(circuit_to_dict(c), indent=indent)
