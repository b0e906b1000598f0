"""Partition-aware decomposition of multi-controlled X gates.

Given an MCX whose controls straddle the partition, let ``A`` be the controls
on the side without the target, ``B`` the controls sharing the target's side
and ``t`` the target. The strategies rewrite the gate as follows (ancillas are
appended to the end of the qubit list):

=================  =====================================================  ============
strategy           emitted gates                                          crossings
=================  =====================================================  ============
dec1               MCX(A->a), wire a over, MCX(a+B->t), wire back,        0 gates,
                   MCX(A->a)                                              2 wires
dec2a              MCX(A->a0), CX(a0->a1), MCX(a1+B->t), CX(a0->a1),      2 gates
                   MCX(A->a0)
dec2ad             MCX(A->a), CX(a->b), MCX(b+B->t)                       1 gate
dec2ad_clean_a     dec2ad followed by MCX(A->a)                           1 gate
baseline           Toffoli ladder with clean ancillas, each Toffoli as    counted
                   six CX plus single-qubit gates, partition ignored
=================  =====================================================  ============

``dec2ad`` leaves both ``a`` and ``b`` holding AND(A); ``dec2ad_clean_a``
restores ``a``. Those ancillas are reported dirty and never reused.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NoCutNeeded, NotAnMcx, PartitionMissing, SizeLimitExceeded
from .ir import CONTROLLED_X, Circuit, Gate, GateKind, mcx, sides_at, validate_partition
from .sim import final_state, max_qubits


class Strategy(str, Enum):
    DEC1 = "dec1"
    DEC2A = "dec2a"
    DEC2AD = "dec2ad"
    DEC2AD_CLEAN_A = "dec2ad_clean_a"
    BASELINE = "baseline"


@dataclass(frozen=True)
class Ancilla:
    qubit: int
    name: str
    dirty: bool


@dataclass(frozen=True)
class DecompositionResult:
    circuit: Circuit
    ancillas: tuple[Ancilla, ...]
    crossing_gate_count: int
    crossing_wire_count: int
    start: int  # emitted gates occupy circuit.gates[start:stop]
    stop: int

    @property
    def dirty_ancillas(self) -> tuple[Ancilla, ...]:
        return tuple(a for a in self.ancillas if a.dirty)


def _fresh_name(taken: set[str], base: str) -> str:
    name, k = base, 1
    while name in taken:
        name = f"{base}_{k}"
        k += 1
    taken.add(name)
    return name


def toffoli_to_cx(c0: int, c1: int, t: int) -> list[Gate]:
    """Standard six-CX Toffoli with H and T/T-dagger on the single qubits."""
    G = Gate
    K = GateKind
    return [
        G(K.H, (t,)), G(K.CX, (c1, t)), G(K.TDG, (t,)), G(K.CX, (c0, t)),
        G(K.T, (t,)), G(K.CX, (c1, t)), G(K.TDG, (t,)), G(K.CX, (c0, t)),
        G(K.T, (c1,)), G(K.T, (t,)), G(K.H, (t,)), G(K.CX, (c0, c1)),
        G(K.T, (c0,)), G(K.TDG, (c1,)), G(K.CX, (c0, c1)),
    ]


def toffoli_ladder(controls, target: int, ancillas) -> list[Gate]:
    """MCX(m) as 2m-3 Toffolis over m-2 clean ancillas (compute, act, uncompute)."""
    controls = list(controls)
    m = len(controls)
    if m <= 2:
        return [mcx(controls, target)]
    if len(ancillas) < m - 2:
        raise ValueError(f"MCX({m}) ladder needs {m - 2} ancillas")
    compute = [mcx(controls[:2], ancillas[0])]
    for i in range(1, m - 2):
        compute.append(mcx([ancillas[i - 1], controls[i + 1]], ancillas[i]))
    middle = mcx([ancillas[m - 3], controls[m - 1]], target)
    return compute + [middle] + compute[::-1]


def expand_toffolis(c: Circuit) -> Circuit:
    """Replace every CCX with the six-CX construction. Other gates are kept."""
    gates = []
    for g in c.gates:
        if g.kind is GateKind.CCX:
            gates.extend(toffoli_to_cx(*g.qubits))
        else:
            gates.append(g)
    return c.with_gates(gates)


def cx_count(c: Circuit) -> int:
    return c.count(GateKind.CX)


def decompose_mcx(c: Circuit, gate_index: int, strategy: Strategy | str,
                  fuse_b: bool = False) -> DecompositionResult:
    """Replace the controlled-X at ``gate_index`` according to ``strategy``.

    ``fuse_b`` only matters for dec2ad with no target-side controls: ``b`` is
    dropped and the crossing becomes CX(a->t).
    """
    strategy = Strategy(strategy)
    if c.partition is None:
        raise PartitionMissing()
    g = c.gates[gate_index]
    if g.kind not in CONTROLLED_X:
        raise NotAnMcx(f"gate {gate_index} is {g.kind.value}, not a controlled X")
    sides = sides_at(c, gate_index)
    t = g.target
    t_side = sides[t]
    ctrl_side = "B" if t_side == "A" else "A"
    A = [q for q in g.controls if sides[q] != t_side]
    B = [q for q in g.controls if sides[q] == t_side]
    if not A and strategy is not Strategy.BASELINE:
        raise NoCutNeeded(f"gate {gate_index} has every control on the target's side")

    names = list(c.qubit_names)
    labels = list(c.partition)
    taken = set(names)
    ancillas: list[Ancilla] = []

    def new_qubit(base, side, dirty):
        names.append(_fresh_name(taken, base))
        labels.append(side)
        ancillas.append(Ancilla(len(names) - 1, names[-1], dirty))
        return len(names) - 1

    W = GateKind.WIRE_CUT
    if strategy is Strategy.DEC1:
        a = new_qubit("a", ctrl_side, False)
        emitted = [mcx(A, a), Gate(W, (a,)), mcx([a, *B], t), Gate(W, (a,)), mcx(A, a)]
    elif strategy is Strategy.DEC2A:
        a0 = new_qubit("a0", ctrl_side, False)
        a1 = new_qubit("a1", t_side, False)
        emitted = [mcx(A, a0), mcx([a0], a1), mcx([a1, *B], t), mcx([a0], a1), mcx(A, a0)]
    elif strategy in (Strategy.DEC2AD, Strategy.DEC2AD_CLEAN_A):
        clean_a = strategy is Strategy.DEC2AD_CLEAN_A
        a = new_qubit("a", ctrl_side, not clean_a)
        if fuse_b and not B:
            emitted = [mcx(A, a), mcx([a], t)]
        else:
            b = new_qubit("b", t_side, True)
            emitted = [mcx(A, a), mcx([a], b), mcx([b, *B], t)]
        if clean_a:
            emitted.append(mcx(A, a))
    else:
        controls = list(g.controls)
        anc = [new_qubit(f"anc{i}", t_side, False) for i in range(max(0, len(controls) - 2))]
        emitted = []
        for h in toffoli_ladder(controls, t, anc):
            emitted.extend(toffoli_to_cx(*h.qubits) if h.kind is GateKind.CCX else [h])

    gates = list(c.gates[:gate_index]) + emitted + list(c.gates[gate_index + 1:])
    out = Circuit(tuple(names), tuple(gates), tuple(labels))
    stop = gate_index + len(emitted)
    found = validate_partition(out).within(gate_index, stop)
    return DecompositionResult(out, tuple(ancillas), len(found.gates), len(found.wires),
                               gate_index, stop)


def decompose_all(c: Circuit, strategy: Strategy | str,
                  fuse_b: bool = False) -> tuple[Circuit, list[DecompositionResult]]:
    """Decompose every boundary-crossing controlled-X with three or more qubits."""
    results = []
    i = 0
    while i < len(c.gates):
        g = c.gates[i]
        if g.kind in (GateKind.CCX, GateKind.MCX) and i in validate_partition(c).gates:
            r = decompose_mcx(c, i, strategy, fuse_b)
            results.append(r)
            c = r.circuit
            i = r.stop
        else:
            i += 1
    return c, results


# ---------------------------------------------------------------------------
# Exhaustive verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    strategy: Strategy
    m1: int
    m2: int
    max_deviation: float
    ancilla_states_ok: bool
    inputs_checked: int

    @property
    def passed(self) -> bool:
        return self.max_deviation <= 1e-12 and self.ancilla_states_ok


def mcx_test_circuit(m1: int, m2: int) -> Circuit:
    """Controls ``A`` on side A, controls ``B`` plus target on side B."""
    names = [f"A{i}" for i in range(m1)] + [f"B{i}" for i in range(m2)] + ["t"]
    part = ["A"] * m1 + ["B"] * (m2 + 1)
    n = m1 + m2
    return Circuit(tuple(names), (Gate(GateKind.MCX, tuple(range(n + 1))),), tuple(part))


def expected_ancilla_bits(strategy: Strategy, ancillas, and_a: int) -> list[int]:
    if strategy is Strategy.DEC2AD:
        return [and_a] * len(ancillas)
    if strategy is Strategy.DEC2AD_CLEAN_A:
        # a is emitted first and restored; b keeps AND(A)
        return [0] + [and_a] * (len(ancillas) - 1)
    return [0] * len(ancillas)


def verify_decomposition(m1: int, m2: int, strategy: Strategy | str,
                         fuse_b: bool = False) -> VerificationReport:
    """Compare the decomposition against the native MCX on every basis input.

    Ancillas start in |0>. The expected output is the MCX image of the input
    tensored with the ancilla values the strategy should leave behind:
    zero for clean strategies, AND(A) for the dirty ones.
    """
    strategy = Strategy(strategy)
    if m1 < 1 or m2 < 0:
        raise ValueError("need m1 >= 1 and m2 >= 0")
    original = mcx_test_circuit(m1, m2)
    res = decompose_mcx(original, 0, strategy, fuse_b)
    dec = res.circuit
    if dec.num_qubits > max_qubits():
        raise SizeLimitExceeded(f"verification needs {dec.num_qubits} qubits")
    n0 = original.num_qubits
    anc_mask = sum(1 << a.qubit for a in res.ancillas)
    max_dev = 0.0
    anc_ok = True
    for x in range(1 << n0):
        y = final_state(original, x).amplitudes
        and_a = int(all((x >> q) & 1 for q in range(m1)))
        bits = expected_ancilla_bits(strategy, res.ancillas, and_a)
        offset = sum(bit << a.qubit for bit, a in zip(bits, res.ancillas))
        expected = np.zeros(1 << dec.num_qubits, dtype=complex)
        expected[np.arange(1 << n0) + offset] = y
        out = final_state(dec, x).amplitudes
        max_dev = max(max_dev, float(np.max(np.abs(out - expected))))
        probs = np.abs(out) ** 2
        idx = np.flatnonzero(probs > 1e-24)
        on_target = probs[idx[(idx & anc_mask) == offset]].sum()
        anc_ok &= bool(abs(on_target - 1.0) <= 1e-12)
    return VerificationReport(strategy, m1, m2, max_dev, anc_ok, 1 << n0)


def sweep(strategies, m1_values=(1, 2, 3), m2_values=(0, 1, 2)) -> list[VerificationReport]:
    return [verify_decomposition(m1, m2, s)
            for s, m1, m2 in itertools.product(strategies, m1_values, m2_values)]
