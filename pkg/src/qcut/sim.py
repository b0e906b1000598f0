"""Dense statevector simulator.

Amplitude index ``i`` holds basis state ``sum(bit_q << q)``, i.e. qubit 0 is
the least-significant bit. Internally a state of ``n`` qubits is viewed as an
``n``-axis tensor in C order, so qubit ``q`` lives on axis ``n - 1 - q``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import QubitOutOfRange, SizeLimitExceeded, TooManyBranches
from .ir import Circuit, Gate, GateKind, PauliObservable, PrepState

DEFAULT_MAX_QUBITS = 24
MAX_BRANCH_MEASUREMENTS = 12
_ZERO_TOL = 1e-15

_SQ2 = 1 / np.sqrt(2)
_MATRICES = {
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
}
_PHASES = {
    GateKind.S: 1j,
    GateKind.SDG: -1j,
    GateKind.T: np.exp(1j * np.pi / 4),
    GateKind.TDG: np.exp(-1j * np.pi / 4),
}
# Gates preparing each state from |0>.
PREP_SEQUENCES = {
    PrepState.ZERO: (),
    PrepState.ONE: (GateKind.X,),
    PrepState.PLUS: (GateKind.H,),
    PrepState.MINUS: (GateKind.X, GateKind.H),
    PrepState.PLUS_I: (GateKind.H, GateKind.S),
    PrepState.MINUS_I: (GateKind.H, GateKind.SDG),
}


def max_qubits() -> int:
    return int(os.environ.get("QCUT_MAX_QUBITS", DEFAULT_MAX_QUBITS))


def _check_size(n: int):
    limit = max_qubits()
    if n > limit:
        raise SizeLimitExceeded(f"{n} qubits exceeds the simulator limit of {limit}")


class StateVector:
    """A pure state on ``num_qubits`` qubits. Mutated in place by :meth:`apply`."""

    def __init__(self, amplitudes, num_qubits: int | None = None):
        amps = np.ascontiguousarray(amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1 if num_qubits is None else num_qubits
        if amps.size != 1 << n:
            raise ValueError(f"expected {1 << n} amplitudes, got {amps.size}")
        _check_size(n)
        self.amplitudes = amps
        self.num_qubits = n

    @classmethod
    def basis(cls, num_qubits: int, index: int = 0) -> StateVector:
        _check_size(num_qubits)
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps, num_qubits)

    def copy(self) -> StateVector:
        return StateVector(self.amplitudes.copy(), self.num_qubits)

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def _tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def _index(self, assign: dict[int, int]) -> tuple:
        idx = [slice(None)] * self.num_qubits
        for q, v in assign.items():
            idx[self.num_qubits - 1 - q] = v
        return tuple(idx)

    # -- unitaries ----------------------------------------------------------

    def apply(self, gate: Gate) -> StateVector:
        """Apply a unitary gate (or a no-op marker). Returns ``self``."""
        k = gate.kind
        qs = gate.qubits
        if any(q >= self.num_qubits for q in qs):
            raise QubitOutOfRange(f"{k.value} on {list(qs)} in a {self.num_qubits}-qubit state")
        t = self._tensor()
        if k is GateKind.WIRE_CUT:
            pass
        elif k in _PHASES:
            t[self._index({qs[0]: 1})] *= _PHASES[k]
        elif k is GateKind.RZ:
            t[self._index({qs[0]: 0})] *= np.exp(-0.5j * gate.angle)
            t[self._index({qs[0]: 1})] *= np.exp(0.5j * gate.angle)
        elif k in _MATRICES:
            self._apply_matrix(_MATRICES[k], qs[0])
        elif k is GateKind.CZ:
            t[self._index({qs[0]: 1, qs[1]: 1})] *= -1
        elif k is GateKind.X or k in (GateKind.CX, GateKind.CCX, GateKind.MCX):
            # Native controlled bit flip: swap the target's 0/1 slices where all controls are 1.
            cond = {c: 1 for c in qs[:-1]}
            i0 = self._index({**cond, qs[-1]: 0})
            i1 = self._index({**cond, qs[-1]: 1})
            tmp = t[i0].copy()
            t[i0] = t[i1]
            t[i1] = tmp
        else:
            raise ValueError(f"{k.value} is not unitary")
        return self

    def _apply_matrix(self, m: np.ndarray, q: int):
        v = self.amplitudes.reshape(1 << (self.num_qubits - q - 1), 2, 1 << q)
        self.amplitudes = np.matmul(m, v).reshape(-1)

    # -- measurement --------------------------------------------------------

    def prob_one(self, q: int) -> float:
        sl = self._tensor()[self._index({q: 1})]
        return float(np.vdot(sl, sl).real)

    def project(self, q: int, outcome: int, prob: float) -> StateVector:
        """Collapse qubit ``q`` onto ``outcome`` and renormalize by ``prob``."""
        t = self._tensor()
        t[self._index({q: 1 - outcome})] = 0.0
        if prob > _ZERO_TOL:
            self.amplitudes /= np.sqrt(prob)
        else:
            self.amplitudes[:] = 0.0
        return self

    def prepare(self, q: int, state: PrepState):
        """Assume ``q`` is already |0> and rotate it into ``state``."""
        for k in PREP_SEQUENCES[state]:
            self.apply(Gate(k, (q,)))


def as_state(initial, num_qubits: int) -> StateVector:
    _check_size(num_qubits)
    if isinstance(initial, StateVector):
        if initial.num_qubits != num_qubits:
            raise ValueError("initial state has the wrong number of qubits")
        return initial.copy()
    if isinstance(initial, str):
        # Written most-significant qubit first, as the integer label would be.
        return StateVector.basis(num_qubits, int(initial, 2))
    if isinstance(initial, (int, np.integer)):
        return StateVector.basis(num_qubits, int(initial))
    return StateVector(np.array(initial, dtype=complex), num_qubits)


# ---------------------------------------------------------------------------
# Circuit execution
# ---------------------------------------------------------------------------

@dataclass
class Branch:
    weight: float
    classbits: tuple[int, ...]
    state: StateVector


@dataclass(frozen=True)
class ExecutionOutcome:
    classbits: tuple[int, ...]
    bitstring: int


Initial = Union[int, str, StateVector, np.ndarray]


def final_state(c: Circuit, initial: Initial = 0) -> StateVector:
    """Run a measurement-free circuit and return its output state."""
    psi = as_state(initial, c.num_qubits)
    for g in c.gates:
        if g.kind in (GateKind.MEASURE_Z, GateKind.PREP):
            raise ValueError("final_state needs a circuit without measurement or prep")
        psi.apply(g)
    return psi


def run_exact_branches(c: Circuit, initial: Initial = 0) -> list[Branch]:
    """Enumerate every measurement-outcome branch with its Born weight.

    Each MEASURE_Z doubles the branch list, zero-probability branches
    included (their state is the zero vector). PREP resets its qubit first;
    the reset only branches when the qubit is not already |0>. Classbits are
    listed in execution order of the MEASURE_Z gates.
    """
    m = c.num_measurements()
    if m > MAX_BRANCH_MEASUREMENTS:
        raise TooManyBranches(f"{m} measurements exceed the limit of {MAX_BRANCH_MEASUREMENTS}")
    branches = [Branch(1.0, (), as_state(initial, c.num_qubits))]
    for g in c.gates:
        if g.kind is GateKind.MEASURE_Z:
            q = g.qubits[0]
            nxt = []
            for b in branches:
                p1 = b.state.prob_one(q) if b.weight > 0 else 0.0
                p1 = min(max(p1, 0.0), 1.0)
                for outcome, p in ((0, 1.0 - p1), (1, p1)):
                    s = b.state.copy().project(q, outcome, p)
                    nxt.append(Branch(b.weight * p if p > _ZERO_TOL else 0.0,
                                      b.classbits + (outcome,), s))
            branches = nxt
        elif g.kind is GateKind.PREP:
            q = g.qubits[0]
            nxt = []
            for b in branches:
                p1 = b.state.prob_one(q)
                if p1 <= _ZERO_TOL:
                    b.state.prepare(q, g.state)
                    nxt.append(b)
                    continue
                for outcome, p in ((0, 1.0 - p1), (1, p1)):
                    if p <= _ZERO_TOL:
                        continue
                    s = b.state.copy().project(q, outcome, p)
                    if outcome:
                        s.apply(Gate(GateKind.X, (q,)))
                    s.prepare(q, g.state)
                    nxt.append(Branch(b.weight * p, b.classbits, s))
            branches = nxt
        else:
            for b in branches:
                b.state.apply(g)
    return branches


def _trajectory(c: Circuit, psi: StateVector, rng: np.random.Generator) -> ExecutionOutcome:
    bits = []
    for g in c.gates:
        if g.kind in (GateKind.MEASURE_Z, GateKind.PREP):
            q = g.qubits[0]
            p1 = psi.prob_one(q)
            outcome = int(rng.random() < p1)
            psi.project(q, outcome, p1 if outcome else 1.0 - p1)
            if g.kind is GateKind.MEASURE_Z:
                bits.append(outcome)
            else:
                if outcome:
                    psi.apply(Gate(GateKind.X, (q,)))
                psi.prepare(q, g.state)
        else:
            psi.apply(g)
    p = psi.probabilities()
    return ExecutionOutcome(tuple(bits), int(rng.choice(p.size, p=p / p.sum())))


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, *stream)``.

    Any (seed, stream) pair names one reproducible Philox stream, so work
    split by stream index gives the same numbers under any scheduling.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def run_shots(c: Circuit, initial: Initial, shots: int, seed: int) -> list[ExecutionOutcome]:
    """Sample ``shots`` executions; the final register is read out in the Z basis."""
    rng = make_rng(seed)
    if c.num_measurements() > MAX_BRANCH_MEASUREMENTS:
        start = as_state(initial, c.num_qubits)
        return [_trajectory(c, start.copy(), rng) for _ in range(shots)]
    branches = run_exact_branches(c, initial)
    w = np.array([b.weight for b in branches])
    picks = rng.choice(len(branches), size=shots, p=w / w.sum())
    out: list[ExecutionOutcome | None] = [None] * shots
    for bi in np.unique(picks):
        where = np.flatnonzero(picks == bi)
        p = branches[bi].state.probabilities()
        labels = rng.choice(p.size, size=where.size, p=p / p.sum())
        for i, lab in zip(where, labels):
            out[i] = ExecutionOutcome(branches[bi].classbits, int(lab))
    return out


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------

def apply_pauli(psi: StateVector, obs: PauliObservable) -> StateVector:
    out = psi.copy()
    for q, p in obs.factors:
        if q >= psi.num_qubits:
            raise QubitOutOfRange(f"observable qubit {q} outside a {psi.num_qubits}-qubit state")
        t = out._tensor()
        i0, i1 = out._index({q: 0}), out._index({q: 1})
        if p == "Z":
            t[i1] *= -1
        else:
            a, b = t[i0].copy(), t[i1].copy()
            if p == "X":
                t[i0], t[i1] = b, a
            else:
                t[i0], t[i1] = -1j * b, 1j * a
    return out


def expectation(state: StateVector, obs: PauliObservable) -> float:
    val = np.vdot(state.amplitudes, apply_pauli(state, obs).amplitudes)
    scale = max(1.0, state.norm())
    if abs(val.imag) > 1e-12 * scale:
        raise ArithmeticError(f"Pauli expectation has imaginary part {val.imag}")
    return float(val.real)


def diagonalizing_gates(obs: PauliObservable) -> list[Gate]:
    """Rotations taking each X/Y factor to Z, for readout in the computational basis."""
    gates = []
    for q, p in obs.factors:
        if p == "X":
            gates.append(Gate(GateKind.H, (q,)))
        elif p == "Y":
            gates += [Gate(GateKind.SDG, (q,)), Gate(GateKind.H, (q,))]
    return gates


def parity(bitstring: int, qubits) -> int:
    """+1/-1 eigenvalue of the Z-string on ``qubits`` for a readout label."""
    ones = sum((bitstring >> q) & 1 for q in qubits)
    return -1 if ones % 2 else 1
