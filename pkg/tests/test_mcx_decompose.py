import itertools

import numpy as np
import pytest

import oracle
from qcut.errors import NoCutNeeded, NotAnMcx, PartitionMissing, SizeLimitExceeded
from qcut.ir import Circuit, Gate, GateKind, validate_partition
from qcut.mcx_decompose import (Strategy, cx_count, decompose_all, decompose_mcx,
                                expand_toffolis, mcx_test_circuit, sweep, toffoli_ladder,
                                toffoli_to_cx, verify_decomposition)
from qcut.sim import final_state

K = GateKind
SPLIT = itertools.product((1, 2, 3), (0, 1, 2))
EXPECTED_CROSSINGS = {
    Strategy.DEC1: (0, 2),
    Strategy.DEC2A: (2, 0),
    Strategy.DEC2AD: (1, 0),
    Strategy.DEC2AD_CLEAN_A: (1, 0),
}


@pytest.mark.parametrize("strategy", list(Strategy))
def test_sweep_exact(strategy):
    for r in sweep([strategy]):
        assert r.max_deviation <= 1e-12, r
        assert r.ancilla_states_ok, r
        assert r.inputs_checked == 2 ** (r.m1 + r.m2 + 1)


@pytest.mark.parametrize("strategy", list(EXPECTED_CROSSINGS))
@pytest.mark.parametrize("m1, m2", list(SPLIT))
def test_crossing_counts_independent_of_split(strategy, m1, m2):
    res = decompose_mcx(mcx_test_circuit(m1, m2), 0, strategy)
    found = validate_partition(res.circuit)
    assert (len(found.gates), len(found.wires)) == EXPECTED_CROSSINGS[strategy]
    assert (res.crossing_gate_count, res.crossing_wire_count) == EXPECTED_CROSSINGS[strategy]
    assert all(res.circuit.gates[i].kind is K.CX for i in found.gates)


def _unitary_on_inputs(c, n_orig):
    """Columns of the circuit unitary for inputs with every ancilla in |0>."""
    return np.column_stack([final_state(c, x).amplitudes for x in range(1 << n_orig)])


@pytest.mark.parametrize("strategy", [Strategy.DEC1, Strategy.DEC2A, Strategy.BASELINE])
def test_clean_strategies_against_dense_oracle(strategy):
    # Independent check: dense permutation matrix of the native MCX, embedded with |0> ancillas.
    for m1, m2 in SPLIT:
        c = mcx_test_circuit(m1, m2)
        res = decompose_mcx(c, 0, strategy)
        n0, n = c.num_qubits, res.circuit.num_qubits
        native = oracle.controlled_x(tuple(range(n0 - 1)), n0 - 1, n)
        assert np.allclose(_unitary_on_inputs(res.circuit, n0), native[:, :1 << n0], atol=1e-12)


def test_dec2ad_all_ones_sets_ancillas_and_flips_target():
    res = decompose_mcx(mcx_test_circuit(2, 1), 0, Strategy.DEC2AD)
    out = final_state(res.circuit, 0b0111).amplitudes  # A0 A1 B0 set, t = 0
    a, b = (x.qubit for x in res.ancillas)
    expected = 0b0111 | 1 << 3 | 1 << a | 1 << b
    assert abs(out[expected]) == pytest.approx(1.0)


def test_dec2ad_single_control_chain():
    res = decompose_mcx(mcx_test_circuit(1, 0), 0, Strategy.DEC2AD)
    kinds = [(g.kind, g.qubits) for g in res.circuit.gates]
    a, b = (x.qubit for x in res.ancillas)
    assert kinds == [(K.CX, (0, a)), (K.CX, (a, b)), (K.CX, (b, 1))]
    assert verify_decomposition(1, 0, Strategy.DEC2AD).passed


def test_dec2ad_m1_m2_one():
    c = mcx_test_circuit(1, 1)
    res = decompose_mcx(c, 0, Strategy.DEC2AD)
    a, b = (x.qubit for x in res.ancillas)
    assert [(g.kind, g.qubits) for g in res.circuit.gates] == \
        [(K.CX, (0, a)), (K.CX, (a, b)), (K.CCX, (b, 1, 2))]
    assert res.crossing_gate_count == 1


def test_fuse_b_drops_ancilla():
    res = decompose_mcx(mcx_test_circuit(2, 0), 0, Strategy.DEC2AD, fuse_b=True)
    assert len(res.ancillas) == 1 and res.crossing_gate_count == 1
    assert verify_decomposition(2, 0, Strategy.DEC2AD, fuse_b=True).passed
    # fuse_b is ignored when the target side has controls
    assert len(decompose_mcx(mcx_test_circuit(2, 1), 0, Strategy.DEC2AD, True).ancillas) == 2


def test_cccx_cx_counts():
    c = mcx_test_circuit(2, 1)
    dec1 = decompose_mcx(c, 0, Strategy.DEC1).circuit
    dec2a = decompose_mcx(c, 0, Strategy.DEC2A).circuit
    assert dec1.count(K.CCX) == 3 and dec1.count(K.WIRE_CUT) == 2
    assert dec2a.count(K.CCX) == 3 and dec2a.count(K.CX) == 2
    assert cx_count(expand_toffolis(dec1)) == 18
    assert cx_count(expand_toffolis(dec2a)) == 20


def test_dirty_ancillas():
    c = mcx_test_circuit(2, 1)
    clean = decompose_mcx(c, 0, Strategy.DEC2AD_CLEAN_A)
    assert [a.name for a in clean.dirty_ancillas] == ["b"]
    assert len(decompose_mcx(c, 0, Strategy.DEC2AD).dirty_ancillas) == 2
    for s in (Strategy.DEC1, Strategy.DEC2A, Strategy.BASELINE):
        assert decompose_mcx(c, 0, s).dirty_ancillas == ()


def test_baseline_counts_recorded():
    res = decompose_mcx(mcx_test_circuit(2, 1), 0, Strategy.BASELINE)
    assert res.circuit.count(K.CCX) == 0 and res.circuit.count(K.MCX) == 0
    assert cx_count(res.circuit) == 18
    assert res.crossing_gate_count == 8
    assert all(not a.dirty for a in res.ancillas)


def test_toffoli_to_cx_exact():
    c = Circuit(("a", "b", "c"), tuple(toffoli_to_cx(0, 1, 2)))
    assert np.allclose(oracle.circuit_unitary(c), oracle.controlled_x((0, 1), 2, 3), atol=1e-12)


@pytest.mark.parametrize("m", [3, 4, 5])
def test_toffoli_ladder(m):
    n = m + 1 + (m - 2)
    gates = toffoli_ladder(range(m), m, list(range(m + 1, n)))
    assert len(gates) == 2 * m - 3
    c = Circuit(tuple(f"q{i}" for i in range(n)), tuple(gates))
    native = oracle.controlled_x(tuple(range(m)), m, n)
    assert np.allclose(_unitary_on_inputs(c, m + 1), native[:, :1 << (m + 1)])


def test_ancilla_names_unique():
    c = Circuit(("a", "b", "t"), (Gate(K.CCX, (0, 1, 2)),), ("A", "B", "B"))
    res = decompose_mcx(c, 0, Strategy.DEC2AD)
    assert len(set(res.circuit.qubit_names)) == res.circuit.num_qubits
    assert [a.name for a in res.ancillas] == ["a_1", "b_1"]


def test_decompose_all_handles_several_gates():
    c = Circuit(("q0", "q1", "q2", "q3"),
                (Gate(K.MCX, (0, 1, 2, 3)), Gate(K.H, (0,)), Gate(K.MCX, (2, 0, 1, 3)),
                 Gate(K.CCX, (0, 1, 2))), ("A", "A", "B", "B"))
    out, results = decompose_all(c, Strategy.DEC2AD_CLEAN_A)
    assert len(results) == 3  # the last CCX crosses too
    assert len(validate_partition(out).gates) == 3
    n0 = c.num_qubits
    # Dirty b ancillas break full equality; compare the original qubits' marginals.
    for x in range(1 << n0):
        want = oracle.circuit_unitary(c)[:, x]
        got = final_state(out, x).probabilities().reshape(-1, 1 << n0).sum(axis=0)
        assert np.allclose(got, np.abs(want) ** 2, atol=1e-12)


def test_errors():
    with pytest.raises(PartitionMissing):
        decompose_mcx(Circuit(("a", "b", "c"), (Gate(K.CCX, (0, 1, 2)),)), 0, "dec1")
    c = Circuit(("a", "b"), (Gate(K.H, (0,)),), ("A", "B"))
    with pytest.raises(NotAnMcx):
        decompose_mcx(c, 0, "dec1")
    local = Circuit(("a", "b", "c", "d"), (Gate(K.CCX, (0, 1, 2)),), ("B", "B", "B", "A"))
    with pytest.raises(NoCutNeeded):
        decompose_mcx(local, 0, "dec2ad")
    assert decompose_mcx(local, 0, "baseline").crossing_gate_count == 0
    with pytest.raises(ValueError):
        verify_decomposition(0, 1, "dec1")


def test_verify_size_limit(monkeypatch):
    monkeypatch.setenv("QCUT_MAX_QUBITS", "5")
    with pytest.raises(SizeLimitExceeded):
        verify_decomposition(3, 2, "dec2a")
