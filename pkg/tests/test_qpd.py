import json
from fractions import Fraction

import numpy as np
import pytest

import oracle
from oracle import gate_cut_channel, wire_cut_channel
from qcut.ir import GateKind
from qcut.qpd import (CutKind, basis_for, cx_cut_basis, cz_cut_basis, dump_tables,
                      gamma_per_cut, overhead_per_cut, wire_cut_basis)

K = GateKind
def random_product_rho(rng, n):
    kets = [oracle.random_ket(rng, 1) for _ in range(n)]
    psi = kets[0]
    for k in kets[1:]:
        psi = np.kron(k, psi)
    return np.outer(psi, psi.conj())


def random_pauli(rng, n):
    return tuple((q, "IXYZ"[rng.integers(4)]) for q in range(n))


def test_gammas_exact():
    assert cx_cut_basis().gamma == Fraction(3)
    assert cz_cut_basis().gamma == 3
    assert wire_cut_basis().gamma == Fraction(4)
    assert len(cx_cut_basis()) == 6 and len(wire_cut_basis()) == 8
    assert isinstance(cx_cut_basis().gamma, Fraction)


def test_coefficients_are_halves():
    for basis in (cx_cut_basis(), wire_cut_basis()):
        assert {abs(t.coefficient) for t in basis.terms} == {Fraction(1, 2)}


def test_cz_structure():
    terms = cz_cut_basis().terms
    phase = [t for t in terms if not t.op_a.measures and not t.op_b.measures]
    assert len(phase) == 2 and all(t.coefficient == Fraction(1, 2) for t in phase)
    assert {(t.op_a.gates[0].kind, t.op_b.gates[0].kind) for t in phase} == \
        {(K.S, K.S), (K.SDG, K.SDG)}
    measured = [t for t in terms if t.op_a.measures or t.op_b.measures]
    assert len(measured) == 4 and all(oracle.signed_term(t) for t in measured)
    assert all(not (t.op_a.measures and t.op_b.measures) for t in measured)


def test_local_ops_single_sided():
    for basis in (cx_cut_basis(), wire_cut_basis()):
        for t in basis.terms:
            assert t.op_a.side == "A" and t.op_b.side == "B"
            assert all(g.qubits == (0,) and len(g.qubits) == 1 for g in t.op_a.gates + t.op_b.gates)


def test_cx_on_00_zz():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1
    out = gate_cut_channel(rho, 2, K.CX, 0, 1)
    assert oracle.expect(out, oracle.pauli_string(((0, "Z"), (1, "Z")), 2)) == \
        pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind, control_side", [(K.CX, "A"), (K.CX, "B"), (K.CZ, "A")])
def test_gate_cut_channel_oracle_product_states(kind, control_side):
    rng = np.random.default_rng(100)
    u = (oracle.controlled_x((0,), 1, 2) if kind is K.CX else oracle.cz(0, 1, 2))
    worst = 0.0
    for _ in range(200):
        rho = random_product_rho(rng, 2)
        obs = oracle.pauli_string(random_pauli(rng, 2), 2)
        want = oracle.expect(u @ rho @ u.conj().T, obs)
        got = oracle.expect(gate_cut_channel(rho, 2, kind, 0, 1, control_side), obs)
        worst = max(worst, abs(got - want))
    assert worst <= 1e-10


def test_gate_cut_channel_with_entangled_reference():
    # Qubit 2 is a bystander entangled with both endpoints.
    rng = np.random.default_rng(7)
    u = oracle.controlled_x((1,), 0, 3)
    for _ in range(50):
        psi = oracle.random_ket(rng, 3)
        rho = np.outer(psi, psi.conj())
        obs = oracle.pauli_string(random_pauli(rng, 3), 3)
        want = oracle.expect(u @ rho @ u.conj().T, obs)
        got = oracle.expect(gate_cut_channel(rho, 3, K.CX, 1, 0), obs)
        assert got == pytest.approx(want, abs=1e-10)


def test_wire_cut_channel_oracle():
    # qubit 0 carries the state, qubit 1 is the fresh downstream qubit, qubit 2 a bystander.
    rng = np.random.default_rng(200)
    swap = oracle.permutation(3, lambda x: (x & ~0b11) | ((x & 1) << 1) | ((x >> 1) & 1))
    worst = 0.0
    for trial in range(200):
        if trial % 2:
            rho1 = random_product_rho(rng, 1)
            psi2 = oracle.random_ket(rng, 1)
            rho = np.kron(np.outer(psi2, psi2.conj()), np.kron(np.diag([1, 0]), rho1))
        else:
            psi = oracle.random_ket(rng, 2)  # entangled (qubit 0, qubit 2)
            full = np.zeros(8, dtype=complex)
            for x in range(4):
                q0, q2 = x & 1, (x >> 1) & 1
                full[q0 | (q2 << 2)] = psi[x]
            rho = np.outer(full, full.conj())
        obs = oracle.pauli_string(((1, "IXYZ"[rng.integers(4)]), (2, "IXYZ"[rng.integers(4)])), 3)
        want = oracle.expect(swap @ rho @ swap.T, obs)  # state moved from qubit 0 to 1
        got = oracle.expect(wire_cut_channel(rho, 3, 0, 1), obs)
        worst = max(worst, abs(got - want))
    assert worst <= 1e-10


def test_wire_examples():
    zero = np.diag([1, 0, 0, 0]).astype(complex)
    z1 = oracle.pauli_string(((1, "Z"),), 2)
    assert oracle.expect(wire_cut_channel(zero, 2, 0, 1), z1) == pytest.approx(1.0, abs=1e-12)
    ket = np.array([1, np.exp(1j * np.pi / 3)]) / np.sqrt(2)
    rho = np.kron(np.diag([1, 0]), np.outer(ket, ket.conj()))
    x1 = oracle.pauli_string(((1, "X"),), 2)
    assert oracle.expect(wire_cut_channel(rho, 2, 0, 1), x1) == pytest.approx(0.5, abs=1e-10)


def test_overhead_per_cut():
    assert overhead_per_cut(CutKind.GATE_CX) == 9
    assert overhead_per_cut(CutKind.GATE_CX, True) == 4
    assert overhead_per_cut(CutKind.WIRE) == 16
    with pytest.warns(UserWarning):
        assert overhead_per_cut(CutKind.WIRE, True) == 16
    assert gamma_per_cut(CutKind.GATE_CX) == 3
    assert gamma_per_cut("gate_cx", True) == 2
    assert gamma_per_cut(CutKind.WIRE) == 4


def test_gamma_squared_matches_overhead():
    for kind in CutKind:
        assert basis_for(kind).gamma ** 2 == overhead_per_cut(kind)


def test_dump_tables_is_exact_json():
    doc = json.loads(dump_tables())
    assert doc["cx"]["gamma"] == "3" and doc["wire"]["gamma"] == "4"
    assert len(doc["cx"]["terms"]) == 6 and len(doc["wire"]["terms"]) == 8
    assert doc["cx"]["terms"][0]["coefficient"] == "1/2"
