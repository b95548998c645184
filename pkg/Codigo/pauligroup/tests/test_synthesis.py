import math

import numpy as np
import pytest

from core.circuit import Circuit, GateKind, circuit_depth, system_qubit
from core.clifford import conjugate_by_circuit
from core.pauli import PauliString, parse_pauli, qubit_wise_commutes, weight
from core.simulator import Statevector, ancilla_residual, apply_circuit, exact_group_evolution, fidelity, system_state
from core.synthesis import (
    PreconditionError,
    basis_change,
    load_parity_circuit,
    parity_accumulation_gates,
    parallel_depth_bound,
    parity_copy_gates,
    shared_basis_change,
    synthesize_parallel_evolution,
    synthesize_term_evolution,
)

TOL = 1e-10
SEEDS = {("inline", "chain"): 11, ("inline", "tree"): 12, ("ancilla", "chain"): 21, ("ancilla", "tree"): 22}


def _holders(m):
    return [system_qubit(j) for j in range(m)]


def _run_bits(gates, bits):
    bits = list(bits)
    for gate in gates:
        c, t = (q.index for q in gate.qubits)
        bits[t] ^= bits[c]
    return bits


def _assert_evolution(circuit, group, time, states):
    n = circuit.n_system
    for s in states:
        final = apply_circuit(circuit, s)
        assert fidelity(system_state(final, n), exact_group_evolution(group, time, s)) >= 1 - TOL
        assert ancilla_residual(final, n) < 1e-20


def _random_pauli(rng, n):
    while True:
        p = PauliString(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)))
        if not p.is_identity():
            return p


def test_basis_change_gates():
    c = basis_change(parse_pauli("X1 Z2 Y4", 4))
    assert [(g.kind, g.qubits[0].index) for g in c] == [(GateKind.H, 0), (GateKind.RX, 3)]
    assert c.gates[1].angle == pytest.approx(math.pi / 2)
    assert len(basis_change(parse_pauli("Z1 Z3", 3))) == 0


def test_basis_change_diagonalizes():
    p = parse_pauli("Y1 X2 Z3 Y5", 5)
    imagem = conjugate_by_circuit(p, basis_change(p))
    assert imagem.is_z_only()
    assert weight(imagem) == weight(p)


def test_shared_basis_change_reports_pair():
    a, b = parse_pauli("X1 Z2", 2), parse_pauli("Z1", 2)
    with pytest.raises(PreconditionError) as info:
        shared_basis_change([a, b], 2)
    assert info.value.pair == (a, b)


@pytest.mark.parametrize("m", range(2, 18))
def test_accumulation_depth_and_parity(m):
    holders = _holders(m)
    gates = parity_accumulation_gates(holders[1:], holders[0])
    assert circuit_depth(Circuit(m).extend(gates)) == math.ceil(math.log2(m))
    rng = np.random.default_rng(m)
    bits = rng.integers(0, 2, size=m).tolist()
    assert _run_bits(gates, bits)[0] == sum(bits) % 2


@pytest.mark.parametrize("m", range(2, 18))
def test_copy_tree_fills_every_holder(m):
    holders = _holders(m)
    gates = parity_copy_gates(holders[0], holders[1:])
    assert circuit_depth(Circuit(m).extend(gates)) == math.ceil(math.log2(m))
    assert _run_bits(gates, [1] + [0] * (m - 1)) == [1] * m


def test_copy_to_eight_holders_has_depth_three():
    holders = _holders(8)
    gates = parity_copy_gates(holders[0], holders[1:])
    assert len(gates) == 7
    assert circuit_depth(Circuit(8).extend(gates)) == 3


def test_single_z_inline_is_one_rotation():
    c = synthesize_term_evolution(parse_pauli("Z1", 1), 0.4, 0.5)
    assert [g.kind for g in c] == [GateKind.RZ]
    assert c.gates[0].angle == pytest.approx(0.4)
    final = apply_circuit(c, Statevector.zero(1))
    assert final.amplitudes[0] == pytest.approx(np.exp(-0.2j))


def test_term_evolution_preconditions():
    with pytest.raises(PreconditionError):
        synthesize_term_evolution(PauliString.identity(2), 1.0, 1.0)
    with pytest.raises(PreconditionError):
        synthesize_term_evolution(parse_pauli("X1", 1), math.nan, 1.0)
    with pytest.raises(PreconditionError):
        synthesize_term_evolution(PauliString(1, 1, 0, 1), 1.0, 1.0)
    with pytest.raises(ValueError):
        synthesize_term_evolution(parse_pauli("X1", 1), 1.0, 1.0, style="ladder")


def test_zero_coefficient_acts_as_identity():
    c = synthesize_term_evolution(parse_pauli("X1 Z2 Y4", 4), 0.0, 1.0)
    s = Statevector.random(4, seed=3)
    assert fidelity(apply_circuit(c, s), s) == pytest.approx(1.0, abs=TOL)


@pytest.mark.parametrize("style", ["inline", "ancilla"])
@pytest.mark.parametrize("fanout", ["chain", "tree"])
def test_single_term_matches_exact_evolution(style, fanout):
    rng = np.random.default_rng(SEEDS[style, fanout])
    for caso in range(50):
        n = int(rng.integers(1, 6))
        p = _random_pauli(rng, n)
        if rng.random() < 0.3:
            p = p.sign_flipped()
        h, t = float(rng.uniform(-2, 2)), float(rng.uniform(0, 3))
        circuit = synthesize_term_evolution(p, h, t, style, fanout)
        estados = [Statevector.random(n, seed=100 * caso + k) for k in range(5)]
        _assert_evolution(circuit, [(h, p)], t, estados)


def test_single_z_group_equals_ancilla_chain():
    z1 = parse_pauli("Z1", 1)
    assert synthesize_parallel_evolution([(0.3, z1)], 0.7) == synthesize_term_evolution(z1, 0.3, 0.7, "ancilla", "chain")


def test_overlapping_z_pair():
    group = [(0.8, parse_pauli("Z1 Z2", 3)), (-0.35, parse_pauli("Z2 Z3", 3))]
    c = synthesize_parallel_evolution(group, 1.3)
    assert (c.n_parity, c.n_rotation) == (1, 2)
    _assert_evolution(c, group, 1.3, [Statevector.random(3, seed=k) for k in range(5)])


def test_identity_only_group_is_empty():
    c = synthesize_parallel_evolution([(1.5, PauliString.identity(2))], 1.0)
    assert len(c) == 0


def test_random_diagonal_groups():
    rng = np.random.default_rng(2024)
    for caso in range(50):
        n = int(rng.integers(2, 9))
        size = int(rng.integers(1, min(5, (1 << n) - 1) + 1))
        mascaras = rng.choice(np.arange(1, 1 << n), size=size, replace=False)
        group = [(float(rng.uniform(-1, 1)), PauliString(n, 0, int(m))) for m in mascaras]
        c = synthesize_parallel_evolution(group, 0.9)
        _assert_evolution(c, group, 0.9, [Statevector.random(n, seed=caso * 3 + k) for k in range(2)])


def test_random_qubit_wise_groups():
    rng = np.random.default_rng(77)
    for caso in range(20):
        n = int(rng.integers(2, 6))
        eixos = rng.choice(list("XYZ"), size=n)
        group = []
        for m in rng.choice(np.arange(1, 1 << n), size=min(4, (1 << n) - 1), replace=False):
            texto = " ".join(f"{eixos[j]}{j + 1}" for j in range(n) if (int(m) >> j) & 1)
            group.append((float(rng.uniform(-1, 1)), parse_pauli(texto, n)))
        c = synthesize_parallel_evolution(group, 0.6, steps=2)
        _assert_evolution(c, group, 0.6, [Statevector.random(n, seed=caso)])


def test_parallel_circuit_is_mirrored():
    group = [(0.5, parse_pauli("X1 Z2", 3)), (0.2, parse_pauli("X1 Y3", 3)), (0.1, parse_pauli("Z2 Y3", 3))]
    c = synthesize_parallel_evolution(group, 1.0)
    rotacoes = c.count(GateKind.RZ)
    metade = (len(c) - rotacoes) // 2
    for k in range(metade):
        assert c.gates[k].inverse() == c.gates[len(c) - 1 - k]


def test_non_qubit_wise_group_is_rejected():
    a, b = parse_pauli("X1", 1), parse_pauli("Z1", 1)
    with pytest.raises(PreconditionError) as info:
        synthesize_parallel_evolution([(1.0, a), (1.0, b)], 1.0)
    assert set(info.value.pair) == {a, b}
    with pytest.raises(ValueError):
        synthesize_parallel_evolution([(1.0, a)], 1.0, steps=0)


def test_load_stage_depth_bound():
    textos = ["X1 Z2 X3", "X1 X3", "X1 X3 Z5", "Z2 Z4"]
    n = 6
    group = [(1.0, parse_pauli(t, n)) for t in textos]
    assert all(qubit_wise_commutes(a, b) for _, a in group for _, b in group)
    load = load_parity_circuit(group, n)
    assert circuit_depth(load, {GateKind.CNOT}) <= 4 * n * math.ceil(math.log2(len(group) + 1))


def test_load_stage_depth_bound_random():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(2, 10))
        size = int(rng.integers(1, min(12, (1 << n) - 1) + 1))
        mascaras = rng.choice(np.arange(1, 1 << n), size=size, replace=False)
        group = [(1.0, PauliString(n, 0, int(m))) for m in mascaras]
        load = load_parity_circuit(group, n)
        assert circuit_depth(load, {GateKind.CNOT}) <= 4 * n * math.ceil(math.log2(size + 1)) + 8


def test_consecutive_fanouts_use_alternate_banks():
    group = [(0.4, parse_pauli("Z1 Z2 Z3", 3)), (0.3, parse_pauli("Z1 Z2", 3)), (-0.2, parse_pauli("Z2 Z3", 3))]
    load = load_parity_circuit(group, 3)
    assert (load.n_parity, load.n_rotation) == (4, 3)
    alvos = [
        {g.qubits[1].index for g in load if g.qubits[0] == system_qubit(j) and g.qubits[1].register == "parity"}
        for j in range(3)
    ]
    assert alvos == [{0}, {2, 3}, {0}]
    _assert_evolution(synthesize_parallel_evolution(group, 0.8), group, 0.8, [Statevector.random(3, seed=k) for k in range(3)])


def _dense_group(n, size):
    cheio = (1 << n) - 1
    return [(0.1 * (k + 1), PauliString(n, 0, cheio ^ (1 << k))) for k in range(size)]


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("size", range(1, 6))
def test_parallel_step_depth_bound_dense(n, size):
    if size > n:
        pytest.skip("máscaras distintas exigem L ≤ N")
    c = synthesize_parallel_evolution(_dense_group(n, size), 0.5)
    assert circuit_depth(c, {GateKind.CNOT}) <= parallel_depth_bound(n, size)
    assert parallel_depth_bound(n, size) == 4 * n * math.ceil(math.log2(size + 1)) + 8


def test_parallel_step_depth_bound_random():
    rng = np.random.default_rng(31)
    for _ in range(40):
        n = int(rng.integers(2, 11))
        size = int(rng.integers(1, min(16, (1 << n) - 1) + 1))
        mascaras = rng.choice(np.arange(1, 1 << n), size=size, replace=False)
        group = [(1.0, PauliString(n, 0, int(m))) for m in mascaras]
        c = synthesize_parallel_evolution(group, 0.3)
        assert circuit_depth(c, {GateKind.CNOT}) <= parallel_depth_bound(n, size)


def test_dense_group_evolution_is_exact():
    group = _dense_group(5, 4)
    c = synthesize_parallel_evolution(group, 1.1, steps=2)
    _assert_evolution(c, group, 1.1, [Statevector.random(5, seed=k) for k in range(2)])
