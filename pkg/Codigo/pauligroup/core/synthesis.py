"""
Síntese de circuitos de evolução: mudança de base, acumulação/cópia de
paridade em árvore, evolução de um termo (inline ou com ancila) e evolução
paralela de grupos com registradores de paridade e de rotação.
"""

import logging
import math
from itertools import combinations

from core.circuit import Circuit, Gate, GateKind, cnot, parity_qubit, rotation_qubit, system_qubit
from core.pauli import format_pauli, qubit_wise_commutes

logger = logging.getLogger(__name__)

STYLES = ("inline", "ancilla")
FANOUTS = ("chain", "tree")
HALF_PI = math.pi / 2


class PreconditionError(ValueError):
    """Entrada fora das pré-condições da síntese (par violador em ``pair``)."""

    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


def _basis_gate(axis, j):
    if axis == "X":
        return Gate(GateKind.H, (j,))
    return Gate(GateKind.RX, (j,), HALF_PI)


def basis_change(p):
    """H nas posições X e RX(π/2) nas posições Y, em ordem crescente de qubit."""
    circuit = Circuit(p.n_qubits)
    for j in p.support():
        axis = p.axis(j)
        if axis in "XY":
            circuit.append(_basis_gate(axis, j))
    return circuit


def shared_basis_change(ops, n_qubits):
    """
    Mudança de base comum a um conjunto qubit-wise comutante.

    Raises:
        PreconditionError: com o primeiro par que não comuta qubit a qubit.
    """
    eixos = {}
    dono = {}
    for op in ops:
        for j in op.support():
            axis = op.axis(j)
            anterior = eixos.get(j)
            if anterior is None:
                eixos[j], dono[j] = axis, op
            elif anterior != axis:
                par = (dono[j], op)
                raise PreconditionError(
                    f"Termos não comutam qubit a qubit: {format_pauli(par[0])} e {format_pauli(par[1])}",
                    pair=par,
                )
    circuit = Circuit(n_qubits)
    for j in sorted(eixos):
        if eixos[j] in "XY":
            circuit.append(_basis_gate(eixos[j], j))
    return circuit


def parity_accumulation_gates(sources, target):
    """
    Acumula a paridade de ``sources`` em ``target`` em ⌈log₂(m)⌉ camadas de CNOT
    (m = len(sources) + 1), dobrando a metade superior sobre a inferior.
    """
    holders = [target] + list(sources)
    m = len(holders)
    gates = []
    if m < 2:
        return gates
    step = 1 << ((m - 1).bit_length() - 1)
    while step >= 1:
        for i in range(step):
            if i + step < m:
                gates.append(cnot(holders[i + step], holders[i]))
        step //= 2
    return gates


def parity_copy_gates(source, targets):
    """Copia o valor de ``source`` para ``targets`` (zerados) em árvore de duplicação."""
    holders = [source] + list(targets)
    m = len(holders)
    gates = []
    step = 1
    while step < m:
        for i in range(step):
            if i + step < m:
                gates.append(cnot(holders[i], holders[i + step]))
        step *= 2
    return gates


def _signed(coefficient, p):
    if not p.is_hermitian():
        raise PreconditionError(f"String com fase imaginária: {p}")
    if p.phase == 2:
        return -coefficient, p.without_phase()
    return coefficient, p


def synthesize_term_evolution(p, coefficient, time, style="inline", fanout="chain"):
    """
    Circuito de exp(-i·h·t·P), com RZ(θ) = exp(-iθZ/2) e θ = 2·h·t.

    Args:
        p: string de Pauli (fase ±1)
        coefficient: h
        time: t
        style: "inline" acumula no último qubit do suporte; "ancilla" num qubit de rotação
        fanout: "chain" (escada de CNOTs) ou "tree" (profundidade logarítmica)

    Returns:
        Circuit com mudança de base, acumulação, rotação e espelho.
    """
    if style not in STYLES:
        raise ValueError(f"Estilo desconhecido: {style!r}")
    if fanout not in FANOUTS:
        raise ValueError(f"Fan-out desconhecido: {fanout!r}")
    if p.is_identity():
        raise PreconditionError("String identidade não requer circuito de evolução")
    if not (math.isfinite(coefficient) and math.isfinite(time)):
        raise PreconditionError(f"Parâmetros não finitos: h={coefficient}, t={time}")
    coefficient, p = _signed(coefficient, p)
    theta = 2.0 * coefficient * time

    basis = basis_change(p)
    support = [system_qubit(j) for j in p.support()]
    if style == "inline":
        circuit = Circuit(p.n_qubits)
        target = support[-1]
        if fanout == "chain":
            accumulate = [cnot(a, b) for a, b in zip(support, support[1:])]
        else:
            accumulate = parity_accumulation_gates(support[:-1], target)
    else:
        circuit = Circuit(p.n_qubits, 0, 1)
        target = rotation_qubit(0)
        if fanout == "chain":
            accumulate = [cnot(q, target) for q in support]
        else:
            accumulate = parity_accumulation_gates(support, target)

    circuit.extend(basis)
    circuit.extend(accumulate)
    circuit.rz(target, theta)
    circuit.extend(reversed(accumulate))
    circuit.extend(basis.inverse())
    return circuit


def _z_masks(group, n_qubits):
    """Termos (sinal aplicado) e máscaras de suporte, sem a identidade."""
    termos = []
    for coefficient, op in group:
        if op.n_qubits != n_qubits:
            raise PreconditionError(f"Termo {op} com {op.n_qubits} qubits; esperado {n_qubits}")
        coefficient, op = _signed(coefficient, op)
        if op.is_identity():
            continue
        termos.append((coefficient, op, op.x | op.z))
    return termos


def _terms_per_qubit(masks, n_qubits):
    return [[l for l, mask in enumerate(masks) if (mask >> j) & 1] for j in range(n_qubits)]


def load_parity_gates(masks, n_qubits):
    """
    Carrega a paridade de cada máscara no seu qubit de rotação.

    Para cada qubit j do sistema tocado por N_p(j) ≥ 2 termos: o próprio qubit
    j é copiado em árvore para N_p(j) - 1 ancilas de paridade, cada portador
    faz uma CNOT para a rotação de um termo e a cópia é desfeita. Qubits
    consecutivos usam bancos de paridade alternados, de modo que a cópia de um
    se sobrepõe à descópia do anterior. Com um único termo a CNOT vai direto do
    sistema para a rotação.
    """
    por_qubit = _terms_per_qubit(masks, n_qubits)
    largura = max((len(termos) - 1 for termos in por_qubit), default=0)
    gates = []
    banco = 0
    for j, termos in enumerate(por_qubit):
        if not termos:
            continue
        if len(termos) == 1:
            gates.append(cnot(system_qubit(j), rotation_qubit(termos[0])))
            continue
        holders = [system_qubit(j)] + [parity_qubit(banco * largura + k) for k in range(len(termos) - 1)]
        copia = parity_copy_gates(holders[0], holders[1:])
        gates.extend(copia)
        gates.extend(cnot(h, rotation_qubit(l)) for h, l in zip(holders, termos))
        gates.extend(reversed(copia))
        banco ^= 1
    return gates


def _register_sizes(masks, n_qubits):
    """(ancilas de paridade, ancilas de rotação): dois bancos quando há dois ou mais fan-outs."""
    por_qubit = _terms_per_qubit(masks, n_qubits)
    largura = max((len(termos) - 1 for termos in por_qubit), default=0)
    bancos = min(2, sum(1 for termos in por_qubit if len(termos) >= 2))
    return largura * bancos, len(masks)


def parallel_depth_bound(n_qubits, n_terms):
    """Teto da profundidade de CNOT de um passo da evolução paralela: 4·N·⌈log₂(L+1)⌉ + 8."""
    return 4 * n_qubits * math.ceil(math.log2(n_terms + 1)) + 8


def load_parity_circuit(group, n_qubits):
    """Só o estágio de carga (após a mudança de base comum), para medir profundidade."""
    termos = _z_masks(group, n_qubits)
    masks = [mask for _, _, mask in termos]
    n_parity, n_rotation = _register_sizes(masks, n_qubits)
    return Circuit(n_qubits, n_parity, n_rotation).extend(load_parity_gates(masks, n_qubits))


def synthesize_parallel_evolution(group, time, steps=1, n_qubits=None):
    """
    Evolução paralela de um grupo qubit-wise comutante.

    Args:
        group: lista de (coeficiente, PauliString)
        time: tempo total t
        steps: passos de Trotter (exatos para grupos comutantes)
        n_qubits: qubits do sistema (padrão: o dos termos)

    Returns:
        Circuit sobre system + parity + rotation; ancilas terminam em |0⟩.
    """
    if steps < 1:
        raise ValueError(f"Número de passos deve ser ≥ 1: {steps}")
    if not group:
        raise PreconditionError("Grupo vazio")
    n = n_qubits if n_qubits is not None else group[0][1].n_qubits
    termos = _z_masks(group, n)
    ops = [op for _, op, _ in termos]
    for a, b in combinations(ops, 2):
        if not qubit_wise_commutes(a, b):
            raise PreconditionError(
                f"Grupo não é qubit-wise comutante: {format_pauli(a)} e {format_pauli(b)}",
                pair=(a, b),
            )
    if not termos:
        logger.debug("Grupo só com identidade: evolução é fase global")
        return Circuit(n)

    basis = shared_basis_change(ops, n)
    masks = [mask for _, _, mask in termos]
    n_parity, n_rotation = _register_sizes(masks, n)
    load = load_parity_gates(masks, n)

    circuit = Circuit(n, n_parity, n_rotation)
    for _ in range(steps):
        circuit.extend(basis)
        circuit.extend(load)
        for l, (coefficient, _, _) in enumerate(termos):
            circuit.rz(rotation_qubit(l), 2.0 * coefficient * time / steps)
        circuit.extend(reversed(load))
        circuit.extend(basis.inverse())
    logger.debug(
        f"Evolução paralela: L={n_rotation}, paridade={n_parity}, "
        f"{len(circuit)} portas, profundidade {circuit.depth()}"
    )
    return circuit
