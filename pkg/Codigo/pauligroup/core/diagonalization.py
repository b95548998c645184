"""
Diagonalização de grupos totalmente comutantes: descoberta dos pares (T_i, σ_i)
por eliminação simplética em GF(2) e síntese de Uₙ = Π V_i, com
V_i ∝ exp(iπ/4 σ_i)·exp(iπ/4 T_i)·exp(iπ/4 σ_i).
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

from core.circuit import Circuit
from core.clifford import conjugate_by_circuit
from core.pauli import PauliString, commutes, format_pauli, qubit_wise_commutes
from core.synthesis import (
    PreconditionError,
    shared_basis_change,
    synthesize_parallel_evolution,
    synthesize_term_evolution,
)

logger = logging.getLogger(__name__)

QUARTER_PI = math.pi / 4


def diagonalization_depth_bound(n_qubits):
    """Teto da profundidade de Uₙ: 7·N·⌈log₂ N⌉ + 5."""
    log_n = math.ceil(math.log2(n_qubits)) if n_qubits > 1 else 0
    return 7 * n_qubits * log_n + 5


@dataclass
class DiagonalizationPlan:
    """
    Resultado da diagonalização de um grupo.

    ``t_ops[i]`` e ``sigma_ops[i]`` formam os pares trocados por V_i; geradores
    já diagonais ficam em ``diagonal_generators``; ``transformed_terms[k]`` é
    U·P_k·U† (só-Z, sinal na fase).
    """

    n_qubits: int
    group: list
    t_ops: list = field(default_factory=list)
    sigma_ops: list = field(default_factory=list)
    diagonal_generators: list = field(default_factory=list)
    circuit: Circuit = None
    transformed_terms: list = field(default_factory=list)

    @property
    def signs(self):
        return [-1 if op.phase == 2 else 1 for op in self.transformed_terms]


def _symplectic_vector(p):
    return (p.x << p.n_qubits) | p.z


def independent_generators(ops):
    """Subconjunto independente (GF(2)) das strings, na ordem de entrada."""
    pivots = {}
    geradores = []
    for op in ops:
        v = _symplectic_vector(op)
        while v:
            topo = v.bit_length() - 1
            if topo not in pivots:
                pivots[topo] = v
                geradores.append(op.without_phase())
                break
            v ^= pivots[topo]
    return geradores


def _lowest_x(p):
    return (p.x & -p.x).bit_length() - 1


def find_tableau_pairs(generators):
    """
    Constrói (T_i, σ_i) com {T_i, σ_i} = 0 e [T_i, σ_j] = 0 para i ≠ j.

    σ_i = Z no menor qubit com X/Y de T_i; geradores posteriores e T's
    anteriores que anticomutam com σ_i são multiplicados por T_i.

    Returns:
        (t_ops, sigma_ops, diagonal_generators)
    """
    pendentes = list(generators)
    t_ops, sigma_ops, diagonais = [], [], []
    while pendentes:
        t = pendentes.pop(0)
        if t.is_z_only():
            diagonais.append(t)
            continue
        q = _lowest_x(t)
        sigma = PauliString.single(t.n_qubits, "Z", q)
        pendentes = [g * t if not commutes(g, sigma) else g for g in pendentes]
        t_ops = [prev * t if not commutes(prev, sigma) else prev for prev in t_ops]
        t_ops.append(t)
        sigma_ops.append(sigma)
    return t_ops, sigma_ops, diagonais


def check_relations(plan):
    """Lista de violações das relações de comutação do plano (vazia se válido)."""
    problemas = []
    for i, (t, s) in enumerate(zip(plan.t_ops, plan.sigma_ops)):
        if commutes(t, s):
            problemas.append(f"T_{i} comuta com σ_{i}")
        for j, s_j in enumerate(plan.sigma_ops):
            if j != i and not commutes(t, s_j):
                problemas.append(f"T_{i} anticomuta com σ_{j}")
        for op in plan.group:
            if not commutes(t, op):
                problemas.append(f"T_{i} anticomuta com {format_pauli(op)}")
    for a, b in combinations(plan.t_ops, 2):
        if not commutes(a, b):
            problemas.append(f"T's anticomutantes: {format_pauli(a)} e {format_pauli(b)}")
    for k, op in enumerate(plan.transformed_terms):
        if not op.is_z_only():
            problemas.append(f"termo {k} não diagonal após Uₙ: {op}")
    return problemas


def diagonalize_group(group, n_qubits):
    """
    Encontra Uₙ que leva um grupo totalmente comutante a strings só-Z.

    Args:
        group: lista de PauliString (fases ignoradas)
        n_qubits: qubits do sistema

    Returns:
        DiagonalizationPlan com circuito de Clifford e termos transformados.
    """
    group = list(group)
    for a, b in combinations(group, 2):
        if not commutes(a, b):
            raise PreconditionError(
                f"Grupo não comutante: {format_pauli(a)} e {format_pauli(b)}", pair=(a, b)
            )

    geradores = independent_generators(group)
    t_ops, sigma_ops, diagonais = find_tableau_pairs(geradores)

    circuit = Circuit(n_qubits)
    for t, sigma in zip(t_ops, sigma_ops):
        for op in (sigma, t, sigma):
            circuit.extend(synthesize_term_evolution(op, -QUARTER_PI, 1.0, "inline", "tree"))

    transformados = [conjugate_by_circuit(op, circuit) for op in group]
    plan = DiagonalizationPlan(
        n_qubits=n_qubits,
        group=group,
        t_ops=t_ops,
        sigma_ops=sigma_ops,
        diagonal_generators=diagonais,
        circuit=circuit,
        transformed_terms=transformados,
    )
    problemas = check_relations(plan)
    if problemas:
        raise RuntimeError(f"Plano de diagonalização inconsistente: {problemas[:3]}")
    logger.debug(
        f"Diagonalização: {len(group)} termos, {len(t_ops)} pares (T, σ), "
        f"profundidade {circuit.depth()}"
    )
    return plan


def diagonalizing_circuit(group, n_qubits):
    """
    Circuito que leva o grupo a só-Z: mudança de base comum quando o grupo é
    qubit-wise comutante, Uₙ caso contrário.

    Returns:
        (circuit, termos transformados)
    """
    group = list(group)
    if all(qubit_wise_commutes(a, b) for a, b in combinations(group, 2)):
        circuit = shared_basis_change(group, n_qubits)
        return circuit, [conjugate_by_circuit(op, circuit) for op in group]
    plan = diagonalize_group(group, n_qubits)
    return plan.circuit, plan.transformed_terms


def synthesize_group_evolution(group, n_qubits, time, steps=1, pre=None):
    """
    Evolução de um grupo totalmente comutante: U, evolução paralela dos termos
    só-Z transformados, U†.

    Args:
        group: lista de (coeficiente, PauliString)
        pre: circuito diagonalizante já conhecido (padrão: ``diagonalizing_circuit``)
    """
    ops = [op for _, op in group]
    if pre is None:
        pre, transformados = diagonalizing_circuit(ops, n_qubits)
    else:
        transformados = [conjugate_by_circuit(op, pre) for op in ops]
    diagonal = [(coefficient, op) for (coefficient, _), op in zip(group, transformados)]
    evolution = synthesize_parallel_evolution(diagonal, time, steps, n_qubits=n_qubits)
    return pre.compose(evolution).compose(pre.inverse())
