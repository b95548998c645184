"""
Circuitos de medição simultânea por grupo e o pós-processamento dos bits
medidos em estimativas ±1 de cada termo.
"""

import logging
from typing import NamedTuple

from core.circuit import Circuit
from core.clifford import conjugate_by_circuit
from core.diagonalization import diagonalize_group, diagonalizing_circuit, synthesize_group_evolution
from core.grouping import near_qwc_cnot_layer
from core.synthesis import shared_basis_change

logger = logging.getLogger(__name__)


class MeasurementCircuit(NamedTuple):
    circuit: Circuit
    observables: list

    @property
    def pre_rotation(self):
        return self.circuit.without_measurements()


def _observables(group, pre):
    observaveis = []
    for op in group:
        imagem = conjugate_by_circuit(op.without_phase(), pre)
        if not imagem.is_z_only():
            return None
        sinal = -1 if imagem.phase == 2 else 1
        observaveis.append((imagem.without_phase(), sinal))
    return observaveis


def measurement_pre_rotation(label, group, n_qubits):
    """
    Pré-rotação que leva o grupo a só-Z.

    G₁ -> nada; AA(a,b) -> CNOT(a,b) + H(a); rótulo near-QWC -> camada de CNOTs
    + base comum; demais -> base comum (grupo QWC) ou Uₙ. Se a rota rápida não
    diagonaliza (ex.: grupo transferido por CliffordMap) cai em Uₙ.

    Returns:
        (circuito, observáveis)
    """
    group = list(group)
    pre = Circuit(n_qubits)
    if label.type_tag == "AA":
        a, b = (int(v) - 1 for v in label.indices)
        pre.cx(a, b).h(a)
    elif label.is_near_qwc:
        try:
            layer = near_qwc_cnot_layer(label, group, n_qubits)
            imagens = [conjugate_by_circuit(op, layer) for op in group]
            pre = layer.compose(shared_basis_change(imagens, n_qubits))
        except ValueError:
            pre = None
    elif label.type_tag != "I":
        pre, _ = diagonalizing_circuit(group, n_qubits)

    observaveis = _observables(group, pre) if pre is not None else None
    if observaveis is None:
        logger.debug(f"Grupo {label}: rota rápida não diagonaliza; usando Uₙ")
        pre = diagonalize_group(group, n_qubits).circuit
        observaveis = _observables(group, pre)
    return pre, observaveis


def synthesize_measurement_circuit(label, group, n_qubits):
    """
    Circuito de medição do grupo e o mapa termo -> (string só-Z, sinal).

    Args:
        label: GroupLabel do grupo
        group: lista de PauliString
        n_qubits: qubits do sistema

    Returns:
        MeasurementCircuit(circuit, observables) com medição de todos os qubits.
    """
    pre, observaveis = measurement_pre_rotation(label, group, n_qubits)
    circuit = pre.copy()
    for j in range(n_qubits):
        circuit.measure(j)
    return MeasurementCircuit(circuit, observaveis)


def estimate_from_bits(observables, bits):
    """Valor ±1 de cada termo a partir de uma amostra (bits[j] = qubit j)."""
    valores = []
    for observable, sinal in observables:
        paridade = sum(bits[j] for j in observable.support()) % 2
        valores.append(sinal * (-1) ** paridade)
    return valores


def check_measurement_map(group, measurement):
    """Pares (índice, esperado, obtido) onde a conjugação simbólica diverge do mapa."""
    pre = measurement.pre_rotation
    divergencias = []
    for k, (op, (observable, sinal)) in enumerate(zip(group, measurement.observables)):
        imagem = conjugate_by_circuit(op.without_phase(), pre)
        obtido = (imagem.without_phase(), -1 if imagem.phase == 2 else 1)
        if not imagem.is_z_only() or obtido != (observable, sinal):
            divergencias.append((k, (observable, sinal), obtido))
    return divergencias


def synthesize_labeled_evolution(label, group, n_qubits, time, steps=1):
    """
    Evolução de um grupo rotulado usando a mesma pré-rotação da sua medição.

    Returns:
        (circuito de evolução, pré-rotação, observáveis)
    """
    ops = [op for _, op in group]
    pre, observaveis = measurement_pre_rotation(label, ops, n_qubits)
    evolution = synthesize_group_evolution(group, n_qubits, time, steps, pre=pre)
    return evolution, pre, observaveis


def synthesize_evolve_and_measure(label, group, n_qubits, time, steps=1, fuse=False):
    """
    Evolução do grupo seguida da sua medição.

    Com ``fuse`` o Uₙ† final da evolução e o Uₙ inicial da medição se cancelam
    e são omitidos.

    Args:
        group: lista de (coeficiente, PauliString)
    """
    evolution, pre, observaveis = synthesize_labeled_evolution(label, group, n_qubits, time, steps)
    if fuse:
        circuit = Circuit(evolution.n_system, evolution.n_parity, evolution.n_rotation)
        circuit.extend(evolution.gates[: len(evolution) - len(pre)])
    else:
        circuit = evolution.compose(pre)
    for j in range(n_qubits):
        circuit.measure(j)
    return MeasurementCircuit(circuit, observaveis)
