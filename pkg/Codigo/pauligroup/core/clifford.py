"""
Conjugação simbólica de strings de Pauli por circuitos de Clifford e os
mapas de CNOTs que relacionam codificações fermiônicas (JW -> BK).
"""

import logging
import math
from dataclasses import dataclass

from core.circuit import Circuit, GateKind, cnot
from core.pauli import DimensionError, PauliHamiltonian, PauliString

logger = logging.getLogger(__name__)

ANGLE_TOLERANCE = 1e-12


class UnsupportedGateError(ValueError):
    """Porta fora do conjunto de Clifford aceito pela conjugação simbólica."""


# eixo -> (novo eixo, troca de sinal) para G P G†
_SINGLE_QUBIT_RULES = {
    GateKind.H: {"X": ("Z", False), "Y": ("Y", True), "Z": ("X", False)},
    GateKind.S: {"X": ("Y", False), "Y": ("X", True), "Z": ("Z", False)},
    GateKind.SDG: {"X": ("Y", True), "Y": ("X", False), "Z": ("Z", False)},
    GateKind.X: {"X": ("X", False), "Y": ("Y", True), "Z": ("Z", True)},
    GateKind.Y: {"X": ("X", True), "Y": ("Y", False), "Z": ("Z", True)},
    GateKind.Z: {"X": ("X", True), "Y": ("Y", True), "Z": ("Z", False)},
}
_RX_HALF = {"X": ("X", False), "Y": ("Z", False), "Z": ("Y", True)}
_RX_MINUS_HALF = {"X": ("X", False), "Y": ("Z", True), "Z": ("Y", False)}

_AXIS_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _quarter_turns(gate):
    """Número de quartos de volta (mod 4) de uma rotação de Clifford."""
    quartos = gate.angle / (math.pi / 2)
    inteiro = round(quartos)
    if abs(gate.angle - inteiro * math.pi / 2) > ANGLE_TOLERANCE:
        raise UnsupportedGateError(
            f"Rotação {gate.kind.value}({gate.angle}) não é de Clifford"
        )
    return inteiro % 4


def _rule_for(gate):
    if gate.kind in _SINGLE_QUBIT_RULES:
        return _SINGLE_QUBIT_RULES[gate.kind]
    if gate.kind == GateKind.RX:
        return (None, _RX_HALF, _SINGLE_QUBIT_RULES[GateKind.X], _RX_MINUS_HALF)[_quarter_turns(gate)]
    if gate.kind == GateKind.RZ:
        return (
            None,
            _SINGLE_QUBIT_RULES[GateKind.S],
            _SINGLE_QUBIT_RULES[GateKind.Z],
            _SINGLE_QUBIT_RULES[GateKind.SDG],
        )[_quarter_turns(gate)]
    raise UnsupportedGateError(f"Porta {gate.kind.value} não suportada na conjugação")


def _conjugate_bits(x, z, phase, gate, indices):
    if gate.kind == GateKind.CNOT:
        c, t = indices
        xc, zc = (x >> c) & 1, (z >> c) & 1
        xt, zt = (x >> t) & 1, (z >> t) & 1
        if xc and zt and (xt ^ zc ^ 1):
            phase += 2
        x ^= xc << t
        z ^= zt << c
        return x, z, phase
    if gate.kind == GateKind.CZ:
        a, b = indices
        xa, za = (x >> a) & 1, (z >> a) & 1
        xb, zb = (x >> b) & 1, (z >> b) & 1
        if xa and xb and (za ^ zb):
            phase += 2
        z ^= (xb << a) | (xa << b)
        return x, z, phase

    rule = _rule_for(gate)
    (q,) = indices
    bx, bz = (x >> q) & 1, (z >> q) & 1
    if rule is None or not (bx or bz):
        return x, z, phase
    axis = "IZXY"[2 * bx + bz]
    novo, flip = rule[axis]
    nx, nz = _AXIS_BITS[novo]
    bit = 1 << q
    x = (x & ~bit) | (nx << q)
    z = (z & ~bit) | (nz << q)
    return x, z, phase + (2 if flip else 0)


def conjugate_by_circuit(p, c):
    """
    Calcula U·p·U† para o unitário U do circuito (portas em ordem temporal).

    Args:
        p: string de Pauli sobre todos os qubits do circuito
        c: circuito apenas com portas de Clifford

    Returns:
        PauliString conjugada, com fase rastreada.
    """
    if c.n_qubits != p.n_qubits:
        raise DimensionError(
            f"Circuito com {c.n_qubits} qubits aplicado a string de {p.n_qubits} qubits"
        )
    x, z, phase = p.x, p.z, p.phase
    for gate in c:
        if gate.kind == GateKind.MEASURE_Z:
            raise UnsupportedGateError("Medição não pode ser conjugada simbolicamente")
        indices = tuple(c.flat_index(q) for q in gate.qubits)
        x, z, phase = _conjugate_bits(x, z, phase, gate, indices)
    return PauliString(p.n_qubits, x, z, phase)


def is_clifford(c):
    try:
        for gate in c:
            if gate.kind == GateKind.MEASURE_Z:
                return False
            if gate.kind not in (GateKind.CNOT, GateKind.CZ):
                _rule_for(gate)
    except UnsupportedGateError:
        return False
    return True


@dataclass(frozen=True)
class CliffordMap:
    """Circuito de CNOTs que relaciona duas codificações (H' = U H U†)."""

    circuit: Circuit

    def __post_init__(self):
        for gate in self.circuit:
            if gate.kind != GateKind.CNOT:
                raise UnsupportedGateError(
                    f"CliffordMap aceita apenas CNOTs; encontrado {gate.kind.value}"
                )

    @property
    def n_qubits(self):
        return self.circuit.n_qubits

    @classmethod
    def identity(cls, n_qubits):
        return cls(Circuit(n_qubits))

    @classmethod
    def from_cnots(cls, n_qubits, pairs):
        """Pares (controle, alvo) 1-based, em ordem temporal."""
        circuit = Circuit(n_qubits)
        for control, target in pairs:
            circuit.append(cnot(control - 1, target - 1))
        return cls(circuit)

    def apply(self, p):
        return conjugate_by_circuit(p, self.circuit)


def conjugate_hamiltonian(h, clifford_map):
    """Conjuga cada termo preservando a ordem (e portanto os índices) dos termos."""
    if clifford_map.n_qubits != h.n_qubits:
        raise DimensionError(
            f"Mapa com {clifford_map.n_qubits} qubits para Hamiltoniano de {h.n_qubits}"
        )
    termos = [(coefficient, clifford_map.apply(op)) for coefficient, op in h.terms]
    logger.debug(f"Hamiltoniano conjugado por {len(clifford_map.circuit)} CNOTs")
    return PauliHamiltonian(h.n_qubits, tuple(termos))
