"""
Simulador denso de vetor de estado usado como oráculo de verificação.

Convenção: o qubit 0 é o bit menos significativo do índice da base. Os
registradores de ancila (parity, rotation) ocupam os bits mais altos, na
ordem de ``Circuit.flat_index``.
"""

import logging
import math
import struct

import numpy as np
from scipy.linalg import expm

from config.settings import DENSE_ORACLE_MAX_QUBITS, MAX_QUBITS
from core.circuit import GateKind
from core.measurement import estimate_from_bits
from core.pauli import I_POWERS, DimensionError, HermiticityError

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
STATE_MAGIC = b"PGSV"
STATE_HEADER = struct.Struct("<4sI8x")

_SQRT2_INV = 1 / math.sqrt(2)
_FIXED_GATES = {
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}
_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": _FIXED_GATES[GateKind.X],
    "Y": _FIXED_GATES[GateKind.Y],
    "Z": _FIXED_GATES[GateKind.Z],
}


class SimulationSizeError(ValueError):
    """Número de qubits acima do limite do simulador."""


class MeasurementInCircuitError(ValueError):
    """Circuito com medição passado para a aplicação exata."""


class Statevector:
    """Vetor de estado normalizado sobre ``n_qubits`` qubits."""

    def __init__(self, amplitudes, check=True, max_qubits=None):
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        n = amps.size.bit_length() - 1
        if n < 1 or amps.size != 1 << n:
            raise DimensionError(f"Tamanho de vetor de estado inválido: {amps.size}")
        limite = MAX_QUBITS if max_qubits is None else max_qubits
        if n > limite:
            raise SimulationSizeError(f"{n} qubits excedem o limite de {limite}")
        if check:
            norma = np.linalg.norm(amps)
            if abs(norma - 1.0) > NORM_TOLERANCE:
                raise ValueError(f"Vetor de estado não normalizado: norma {norma:.12g}")
        self.amplitudes = amps
        self.n_qubits = n

    @classmethod
    def zero(cls, n_qubits):
        return cls.basis(n_qubits, 0)

    @classmethod
    def basis(cls, n_qubits, index):
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps)

    @classmethod
    def random(cls, n_qubits, seed=0):
        rng = np.random.default_rng(seed)
        amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
        return cls(amps / np.linalg.norm(amps))

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self):
        return f"Statevector(n_qubits={self.n_qubits})"


def _slot(total, fixed):
    index = [slice(None)] * total
    for axis, value in fixed.items():
        index[axis] = value
    return tuple(index)


def _gate_matrix(gate):
    if gate.kind == GateKind.RX:
        c, s = math.cos(gate.angle / 2), math.sin(gate.angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if gate.kind == GateKind.RZ:
        return np.diag([np.exp(-0.5j * gate.angle), np.exp(0.5j * gate.angle)])
    return _FIXED_GATES[gate.kind]


def _apply_gate(psi, gate, axes, total):
    if gate.kind == GateKind.MEASURE_Z:
        raise MeasurementInCircuitError("Medição não é suportada em apply_circuit; use a amostragem")
    if gate.kind in (GateKind.CNOT, GateKind.CZ):
        a, b = axes
        novo = psi.copy()
        i10, i11 = _slot(total, {a: 1, b: 0}), _slot(total, {a: 1, b: 1})
        if gate.kind == GateKind.CNOT:
            novo[i10], novo[i11] = psi[i11], psi[i10]
        else:
            novo[i11] = -psi[i11]
        return novo
    (axis,) = axes
    if gate.kind == GateKind.RZ:
        novo = psi.copy()
        novo[_slot(total, {axis: 0})] *= np.exp(-0.5j * gate.angle)
        novo[_slot(total, {axis: 1})] *= np.exp(0.5j * gate.angle)
        return novo
    return np.moveaxis(np.tensordot(_gate_matrix(gate), psi, axes=([1], [axis])), 0, axis)


def apply_circuit(c, s, max_qubits=None):
    """
    Aplica o circuito porta a porta.

    Args:
        c: Circuit sem medições
        s: estado do registrador do sistema (ancilas entram como |0⟩)
        max_qubits: limite de qubits (padrão: MAX_QUBITS)

    Returns:
        Statevector sobre todos os registradores do circuito.
    """
    limite = MAX_QUBITS if max_qubits is None else max_qubits
    total = c.n_qubits
    if total > limite:
        raise SimulationSizeError(f"Circuito com {total} qubits excede o limite de {limite}")
    if s.n_qubits != c.n_system:
        raise DimensionError(f"Estado com {s.n_qubits} qubits para sistema de {c.n_system}")

    amps = np.zeros(1 << total, dtype=complex)
    amps[: s.amplitudes.size] = s.amplitudes
    psi = amps.reshape([2] * total)
    for gate in c:
        axes = [total - 1 - c.flat_index(q) for q in gate.qubits]
        psi = _apply_gate(psi, gate, axes, total)
    return Statevector(psi.reshape(-1), check=False, max_qubits=limite)


def ancilla_residual(state, n_system):
    """Probabilidade de qualquer ancila fora de |0⟩."""
    return float(np.sum(np.abs(state.amplitudes[1 << n_system:]) ** 2))


def system_state(state, n_system):
    return Statevector(state.amplitudes[: 1 << n_system], check=False)


def pauli_matrix(p):
    """Matriz densa 2ⁿ×2ⁿ da string (qubit 0 = bit menos significativo)."""
    matriz = np.array([[1.0 + 0j]])
    for j in reversed(range(p.n_qubits)):
        matriz = np.kron(matriz, _PAULI_MATRICES[p.axis(j)])
    return I_POWERS[p.phase] * matriz


def _parity_signs(mask, size):
    indices = np.arange(size)
    paridade = np.zeros(size, dtype=np.int64)
    j = 0
    while mask >> j:
        if (mask >> j) & 1:
            paridade ^= (indices >> j) & 1
        j += 1
    return 1 - 2 * paridade


def apply_pauli(p, amplitudes):
    """P|ψ⟩ sem matriz densa: P|b⟩ = i^(fase + #Y)·(-1)^|b∧z|·|b⊕x⟩."""
    amplitudes = np.asarray(amplitudes)
    if amplitudes.size != 1 << p.n_qubits:
        raise DimensionError(f"Vetor de tamanho {amplitudes.size} para string de {p.n_qubits} qubits")
    fator = I_POWERS[(p.phase + (p.x & p.z).bit_count()) % 4]
    indices = np.arange(amplitudes.size)
    saida = np.empty_like(amplitudes, dtype=complex)
    saida[indices ^ p.x] = fator * _parity_signs(p.z, amplitudes.size) * amplitudes
    return saida


def expectation(p, s):
    """⟨s|P|s⟩ para P hermitiana."""
    if p.n_qubits != s.n_qubits:
        raise DimensionError(f"String de {p.n_qubits} qubits e estado de {s.n_qubits}")
    if not p.is_hermitian():
        raise HermiticityError(f"Valor esperado de string não hermitiana: {p}")
    valor = np.vdot(s.amplitudes, apply_pauli(p, s.amplitudes))
    return float(valor.real)


def _signed_term(coefficient, p):
    if not p.is_hermitian():
        raise HermiticityError(f"Termo com fase imaginária: {p}")
    return (-coefficient if p.phase == 2 else coefficient), p.without_phase()


def exact_group_evolution(group, time, s):
    """
    Aplica Π exp(-i·h_l·t·P_l) termo a termo.

    Termos só-Z viram fases por estado da base; os demais usam ``expm`` denso
    até DENSE_ORACLE_MAX_QUBITS e cos(ht) - i·sin(ht)·P acima disso.
    """
    amps = s.amplitudes.copy()
    for coefficient, op in group:
        if op.n_qubits != s.n_qubits:
            raise DimensionError(f"Termo {op} com {op.n_qubits} qubits; estado com {s.n_qubits}")
        h, op = _signed_term(coefficient, op)
        angulo = h * time
        if op.is_z_only():
            amps = amps * np.exp(-1j * angulo * _parity_signs(op.z, amps.size))
        elif s.n_qubits <= DENSE_ORACLE_MAX_QUBITS:
            amps = expm(-1j * angulo * pauli_matrix(op)) @ amps
        else:
            amps = math.cos(angulo) * amps - 1j * math.sin(angulo) * apply_pauli(op, amps)
    return Statevector(amps, check=False)


def fidelity(a, b):
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def random_particle_conserving_state(n_qubits, n_particles, seed=0):
    """
    Estado aleatório (gaussiano complexo normalizado) no setor de peso de
    Hamming ``n_particles``; a primeira amplitude não nula é real positiva.
    """
    if not 0 <= n_particles <= n_qubits:
        raise ValueError(f"Número de partículas inválido: {n_particles} em {n_qubits} qubits")
    indices = np.array([b for b in range(1 << n_qubits) if b.bit_count() == n_particles])
    rng = np.random.default_rng(seed)
    valores = rng.normal(size=indices.size) + 1j * rng.normal(size=indices.size)
    valores *= np.exp(-1j * np.angle(valores[0]))
    valores[0] = abs(valores[0])
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[indices] = valores / np.linalg.norm(valores)
    return Statevector(amps)


def sample_bitstrings(state, shots, seed=0):
    """Amostras da medição na base computacional: matriz (shots, n) de bits."""
    probabilidades = np.abs(state.amplitudes) ** 2
    probabilidades /= probabilidades.sum()
    rng = np.random.default_rng(seed)
    resultados = rng.choice(probabilidades.size, size=shots, p=probabilidades)
    return (resultados[:, None] >> np.arange(state.n_qubits)) & 1


def estimate_group_by_sampling(circuit, observables, coefficients, state, shots, seed=0):
    """
    Estima Σ h_l·⟨P_l⟩ de um grupo pela amostragem do seu circuito de medição.

    Returns:
        (estimativa, médias por termo)
    """
    final = apply_circuit(circuit.without_measurements(), state)
    amostras = sample_bitstrings(final, shots, seed)[:, : circuit.n_system]
    valores = np.array([estimate_from_bits(observables, bits) for bits in amostras], dtype=float)
    medias = valores.mean(axis=0)
    estimativa = float(np.dot(coefficients, medias))
    logger.debug(f"Amostragem com {shots} disparos: estimativa {estimativa:.6f}")
    return estimativa, medias


def dump_state(state, path):
    """Grava o estado em binário: cabeçalho de 16 bytes + complex64 little-endian."""
    with open(path, "wb") as f:
        f.write(STATE_HEADER.pack(STATE_MAGIC, state.n_qubits))
        f.write(np.asarray(state.amplitudes, dtype="<c8").tobytes())


def load_state(path):
    with open(path, "rb") as f:
        cabecalho = f.read(STATE_HEADER.size)
        magic, n_qubits = STATE_HEADER.unpack(cabecalho)
        if magic != STATE_MAGIC:
            raise ValueError(f"Arquivo de estado com assinatura inválida: {magic!r}")
        amps = np.frombuffer(f.read(), dtype="<c8")
    if amps.size != 1 << n_qubits:
        raise ValueError(f"Arquivo de estado truncado: {amps.size} amplitudes para {n_qubits} qubits")
    return Statevector(amps.astype(complex), check=False)
