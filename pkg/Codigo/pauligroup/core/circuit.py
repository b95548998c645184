"""
Representação intermediária de circuitos: portas, registradores nomeados,
profundidade e exportação/importação OpenQASM 2.0.
"""

import logging
import math
import re
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

logger = logging.getLogger(__name__)

SYSTEM = "system"
PARITY = "parity"
ROTATION = "rotation"
REGISTER_ORDER = (SYSTEM, PARITY, ROTATION)


class CircuitError(ValueError):
    """Porta, operando ou texto QASM inválido."""


class GateKind(str, Enum):
    H = "h"
    S = "s"
    SDG = "sdg"
    RX = "rx"
    RZ = "rz"
    CNOT = "cx"
    CZ = "cz"
    X = "x"
    Y = "y"
    Z = "z"
    MEASURE_Z = "measure"


TWO_QUBIT = {GateKind.CNOT, GateKind.CZ}
PARAMETRIC = {GateKind.RX, GateKind.RZ}
SELF_INVERSE = {GateKind.H, GateKind.X, GateKind.Y, GateKind.Z, GateKind.CNOT, GateKind.CZ}


class Qubit(NamedTuple):
    register: str
    index: int

    def __str__(self):
        return f"{self.register}[{self.index}]"


def system_qubit(index):
    return Qubit(SYSTEM, index)


def parity_qubit(index):
    return Qubit(PARITY, index)


def rotation_qubit(index):
    return Qubit(ROTATION, index)


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple
    angle: float = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        qubits = tuple(q if isinstance(q, Qubit) else system_qubit(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        aridade = 2 if self.kind in TWO_QUBIT else 1
        if len(qubits) != aridade:
            raise CircuitError(f"Porta {self.kind.value} espera {aridade} operando(s): {qubits}")
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"Operandos repetidos em {self.kind.value}: {qubits}")
        if self.kind in PARAMETRIC:
            if self.angle is None or not math.isfinite(self.angle):
                raise CircuitError(f"Ângulo inválido para {self.kind.value}: {self.angle}")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise CircuitError(f"Porta {self.kind.value} não recebe ângulo")

    def inverse(self):
        if self.kind in SELF_INVERSE:
            return self
        if self.kind in PARAMETRIC:
            return Gate(self.kind, self.qubits, -self.angle)
        if self.kind == GateKind.S:
            return Gate(GateKind.SDG, self.qubits)
        if self.kind == GateKind.SDG:
            return Gate(GateKind.S, self.qubits)
        raise CircuitError("Medição não possui inversa")


def cnot(control, target):
    return Gate(GateKind.CNOT, (control, target))


class Circuit:
    """
    Lista ordenada de portas sobre os registradores system/parity/rotation.

    Os métodos de construção (``h``, ``cx``, ``rz``...) acrescentam portas e
    devolvem o próprio circuito; depois de montado o circuito é tratado como
    valor imutável e pode ser compartilhado entre threads.
    """

    def __init__(self, n_system, n_parity=0, n_rotation=0):
        if n_system < 0 or n_parity < 0 or n_rotation < 0:
            raise CircuitError("Tamanhos de registradores devem ser não negativos")
        self.registers = {SYSTEM: n_system, PARITY: n_parity, ROTATION: n_rotation}
        self._gates = []
        self._depth = None

    @property
    def n_system(self):
        return self.registers[SYSTEM]

    @property
    def n_parity(self):
        return self.registers[PARITY]

    @property
    def n_rotation(self):
        return self.registers[ROTATION]

    @property
    def n_qubits(self):
        return sum(self.registers.values())

    @property
    def gates(self):
        return tuple(self._gates)

    def flat_index(self, qubit):
        offset = 0
        for name in REGISTER_ORDER:
            if name == qubit.register:
                return offset + qubit.index
            offset += self.registers[name]
        raise CircuitError(f"Registrador desconhecido: {qubit.register}")

    def append(self, gate):
        for qubit in gate.qubits:
            tamanho = self.registers.get(qubit.register)
            if tamanho is None or not 0 <= qubit.index < tamanho:
                raise CircuitError(f"Operando {qubit} fora dos registradores declarados")
        self._gates.append(gate)
        self._depth = None
        return self

    def extend(self, gates):
        for gate in gates:
            self.append(gate)
        return self

    def h(self, q):
        return self.append(Gate(GateKind.H, (q,)))

    def s(self, q):
        return self.append(Gate(GateKind.S, (q,)))

    def sdg(self, q):
        return self.append(Gate(GateKind.SDG, (q,)))

    def x(self, q):
        return self.append(Gate(GateKind.X, (q,)))

    def y(self, q):
        return self.append(Gate(GateKind.Y, (q,)))

    def z(self, q):
        return self.append(Gate(GateKind.Z, (q,)))

    def rx(self, q, angle):
        return self.append(Gate(GateKind.RX, (q,), angle))

    def rz(self, q, angle):
        return self.append(Gate(GateKind.RZ, (q,), angle))

    def cx(self, control, target):
        return self.append(Gate(GateKind.CNOT, (control, target)))

    def cz(self, a, b):
        return self.append(Gate(GateKind.CZ, (a, b)))

    def measure(self, q):
        return self.append(Gate(GateKind.MEASURE_Z, (q,)))

    def copy(self):
        novo = Circuit(self.n_system, self.n_parity, self.n_rotation)
        novo._gates = list(self._gates)
        return novo

    def compose(self, other):
        """Novo circuito com as portas de ``self`` seguidas das de ``other``."""
        novo = Circuit(
            max(self.n_system, other.n_system),
            max(self.n_parity, other.n_parity),
            max(self.n_rotation, other.n_rotation),
        )
        return novo.extend(self._gates).extend(other.gates)

    def inverse(self):
        novo = Circuit(self.n_system, self.n_parity, self.n_rotation)
        return novo.extend(gate.inverse() for gate in reversed(self._gates))

    def without_measurements(self):
        novo = Circuit(self.n_system, self.n_parity, self.n_rotation)
        return novo.extend(g for g in self._gates if g.kind != GateKind.MEASURE_Z)

    def depth(self):
        if self._depth is None:
            self._depth = circuit_depth(self)
        return self._depth

    def count(self, kind):
        return sum(1 for gate in self._gates if gate.kind == kind)

    def to_dict(self):
        return {
            "registers": dict(self.registers),
            "gates": [
                {
                    "kind": gate.kind.value,
                    "qubits": [[q.register, q.index] for q in gate.qubits],
                    "angle": gate.angle,
                }
                for gate in self._gates
            ],
        }

    @classmethod
    def from_dict(cls, data):
        regs = data["registers"]
        circuit = cls(regs.get(SYSTEM, 0), regs.get(PARITY, 0), regs.get(ROTATION, 0))
        for item in data["gates"]:
            qubits = tuple(Qubit(reg, int(idx)) for reg, idx in item["qubits"])
            circuit.append(Gate(GateKind(item["kind"]), qubits, item.get("angle")))
        return circuit

    def __len__(self):
        return len(self._gates)

    def __iter__(self):
        return iter(self._gates)

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.registers == other.registers and self._gates == other._gates

    def __repr__(self):
        return f"Circuit(registers={self.registers}, gates={len(self._gates)})"


def circuit_depth(c, kinds=None):
    """
    Comprimento da maior cadeia de portas que compartilham qubits.

    Args:
        c: circuito
        kinds: se informado, só as portas desses tipos entram na contagem

    Returns:
        Profundidade (medições incluídas quando ``kinds`` é None).
    """
    niveis = defaultdict(int)
    profundidade = 0
    for gate in c:
        if kinds is not None and gate.kind not in kinds:
            continue
        nivel = max(niveis[q] for q in gate.qubits) + 1
        for q in gate.qubits:
            niveis[q] = nivel
        profundidade = max(profundidade, nivel)
    return profundidade


def _format_angle(angle):
    return format(angle, ".17g")


def export_qasm(c):
    linhas = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    for name in REGISTER_ORDER:
        if c.registers[name] > 0:
            linhas.append(f"qreg {name}[{c.registers[name]}];")
    if any(gate.kind == GateKind.MEASURE_Z for gate in c):
        linhas.append(f"creg meas[{c.n_system}];")
    for gate in c:
        operandos = ",".join(str(q) for q in gate.qubits)
        if gate.kind == GateKind.MEASURE_Z:
            (q,) = gate.qubits
            if q.register != SYSTEM:
                raise CircuitError(f"Medição só é exportada para qubits do sistema: {q}")
            linhas.append(f"measure {q} -> meas[{q.index}];")
        elif gate.kind in PARAMETRIC:
            linhas.append(f"{gate.kind.value}({_format_angle(gate.angle)}) {operandos};")
        else:
            linhas.append(f"{gate.kind.value} {operandos};")
    return "\n".join(linhas) + "\n"


_STATEMENT = re.compile(r"^(\w+)(?:\(([^)]*)\))?\s+(.+)$")
_OPERAND = re.compile(r"^\s*(\w+)\[(\d+)\]\s*$")
_PI_EXPR = re.compile(
    r"^\s*(-)?\s*(?:(\d+(?:\.\d*)?)\s*\*\s*)?pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$"
)


def _parse_angle(expr):
    try:
        return float(expr)
    except ValueError:
        pass
    match = _PI_EXPR.match(expr)
    if not match:
        raise CircuitError(f"Ângulo não suportado: {expr!r}")
    valor = math.pi * float(match.group(2) or 1.0) / float(match.group(3) or 1.0)
    return -valor if match.group(1) else valor


def _parse_operand(text):
    match = _OPERAND.match(text)
    if not match:
        raise CircuitError(f"Operando malformado: {text!r}")
    return Qubit(match.group(1), int(match.group(2)))


def parse_qasm(text):
    """Importa o subconjunto OpenQASM 2.0 emitido por ``export_qasm``."""
    registros = {}
    instrucoes = []
    sem_comentarios = "\n".join(linha.split("//", 1)[0] for linha in text.splitlines())
    for bruto in sem_comentarios.split(";"):
        stmt = " ".join(bruto.split())
        if not stmt or stmt.startswith("OPENQASM") or stmt.startswith("include"):
            continue
        if stmt.startswith("qreg "):
            q = _parse_operand(stmt[5:])
            if q.register not in REGISTER_ORDER:
                raise CircuitError(f"Registrador não suportado: {q.register}")
            registros[q.register] = q.index
            continue
        if stmt.startswith("creg "):
            continue
        if stmt.startswith("measure "):
            alvo = stmt[len("measure "):].split("->")[0]
            instrucoes.append((GateKind.MEASURE_Z, None, [_parse_operand(alvo)]))
            continue
        match = _STATEMENT.match(stmt)
        if not match:
            raise CircuitError(f"Instrução não reconhecida: {stmt!r}")
        nome, argumento, operandos = match.groups()
        try:
            kind = GateKind(nome)
        except ValueError:
            raise CircuitError(f"Porta não suportada: {nome!r}") from None
        angle = _parse_angle(argumento) if argumento is not None else None
        instrucoes.append((kind, angle, [_parse_operand(op) for op in operandos.split(",")]))

    circuit = Circuit(registros.get(SYSTEM, 0), registros.get(PARITY, 0), registros.get(ROTATION, 0))
    for kind, angle, qubits in instrucoes:
        circuit.append(Gate(kind, tuple(qubits), angle))
    return circuit
