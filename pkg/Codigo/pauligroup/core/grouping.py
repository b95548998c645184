"""
Classificação das strings de Jordan-Wigner nos 17 tipos da tabela de padrões
e particionamento do Hamiltoniano em grupos comutantes rotulados.

O rótulo de cada termo é calculado de forma independente (uma passada sobre os
termos, sem grafo de comutação); os grupos são os baldes de rótulos iguais.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import NamedTuple

from config.settings import DEBUG_CHECKS
from core.circuit import Circuit
from core.clifford import conjugate_by_circuit, conjugate_hamiltonian
from core.pauli import commutes, format_pauli, qubit_wise_commutes

logger = logging.getLogger(__name__)

MODES = ("full", "near_qwc")
LABEL_ORDER = ("I", "AA", "XXXX", "YYYY", "XXYY", "YYXX", "XYYX", "YXXY")
MED_BIA_TAGS = ("XXXX", "YYYY", "XXYY", "YYXX")
MED_MED_TAGS = ("XYYX", "YXXY")
PARALLEL_MIN_TERMS = 2048


class ClassificationError(ValueError):
    """String que não corresponde a nenhuma linha da tabela de tipos."""

    def __init__(self, pauli, reason=""):
        self.pauli = pauli
        texto = format_pauli(pauli) or "I"
        super().__init__(f"String {texto} não classificável" + (f": {reason}" if reason else ""))


class PauliType(str, Enum):
    I = "I"
    Z = "Z"
    ZZ = "ZZ"
    XX = "XX"
    YY = "YY"
    ZXX = "ZXX"
    ZYY = "ZYY"
    XXZ = "XXZ"
    YYZ = "YYZ"
    XZX = "XZX"
    YZY = "YZY"
    XXXX = "XXXX"
    YYYY = "YYYY"
    XXYY = "XXYY"
    YYXX = "YYXX"
    XYYX = "XYYX"
    YXXY = "YXXY"

    @property
    def tag(self):
        return self.value

    @property
    def body(self):
        """Número de eixos X/Y (0, 2 ou 4)."""
        return sum(1 for c in self.value if c in "XY")


class TermShape(NamedTuple):
    """Tipo, posições dos eixos X/Y (0-based) e o Z avulso (ou lacuna) dos tipos de dois corpos."""

    type: PauliType
    positions: tuple
    extra: int = None


def _interior(a, b):
    """Máscara dos qubits estritamente entre a e b (a < b)."""
    return ((1 << b) - 1) ^ ((1 << (a + 1)) - 1)


def term_shape(p):
    positions = tuple(j for j in range(p.n_qubits) if (p.x >> j) & 1)
    zonly = p.z & ~p.x
    k = len(positions)

    if k == 0:
        n_z = zonly.bit_count()
        if n_z > 2:
            raise ClassificationError(p, f"{n_z} operadores Z sem X/Y")
        return TermShape((PauliType.I, PauliType.Z, PauliType.ZZ)[n_z], positions)

    axes = "".join(p.axis(j) for j in positions)

    if k == 2:
        a, b = positions
        if axes not in ("XX", "YY"):
            raise ClassificationError(p, f"eixos {axes} nas extremidades")
        letra = axes[0]
        extra = zonly ^ _interior(a, b)
        if extra == 0:
            return TermShape(PauliType(axes), positions)
        if extra & (extra - 1):
            raise ClassificationError(p, "preenchimento de Z incompatível")
        e = extra.bit_length() - 1
        if e < a:
            return TermShape(PauliType("Z" + axes), positions, e)
        if e > b:
            return TermShape(PauliType(axes + "Z"), positions, e)
        return TermShape(PauliType(letra + "Z" + letra), positions, e)

    if k == 4:
        i, j, kk, l = positions
        if axes not in MED_BIA_TAGS + MED_MED_TAGS:
            raise ClassificationError(p, f"combinação de eixos {axes} fora da tabela")
        if zonly != _interior(i, j) | _interior(kk, l):
            raise ClassificationError(p, "preenchimento de Z incompatível")
        return TermShape(PauliType(axes), positions)

    raise ClassificationError(p, f"{k} eixos X/Y")


def classify_term(p):
    return term_shape(p).type


@dataclass(frozen=True)
class GroupLabel:
    """
    Rótulo de grupo: tipo + índices 1-based dobrados (meios-inteiros exatos).

    ``index3`` só é usado pelos rótulos near-QWC de quatro corpos.
    """

    type_tag: str
    index1: int = 0
    index2: int = 0
    index3: int = None

    @classmethod
    def of(cls, type_tag, *values):
        dobrados = [int(Fraction(v) * 2) for v in values]
        return cls(type_tag, *dobrados)

    @property
    def indices(self):
        valores = (self.index1, self.index2) if self.index3 is None else (self.index1, self.index2, self.index3)
        return tuple(Fraction(v, 2) for v in valores)

    @property
    def is_near_qwc(self):
        return self.index3 is not None

    def sort_key(self):
        return (
            LABEL_ORDER.index(self.type_tag),
            self.index1,
            self.index2,
            -1 if self.index3 is None else self.index3,
        )

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        if self.type_tag == "I":
            return "I"
        a, b, *resto = (str(v) for v in self.indices)
        if resto:
            return f"{self.type_tag}({a},{b};{resto[0]})"
        return f"{self.type_tag}({a},{b})"


IDENTITY_LABEL = GroupLabel("I")


def _shape_label(shape):
    t = shape.type
    if t.body == 0:
        return IDENTITY_LABEL
    if t.body == 2:
        a, b = shape.positions
        return GroupLabel("AA", 2 * (a + 1), 2 * (b + 1))
    i, j, k, l = (q + 1 for q in shape.positions)
    if t.tag in MED_BIA_TAGS:
        return GroupLabel(t.tag, j + k, 2 * ((l - k) - (j - i)))
    return GroupLabel(t.tag, i + j, k + l)


def group_label(p, t=None):
    """
    Rótulo do grupo de uma string (tipo, Med/Bia ou Med₁/Med₂).

    Args:
        p: string de Pauli
        t: tipo já calculado (opcional, conferido contra a string)

    Returns:
        GroupLabel
    """
    shape = term_shape(p)
    if t is not None and PauliType(t) != shape.type:
        raise ClassificationError(p, f"tipo informado {PauliType(t).value} difere de {shape.type.value}")
    return _shape_label(shape)


def near_qwc_label(p):
    shape = term_shape(p)
    if shape.type.body != 4:
        return _shape_label(shape)
    i, j, k, l = (q + 1 for q in shape.positions)
    return GroupLabel(shape.type.tag, 2 * i, 2 * j, k + l)


def near_qwc_cnot_layer(label, members, n_qubits):
    """
    Camada única de CNOTs de um grupo near-QWC.

    AA(a,b) recebe CNOT(a,b); os quatro corpos recebem CNOT(k,l) para cada par
    direito distinto (pares aninhados, logo disjuntos).
    """
    layer = Circuit(n_qubits)
    if label.type_tag == "I":
        return layer
    if label.type_tag == "AA":
        a, b = label.indices
        return layer.cx(int(a) - 1, int(b) - 1)
    pares = sorted({term_shape(p).positions[2:] for p in members})
    for k, l in pares:
        layer.cx(k, l)
    return layer


@dataclass
class Grouping:
    hamiltonian: object
    groups: dict
    mode: str = "full"
    mapping: object = None

    @property
    def n_qubits(self):
        return self.hamiltonian.n_qubits

    @property
    def labels(self):
        return list(self.groups)

    def __len__(self):
        return len(self.groups)

    def members(self, label):
        """Lista de (coeficiente, PauliString) do grupo."""
        return [self.hamiltonian.terms[i] for i in self.groups[label]]

    def operators(self, label):
        return [self.hamiltonian.terms[i][1] for i in self.groups[label]]

    def sizes(self):
        return [len(indices) for indices in self.groups.values()]


def _labels_for(ops, mode):
    labeler = group_label if mode == "full" else near_qwc_label
    return [labeler(op) for op in ops]


def group_hamiltonian(h, mode="full", workers=1, debug=None):
    """
    Particiona o Hamiltoniano pelos rótulos de grupo, numa única passada.

    Args:
        h: PauliHamiltonian
        mode: "full" ou "near_qwc"
        workers: threads para o cálculo dos rótulos (fusão determinística)
        debug: verifica a comutação dentro dos grupos (padrão: PAULIGROUP_DEBUG)

    Returns:
        Grouping com grupos em ordem de rótulo.
    """
    if mode not in MODES:
        raise ValueError(f"Modo de agrupamento desconhecido: {mode!r}")
    ops = h.operators
    if workers > 1 and len(ops) >= PARALLEL_MIN_TERMS:
        tamanho = math.ceil(len(ops) / workers)
        blocos = [ops[i:i + tamanho] for i in range(0, len(ops), tamanho)]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parciais = list(executor.map(lambda bloco: _labels_for(bloco, mode), blocos))
        labels = [label for parcial in parciais for label in parcial]
    else:
        labels = _labels_for(ops, mode)

    baldes = {}
    for index, label in enumerate(labels):
        baldes.setdefault(label, []).append(index)
    groups = {label: tuple(baldes[label]) for label in sorted(baldes, key=GroupLabel.sort_key)}
    grouping = Grouping(h, groups, mode)
    logger.info(f"Agrupamento ({mode}): {len(h)} termos em {len(groups)} grupos")

    if DEBUG_CHECKS if debug is None else debug:
        report = verify_grouping(grouping, h)
        if not report.passed:
            logger.error(f"Agrupamento inconsistente: {len(report.violations)} violações")
            raise RuntimeError(f"Violações de comutação no agrupamento: {report.violations[:5]}")
    return grouping


@dataclass
class VerificationReport:
    n_terms: int = 0
    n_groups: int = 0
    missing: list = field(default_factory=list)
    duplicates: list = field(default_factory=list)
    invalid: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not (self.missing or self.duplicates or self.invalid or self.violations)

    def to_dict(self):
        return {
            "passed": self.passed,
            "n_terms": self.n_terms,
            "n_groups": self.n_groups,
            "missing": self.missing,
            "duplicates": self.duplicates,
            "invalid": self.invalid,
            "violations": [
                {"label": str(label), "left": left, "right": right}
                for label, left, right in self.violations
            ],
        }


def verify_grouping(g, h=None):
    """
    Confere partição (cobertura e disjunção) e comutação par a par em cada grupo.

    Modo full (ou agrupamento transferido): comutação total. Modo near_qwc:
    comutação qubit a qubit após a camada de CNOTs do grupo.
    """
    h = g.hamiltonian if h is None else h
    report = VerificationReport(n_terms=len(h), n_groups=len(g.groups))
    vistos = {}
    for label, indices in g.groups.items():
        for index in indices:
            if not 0 <= index < len(h):
                report.invalid.append(index)
                continue
            vistos[index] = vistos.get(index, 0) + 1
    report.duplicates = sorted(i for i, count in vistos.items() if count > 1)
    report.missing = sorted(set(range(len(h))) - set(vistos))

    qwc_check = g.mode == "near_qwc" and g.mapping is None
    for label, indices in g.groups.items():
        validos = [i for i in indices if 0 <= i < len(h)]
        ops = [h.terms[i][1] for i in validos]
        if qwc_check:
            layer = near_qwc_cnot_layer(label, ops, h.n_qubits)
            ops = [conjugate_by_circuit(op, layer) for op in ops]
            predicate = qubit_wise_commutes
        else:
            predicate = commutes
        for (ia, pa), (ib, pb) in combinations(zip(validos, ops), 2):
            if not predicate(pa, pb):
                report.violations.append((label, ia, ib))

    if report.passed:
        logger.debug(f"Agrupamento verificado: {report.n_groups} grupos sem violações")
    else:
        logger.warning(
            f"Agrupamento com {len(report.violations)} violações, "
            f"{len(report.missing)} termos ausentes e {len(report.duplicates)} duplicados"
        )
    return report


def transfer_grouping(g_jw, clifford_map):
    """Cada termo conjugado herda o rótulo da sua pré-imagem de Jordan-Wigner."""
    h_mapped = conjugate_hamiltonian(g_jw.hamiltonian, clifford_map)
    logger.info(f"Agrupamento transferido por {len(clifford_map.circuit)} CNOTs")
    return Grouping(h_mapped, dict(g_jw.groups), g_jw.mode, mapping=clifford_map)
