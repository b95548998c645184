"""
Álgebra simbólica de strings de Pauli em forma simplética.

Cada string guarda dois vetores de bits empacotados em inteiros (``x`` e ``z``)
e a fase como expoente de i módulo 4. Os índices são 0-based internamente e
1-based em todos os formatos de texto.
"""

import logging
import re
from dataclasses import dataclass

from config.settings import IMAG_TOLERANCE, PRUNE_THRESHOLD

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"^([XYZ])(\d+)$")
_HEADER = re.compile(r"^#\s*n_qubits\s*:\s*(\d+)\s*$", re.IGNORECASE)
_PHASE_PREFIX = {0: "", 1: "i ", 2: "-", 3: "-i "}
I_POWERS = (1, 1j, -1, -1j)


class PauliParseError(ValueError):
    """Texto de Pauli (ou de Hamiltoniano) malformado."""


class DimensionError(ValueError):
    """Operandos definidos sobre números diferentes de qubits."""


class HermiticityError(ValueError):
    """Coeficiente ou fase que tornaria o Hamiltoniano não hermitiano."""


def product_phase(x1, z1, x2, z2):
    """
    Expoente de i acumulado no produto qubit a qubit de duas strings.

    Args:
        x1, z1: bits da string da esquerda
        x2, z2: bits da string da direita

    Returns:
        Inteiro (não reduzido) k tal que P1·P2 = i^k · P(x1^x2, z1^z2).
    """
    only_x1 = x1 & ~z1
    y1 = x1 & z1
    only_z1 = z1 & ~x1
    only_x2 = x2 & ~z2
    y2 = x2 & z2
    only_z2 = z2 & ~x2
    plus = (only_x1 & y2) | (y1 & only_z2) | (only_z1 & only_x2)
    minus = (only_x1 & only_z2) | (y1 & only_x2) | (only_z1 & y2)
    return plus.bit_count() - minus.bit_count()


@dataclass(frozen=True)
class PauliString:
    """Operador de Pauli multi-qubit com fase em {+1, +i, -1, -i}."""

    n_qubits: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise DimensionError(f"Número de qubits deve ser positivo: {self.n_qubits}")
        limite = 1 << self.n_qubits
        if not (0 <= self.x < limite and 0 <= self.z < limite):
            raise DimensionError(f"Bits fora do intervalo para {self.n_qubits} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n_qubits):
        return cls(n_qubits)

    @classmethod
    def single(cls, n_qubits, axis, index):
        """Pauli de um qubit (``axis`` em X/Y/Z) no qubit ``index`` (0-based)."""
        bit = 1 << index
        if axis == "X":
            return cls(n_qubits, x=bit)
        if axis == "Y":
            return cls(n_qubits, x=bit, z=bit)
        if axis == "Z":
            return cls(n_qubits, z=bit)
        raise PauliParseError(f"Eixo desconhecido: {axis!r}")

    @classmethod
    def from_label(cls, label):
        """Constrói a partir de um rótulo denso como ``"XIZY"`` (caractere k = qubit k)."""
        x = z = 0
        for index, char in enumerate(label):
            if char in "XY":
                x |= 1 << index
            if char in "ZY":
                z |= 1 << index
            if char not in "IXYZ":
                raise PauliParseError(f"Caractere inválido no rótulo: {char!r}")
        return cls(len(label), x, z)

    @property
    def key(self):
        return (self.x, self.z)

    def axis(self, index):
        bx = (self.x >> index) & 1
        bz = (self.z >> index) & 1
        return "IZXY"[2 * bx + bz]

    def support(self):
        mask = self.x | self.z
        return tuple(j for j in range(self.n_qubits) if (mask >> j) & 1)

    def is_identity(self):
        return self.x == 0 and self.z == 0

    def is_z_only(self):
        return self.x == 0

    def is_hermitian(self):
        return self.phase % 2 == 0

    def without_phase(self):
        return PauliString(self.n_qubits, self.x, self.z)

    def sign_flipped(self):
        return PauliString(self.n_qubits, self.x, self.z, self.phase + 2)

    def sort_key(self):
        return (weight(self), tuple((j, self.axis(j)) for j in self.support()))

    def __mul__(self, other):
        return multiply(self, other)

    def __str__(self):
        body = format_pauli(self) or "I"
        return f"{_PHASE_PREFIX[self.phase]}{body}"


def _check_dims(p, q):
    if p.n_qubits != q.n_qubits:
        raise DimensionError(
            f"Strings com números de qubits diferentes: {p.n_qubits} e {q.n_qubits}"
        )


def parse_pauli(text, n_qubits):
    """
    Converte texto como ``"X1 Z2 Y4"`` em PauliString (fase +1).

    Args:
        text: tokens ``<eixo><índice>`` separados por espaço; vazio = identidade
        n_qubits: número de qubits do operador

    Returns:
        PauliString correspondente.
    """
    x = z = 0
    vistos = set()
    for token in text.split():
        match = _TOKEN.match(token)
        if not match:
            raise PauliParseError(f"Token malformado: {token!r}")
        axis, index = match.group(1), int(match.group(2))
        if index < 1 or index > n_qubits:
            raise PauliParseError(f"Índice fora do intervalo 1..{n_qubits}: {token!r}")
        if index in vistos:
            raise PauliParseError(f"Índice repetido: {token!r}")
        vistos.add(index)
        bit = 1 << (index - 1)
        if axis in "XY":
            x |= bit
        if axis in "YZ":
            z |= bit
    return PauliString(n_qubits, x, z)


def format_pauli(p):
    """Forma canônica (ordenada por índice, 1-based, sem fase)."""
    return " ".join(f"{p.axis(j)}{j + 1}" for j in p.support())


def commutes(p, q):
    _check_dims(p, q)
    return ((p.x & q.z) ^ (p.z & q.x)).bit_count() % 2 == 0


def qubit_wise_commutes(p, q):
    _check_dims(p, q)
    ambos = (p.x | p.z) & (q.x | q.z)
    diferentes = (p.x ^ q.x) | (p.z ^ q.z)
    return ambos & diferentes == 0


def multiply(p, q):
    _check_dims(p, q)
    phase = p.phase + q.phase + product_phase(p.x, p.z, q.x, q.z)
    return PauliString(p.n_qubits, p.x ^ q.x, p.z ^ q.z, phase)


def weight(p):
    return (p.x | p.z).bit_count()


@dataclass(frozen=True)
class PauliHamiltonian:
    """
    Soma ponderada de strings de Pauli com coeficientes reais.

    O construtor preserva a ordem recebida (a conjugação depende disso para
    manter os índices dos termos); ``from_terms`` faz a fusão e a poda.
    """

    n_qubits: int
    terms: tuple = ()

    def __post_init__(self):
        normalizados = []
        vistos = set()
        for coefficient, op in self.terms:
            if op.n_qubits != self.n_qubits:
                raise DimensionError(
                    f"Termo {op} tem {op.n_qubits} qubits; esperado {self.n_qubits}"
                )
            if not op.is_hermitian():
                raise HermiticityError(f"Fase imaginária no termo {op}")
            if isinstance(coefficient, complex):
                if abs(coefficient.imag) > IMAG_TOLERANCE:
                    raise HermiticityError(f"Coeficiente complexo {coefficient} no termo {op}")
                coefficient = coefficient.real
            coefficient = float(coefficient)
            if op.phase == 2:
                coefficient, op = -coefficient, op.without_phase()
            if op.key in vistos:
                raise ValueError(f"Termo duplicado: {format_pauli(op) or 'I'}")
            vistos.add(op.key)
            normalizados.append((coefficient, op))
        object.__setattr__(self, "terms", tuple(normalizados))

    @classmethod
    def from_terms(cls, n_qubits, terms, prune_threshold=None, sort=True):
        """
        Funde termos repetidos (igualdade exata de bits), dobra as fases nos
        coeficientes e descarta |coeficiente| abaixo do limiar.
        """
        if prune_threshold is None:
            prune_threshold = PRUNE_THRESHOLD
        if prune_threshold < 0:
            raise ValueError(f"Limiar de poda negativo: {prune_threshold}")
        acumulado = {}
        for coefficient, op in terms:
            if op.n_qubits != n_qubits:
                raise DimensionError(
                    f"Termo {op} tem {op.n_qubits} qubits; esperado {n_qubits}"
                )
            valor = complex(coefficient) * I_POWERS[op.phase]
            acumulado[op.key] = acumulado.get(op.key, 0j) + valor
        resultado = []
        for (x, z), valor in acumulado.items():
            if abs(valor.imag) > IMAG_TOLERANCE:
                op = PauliString(n_qubits, x, z)
                raise HermiticityError(f"Resíduo imaginário {valor.imag:.3e} no termo {format_pauli(op) or 'I'}")
            if valor.real == 0 or abs(valor.real) < prune_threshold:
                continue
            resultado.append((valor.real, PauliString(n_qubits, x, z)))
        if sort:
            resultado.sort(key=lambda term: term[1].sort_key())
        return cls(n_qubits, tuple(resultado))

    @property
    def coefficients(self):
        return [coefficient for coefficient, _ in self.terms]

    @property
    def operators(self):
        return [op for _, op in self.terms]

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def parse_hamiltonian(text, n_qubits=None):
    """
    Lê o formato texto ``<coeficiente> <pauli>`` (uma linha por termo).

    Linhas vazias e comentários ``#`` são ignorados; o cabeçalho opcional
    ``# n_qubits: N`` fixa N quando ``n_qubits`` não é informado. Sem nenhum
    dos dois, N é o maior índice encontrado.
    """
    brutos = []
    cabecalho = None
    for numero, linha in enumerate(text.splitlines(), start=1):
        limpa = linha.strip()
        if not limpa:
            continue
        if limpa.startswith("#"):
            match = _HEADER.match(limpa)
            if match:
                cabecalho = int(match.group(1))
            continue
        limpa = limpa.split("#", 1)[0].strip()
        partes = limpa.split(maxsplit=1)
        try:
            coefficient = float(partes[0])
        except ValueError:
            raise PauliParseError(f"Linha {numero}: coeficiente não numérico {partes[0]!r}") from None
        brutos.append((numero, coefficient, partes[1] if len(partes) > 1 else ""))

    if n_qubits is None:
        n_qubits = cabecalho
    if n_qubits is None:
        indices = [int(m) for _, _, texto in brutos for m in re.findall(r"[XYZ](\d+)", texto)]
        n_qubits = max(indices, default=1)

    termos = []
    for numero, coefficient, texto in brutos:
        try:
            termos.append((coefficient, parse_pauli(texto, n_qubits)))
        except PauliParseError as exc:
            raise PauliParseError(f"Linha {numero}: {exc}") from None
    return PauliHamiltonian.from_terms(n_qubits, termos, prune_threshold=0.0)


def format_hamiltonian(h):
    linhas = [f"# n_qubits: {h.n_qubits}"]
    for coefficient, op in h.terms:
        linhas.append(f"{coefficient:.17g} {format_pauli(op)}".rstrip())
    return "\n".join(linhas) + "\n"
