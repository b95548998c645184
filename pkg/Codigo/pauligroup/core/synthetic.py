"""
Geradores semeados de entradas sintéticas: Hamiltonianos com todos os padrões
da tabela de tipos, integrais aleatórias com simetria de 8 vezes e grupos
comutantes obtidos por conjugação de Clifford.
"""

import logging
from itertools import combinations

import numpy as np

from core.circuit import Circuit
from core.clifford import conjugate_by_circuit
from core.fermion import MolecularIntegrals
from core.grouping import PauliType
from core.pauli import PauliHamiltonian, PauliString

logger = logging.getLogger(__name__)

_ERI_PERMUTATIONS = (
    (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
    (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
)


def _between(a, b):
    return ((1 << b) - 1) ^ ((1 << (a + 1)) - 1)


def _segment(a, b, axis_a, axis_b):
    x = (1 << a) | (1 << b)
    z = _between(a, b)
    if axis_a == "Y":
        z |= 1 << a
    if axis_b == "Y":
        z |= 1 << b
    return x, z


def table_patterns(n):
    """
    Enumera todas as strings da tabela de tipos sobre n qubits.

    Returns:
        Lista de (PauliType, PauliString) em ordem determinística.
    """
    padroes = [(PauliType.I, PauliString.identity(n))]
    for i in range(n):
        padroes.append((PauliType.Z, PauliString(n, 0, 1 << i)))
    for i, j in combinations(range(n), 2):
        padroes.append((PauliType.ZZ, PauliString(n, 0, (1 << i) | (1 << j))))
    for a, b in combinations(range(n), 2):
        for letra in "XY":
            x, z = _segment(a, b, letra, letra)
            padroes.append((PauliType(letra * 2), PauliString(n, x, z)))
    for p, q, r in combinations(range(n), 3):
        for letra in "XY":
            x, z = _segment(q, r, letra, letra)
            padroes.append((PauliType("Z" + letra * 2), PauliString(n, x, z | (1 << p))))
            x, z = _segment(p, q, letra, letra)
            padroes.append((PauliType(letra * 2 + "Z"), PauliString(n, x, z | (1 << r))))
            x, z = _segment(p, r, letra, letra)
            padroes.append((PauliType(letra + "Z" + letra), PauliString(n, x, z & ~(1 << q))))
    for i, j, k, l in combinations(range(n), 4):
        for tag in ("XXXX", "YYYY", "XXYY", "YYXX", "XYYX", "YXXY"):
            x1, z1 = _segment(i, j, tag[0], tag[1])
            x2, z2 = _segment(k, l, tag[2], tag[3])
            padroes.append((PauliType(tag), PauliString(n, x1 | x2, z1 | z2)))
    return padroes


def _random_coefficients(rng, count):
    sinais = rng.choice((-1.0, 1.0), size=count)
    return sinais * rng.uniform(0.1, 1.0, size=count)


def synthetic_dense_hamiltonian(n, seed=0):
    """Todos os padrões da tabela populados com coeficientes ±U(0.1, 1)."""
    rng = np.random.default_rng(seed)
    padroes = table_patterns(n)
    coeficientes = _random_coefficients(rng, len(padroes))
    termos = [(float(c), op) for c, (_, op) in zip(coeficientes, padroes)]
    h = PauliHamiltonian.from_terms(n, termos, prune_threshold=0.0)
    logger.debug(f"Hamiltoniano denso sintético N={n}: {len(h)} termos")
    return h


def random_table_hamiltonian(n, seed=0, density=0.3):
    """
    Subconjunto aleatório dos padrões, com ao menos uma string de cada tipo
    realizável em n qubits.
    """
    if not 0.0 < density <= 1.0:
        raise ValueError(f"Densidade fora de (0, 1]: {density}")
    rng = np.random.default_rng(seed)
    padroes = table_patterns(n)
    escolhidos = set(np.flatnonzero(rng.random(len(padroes)) < density).tolist())
    por_tipo = {}
    for index, (tipo, _) in enumerate(padroes):
        por_tipo.setdefault(tipo, []).append(index)
    for indices in por_tipo.values():
        escolhidos.add(int(rng.choice(indices)))
    ordem = sorted(escolhidos)
    coeficientes = _random_coefficients(rng, len(ordem))
    termos = [(float(c), padroes[i][1]) for c, i in zip(coeficientes, ordem)]
    return PauliHamiltonian.from_terms(n, termos, prune_threshold=0.0)


def random_molecular_integrals(n_spatial, n_electrons, seed=0, scale=0.5):
    """Integrais reais aleatórias com simetria de 8 vezes (entrada em escala de LiH)."""
    rng = np.random.default_rng(seed)
    h1 = rng.normal(scale=scale, size=(n_spatial, n_spatial))
    h1 = (h1 + h1.T) / 2
    g = rng.normal(scale=scale, size=(n_spatial,) * 4)
    g = sum(g.transpose(perm) for perm in _ERI_PERMUTATIONS) / len(_ERI_PERMUTATIONS)
    core = float(rng.uniform(0.5, 1.5))
    return MolecularIntegrals.from_spatial(h1, g, core, n_electrons=n_electrons)


def random_clifford_circuit(n, depth, seed=0):
    """Circuito aleatório de H, S e CNOT/CZ com ``depth`` portas."""
    rng = np.random.default_rng(seed)
    circuit = Circuit(n)
    for _ in range(depth):
        escolha = rng.integers(4) if n > 1 else rng.integers(2)
        if escolha == 0:
            circuit.h(int(rng.integers(n)))
        elif escolha == 1:
            circuit.s(int(rng.integers(n)))
        else:
            a, b = (int(q) for q in rng.choice(n, size=2, replace=False))
            if escolha == 2:
                circuit.cx(a, b)
            else:
                circuit.cz(a, b)
    return circuit


def random_commuting_group(n, size, seed=0, depth=None):
    """
    Grupo totalmente comutante: strings só-Z distintas conjugadas por um
    Clifford aleatório (sinais descartados).
    """
    if not 1 <= size < 2 ** n:
        raise ValueError(f"Tamanho de grupo inválido para {n} qubits: {size}")
    rng = np.random.default_rng(seed)
    mascaras = rng.choice(np.arange(1, 2 ** n), size=size, replace=False)
    circuit = random_clifford_circuit(n, depth if depth is not None else 4 * n, seed=seed + 1)
    return [
        conjugate_by_circuit(PauliString(n, 0, int(m)), circuit).without_phase()
        for m in sorted(mascaras.tolist())
    ]
