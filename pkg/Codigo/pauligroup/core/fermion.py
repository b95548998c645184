"""
Ingestão de integrais eletrônicas (FCIDUMP), construção do Hamiltoniano em
segunda quantização e transformação de Jordan-Wigner.
"""

import logging
import re
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from config.settings import IMAG_TOLERANCE, PRUNE_THRESHOLD
from core.pauli import I_POWERS, HermiticityError, PauliHamiltonian, PauliString, product_phase

logger = logging.getLogger(__name__)

__all__ = [
    "FcidumpParseError",
    "HermiticityError",
    "MolecularIntegrals",
    "FermionTerm",
    "FermionHamiltonian",
    "parse_fcidump",
    "load_fcidump",
    "format_fcidump",
    "write_fcidump",
    "build_fermionic_hamiltonian",
    "jordan_wigner_transform",
]

_HEADER_KEY = re.compile(r"([A-Za-z_]\w*)\s*=")
REQUIRED_FIELDS = ("NORB", "NELEC")
FLOAT_FORMAT = "%.16g"
SYMMETRY_TOLERANCE = 1e-10


class FcidumpParseError(ValueError):
    """Arquivo FCIDUMP malformado."""

    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"Linha {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class MolecularIntegrals:
    """
    Integrais em spin-orbitais (ordem intercalada: orbital espacial k -> 2k, 2k+1).

    ``two_body[p, q, r, s]`` é o coeficiente de a†_p a†_q a_r a_s antes do
    fator ½; os tensores espaciais (notação química) são mantidos para os
    testes e para reescrever o arquivo.
    """

    n_orbitals: int
    one_body: np.ndarray
    two_body: np.ndarray
    core_energy: float = 0.0
    n_electrons: int = 0
    ms2: int = 0
    orbsym: tuple = ()
    isym: int = 1
    spatial_one_body: np.ndarray = field(default=None, repr=False)
    spatial_two_body: np.ndarray = field(default=None, repr=False)

    @property
    def n_spatial(self):
        return self.n_orbitals // 2

    @classmethod
    def from_spatial(cls, h1, g, core_energy=0.0, n_electrons=0, ms2=0, orbsym=None, isym=1):
        """
        Expande integrais espaciais para spin-orbitais.

        Args:
            h1: matriz NORB×NORB de integrais de um elétron
            g: tensor NORB⁴ de integrais de dois elétrons (ij|kl), notação química
            core_energy: constante (repulsão nuclear + núcleo congelado)

        Returns:
            MolecularIntegrals com 2·NORB spin-orbitais.
        """
        h1 = np.asarray(h1, dtype=float)
        g = np.asarray(g, dtype=float)
        norb = h1.shape[0]
        if h1.shape != (norb, norb) or g.shape != (norb,) * 4:
            raise ValueError(f"Formas inconsistentes: h1 {h1.shape}, g {g.shape}")
        if not np.allclose(h1, h1.T, atol=SYMMETRY_TOLERANCE):
            raise ValueError("Integrais de um elétron não são simétricas")
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(g, g.transpose(perm), atol=SYMMETRY_TOLERANCE):
                raise ValueError(f"Integrais de dois elétrons violam a simetria {perm}")

        n = 2 * norb
        spin = np.eye(2)
        one_body = np.kron(h1, spin)
        physicist = np.einsum("psqr->pqrs", g)
        two_body = np.einsum("pqrs,ad,bc->paqbrcsd", physicist, spin, spin).reshape(n, n, n, n)
        return cls(
            n_orbitals=n,
            one_body=one_body,
            two_body=two_body,
            core_energy=float(core_energy),
            n_electrons=int(n_electrons),
            ms2=int(ms2),
            orbsym=tuple(orbsym) if orbsym is not None else (1,) * norb,
            isym=int(isym),
            spatial_one_body=h1,
            spatial_two_body=g,
        )


def _parse_header(body, first_line):
    partes = _HEADER_KEY.split(body)
    campos = {}
    for key, raw in zip(partes[1::2], partes[2::2]):
        valores = [v.strip() for v in raw.replace("\n", " ").split(",") if v.strip()]
        campos[key.upper()] = valores

    for nome in REQUIRED_FIELDS:
        if nome not in campos:
            raise FcidumpParseError(f"Campo obrigatório {nome} ausente no cabeçalho", first_line)

    def inteiros(nome):
        try:
            return [int(v) for v in campos[nome]]
        except ValueError:
            raise FcidumpParseError(f"Valor não inteiro em {nome}: {campos[nome]}", first_line) from None

    header = {"NORB": inteiros("NORB")[0], "NELEC": inteiros("NELEC")[0]}
    if header["NORB"] < 1:
        raise FcidumpParseError(f"NORB deve ser positivo: {header['NORB']}", first_line)
    if "MS2" in campos:
        header["MS2"] = inteiros("MS2")[0]
    else:
        logger.warning("MS2 ausente no FCIDUMP; assumindo 0")
        header["MS2"] = 0
    if "ORBSYM" in campos:
        header["ORBSYM"] = inteiros("ORBSYM")
    else:
        logger.warning("ORBSYM ausente no FCIDUMP; assumindo simetria 1 para todos os orbitais")
        header["ORBSYM"] = [1] * header["NORB"]
    if "ISYM" in campos:
        header["ISYM"] = inteiros("ISYM")[0]
    else:
        logger.warning("ISYM ausente no FCIDUMP; assumindo 1")
        header["ISYM"] = 1
    for nome in campos.keys() - {"NORB", "NELEC", "MS2", "ORBSYM", "ISYM"}:
        logger.debug(f"Campo de cabeçalho ignorado: {nome}")
    return header


def _fill_eri(g, i, j, k, l, value):
    for a, b, c, d in (
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    ):
        g[a, b, c, d] = value


def parse_fcidump(text):
    """
    Lê um FCIDUMP (cabeçalho namelist ``&FCI ... &END`` + linhas ``valor i j k l``).

    Returns:
        MolecularIntegrals com todas as entradas simétricas preenchidas.
    """
    linhas = text.splitlines()
    inicio = next((n for n, linha in enumerate(linhas) if "&FCI" in linha.upper()), None)
    if inicio is None:
        raise FcidumpParseError("Cabeçalho &FCI não encontrado", 1)

    corpo = []
    fim = None
    for n in range(inicio, len(linhas)):
        linha = linhas[n]
        if n == inicio:
            linha = linha[linha.upper().index("&FCI") + 4:]
        marcador = re.search(r"&END|/", linha, re.IGNORECASE)
        if marcador:
            corpo.append(linha[: marcador.start()])
            fim = n
            break
        corpo.append(linha)
    if fim is None:
        raise FcidumpParseError("Cabeçalho sem terminador &END", inicio + 1)

    header = _parse_header("\n".join(corpo), inicio + 1)
    norb = header["NORB"]
    h1 = np.zeros((norb, norb))
    g = np.zeros((norb, norb, norb, norb))
    core_energy = 0.0

    for n in range(fim + 1, len(linhas)):
        numero = n + 1
        campos = linhas[n].split()
        if not campos:
            continue
        if len(campos) != 5:
            raise FcidumpParseError(f"Esperados 5 campos, encontrados {len(campos)}", numero)
        try:
            value = float(campos[0].replace("D", "E").replace("d", "e"))
        except ValueError:
            raise FcidumpParseError(f"Valor não numérico {campos[0]!r}", numero) from None
        try:
            i, j, k, l = (int(c) for c in campos[1:])
        except ValueError:
            raise FcidumpParseError(f"Índices não inteiros {campos[1:]}", numero) from None
        if any(idx < 0 or idx > norb for idx in (i, j, k, l)):
            raise FcidumpParseError(f"Índice fora do intervalo 0..{norb}: {campos[1:]}", numero)

        if i == j == k == l == 0:
            core_energy = value
        elif k == l == 0 and i > 0 and j > 0:
            h1[i - 1, j - 1] = h1[j - 1, i - 1] = value
        elif j == k == l == 0:
            logger.debug(f"Linha {numero}: energia orbital ignorada ({value})")
        elif min(i, j, k, l) > 0:
            _fill_eri(g, i - 1, j - 1, k - 1, l - 1, value)
        else:
            raise FcidumpParseError(f"Padrão de índices inválido {campos[1:]}", numero)

    mi = MolecularIntegrals.from_spatial(
        h1, g, core_energy,
        n_electrons=header["NELEC"],
        ms2=header["MS2"],
        orbsym=header["ORBSYM"],
        isym=header["ISYM"],
    )
    logger.info(
        f"FCIDUMP lido: NORB={norb}, NELEC={header['NELEC']}, "
        f"{mi.n_orbitals} spin-orbitais, energia de núcleo {core_energy:.10f}"
    )
    return mi


def load_fcidump(path):
    with open(path, "r", encoding="utf-8") as f:
        return parse_fcidump(f.read())


def format_fcidump(mi, tol=1e-15, float_format=FLOAT_FORMAT):
    """Gera o texto FCIDUMP (entradas únicas pela simetria de 8 vezes)."""
    h1 = mi.spatial_one_body
    g = mi.spatial_two_body
    if h1 is None or g is None:
        raise ValueError("Integrais espaciais indisponíveis para escrita")
    nmo = h1.shape[0]
    out = [
        f" &FCI NORB={nmo:4d},NELEC={mi.n_electrons:2d},MS2={mi.ms2},",
        "  ORBSYM=" + ",".join(str(s) for s in mi.orbsym) + ",",
        f"  ISYM={mi.isym},",
        " &END",
    ]
    output_format = float_format + " %4d %4d %4d %4d"
    for i in range(nmo):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if ij >= kl and abs(g[i, j, k, l]) > tol:
                        out.append(output_format % (g[i, j, k, l], i + 1, j + 1, k + 1, l + 1))
    output_format = float_format + " %4d %4d    0    0"
    for i in range(nmo):
        for j in range(i + 1):
            if abs(h1[i, j]) > tol:
                out.append(output_format % (h1[i, j], i + 1, j + 1))
    out.append((float_format + "    0    0    0    0") % mi.core_energy)
    return "\n".join(out) + "\n"


def write_fcidump(mi, path, tol=1e-15):
    with open(path, "w", encoding="utf-8") as fout:
        fout.write(format_fcidump(mi, tol=tol))
    logger.info(f"FCIDUMP salvo em {path}")


@dataclass(frozen=True)
class FermionTerm:
    coefficient: float
    ops: tuple = ()

    def __post_init__(self):
        if len(self.ops) not in (0, 2, 4):
            raise ValueError(f"Termo com {len(self.ops)} operadores de escada")


@dataclass(frozen=True)
class FermionHamiltonian:
    n_orbitals: int
    terms: tuple = ()

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def build_fermionic_hamiltonian(mi):
    """
    H = E_core + Σ h_ij a†_i a_j + ½ Σ h_pqrs a†_p a†_q a_r a_s.

    Um termo por integral não nula; a hermiticidade vem da simetria das integrais.
    """
    termos = []
    if mi.core_energy != 0.0:
        termos.append(FermionTerm(mi.core_energy, ()))
    for i, j in np.argwhere(mi.one_body != 0):
        termos.append(FermionTerm(float(mi.one_body[i, j]), ((int(i), True), (int(j), False))))
    for p, q, r, s in np.argwhere(mi.two_body != 0):
        termos.append(FermionTerm(
            0.5 * float(mi.two_body[p, q, r, s]),
            ((int(p), True), (int(q), True), (int(r), False), (int(s), False)),
        ))
    logger.info(f"Hamiltoniano fermiônico com {len(termos)} termos sobre {mi.n_orbitals} orbitais")
    return FermionHamiltonian(mi.n_orbitals, tuple(termos))


def _ladder(index, dagger):
    """a_j = Z_{<j} (X_j + iY_j)/2 ; a†_j = Z_{<j} (X_j - iY_j)/2."""
    bit = 1 << index
    tail = bit - 1
    return {(bit, tail): 0.5, (bit, tail | bit): -0.5j if dagger else 0.5j}


def _product(left, right):
    out = {}
    for (x1, z1), c1 in left.items():
        for (x2, z2), c2 in right.items():
            key = (x1 ^ x2, z1 ^ z2)
            valor = c1 * c2 * I_POWERS[product_phase(x1, z1, x2, z2) % 4]
            out[key] = out.get(key, 0j) + valor
    return {key: valor for key, valor in out.items() if valor != 0}


def jordan_wigner_transform(fh, prune_threshold=None, show_progress=False):
    """
    Substitui a transformação de Jordan-Wigner em cada termo e funde os resultados.

    Args:
        fh: Hamiltoniano fermiônico
        prune_threshold: descarta |coeficiente| abaixo do limiar (padrão PRUNE_THRESHOLD)
        show_progress: barra de progresso tqdm sobre os termos

    Returns:
        PauliHamiltonian com coeficientes reais.
    """
    if prune_threshold is None:
        prune_threshold = PRUNE_THRESHOLD
    if prune_threshold < 0:
        raise ValueError(f"Limiar de poda negativo: {prune_threshold}")
    n = fh.n_orbitals
    pares = {}

    def pair(op_a, op_b):
        chave = (op_a, op_b)
        if chave not in pares:
            pares[chave] = _product(_ladder(*op_a), _ladder(*op_b))
        return pares[chave]

    acumulado = {}
    iteravel = tqdm(fh.terms, desc="Jordan-Wigner", disable=not show_progress)
    for term in iteravel:
        ops = term.ops
        if not ops:
            expansao = {(0, 0): 1.0}
        elif len(ops) == 2:
            expansao = pair(ops[0], ops[1])
        else:
            # a†_p a†_p = 0 e a_r a_r = 0
            if ops[0][0] == ops[1][0] or ops[2][0] == ops[3][0]:
                continue
            expansao = _product(pair(ops[0], ops[1]), pair(ops[2], ops[3]))
        for key, valor in expansao.items():
            acumulado[key] = acumulado.get(key, 0j) + term.coefficient * valor

    residuo = max((abs(v.imag) for v in acumulado.values()), default=0.0)
    if residuo > IMAG_TOLERANCE:
        raise HermiticityError(
            f"Resíduo imaginário {residuo:.3e} acima de {IMAG_TOLERANCE}: entrada não hermitiana"
        )
    termos = [(valor.real, PauliString(n, x, z)) for (x, z), valor in acumulado.items()]
    h = PauliHamiltonian.from_terms(n, termos, prune_threshold=prune_threshold)
    logger.info(f"Jordan-Wigner: {len(fh)} termos fermiônicos -> {len(h)} strings de Pauli")
    return h
