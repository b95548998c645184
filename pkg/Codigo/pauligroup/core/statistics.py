"""
Estatísticas de agrupamento (contagens, limite 25N²+1, histogramas) e o
ajuste log-log do número de grupos em função de N.
"""

import logging
from collections import Counter
from dataclasses import asdict, dataclass, field

import numpy as np

from core.grouping import ClassificationError, classify_term

logger = logging.getLogger(__name__)


def group_count_bound(n_qubits):
    return 25 * n_qubits ** 2 + 1


@dataclass
class StatsRecord:
    name: str
    n_qubits: int
    n_terms: int
    n_groups: int
    bound: int
    bound_satisfied: bool
    mode: str = "full"
    size_histogram: dict = field(default_factory=dict)
    type_counts: dict = field(default_factory=dict)
    family_counts: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_row(self):
        """Linha plana para o CSV em lote."""
        row = {k: v for k, v in asdict(self).items() if not isinstance(v, dict)}
        for family, count in self.family_counts.items():
            row[f"groups_{family}"] = count
        return row


def grouping_stats(g, name=""):
    """
    Resume um agrupamento.

    Args:
        g: Grouping
        name: identificador da entrada (arquivo ou N sintético)

    Returns:
        StatsRecord
    """
    n = g.n_qubits
    tamanhos = Counter(g.sizes())
    tipos = Counter()
    for _, op in g.hamiltonian.terms:
        try:
            tipos[classify_term(op).value] += 1
        except ClassificationError:
            tipos["unclassified"] += 1
    familias = Counter(label.type_tag for label in g.groups)

    bound = group_count_bound(n)
    record = StatsRecord(
        name=name,
        n_qubits=n,
        n_terms=len(g.hamiltonian),
        n_groups=len(g.groups),
        bound=bound,
        bound_satisfied=len(g.groups) <= bound,
        mode=g.mode,
        size_histogram={str(size): tamanhos[size] for size in sorted(tamanhos)},
        type_counts=dict(sorted(tipos.items())),
        family_counts=dict(sorted(familias.items())),
    )
    if not record.bound_satisfied:
        logger.warning(f"{name}: {record.n_groups} grupos excedem o limite {bound}")
    return record


@dataclass
class ScalingFit:
    exponent: float
    prefactor: float
    r_squared: float
    term_exponent: float
    term_prefactor: float
    n_points: int

    def to_dict(self):
        return asdict(self)


def _loglog(ns, values):
    x = np.log(ns)
    y = np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    residuos = y - (slope * x + intercept)
    total = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(residuos ** 2) / total if total > 0 else 1.0
    return float(slope), float(np.exp(intercept)), float(r2)


def fit_scaling(records):
    """
    Ajuste por mínimos quadrados de log(grupos) e log(termos) contra log(N).

    Exige ao menos três valores distintos de N.
    """
    records = list(records)
    ns = np.array([r.n_qubits for r in records], dtype=float)
    if len(records) < 3 or len(set(ns)) < 3:
        raise ValueError(f"Ajuste requer ao menos 3 valores distintos de N; recebidos {sorted(set(ns))}")
    grupos = np.array([r.n_groups for r in records], dtype=float)
    termos = np.array([r.n_terms for r in records], dtype=float)
    if np.any(grupos <= 0) or np.any(termos <= 0):
        raise ValueError("Ajuste log-log requer contagens positivas")
    exponent, prefactor, r2 = _loglog(ns, grupos)
    term_exponent, term_prefactor, _ = _loglog(ns, termos)
    fit = ScalingFit(exponent, prefactor, r2, term_exponent, term_prefactor, len(records))
    logger.info(f"Ajuste log-log: grupos ~ N^{exponent:.3f} (R²={r2:.4f}), termos ~ N^{term_exponent:.3f}")
    return fit
