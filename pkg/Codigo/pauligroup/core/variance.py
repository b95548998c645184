"""
Comparação analítica da variância total: termos medidos individualmente
contra grupos medidos simultaneamente.
"""

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from core.pauli import DimensionError
from core.simulator import apply_pauli, random_particle_conserving_state

logger = logging.getLogger(__name__)


@dataclass
class VarianceRecord:
    individual_total: float
    grouped_total: float
    per_group: list = field(default_factory=list)
    n_states: int = 0

    @property
    def reduction(self):
        """Razão individual/agrupado (quanto menos disparos o agrupamento exige)."""
        if self.grouped_total == 0:
            return float("inf") if self.individual_total > 0 else 1.0
        return self.individual_total / self.grouped_total

    def to_dict(self):
        data = asdict(self)
        data["reduction"] = self.reduction
        return data


def _weighted_action(terms, amplitudes):
    saida = np.zeros_like(amplitudes, dtype=complex)
    for coefficient, op in terms:
        saida += coefficient * apply_pauli(op, amplitudes)
    return saida


def observable_variance(terms, amplitudes):
    """Var(A) = ⟨A²⟩ - ⟨A⟩² com A = Σ h_l·P_l hermitiano."""
    a_psi = _weighted_action(terms, amplitudes)
    media = float(np.vdot(amplitudes, a_psi).real)
    quadrado = float(np.vdot(a_psi, a_psi).real)
    return max(quadrado - media ** 2, 0.0)


def variance_states(n_qubits, n_particles, count, seed=0):
    """Estados semeados (seed, seed+1, ...) que conservam o número de partículas."""
    return [random_particle_conserving_state(n_qubits, n_particles, seed + k) for k in range(count)]


def variance_report(h, g, states):
    """
    Média, sobre os estados, das variâncias totais individual e agrupada.

    Args:
        h: PauliHamiltonian (índices de ``g.groups`` referem-se aos seus termos)
        g: Grouping
        states: lista de Statevector normalizados

    Returns:
        VarianceRecord
    """
    states = list(states)
    if not states:
        raise ValueError("Lista de estados vazia para o estudo de variância")
    for s in states:
        if s.n_qubits != h.n_qubits:
            raise DimensionError(f"Estado com {s.n_qubits} qubits para Hamiltoniano de {h.n_qubits}")

    individual = np.zeros(len(states))
    por_grupo = {label: np.zeros(len(states)) for label in g.groups}
    for k, s in enumerate(states):
        individual[k] = sum(observable_variance([term], s.amplitudes) for term in h.terms)
        for label, indices in g.groups.items():
            por_grupo[label][k] = observable_variance([h.terms[i] for i in indices], s.amplitudes)

    per_group = []
    for label, indices in g.groups.items():
        individual_grupo = np.mean([
            sum(observable_variance([h.terms[i]], s.amplitudes) for i in indices) for s in states
        ]) if len(indices) > 1 else float(np.mean(por_grupo[label]))
        per_group.append({
            "label": str(label),
            "size": len(indices),
            "grouped": float(np.mean(por_grupo[label])),
            "individual": float(individual_grupo),
        })

    grouped_total = float(np.mean(sum(por_grupo.values()))) if por_grupo else 0.0
    record = VarianceRecord(
        individual_total=float(np.mean(individual)),
        grouped_total=grouped_total,
        per_group=per_group,
        n_states=len(states),
    )
    logger.info(
        f"Variância total: individual {record.individual_total:.6g}, "
        f"agrupada {record.grouped_total:.6g} ({len(states)} estados)"
    )
    return record


def particle_variance_report(h, g, n_particles, count, seed=0):
    """``variance_report`` sobre ``count`` estados aleatórios com ``n_particles`` partículas."""
    return variance_report(h, g, variance_states(h.n_qubits, n_particles, count, seed))
