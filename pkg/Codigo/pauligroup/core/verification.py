"""
Suíte de oráculos por trás do subcomando ``verify``: partição e comutação,
limite de grupos, evolução de cada termo isolado em todos os estilos, mapas de
medição, diagonalização, evolução paralela contra a exponencial exata, tetos
de profundidade e ordem das variâncias.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product

from tqdm import tqdm

from config.settings import (
    ANCILLA_TOLERANCE,
    DEFAULT_SEED,
    FIDELITY_TOLERANCE,
    MAX_QUBITS,
    MAX_WORKERS,
    N_RANDOM_STATES,
    N_VERIFY_STATES,
)
from core.circuit import GateKind, circuit_depth
from core.clifford import conjugate_by_circuit
from core.diagonalization import check_relations, diagonalization_depth_bound, diagonalize_group
from core.grouping import verify_grouping
from core.measurement import check_measurement_map, synthesize_labeled_evolution, synthesize_measurement_circuit
from core.pauli import qubit_wise_commutes
from core.simulator import (
    Statevector,
    ancilla_residual,
    apply_circuit,
    exact_group_evolution,
    expectation,
    fidelity,
    system_state,
)
from core.statistics import group_count_bound
from core.synthesis import (
    FANOUTS,
    STYLES,
    parallel_depth_bound,
    synthesize_parallel_evolution,
    synthesize_term_evolution,
)
from core.variance import particle_variance_report

logger = logging.getLogger(__name__)


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    def fail(self, item):
        self.passed = False
        self.failures.append(item)

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "skipped": self.skipped,
            "failures": self.failures,
            "detail": self.detail,
        }


@dataclass
class VerificationSummary:
    checks: list = field(default_factory=list)
    n_qubits: int = 0
    n_terms: int = 0
    n_groups: int = 0

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def check(self, name):
        return next(c for c in self.checks if c.name == name)

    def to_dict(self):
        return {
            "passed": self.passed,
            "n_qubits": self.n_qubits,
            "n_terms": self.n_terms,
            "n_groups": self.n_groups,
            "checks": [check.to_dict() for check in self.checks],
        }


@dataclass
class _GroupOutcome:
    label: str
    measurement_errors: list = field(default_factory=list)
    diagonalization_errors: list = field(default_factory=list)
    diagonalized: bool = False
    diagonalization_depth: int = 0
    cnot_depth: int = 0
    n_terms: int = 0
    evolution_checked: bool = False
    min_fidelity: float = 1.0
    max_residual: float = 0.0


def _is_qwc(ops):
    return all(qubit_wise_commutes(a, b) for a, b in combinations(ops, 2))


def _verify_group(label, members, n_qubits, states, time, steps, max_qubits):
    outcome = _GroupOutcome(str(label))
    ops = [op for _, op in members]

    measurement = synthesize_measurement_circuit(label, ops, n_qubits)
    outcome.measurement_errors = [str(item) for item in check_measurement_map(ops, measurement)]

    if not _is_qwc(ops):
        outcome.diagonalized = True
        try:
            plan = diagonalize_group(ops, n_qubits)
        except (RuntimeError, ValueError) as exc:
            outcome.diagonalization_errors.append(str(exc))
        else:
            outcome.diagonalization_depth = plan.circuit.depth()
            outcome.diagonalization_errors.extend(check_relations(plan))
            for s in states[:2]:
                girado = apply_circuit(plan.circuit, s)
                for op, imagem in zip(ops, plan.transformed_terms):
                    if abs(expectation(op, s) - expectation(imagem, girado)) > FIDELITY_TOLERANCE:
                        outcome.diagonalization_errors.append(f"invariância violada para {op}")

    circuit, pre, _ = synthesize_labeled_evolution(label, members, n_qubits, time, steps)
    diagonal = [(coefficient, conjugate_by_circuit(op, pre)) for coefficient, op in members]
    outcome.n_terms = sum(1 for _, op in diagonal if not op.is_identity())
    passo = synthesize_parallel_evolution(diagonal, time, 1, n_qubits=n_qubits)
    outcome.cnot_depth = circuit_depth(passo, {GateKind.CNOT})

    if circuit.n_qubits > max_qubits:
        logger.warning(f"Grupo {label}: {circuit.n_qubits} qubits acima do limite {max_qubits}; evolução não verificada")
        return outcome
    outcome.evolution_checked = True
    for s in states:
        final = apply_circuit(circuit, s, max_qubits=max_qubits)
        esperado = exact_group_evolution(members, time, s)
        outcome.min_fidelity = min(outcome.min_fidelity, fidelity(system_state(final, n_qubits), esperado))
        outcome.max_residual = max(outcome.max_residual, ancilla_residual(final, n_qubits))
    return outcome


def _verify_single_terms(h, states, time, max_qubits):
    """Cada termo não identidade, em todos os estilos e fan-outs, contra a exponencial exata."""
    resultado = CheckResult("single_term", detail={"min_fidelity": 1.0, "max_ancilla_residual": 0.0})
    n = h.n_qubits
    termos = [(coefficient, op) for coefficient, op in h.terms if not op.is_identity()]
    for coefficient, op in tqdm(termos, desc="Verificando termos"):
        for style, fanout in product(STYLES, FANOUTS):
            circuit = synthesize_term_evolution(op, coefficient, time, style, fanout)
            if not states or circuit.n_qubits > max_qubits:
                resultado.skipped += 1
                continue
            resultado.checked += 1
            pior_fid, pior_res = 1.0, 0.0
            for s in states[:2]:
                final = apply_circuit(circuit, s, max_qubits=max_qubits)
                esperado = exact_group_evolution([(coefficient, op)], time, s)
                pior_fid = min(pior_fid, fidelity(system_state(final, n), esperado))
                pior_res = max(pior_res, ancilla_residual(final, n))
            resultado.detail["min_fidelity"] = min(resultado.detail["min_fidelity"], pior_fid)
            resultado.detail["max_ancilla_residual"] = max(resultado.detail["max_ancilla_residual"], pior_res)
            if pior_fid < 1.0 - FIDELITY_TOLERANCE or pior_res >= ANCILLA_TOLERANCE:
                resultado.fail({
                    "term": str(op),
                    "style": style,
                    "fanout": fanout,
                    "fidelity": pior_fid,
                    "ancilla_residual": pior_res,
                })
    return resultado


def run_oracle_suite(
    h,
    g,
    n_states=N_VERIFY_STATES,
    n_variance_states=N_RANDOM_STATES,
    n_particles=None,
    seed=DEFAULT_SEED,
    time=1.0,
    steps=1,
    workers=MAX_WORKERS,
    max_qubits=MAX_QUBITS,
):
    """
    Executa todos os oráculos sobre um Hamiltoniano agrupado.

    Args:
        h: PauliHamiltonian
        g: Grouping de ``h``
        n_states: estados aleatórios por grupo na checagem de evolução
        n_variance_states: estados do estudo de variância (0 desliga)
        n_particles: partículas dos estados de variância (padrão: N // 2)
        seed: semente de todos os estados
        time, steps: parâmetros da evolução verificada
        workers: threads para os grupos

    Returns:
        VerificationSummary (``passed`` falso se qualquer checagem falhar)
    """
    n = h.n_qubits
    summary = VerificationSummary(n_qubits=n, n_terms=len(h), n_groups=len(g.groups))

    particao = CheckResult("grouping")
    report = verify_grouping(g, h)
    particao.checked = len(g.groups)
    particao.detail = report.to_dict()
    if not report.passed:
        particao.fail(f"{len(report.violations)} violações de comutação")
    summary.checks.append(particao)

    limite = CheckResult("bound", checked=1, detail={"n_groups": len(g.groups), "bound": group_count_bound(n)})
    if len(g.groups) > group_count_bound(n):
        limite.fail(f"{len(g.groups)} > {group_count_bound(n)}")
    summary.checks.append(limite)

    states = [Statevector.random(n, seed + k) for k in range(n_states)] if n <= max_qubits else []
    summary.checks.append(_verify_single_terms(h, states, time, max_qubits))

    labels = list(g.groups)
    tarefas = [(label, g.members(label)) for label in labels]

    def tarefa(item):
        label, members = item
        return _verify_group(label, members, n, states, time, steps, max_qubits)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        outcomes = list(tqdm(executor.map(tarefa, tarefas), total=len(tarefas), desc="Verificando grupos"))

    medicao = CheckResult("measurement_map")
    diagonal = CheckResult("diagonalization")
    evolucao = CheckResult("evolution", detail={"min_fidelity": 1.0, "max_ancilla_residual": 0.0})
    teto_diagonal = diagonalization_depth_bound(n)
    profundidade = CheckResult("depth", detail={"diagonalization_bound": teto_diagonal})
    for outcome in outcomes:
        medicao.checked += 1
        profundidade.checked += 1
        teto = parallel_depth_bound(n, outcome.n_terms)
        if outcome.cnot_depth > teto:
            profundidade.fail({"label": outcome.label, "cnot_depth": outcome.cnot_depth, "bound": teto})
        if outcome.diagonalization_depth > teto_diagonal:
            profundidade.fail({
                "label": outcome.label,
                "diagonalization_depth": outcome.diagonalization_depth,
                "bound": teto_diagonal,
            })
        if outcome.measurement_errors:
            medicao.fail({"label": outcome.label, "terms": outcome.measurement_errors})
        if outcome.diagonalized:
            diagonal.checked += 1
            if outcome.diagonalization_errors:
                diagonal.fail({"label": outcome.label, "problems": outcome.diagonalization_errors[:5]})
        if not outcome.evolution_checked or not states:
            evolucao.skipped += 1
            continue
        evolucao.checked += 1
        evolucao.detail["min_fidelity"] = min(evolucao.detail["min_fidelity"], outcome.min_fidelity)
        evolucao.detail["max_ancilla_residual"] = max(evolucao.detail["max_ancilla_residual"], outcome.max_residual)
        if outcome.min_fidelity < 1.0 - FIDELITY_TOLERANCE or outcome.max_residual >= ANCILLA_TOLERANCE:
            evolucao.fail({
                "label": outcome.label,
                "fidelity": outcome.min_fidelity,
                "ancilla_residual": outcome.max_residual,
            })
    summary.checks.extend([medicao, diagonal, evolucao, profundidade])

    variancia = CheckResult("variance")
    if n_variance_states > 0 and n <= max_qubits:
        particulas = n // 2 if n_particles is None else n_particles
        record = particle_variance_report(h, g, particulas, n_variance_states, seed)
        variancia.checked = n_variance_states
        variancia.detail = record.to_dict()
        if any(size > 1 for size in g.sizes()):
            ok = record.grouped_total < record.individual_total
        else:
            ok = record.grouped_total <= record.individual_total + 1e-12
        if not ok:
            variancia.fail(f"agrupada {record.grouped_total:.6g} ≥ individual {record.individual_total:.6g}")
    else:
        variancia.skipped = 1
    summary.checks.append(variancia)

    for check in summary.checks:
        nivel = logging.INFO if check.passed else logging.ERROR
        logger.log(nivel, f"Checagem {check.name}: {'ok' if check.passed else 'FALHOU'} ({check.checked} itens)")
    return summary
