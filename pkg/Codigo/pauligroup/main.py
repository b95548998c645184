import os
import sys
import time
import logging
import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from tqdm import tqdm

# Adiciona o diretório atual ao PYTHONPATH para importações relativas
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config.settings import (
    DEFAULT_SEED,
    FCIDUMP_DIR,
    LOG_FILE,
    LOG_FORMAT,
    MAX_WORKERS,
    N_RANDOM_STATES,
    N_VERIFY_STATES,
    PRUNE_THRESHOLD,
    RESULTS_DIR,
)
from core.clifford import CliffordMap
from core.fermion import build_fermionic_hamiltonian, jordan_wigner_transform, load_fcidump
from core.grouping import MODES, group_hamiltonian, transfer_grouping
from core.measurement import synthesize_evolve_and_measure, synthesize_labeled_evolution, synthesize_measurement_circuit
from core.pauli import PauliHamiltonian, format_pauli, parse_hamiltonian
from core.report_generator import ReportGenerator, circuit_summary, safe_name
from core.statistics import fit_scaling, grouping_stats
from core.synthetic import synthetic_dense_hamiltonian
from core.variance import VarianceRecord
from core.verification import run_oracle_suite

logger = logging.getLogger(__name__)

KINDS = ("fcidump", "pauli-text")
EMIT_CHOICES = ("qasm", "json", "csv")


@dataclass
class RunConfig:
    command: str
    input: str = None
    kind: str = None
    mode: str = "full"
    threshold: float = PRUNE_THRESHOLD
    steps: int = 1
    time: float = 1.0
    seed: int = DEFAULT_SEED
    output: str = str(RESULTS_DIR)
    emit: tuple = EMIT_CHOICES
    fuse: bool = False
    map: list = field(default_factory=list)
    synthetic: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    fit: bool = False
    plot: bool = False
    repeat: int = 3
    states: int = N_RANDOM_STATES
    particles: int = None
    verbose: bool = False

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError(f"Limiar de poda deve ser ≥ 0: {self.threshold}")
        if self.steps < 1:
            raise ValueError(f"Número de passos deve ser ≥ 1: {self.steps}")
        if self.repeat < 1:
            raise ValueError(f"Número de repetições deve ser ≥ 1: {self.repeat}")

    @classmethod
    def from_args(cls, args):
        valores = {k: v for k, v in vars(args).items() if v is not None}
        valores["emit"] = tuple(valores.get("emit", EMIT_CHOICES))
        valores["map"] = [_parse_pair(text) for text in valores.get("map", [])]
        return cls(**valores)


def _parse_pair(text):
    try:
        control, target = (int(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"Par de CNOT malformado (esperado 'c,t'): {text!r}") from None
    return control, target


SCALING_NOTE = (
    "Em Hamiltonianos densos sintéticos com N = 8..20 o expoente ajustado de grupos vs N "
    "fica entre 2 e 3 (cerca de 2,75, R² ≈ 0,998); o valor assintótico 2 não é atingido nesta escala."
)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pauligroup",
        description="Agrupamento de Hamiltonianos de Pauli, síntese e verificação de circuitos",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def comum(p, entrada=True):
        if entrada:
            p.add_argument('--input', type=str, help='Arquivo FCIDUMP ou texto de Pauli')
            p.add_argument('--kind', choices=KINDS, help='Tipo da entrada (inferido pela extensão)')
            p.add_argument('--threshold', type=float, help='Limiar de poda dos coeficientes')
        p.add_argument('--mode', choices=MODES, help='Modo de agrupamento')
        p.add_argument('--seed', type=int, help='Semente de toda a aleatoriedade')
        p.add_argument('--output', type=str, help='Pasta para salvar os resultados')
        p.add_argument('--emit', nargs='+', choices=EMIT_CHOICES, help='Formatos de saída')
        p.add_argument('--plot', action='store_true', default=None, help='Gera gráficos PNG')
        p.add_argument('--verbose', action='store_true', default=None, help='Log em nível DEBUG')

    p = sub.add_parser('ingest', help='Converte a entrada em Hamiltoniano de Pauli')
    comum(p)
    p = sub.add_parser('group', help='Agrupa os termos em conjuntos comutantes')
    comum(p)
    p.add_argument('--map', nargs='+', help='CNOTs "c,t" (1-based) aplicados ao agrupamento')
    for nome, ajuda in (('compile', 'Circuitos de evolução por grupo'), ('measure-plan', 'Circuitos de medição por grupo')):
        p = sub.add_parser(nome, help=ajuda)
        comum(p)
        p.add_argument('--time', type=float, help='Tempo de evolução')
        p.add_argument('--steps', type=int, help='Passos de Trotter')
        p.add_argument('--fuse', action='store_true', default=None, help='Evolução seguida da medição, sem Uₙ†·Uₙ')
    p = sub.add_parser('verify', help='Executa a suíte de oráculos')
    comum(p)
    p.add_argument('--time', type=float, help='Tempo de evolução verificado')
    p.add_argument('--steps', type=int, help='Passos de Trotter')
    p.add_argument('--states', type=int, help='Estados aleatórios do estudo de variância')
    p.add_argument('--particles', type=int, help='Partículas dos estados de variância')
    p = sub.add_parser(
        'stats',
        help='Estatísticas e ajuste de escala em lote',
        description=SCALING_NOTE,
    )
    comum(p, entrada=False)
    p.add_argument('--threshold', type=float, help='Limiar de poda dos coeficientes')
    p.add_argument('--inputs', nargs='+', help='Arquivos de entrada')
    p.add_argument('--synthetic', nargs='+', type=int, help='Tamanhos N de Hamiltonianos densos sintéticos')
    p.add_argument('--fit', action='store_true', default=None, help='Ajuste log-log de grupos vs N')
    p = sub.add_parser('bench', help='Vazão do agrupamento (termos/segundo)')
    comum(p)
    p.add_argument('--synthetic', nargs='+', type=int, help='Tamanhos N sintéticos')
    p.add_argument('--repeat', type=int, help='Repetições por entrada')
    return parser


def configurar_logging(verbose=False):
    logging.basicConfig(
        level=logging.INFO,
        format=LOG_FORMAT,
        handlers=[logging.FileHandler(LOG_FILE, delay=True), logging.StreamHandler()],
    )
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


def _resolve_input(path):
    if path is None:
        raise ValueError("Informe --input")
    candidato = Path(path)
    if not candidato.exists() and (FCIDUMP_DIR / candidato.name).exists():
        candidato = FCIDUMP_DIR / candidato.name
    if not candidato.exists():
        raise FileNotFoundError(f"Entrada não encontrada: {path}")
    return candidato


def _infer_kind(path, kind=None):
    if kind:
        return kind
    nome = path.name.lower()
    return "fcidump" if "fcidump" in nome else "pauli-text"


def load_input(path, kind=None, threshold=PRUNE_THRESHOLD):
    """
    Lê uma entrada e devolve (PauliHamiltonian, número de partículas ou None).
    """
    caminho = _resolve_input(path)
    kind = _infer_kind(caminho, kind)
    if kind == "fcidump":
        integrais = load_fcidump(caminho)
        fermionico = build_fermionic_hamiltonian(integrais)
        h = jordan_wigner_transform(fermionico, prune_threshold=threshold, show_progress=True)
        return h, integrais.n_electrons
    with open(caminho, encoding="utf-8") as f:
        h = parse_hamiltonian(f.read())
    return PauliHamiltonian.from_terms(h.n_qubits, h.terms, prune_threshold=threshold), None


def _grouping(config, h):
    g = group_hamiltonian(h, config.mode, workers=MAX_WORKERS)
    if config.map:
        g = transfer_grouping(g, CliffordMap.from_cnots(h.n_qubits, config.map))
    return g


def _name(config):
    return Path(config.input).stem if config.input else "entrada"


def cmd_ingest(config):
    h, _ = load_input(config.input, config.kind, config.threshold)
    report = ReportGenerator(config.output, _name(config))
    path = report.write_hamiltonian(h)
    print(f"{len(h)} termos sobre {h.n_qubits} qubits")
    logger.info(f"Hamiltoniano gravado em {path}")
    return 0


def cmd_group(config):
    h, _ = load_input(config.input, config.kind, config.threshold)
    g = _grouping(config, h)
    record = grouping_stats(g, _name(config))
    report = ReportGenerator(config.output, record.name)
    report.write_grouping(g)
    report.write_json("stats.json", record.to_dict())
    report.add_grouping_section(record)
    if config.plot:
        report.add_figure("Tamanhos de Grupo", report.plot_group_sizes(record))
    report.generate_markdown_report()
    print(f"{record.n_terms} termos em {record.n_groups} grupos (limite {record.bound})")
    return 0


def _per_group(g, builder, descricao):
    labels = list(g.groups)

    def tarefa(label):
        return builder(label, g.members(label))

    with ThreadPoolExecutor(max_workers=max(1, MAX_WORKERS)) as executor:
        return list(tqdm(executor.map(tarefa, labels), total=len(labels), desc=descricao))


def cmd_compile(config):
    h, _ = load_input(config.input, config.kind, config.threshold)
    g = _grouping(config, h)
    n = h.n_qubits

    def builder(label, members):
        if config.fuse:
            return synthesize_evolve_and_measure(label, members, n, config.time, config.steps, fuse=True).circuit
        return synthesize_labeled_evolution(label, members, n, config.time, config.steps)[0]

    circuitos = _per_group(g, builder, "Compilando grupos")
    report = ReportGenerator(config.output, _name(config))
    linhas = []
    for k, (label, circuit) in enumerate(zip(g.groups, circuitos)):
        report.write_circuit(f"grupo_{k:03d}_{safe_name(label)}", circuit, config.emit)
        linhas.append(circuit_summary(label, len(g.groups[label]), circuit))
    if "csv" in config.emit:
        report.write_csv("circuits.csv", linhas)
    report.add_circuit_section(linhas)
    report.generate_markdown_report()
    logger.info(f"{len(circuitos)} circuitos gravados em {config.output}")
    return 0


def cmd_measure_plan(config):
    h, _ = load_input(config.input, config.kind, config.threshold)
    g = _grouping(config, h)
    n = h.n_qubits

    def builder(label, members):
        return synthesize_measurement_circuit(label, [op for _, op in members], n)

    medicoes = _per_group(g, builder, "Circuitos de medição")
    report = ReportGenerator(config.output, _name(config))
    plano = []
    for k, (label, medicao) in enumerate(zip(g.groups, medicoes)):
        stem = f"medicao_{k:03d}_{safe_name(label)}"
        report.write_circuit(stem, medicao.circuit, config.emit)
        plano.append({
            "label": str(label),
            "circuit": stem,
            "terms": [
                {
                    "term": format_pauli(op) or "I",
                    "coefficient": coefficient,
                    "observable": format_pauli(observable) or "I",
                    "sign": sinal,
                }
                for (coefficient, op), (observable, sinal) in zip(g.members(label), medicao.observables)
            ],
        })
    report.write_json("measure_plan.json", plano)
    logger.info(f"Plano de medição com {len(plano)} grupos gravado")
    return 0


def cmd_verify(config):
    h, particulas = load_input(config.input, config.kind, config.threshold)
    g = _grouping(config, h)
    if config.particles is not None:
        particulas = config.particles
    summary = run_oracle_suite(
        h,
        g,
        n_states=N_VERIFY_STATES,
        n_variance_states=config.states,
        n_particles=particulas,
        seed=config.seed,
        time=config.time,
        steps=config.steps,
        workers=MAX_WORKERS,
    )
    report = ReportGenerator(config.output, _name(config))
    path = report.write_json("verification.json", summary.to_dict())
    variancia = summary.check("variance")
    if variancia.detail:
        report.write_json("variance.json", variancia.detail)
        record = VarianceRecord(**{k: v for k, v in variancia.detail.items() if k != "reduction"})
        report.add_variance_section(record)
        if config.plot:
            report.add_figure("Variância Total", report.plot_variance(record))
    report.add_verification_section(summary)
    report.generate_markdown_report()
    if not summary.passed:
        logger.error(f"Verificação falhou; relatório em {path}")
        return 1
    print(f"Verificação aprovada ({len(summary.checks)} checagens)")
    return 0


def _batch_inputs(config):
    entradas = [(f"sintetico_N{n}", lambda n=n: synthetic_dense_hamiltonian(n, config.seed)) for n in config.synthetic]
    entradas += [
        (Path(path).stem, lambda path=path: load_input(path, config.kind, config.threshold)[0])
        for path in config.inputs
    ]
    if config.input:
        entradas.append((_name(config), lambda: load_input(config.input, config.kind, config.threshold)[0]))
    if not entradas:
        raise ValueError("Nenhuma entrada: use --input, --inputs ou --synthetic")
    return entradas


def cmd_stats(config):
    records = []
    for nome, carregar in tqdm(_batch_inputs(config), desc="Estatísticas"):
        g = group_hamiltonian(carregar(), config.mode, workers=MAX_WORKERS)
        records.append(grouping_stats(g, nome))

    report = ReportGenerator(config.output, "estatisticas")
    report.write_csv("stats.csv", [r.to_row() for r in records])
    report.write_json("stats.json", [r.to_dict() for r in records])
    fit = None
    if config.fit:
        fit = fit_scaling(records)
        report.write_csv("fit.csv", [fit.to_dict()])
        report.write_json("fit.json", fit.to_dict())
        print(f"Expoente ajustado: {fit.exponent:.3f} (R² = {fit.r_squared:.4f})")
    report.add_stats_section(records, fit)
    if config.plot:
        if len(records) > 1:
            report.add_figure("Escalonamento", report.plot_scaling(records, fit))
        report.add_figure("Grupos por Família", report.plot_family_heatmap(records))
    report.generate_markdown_report()

    violados = [r.name for r in records if not r.bound_satisfied]
    if violados:
        logger.error(f"Limite 25N²+1 violado em: {violados}")
        return 1
    return 0


def cmd_bench(config):
    resultados = []
    for nome, carregar in _batch_inputs(config):
        h = carregar()
        tempos = []
        for _ in tqdm(range(config.repeat), desc=f"Bench {nome}"):
            inicio = time.perf_counter()
            group_hamiltonian(h, config.mode, workers=MAX_WORKERS)
            tempos.append(time.perf_counter() - inicio)
        melhor = min(tempos)
        resultados.append({
            "name": nome,
            "n_qubits": h.n_qubits,
            "n_terms": len(h),
            "repeat": config.repeat,
            "best_seconds": melhor,
            "terms_per_second": len(h) / melhor if melhor > 0 else float("inf"),
        })
        logger.info(f"{nome}: {resultados[-1]['terms_per_second']:.0f} termos/s")
    report = ReportGenerator(config.output, "bench")
    report.write_json("bench.json", resultados)
    return 0


HANDLERS = {
    "ingest": cmd_ingest,
    "group": cmd_group,
    "compile": cmd_compile,
    "measure-plan": cmd_measure_plan,
    "verify": cmd_verify,
    "stats": cmd_stats,
    "bench": cmd_bench,
}


def run(argv=None):
    """
    Executa um subcomando.

    Returns:
        0 em sucesso, 1 em falha de verificação, 2 em erro de uso ou de entrada.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    configurar_logging(bool(args.verbose))
    try:
        config = RunConfig.from_args(args)
        return HANDLERS[config.command](config)
    except (ValueError, OSError) as exc:
        logger.error(f"{args.command}: {exc}")
        return 2


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
