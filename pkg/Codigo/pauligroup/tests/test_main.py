import json

import pandas as pd
import pytest

import core.report_generator as report_generator
import core.verification as verification
import main
from core.circuit import Circuit
from core.pauli import parse_hamiltonian
from core.verification import CheckResult, VerificationSummary


@pytest.fixture(autouse=True)
def _cwd(tmp_path, monkeypatch):
    # o arquivo de log vai para o diretório corrente
    monkeypatch.chdir(tmp_path)


def _run(*argv):
    return main.run([str(a) for a in argv])


def test_group_writes_grouping_and_stats(h2_path, tmp_path):
    saida = tmp_path / "grupo"
    assert _run("group", "--input", h2_path, "--output", saida, "--plot") == 0
    linhas = (saida / "grouping.txt").read_text(encoding="utf-8").splitlines()
    assert len(linhas) == 5
    assert sum(int(linha.split()[1]) for linha in linhas) == 15
    stats = json.loads((saida / "stats.json").read_text(encoding="utf-8"))
    assert stats["n_terms"] == 15
    assert stats["n_groups"] == 5
    assert (saida / "histograma_grupos.png").exists()
    assert (saida / "relatorio.md").exists()


def test_group_output_is_deterministic(h2_path, tmp_path):
    for nome in ("a", "b"):
        assert _run("group", "--input", h2_path, "--output", tmp_path / nome) == 0
    for arquivo in ("grouping.txt", "stats.json"):
        assert (tmp_path / "a" / arquivo).read_bytes() == (tmp_path / "b" / arquivo).read_bytes()


def test_input_resolved_from_data_dir(tmp_path):
    assert _run("group", "--input", "h2_sto3g.fcidump", "--output", tmp_path) == 0


def test_ingest_then_group_text(h2_path, tmp_path):
    assert _run("ingest", "--input", h2_path, "--output", tmp_path / "ingest") == 0
    texto = tmp_path / "ingest" / "hamiltonian.txt"
    assert len(parse_hamiltonian(texto.read_text(encoding="utf-8"))) == 15
    assert _run("group", "--input", texto, "--kind", "pauli-text", "--output", tmp_path / "texto") == 0
    stats = json.loads((tmp_path / "texto" / "stats.json").read_text(encoding="utf-8"))
    assert stats["n_groups"] == 5


def test_group_with_cnot_map(h2_path, tmp_path):
    assert _run("group", "--input", h2_path, "--map", "1,2", "3,4", "--output", tmp_path) == 0
    assert (tmp_path / "grouping.txt").exists()


@pytest.mark.parametrize("mode", ["full", "near_qwc"])
def test_compile_emits_circuits(mode, hubbard_path, tmp_path):
    argv = ["compile", "--input", hubbard_path, "--mode", mode, "--emit", "qasm", "csv", "--output", tmp_path]
    assert _run(*argv) == 0
    resumo = pd.read_csv(tmp_path / "circuits.csv")
    qasm = sorted(tmp_path.glob("grupo_*.qasm"))
    assert len(qasm) == len(resumo)
    assert not list(tmp_path.glob("grupo_*.json"))
    assert qasm[0].read_text(encoding="utf-8").startswith("OPENQASM 2.0;")
    assert (resumo["depth"] >= 0).all()


def test_compile_fused(h2_path, tmp_path):
    assert _run("compile", "--input", h2_path, "--fuse", "--emit", "json", "--output", tmp_path) == 0
    assert len(list(tmp_path.glob("grupo_*.json"))) == 5


def test_measure_plan_covers_every_term(h2_path, tmp_path):
    assert _run("measure-plan", "--input", h2_path, "--output", tmp_path) == 0
    plano = json.loads((tmp_path / "measure_plan.json").read_text(encoding="utf-8"))
    assert len(plano) == 5
    assert sum(len(grupo["terms"]) for grupo in plano) == 15
    assert all(item["sign"] in (1, -1) for grupo in plano for item in grupo["terms"])
    assert all((tmp_path / f"{grupo['circuit']}.qasm").exists() for grupo in plano)


def test_verify_passes_on_h2(h2_path, tmp_path):
    assert _run("verify", "--input", h2_path, "--states", 20, "--output", tmp_path, "--plot") == 0
    resultado = json.loads((tmp_path / "verification.json").read_text(encoding="utf-8"))
    assert resultado["passed"] is True
    nomes = {check["name"] for check in resultado["checks"]}
    assert {"grouping", "bound", "single_term", "measurement_map", "evolution", "depth", "variance"} <= nomes
    assert (tmp_path / "variance.json").exists()
    assert (tmp_path / "variancia.png").exists()


def test_verify_failure_exit_code(h2_path, tmp_path, monkeypatch):
    falha = VerificationSummary(checks=[CheckResult("grouping", passed=False), CheckResult("variance")])
    monkeypatch.setattr(main, "run_oracle_suite", lambda *args, **kwargs: falha)
    assert _run("verify", "--input", h2_path, "--output", tmp_path) == 1
    assert json.loads((tmp_path / "verification.json").read_text(encoding="utf-8"))["passed"] is False


def _checks(tmp_path):
    resultado = json.loads((tmp_path / "verification.json").read_text(encoding="utf-8"))
    return resultado["passed"], {check["name"]: check for check in resultado["checks"]}


def test_verify_fails_on_wrong_single_term_circuit(h2_path, tmp_path, monkeypatch):
    monkeypatch.setattr(verification, "synthesize_term_evolution", lambda p, *args, **kwargs: Circuit(p.n_qubits))
    assert _run("verify", "--input", h2_path, "--states", 5, "--output", tmp_path) == 1
    passed, checks = _checks(tmp_path)
    assert passed is False
    assert checks["single_term"]["passed"] is False
    assert checks["single_term"]["checked"] == 4 * 14
    assert checks["evolution"]["passed"] is True


def test_verify_fails_when_depth_exceeds_bound(h2_path, tmp_path, monkeypatch):
    monkeypatch.setattr(verification, "parallel_depth_bound", lambda n_qubits, n_terms: 0)
    assert _run("verify", "--input", h2_path, "--states", 5, "--output", tmp_path) == 1
    passed, checks = _checks(tmp_path)
    assert passed is False
    assert checks["depth"]["passed"] is False
    assert all(falha["bound"] == 0 for falha in checks["depth"]["failures"])
    assert checks["single_term"]["passed"] is True


def test_stats_synthetic_fit(tmp_path):
    assert _run("stats", "--synthetic", 4, 5, 6, "--fit", "--plot", "--output", tmp_path) == 0
    tabela = pd.read_csv(tmp_path / "stats.csv")
    assert list(tabela["n_qubits"]) == [4, 5, 6]
    assert (tabela["n_groups"] <= tabela["bound"]).all()
    assert (tmp_path / "fit.csv").exists()
    assert (tmp_path / "escala_loglog.png").exists()
    assert (tmp_path / "heatmap_familias.png").exists()


def test_stats_fit_needs_three_sizes(tmp_path):
    assert _run("stats", "--synthetic", 4, 5, "--fit", "--output", tmp_path) == 2


def test_bench(tmp_path):
    assert _run("bench", "--synthetic", 4, "--repeat", 1, "--output", tmp_path) == 0
    (linha,) = json.loads((tmp_path / "bench.json").read_text(encoding="utf-8"))
    assert linha["n_qubits"] == 4
    assert linha["terms_per_second"] > 0


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["group"],
        ["group", "--input", "nao_existe.fcidump"],
        ["group", "--input", "h2_sto3g.fcidump", "--threshold", "-1"],
        ["group", "--input", "h2_sto3g.fcidump", "--map", "1-2"],
        ["compile", "--input", "h2_sto3g.fcidump", "--steps", "0"],
        ["stats"],
    ],
)
def test_usage_errors_exit_with_two(argv, tmp_path):
    assert _run(*argv, "--output", tmp_path) == 2


def test_malformed_pauli_text_exits_with_two(tmp_path):
    entrada = tmp_path / "ruim.txt"
    entrada.write_text("0.5 X1 Q2\n", encoding="utf-8")
    assert _run("group", "--input", entrada, "--output", tmp_path) == 2


def test_stats_help_states_measured_exponent(capsys):
    with pytest.raises(SystemExit):
        main.build_parser().parse_args(["stats", "--help"])
    ajuda = capsys.readouterr().out
    assert "2,75" in ajuda
    assert "2.3" not in ajuda


def test_report_generator_documents_its_artifacts():
    assert "relatorio.md" in report_generator.__doc__
