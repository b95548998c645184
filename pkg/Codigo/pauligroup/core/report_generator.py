"""
Geração dos artefatos de cada execução: textos do Hamiltoniano e do
agrupamento, JSON e CSV de estatísticas e circuitos, exportação QASM, gráficos
PNG (histograma de grupos, escala log-log, heatmap de famílias, variâncias) e
o relatório markdown acumulado em ``relatorio.md``.
"""

import os
import re
import json
import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from core.circuit import GateKind, circuit_depth, export_qasm
from core.pauli import format_hamiltonian, format_pauli

logger = logging.getLogger(__name__)

_PNG_METADATA = {"Software": None}


def safe_name(text):
    """Nome de arquivo a partir de um rótulo de grupo."""
    return re.sub(r"[^A-Za-z0-9]+", "_", str(text)).strip("_") or "I"


def circuit_summary(label, size, circuit):
    return {
        "label": str(label),
        "terms": size,
        "gates": len(circuit),
        "cnots": circuit.count(GateKind.CNOT),
        "depth": circuit.depth(),
        "cnot_depth": circuit_depth(circuit, {GateKind.CNOT}),
        "n_parity": circuit.n_parity,
        "n_rotation": circuit.n_rotation,
    }


class ReportGenerator:
    """
    Grava todos os artefatos de uma execução (texto, JSON, CSV, QASM, gráficos)
    e monta o ``relatorio.md`` com as seções acumuladas.
    """

    def __init__(self, output_dir, name="pauligroup"):
        self.output_dir = str(output_dir)
        self.name = name
        self.sections = []
        self.written = []
        os.makedirs(self.output_dir, exist_ok=True)

    def _path(self, filename):
        path = os.path.join(self.output_dir, filename)
        self.written.append(path)
        return path

    def write_text(self, filename, text):
        with open(self._path(filename), "w", encoding="utf-8") as f:
            f.write(text)
        logger.debug(f"Arquivo gravado: {filename}")
        return os.path.join(self.output_dir, filename)

    def write_json(self, filename, data):
        with open(self._path(filename), "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, ensure_ascii=False)
        logger.debug(f"JSON gravado: {filename}")
        return os.path.join(self.output_dir, filename)

    def write_csv(self, filename, rows):
        df = pd.DataFrame(rows)
        df.to_csv(self._path(filename), index=False)
        return os.path.join(self.output_dir, filename)

    def write_hamiltonian(self, h):
        return self.write_text("hamiltonian.txt", format_hamiltonian(h))

    def write_grouping(self, g):
        """Uma linha ``<rótulo> <tamanho> <termos separados por ';'>`` por grupo."""
        linhas = []
        for label, indices in g.groups.items():
            termos = ";".join(format_pauli(g.hamiltonian.terms[i][1]) or "I" for i in indices)
            linhas.append(f"{label} {len(indices)} {termos}")
        return self.write_text("grouping.txt", "\n".join(linhas) + "\n")

    def write_circuit(self, stem, circuit, emit=("qasm", "json")):
        paths = []
        if "qasm" in emit:
            paths.append(self.write_text(f"{stem}.qasm", export_qasm(circuit)))
        if "json" in emit:
            paths.append(self.write_json(f"{stem}.json", circuit.to_dict()))
        return paths

    def plot_group_sizes(self, record):
        tamanhos = [int(k) for k in record.size_histogram]
        contagens = list(record.size_histogram.values())
        plt.figure(figsize=(10, 6))
        plt.bar([str(t) for t in tamanhos], contagens, color='#3498db')
        plt.title(f'Distribuição de Tamanhos de Grupo ({record.name})')
        plt.xlabel('Termos por grupo')
        plt.ylabel('Número de grupos')
        plt.tight_layout()
        plt.savefig(self._path("histograma_grupos.png"), metadata=_PNG_METADATA)
        plt.close()
        return "histograma_grupos.png"

    def plot_scaling(self, records, fit=None):
        ns = np.array([r.n_qubits for r in records], dtype=float)
        grupos = np.array([r.n_groups for r in records], dtype=float)
        termos = np.array([r.n_terms for r in records], dtype=float)
        plt.figure(figsize=(10, 6))
        plt.loglog(ns, termos, 'o', color='#e74c3c', label='Termos')
        plt.loglog(ns, grupos, 's', color='#3498db', label='Grupos')
        plt.loglog(ns, [25 * n ** 2 + 1 for n in ns], '--', color='#7f8c8d', label='25N²+1')
        if fit is not None:
            malha = np.linspace(ns.min(), ns.max(), 50)
            plt.loglog(malha, fit.prefactor * malha ** fit.exponent, color='#3498db',
                       label=f'ajuste grupos ~ N^{fit.exponent:.2f}')
            plt.loglog(malha, fit.term_prefactor * malha ** fit.term_exponent, color='#e74c3c',
                       label=f'ajuste termos ~ N^{fit.term_exponent:.2f}')
        plt.title('Escalonamento de Termos e Grupos')
        plt.xlabel('N (qubits)')
        plt.ylabel('Contagem')
        plt.legend()
        plt.tight_layout()
        plt.savefig(self._path("escala_loglog.png"), metadata=_PNG_METADATA)
        plt.close()
        return "escala_loglog.png"

    def plot_family_heatmap(self, records):
        familias = sorted({f for r in records for f in r.family_counts})
        matriz = pd.DataFrame(
            [[r.family_counts.get(f, 0) for f in familias] for r in records],
            index=[r.name for r in records],
            columns=familias,
        )
        plt.figure(figsize=(12, max(4, 0.5 * len(records) + 2)))
        sns.heatmap(matriz, annot=True, fmt='d', cmap='YlGnBu')
        plt.title('Grupos por Família de Rótulo')
        plt.tight_layout()
        plt.savefig(self._path("heatmap_familias.png"), metadata=_PNG_METADATA)
        plt.close()
        return "heatmap_familias.png"

    def plot_variance(self, record):
        plt.figure(figsize=(10, 6))
        plt.bar(['Individual', 'Agrupada'], [record.individual_total, record.grouped_total],
                color=['#e74c3c', '#2ecc71'])
        plt.title(f'Variância Total Média ({record.n_states} estados)')
        plt.ylabel('Variância')
        plt.tight_layout()
        plt.savefig(self._path("variancia.png"), metadata=_PNG_METADATA)
        plt.close()
        return "variancia.png"

    def add_section(self, title, lines):
        self.sections.append((title, list(lines)))

    def add_grouping_section(self, record):
        linhas = [
            "| Métrica | Valor |",
            "|---------|-------|",
            f"| Qubits | {record.n_qubits} |",
            f"| Termos | {record.n_terms} |",
            f"| Grupos | {record.n_groups} |",
            f"| Limite 25N²+1 | {record.bound} |",
            f"| Limite respeitado | {'sim' if record.bound_satisfied else 'não'} |",
            f"| Modo | {record.mode} |",
            "",
            "| Família | Grupos |",
            "|---------|--------|",
        ]
        linhas += [f"| {familia} | {count} |" for familia, count in record.family_counts.items()]
        self.add_section(f"Agrupamento: {record.name}", linhas)

    def add_stats_section(self, records, fit=None):
        linhas = ["| Entrada | N | Termos | Grupos | Limite | OK |", "|---|---|---|---|---|---|"]
        for r in records:
            linhas.append(
                f"| {r.name} | {r.n_qubits} | {r.n_terms} | {r.n_groups} | {r.bound} | "
                f"{'sim' if r.bound_satisfied else 'não'} |"
            )
        if fit is not None:
            linhas += [
                "",
                f"- Expoente ajustado (grupos): **{fit.exponent:.3f}** (R² = {fit.r_squared:.4f})",
                f"- Expoente ajustado (termos): **{fit.term_exponent:.3f}**",
            ]
        self.add_section("Estatísticas em Lote", linhas)

    def add_circuit_section(self, rows):
        linhas = [
            "| Grupo | Termos | Portas | CNOTs | Profundidade | Prof. CNOT | Paridade | Rotação |",
            "|---|---|---|---|---|---|---|---|",
        ]
        for row in rows:
            linhas.append(
                f"| {row['label']} | {row['terms']} | {row['gates']} | {row['cnots']} | {row['depth']} | "
                f"{row['cnot_depth']} | {row['n_parity']} | {row['n_rotation']} |"
            )
        self.add_section("Circuitos por Grupo", linhas)

    def add_verification_section(self, summary):
        linhas = ["| Checagem | Resultado | Itens | Ignorados |", "|---|---|---|---|"]
        for check in summary.checks:
            linhas.append(
                f"| {check.name} | {'ok' if check.passed else 'FALHOU'} | {check.checked} | {check.skipped} |"
            )
        linhas += ["", f"Resultado geral: **{'aprovado' if summary.passed else 'reprovado'}**"]
        self.add_section("Verificação", linhas)

    def add_variance_section(self, record):
        self.add_section("Variância", [
            f"- Variância total individual: **{record.individual_total:.6g}**",
            f"- Variância total agrupada: **{record.grouped_total:.6g}**",
            f"- Razão individual/agrupada: **{record.reduction:.4g}**",
            f"- Estados amostrados: {record.n_states}",
        ])

    def add_figure(self, title, filename):
        self.add_section(title, [f"![{title}](./{filename})"])

    def generate_markdown_report(self):
        path = self._path("relatorio.md")
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"# Relatório: {self.name}\n\n")
            for title, linhas in self.sections:
                f.write(f"## {title}\n\n")
                for linha in linhas:
                    f.write(f"{linha}\n")
                f.write("\n")
        logger.info(f"Relatório gerado em {path}")
        return path
