from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import core.grouping as grouping_module
from conftest import dense_matrix
from core.clifford import CliffordMap
from core.fermion import build_fermionic_hamiltonian, format_fcidump, jordan_wigner_transform, parse_fcidump
from core.grouping import (
    IDENTITY_LABEL,
    ClassificationError,
    GroupLabel,
    Grouping,
    PauliType,
    classify_term,
    group_hamiltonian,
    group_label,
    near_qwc_label,
    transfer_grouping,
    verify_grouping,
)
from core.pauli import PauliHamiltonian, commutes, format_pauli, parse_pauli
from core.synthetic import random_molecular_integrals, random_table_hamiltonian, table_patterns


def _h(n, *texts):
    return PauliHamiltonian.from_terms(n, [(1.0 + 0.1 * k, parse_pauli(t, n)) for k, t in enumerate(texts)])


@pytest.mark.parametrize("text, expected", [
    ("", PauliType.I),
    ("Z3", PauliType.Z),
    ("Z1 Z4", PauliType.ZZ),
    ("X1 Z2 Z3 X4", PauliType.XX),
    ("Y2 Y3", PauliType.YY),
    ("Z1 X3 Z4 X5", PauliType.ZXX),
    ("Y1 Y2 Z5", PauliType.YYZ),
    ("X1 Z2 X4", PauliType.XZX),
    ("X1 X2 X4 Z5 X6", PauliType.XXXX),
    ("Y1 X2 X3 Y4", PauliType.YXXY),
])
def test_classification_examples(text, expected):
    assert classify_term(parse_pauli(text, 6)) == expected


@pytest.mark.parametrize("text", ["X1", "X1 X2 X3", "X1 Y2", "Z1 Z2 Z3", "X1 Y2 X3 Y4", "X1 Z3 Z4 X5 Z6"])
def test_unclassifiable_strings(text):
    with pytest.raises(ClassificationError) as info:
        classify_term(parse_pauli(text, 6))
    assert format_pauli(info.value.pauli) == text


@pytest.mark.parametrize("n", [4, 5, 6])
def test_every_table_pattern_classifies_as_its_type(n):
    padroes = table_patterns(n)
    assert {tipo for tipo, _ in padroes} == set(PauliType)
    for tipo, op in padroes:
        assert classify_term(op) == tipo


def test_label_examples():
    assert group_label(parse_pauli("X1 X2 X4 Z5 X6", 6)) == GroupLabel.of("XXXX", 3, 1)
    assert str(group_label(parse_pauli("Z1 X3 Z4 X5", 5))) == "AA(3,5)"
    assert str(group_label(parse_pauli("Y1 X2 X3 Y4", 4))) == "YXXY(3/2,7/2)"
    assert group_label(parse_pauli("Z1 Z2", 2)) == IDENTITY_LABEL


def test_label_rejects_wrong_declared_type():
    with pytest.raises(ClassificationError):
        group_label(parse_pauli("X1 X2", 2), PauliType.YY)


def test_diagonal_terms_share_one_group():
    g = group_hamiltonian(_h(2, "Z1", "Z2", "Z1 Z2", ""))
    assert g.sizes() == [4]
    assert g.labels == [IDENTITY_LABEL]


def test_xxxx_and_yyyy_land_in_different_groups():
    g = group_hamiltonian(_h(4, "X1 X2 X3 X4", "Y1 Y2 Y3 Y4"))
    assert len(g) == 2


def test_two_body_family_shares_endpoints():
    g = group_hamiltonian(_h(5, "X1 Z2 Z3 X4", "Y1 Z2 Z3 Y4", "X1 Z2 Z3 X4 Z5", "Z1"))
    assert sorted(g.sizes()) == [1, 3]
    assert len(g.groups[GroupLabel.of("AA", 1, 4)]) == 3


def test_adversarial_grouping_reports_violation():
    h = PauliHamiltonian.from_terms(1, [(1.0, parse_pauli("X1", 1)), (1.0, parse_pauli("Y1", 1))])
    report = verify_grouping(Grouping(h, {IDENTITY_LABEL: (0, 1)}))
    assert not report.passed
    assert len(report.violations) == 1


def test_partition_defects_are_reported():
    h = _h(2, "Z1", "Z2", "Z1 Z2")
    report = verify_grouping(Grouping(h, {IDENTITY_LABEL: (0, 0, 5)}))
    assert report.duplicates == [0]
    assert report.missing == [1, 2]
    assert report.invalid == [5]


def test_empty_hamiltonian():
    g = group_hamiltonian(PauliHamiltonian(3, ()))
    assert len(g) == 0
    assert verify_grouping(g).passed


def test_unknown_mode():
    with pytest.raises(ValueError):
        group_hamiltonian(_h(1, "Z1"), mode="greedy")


@pytest.mark.parametrize("seed", range(50))
def test_random_table_hamiltonians_group_without_violations(seed):
    n = 4 + seed % 5
    h = random_table_hamiltonian(n, seed=seed)
    g = group_hamiltonian(h)
    assert verify_grouping(g).passed
    assert len(g) <= 25 * n ** 2 + 1


@pytest.mark.parametrize("mode", ["full", "near_qwc"])
def test_molecular_inputs_group_without_violations(mode, h2_hamiltonian, hubbard_hamiltonian):
    mi = random_molecular_integrals(4, 4, seed=3)
    lih_like = jordan_wigner_transform(build_fermionic_hamiltonian(parse_fcidump(format_fcidump(mi))))
    for h in (h2_hamiltonian, hubbard_hamiltonian, lih_like):
        g = group_hamiltonian(h, mode=mode, debug=True)
        assert verify_grouping(g).passed


def test_h2_groups(h2_hamiltonian):
    g = group_hamiltonian(h2_hamiltonian)
    assert len(g) == 5
    assert g.labels[0] == IDENTITY_LABEL
    assert g.sizes()[0] == 11
    assert sorted(label.type_tag for label in g.labels[1:]) == ["XXYY", "XYYX", "YXXY", "YYXX"]


def test_near_qwc_label_examples():
    op = parse_pauli("X1 X2 X3 Z4 Z5 X6", 6)
    label = near_qwc_label(op)
    assert label.is_near_qwc
    assert str(label) == "XXXX(1,2;9/2)"
    assert near_qwc_label(parse_pauli("X1 Z2 X3", 3)) == group_label(parse_pauli("X1 Z2 X3", 3))


def test_near_qwc_grouping_verifies():
    h = random_table_hamiltonian(7, seed=11, density=0.5)
    g = group_hamiltonian(h, mode="near_qwc")
    assert g.mode == "near_qwc"
    assert verify_grouping(g).passed


def test_parallel_labelling_matches_serial(monkeypatch):
    h = random_table_hamiltonian(6, seed=5, density=0.6)
    serial = group_hamiltonian(h, workers=1)
    monkeypatch.setattr(grouping_module, "PARALLEL_MIN_TERMS", 1)
    paralelo = group_hamiltonian(h, workers=4)
    assert paralelo.groups == serial.groups


def test_grouping_is_deterministic():
    h = random_table_hamiltonian(6, seed=9)
    assert group_hamiltonian(h).groups == group_hamiltonian(h).groups


def test_labels_are_sorted():
    g = group_hamiltonian(random_table_hamiltonian(6, seed=2))
    assert g.labels == sorted(g.labels)


def test_transfer_with_identity_map(h2_hamiltonian):
    g = group_hamiltonian(h2_hamiltonian)
    transferido = transfer_grouping(g, CliffordMap.identity(4))
    assert transferido.groups == g.groups
    assert transferido.hamiltonian.terms == h2_hamiltonian.terms


def test_transfer_with_cnot_map(h2_hamiltonian):
    g = group_hamiltonian(h2_hamiltonian)
    transferido = transfer_grouping(g, CliffordMap.from_cnots(4, [(1, 2)]))
    diagonal = [format_pauli(op) for op in transferido.operators(IDENTITY_LABEL)]
    assert "Z1 Z2" in diagonal
    assert "Z1" in diagonal
    assert verify_grouping(transferido).passed


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 7), st.data())
def test_same_label_implies_commutation(n, data):
    padroes = [op for _, op in table_patterns(n)]
    p = data.draw(st.sampled_from(padroes))
    parceiros = [q for q in padroes if group_label(q) == group_label(p)]
    q = data.draw(st.sampled_from(parceiros))
    assert commutes(p, q)


def test_full_groups_commute_pairwise():
    g = group_hamiltonian(random_table_hamiltonian(6, seed=4, density=0.8))
    for label in g.labels:
        for a, b in combinations(g.operators(label), 2):
            assert commutes(a, b)


def test_transfer_with_three_cnot_map(h2_hamiltonian):
    g = group_hamiltonian(h2_hamiltonian)
    # U = CNOT(1,2)·CNOT(2,4)·CNOT(3,4): pares em ordem temporal
    transferido = transfer_grouping(g, CliffordMap.from_cnots(4, [(3, 4), (2, 4), (1, 2)]))
    imagem = {
        format_pauli(antes): format_pauli(depois)
        for (_, antes), (_, depois) in zip(h2_hamiltonian.terms, transferido.hamiltonian.terms)
    }
    assert imagem["Z2"] == "Z1 Z2"
    assert imagem["Z1"] == "Z1"
    assert imagem["Z4"] == "Z1 Z2 Z3 Z4"
    assert transferido.groups == g.groups
    assert verify_grouping(transferido).passed
    assert np.allclose(
        np.linalg.eigvalsh(dense_matrix(transferido.hamiltonian)),
        np.linalg.eigvalsh(dense_matrix(h2_hamiltonian)),
        atol=1e-10,
    )
