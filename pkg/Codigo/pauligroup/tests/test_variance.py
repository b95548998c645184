import math

import numpy as np
import pytest

from core.grouping import GroupLabel, Grouping, group_hamiltonian
from core.pauli import DimensionError, PauliHamiltonian, parse_pauli
from core.simulator import Statevector
from core.variance import observable_variance, particle_variance_report, variance_report, variance_states


def _plus_state(n):
    return Statevector(np.full(1 << n, 1 / math.sqrt(1 << n)))


def test_basis_state_of_diagonal_hamiltonian_has_no_variance():
    h = PauliHamiltonian.from_terms(2, [(0.3, parse_pauli("Z1", 2)), (-0.2, parse_pauli("Z1 Z2", 2))])
    record = variance_report(h, group_hamiltonian(h), [Statevector.basis(2, 2)])
    assert record.individual_total == pytest.approx(0.0, abs=1e-12)
    assert record.grouped_total == pytest.approx(0.0, abs=1e-12)


def test_product_state_variances_coincide():
    h1, h2 = 0.6, -0.45
    h = PauliHamiltonian.from_terms(2, [(h1, parse_pauli("Z1", 2)), (h2, parse_pauli("Z2", 2))])
    record = variance_report(h, group_hamiltonian(h), [_plus_state(2)])
    assert record.grouped_total == pytest.approx(h1 ** 2 + h2 ** 2)
    assert record.individual_total == pytest.approx(h1 ** 2 + h2 ** 2)


def test_singleton_grouping_matches_individual():
    h = PauliHamiltonian.from_terms(3, [(0.5, parse_pauli(t, 3)) for t in ("X1", "Z2", "Y1 Y3")])
    singletons = Grouping(h, {GroupLabel("AA", 0, 2 * k): (k,) for k in range(len(h))})
    estados = [Statevector.random(3, seed=k) for k in range(5)]
    record = variance_report(h, singletons, estados)
    assert record.grouped_total == pytest.approx(record.individual_total)
    assert record.reduction == pytest.approx(1.0)


def test_observable_variance_of_pauli_on_eigenstate():
    assert observable_variance([(2.0, parse_pauli("Z1", 1))], Statevector.zero(1).amplitudes) == 0.0
    assert observable_variance([(2.0, parse_pauli("X1", 1))], Statevector.zero(1).amplitudes) == pytest.approx(4.0)


def test_report_validates_states(h2_hamiltonian):
    g = group_hamiltonian(h2_hamiltonian)
    with pytest.raises(ValueError):
        variance_report(h2_hamiltonian, g, [])
    with pytest.raises(DimensionError):
        variance_report(h2_hamiltonian, g, [Statevector.zero(3)])


def test_states_are_seeded_and_conserve_particles():
    estados = variance_states(6, 3, 4, seed=10)
    assert len(estados) == 4
    np.testing.assert_array_equal(estados[1].amplitudes, variance_states(6, 3, 1, seed=11)[0].amplitudes)


def test_h2_grouping_reduces_variance(h2_hamiltonian):
    record = particle_variance_report(h2_hamiltonian, group_hamiltonian(h2_hamiltonian), 2, 100, seed=0)
    assert record.n_states == 100
    assert record.grouped_total < record.individual_total
    assert record.reduction > 1.0
    assert sum(item["size"] for item in record.per_group) == len(h2_hamiltonian)


def test_hubbard_grouping_reduces_variance(hubbard_hamiltonian):
    record = particle_variance_report(hubbard_hamiltonian, group_hamiltonian(hubbard_hamiltonian), 3, 100, seed=0)
    assert record.grouped_total < record.individual_total
    assert record.to_dict()["reduction"] == pytest.approx(record.reduction)
