import numpy as np
import pytest

from config.settings import FCIDUMP_DIR
from core.fermion import build_fermionic_hamiltonian, jordan_wigner_transform, load_fcidump
from core.simulator import pauli_matrix


def _jw_from_file(path):
    return jordan_wigner_transform(build_fermionic_hamiltonian(load_fcidump(path)))


@pytest.fixture(scope="session")
def h2_path():
    return FCIDUMP_DIR / "h2_sto3g.fcidump"


@pytest.fixture(scope="session")
def hubbard_path():
    return FCIDUMP_DIR / "hubbard_3site.fcidump"


@pytest.fixture(scope="session")
def h2_hamiltonian(h2_path):
    return _jw_from_file(h2_path)


@pytest.fixture(scope="session")
def hubbard_hamiltonian(hubbard_path):
    return _jw_from_file(hubbard_path)


def dense_matrix(h):
    """Matriz densa de um PauliHamiltonian (oráculo para N pequeno)."""
    matriz = np.zeros((1 << h.n_qubits, 1 << h.n_qubits), dtype=complex)
    for coefficient, op in h.terms:
        matriz += coefficient * pauli_matrix(op)
    return matriz
