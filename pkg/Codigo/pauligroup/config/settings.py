# pauligroup/config/settings.py
from pathlib import Path
from dotenv import load_dotenv
import logging
import os

# carrega variáveis de .env (PAULIGROUP_THREADS, PAULIGROUP_SEED, ...)
load_dotenv(dotenv_path=Path(__file__).parent / '.env')

logger = logging.getLogger(__name__)


def _env_float(name, default):
    valor = os.getenv(name)
    if valor is None or valor == "":
        return default
    try:
        return float(valor)
    except ValueError:
        logger.warning(f"Valor inválido para {name}: {valor!r}; usando {default}")
        return default


def _env_int(name, default):
    valor = os.getenv(name)
    if valor is None or valor == "":
        return default
    try:
        return int(valor)
    except ValueError:
        logger.warning(f"Valor inválido para {name}: {valor!r}; usando {default}")
        return default


def _resolve_workers():
    valor = os.getenv("PAULIGROUP_THREADS")
    if valor is None or valor == "":
        return os.cpu_count() or 1
    try:
        workers = int(valor)
    except ValueError:
        workers = 0
    if workers <= 0:
        logger.warning(f"PAULIGROUP_THREADS={valor!r} inválido; usando 1 worker")
        return 1
    return workers


# paths
PACKAGE_DIR = Path(__file__).resolve().parent.parent
DATA_DIR    = PACKAGE_DIR / "data"
FCIDUMP_DIR = DATA_DIR / "fcidump"
GOLDEN_DIR  = DATA_DIR / "golden"
RESULTS_DIR = PACKAGE_DIR / "results"
LOG_FILE    = "pauligroup.log"
LOG_FORMAT  = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# limiar de poda dos coeficientes
PRUNE_THRESHOLD = _env_float("PAULIGROUP_PRUNE_THRESHOLD", 1e-8)

# resíduo imaginário tolerado após a transformação de Jordan-Wigner
IMAG_TOLERANCE = 1e-12

# simulador de vetor de estado
MAX_QUBITS              = _env_int("PAULIGROUP_MAX_QUBITS", 22)
DENSE_ORACLE_MAX_QUBITS = 10

# verificação
N_RANDOM_STATES    = _env_int("PAULIGROUP_RANDOM_STATES", 100)
N_VERIFY_STATES    = 20
FIDELITY_TOLERANCE = 1e-10
ANCILLA_TOLERANCE  = 1e-20

# aleatoriedade e paralelismo
DEFAULT_SEED = _env_int("PAULIGROUP_SEED", 1234)
MAX_WORKERS  = _resolve_workers()

# checagem de comutação durante o agrupamento (modo debug)
DEBUG_CHECKS = os.getenv("PAULIGROUP_DEBUG", "false").lower() in {"1", "true", "yes"}
