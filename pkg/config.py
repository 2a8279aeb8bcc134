# config.py
from typing import Literal
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

TOOL_NAME = "coarsemod"
TOOL_VERSION = "1.0.0"

# Type alias for report formats accepted by the CLI
OutputFormat = Literal["json", "table"]

# Default window radii per group family, sized for desk-scale runs
DEFAULT_WINDOW_FREE_ABELIAN = 20
DEFAULT_WINDOW_FREE = 8
DEFAULT_WINDOW_BAUMSLAG_SOLITAR = 6
DEFAULT_WINDOW_OTHER = 8

# Breadth-first distance in Baumslag-Solitar groups stops at this radius
BS_RADIUS_CAP = int(os.getenv("COARSEMOD_BS_RADIUS_CAP", "12"))

DEFAULT_SEED = 0
DEFAULT_MAX_DEPTH = 4

# Kernels outside the Groebner tier are computed on this radius; certificates
# recorded per resolution stage use the same radius
KERNEL_WINDOW = int(os.getenv("COARSEMOD_KERNEL_WINDOW", "3"))

# Sampling plan defaults
SAMPLE_RANDOM_SUBSETS = 50
SAMPLE_MAX_SUBSET_SIZE = 6
SAMPLE_BALL_RADII = (0, 1, 2, 3)
SAMPLE_ANTIPODAL_PAIRS = 8
SAMPLE_PAIR_CAP = 60

_default_jobs: int | None = None


def get_default_jobs() -> int:
    global _default_jobs
    if _default_jobs is None:
        _default_jobs = max(1, int(os.getenv("COARSEMOD_JOBS", "1")))
    return _default_jobs


def get_corpus_root() -> str:
    return os.getenv("COARSEMOD_CORPUS_ROOT", os.path.join("corpus", "v1"))


def get_log_dir() -> str | None:
    return os.getenv("COARSEMOD_LOG_DIR") or None


def get_log_level() -> str:
    return os.getenv("COARSEMOD_LOG_LEVEL", "WARNING").upper()


def report_timings_enabled() -> bool:
    return os.getenv("COARSEMOD_REPORT_TIMINGS", "").lower() in {"1", "true", "yes"}
