"""
qde_config.py - Quaternion QDE Lab
Settings, numerical tolerances and the shared "qde" logger.

The environment is read once (via .env when present). Only QDE_SEED is
consulted; everything numerical is a constant that callers may override per
call or per problem file.
"""

import logging
import os
from dataclasses import dataclass, fields, replace
from typing import Mapping, Optional

from dotenv import load_dotenv

from qde_errors import ProblemFileError

load_dotenv()

logger = logging.getLogger("qde")

# Seed for the randomized suites (check --random, test fixtures)
SEED = int(os.getenv("QDE_SEED", "0") or 0)

# ---------------------------------------------------------------------------
# Tolerances
# ---------------------------------------------------------------------------

ZERO_TOL = 1e-10
CLUSTER_TOL = 1e-7
RANK_TOL = 1e-9
INDEPENDENCE_TOL = 1e-9
RESIDUAL_TOL = 1e-8
FD_STEP = 1e-5
FD_TOL = 1e-6
SERIES_TOL = 1e-16

# det_p enumerates n! permutations; past this the adjoint route is required
PERMUTATION_CAP = 8

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"


@dataclass(frozen=True)
class Tolerances:
    zero: float = ZERO_TOL
    cluster: float = CLUSTER_TOL
    rank: float = RANK_TOL
    independence: float = INDEPENDENCE_TOL
    residual: float = RESIDUAL_TOL
    fd_step: float = FD_STEP
    fd: float = FD_TOL
    series: float = SERIES_TOL

    @classmethod
    def from_mapping(cls, raw: Optional[Mapping]) -> "Tolerances":
        if not raw:
            return cls()
        if not isinstance(raw, Mapping):
            raise ProblemFileError("tolerance must be an object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ProblemFileError(f"unknown tolerance keys: {', '.join(unknown)}")
        try:
            values = {k: float(v) for k, v in raw.items()}
        except (TypeError, ValueError) as e:
            raise ProblemFileError(f"tolerance values must be numbers: {e}") from e
        return cls(**values)

    def with_overrides(self, **overrides) -> "Tolerances":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


DEFAULT_TOLERANCES = Tolerances()


# ---------------------------------------------------------------------------
# Logging
# ---------------------------------------------------------------------------


def configure_logging(log_file: Optional[str] = None, level: str = "WARNING") -> logging.Logger:
    """
    Install the stderr handler (and optionally a file handler) on the "qde"
    logger. Safe to call repeatedly; handlers are only added once.
    """
    logger.setLevel(getattr(logging, str(level).upper(), logging.WARNING))
    if not logger.handlers:
        sh = logging.StreamHandler()
        sh.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        logger.addHandler(sh)
        logger.propagate = False
    if log_file and not any(
        isinstance(h, logging.FileHandler) and h.baseFilename == os.path.abspath(log_file)
        for h in logger.handlers
    ):
        fh = logging.FileHandler(log_file, encoding="utf-8")
        fh.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(fh)
    return logger
