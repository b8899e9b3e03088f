"""Package configuration."""
import logging.config
import os
from pathlib import Path
from typing import Final


def configure_logging() -> None:
    """Configure logging."""
    logging.config.dictConfig(LOGGING)
    log = logging.getLogger(__name__)
    log.debug("Logging is configured.")


# Meta
PACKAGE_PATH: Final = Path(__file__).parent
PACKAGE_NAME: Final = PACKAGE_PATH.stem
ENV: Final = os.getenv(f"{PACKAGE_NAME.upper()}_ENV", "prod")  # Externally set as needed: MUTUALCOHERENCE_ENV='dev'
CONFIG_SCHEMA_VERSION: Final = 1

# Linear algebra
EIGEN_DIM_MAX: Final = 32
EIGEN_TOLERANCE_DEFAULT: Final = 1e-10
EIGEN_SORT_DECIMALS: Final = 12  # Rounding applied to the sort key only, so that conjugate pairs order stably.
PERMANENT_DIM_MAX: Final = 8

# Gaussian engine
KERNEL_CACHE_MAXSIZE: Final = 4096
WICK_EVENTS_MAX: Final = PERMANENT_DIM_MAX
DENOMINATOR_FLOOR: Final = 1e-300

# Detection combinatorics
AMPLITUDE_ORDER_MAX: Final = 12
FERMI_STRING_LEN_MAX: Final = 8

# Fock oracle
FOCK_CUTOFF_DEFAULT: Final = 10
FOCK_TOLERANCE_DEFAULT: Final = 1e-10
FOCK_EDGE_TOLERANCE_DEFAULT: Final = 1e-6
FOCK_MAX_TIME_DEFAULT: Final = 2000.0
FOCK_TIME_STEP_DEFAULT: Final = 10.0
ORACLE_MODES_MAX: Final = 2
ORACLE_EVENTS_MAX: Final = 3
ORACLE_RELATIVE_TOLERANCE: Final = 0.01
ORACLE_POINTS_DEFAULT: Final = ((0.5, 0.25), (1.0, 0.5), (2.0, 1.0), (5.0, 2.0))

# CLI
CSV_FLOAT_FORMAT: Final = "%.12e"
DIAGNOSTIC_PREFIX: Final = PACKAGE_NAME
SWEEP_THREADS_DEFAULT: Final = min(8, os.cpu_count() or 1)
THREADS_ENV_VAR: Final = "COHERENCE_THREADS"

# Calculated
LOGGING: Final = {  # Ref: https://docs.python.org/3/howto/logging.html#configuring-logging
    "version": 1,
    "formatters": {  # Ref: https://docs.python.org/3/library/logging.html#logrecord-attributes
        "detailed": {"format": "%(asctime)s %(levelname)s %(threadName)s-%(thread)x:%(name)s:%(lineno)d:%(funcName)s: %(message)s"},
    },
    "handlers": {"console": {"class": "logging.StreamHandler", "level": "DEBUG", "formatter": "detailed", "stream": "ext://sys.stderr"}},  # stdout may carry CSV.
    "loggers": {
        PACKAGE_NAME: {"level": {"dev": "DEBUG"}.get(ENV, "INFO"), "handlers": ["console"], "propagate": False},
        "": {"level": "WARNING", "handlers": ["console"]},
    },
}

configure_logging()
