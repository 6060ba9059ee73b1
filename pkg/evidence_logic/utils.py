import os
from dataclasses import dataclass

from dotenv import load_dotenv

from .errors import InvalidInputError
from .models import DEFAULT_MAX_AGENTS
from .topology import DEFAULT_MAX_CARRIER

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class Config:
    """
    Runtime limits and defaults, read from the environment (and ``.env``) by the command line only.
    """

    max_carrier: int = DEFAULT_MAX_CARRIER
    max_agents: int = DEFAULT_MAX_AGENTS
    sat_workers: int = 4
    seed: int = 0
    log_level: str = "WARNING"


def _int_var(name: str, default: int, minimum: int = 0) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInputError(f"{name} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise InvalidInputError(f"{name} must be at least {minimum}, got {value}")
    return value


def load_config(env_file: str | None = None) -> Config:
    # read variables from .env
    load_dotenv(env_file)
    level = os.environ.get("EVIDENCE_LOG_LEVEL", "WARNING").upper()
    if level not in LOG_LEVELS:
        raise InvalidInputError(f"EVIDENCE_LOG_LEVEL must be one of {LOG_LEVELS}, got {level!r}")
    return Config(
        max_carrier=_int_var("EVIDENCE_MAX_CARRIER", DEFAULT_MAX_CARRIER, 1),
        max_agents=_int_var("EVIDENCE_MAX_AGENTS", DEFAULT_MAX_AGENTS, 1),
        sat_workers=_int_var("EVIDENCE_SAT_WORKERS", 4, 1),
        seed=_int_var("EVIDENCE_SEED", 0),
        log_level=level,
    )
