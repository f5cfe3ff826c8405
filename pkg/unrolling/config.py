"""Runtime settings read from the environment (a ``.env`` file is loaded by the CLI)."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    run_fuel: int = 64
    denote_fuel: int = 8
    max_depth: int = 32
    seed: int = 0
    log_level: str = "WARNING"


def _int_var(name: str, default: int, minimum: int = 0) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got '{raw}'") from None
    if value < minimum:
        raise ValueError(f"{name} must be at least {minimum}, got {value}")
    return value


def load_settings() -> Settings:
    level = os.environ.get("UNROLL_LOG_LEVEL", "WARNING").strip().upper() or "WARNING"
    if level not in _LEVELS:
        raise ValueError(f"UNROLL_LOG_LEVEL must be one of {', '.join(_LEVELS)}, got '{level}'")
    return Settings(
        run_fuel=_int_var("UNROLL_RUN_FUEL", 64, minimum=1),
        denote_fuel=_int_var("UNROLL_DENOTE_FUEL", 8, minimum=1),
        max_depth=_int_var("UNROLL_MAX_DEPTH", 32, minimum=1),
        seed=_int_var("UNROLL_SEED", 0, minimum=-(2**63)),
        log_level=level,
    )


def configure_logging(settings: Settings, verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, settings.log_level),
        format="%(levelname)s %(name)s: %(message)s",
    )
