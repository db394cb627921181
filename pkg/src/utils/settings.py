"""Runtime configuration read from the environment (and an optional .env file)."""

import os
from dataclasses import dataclass

from dotenv import load_dotenv

load_dotenv()


def _env_bool(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


@dataclass(frozen=True)
class Settings:
    """Thresholds and bounds for oracles, formulas and estimators."""

    max_graph_points: int = 48
    max_enum_points: int = 16
    exact_threshold: int = 10_000
    stirling_min: float = 50.0
    regime_warn: float = 1.0
    chunk_trials: int = 5000
    workers: int = 1
    work_warn: int = 1_000_000
    log_level: str = "WARNING"
    cache_directory: str = "./cache"
    enable_cache: bool = True

    @classmethod
    def from_env(cls) -> "Settings":
        """
        Build settings from environment variables.

        Returns:
            Settings with every unset variable at its default
        """
        return cls(
            max_graph_points=int(os.getenv("BGRAPH_MAX_GRAPH_POINTS", "48")),
            max_enum_points=int(os.getenv("BGRAPH_MAX_ENUM_POINTS", "16")),
            exact_threshold=int(os.getenv("BGRAPH_EXACT_THRESHOLD", "10000")),
            stirling_min=float(os.getenv("BGRAPH_STIRLING_MIN", "50")),
            regime_warn=float(os.getenv("BGRAPH_REGIME_WARN", "1.0")),
            chunk_trials=max(1, int(os.getenv("BGRAPH_CHUNK_TRIALS", "5000"))),
            workers=max(1, int(os.getenv("BGRAPH_WORKERS", "1"))),
            work_warn=int(os.getenv("BGRAPH_WORK_WARN", "1000000")),
            log_level=os.getenv("BGRAPH_LOG_LEVEL", "WARNING").upper(),
            cache_directory=os.getenv("CACHE_DIRECTORY", "./cache"),
            enable_cache=_env_bool("ENABLE_CACHE", "true"),
        )
