from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache


class Settings(BaseSettings):
    """Toolkit settings, overridable through QTURAN_* environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="QTURAN_",
        case_sensitive=True,
        extra="ignore",
    )

    PROJECT_NAME: str = "Oriented Vertex Turan Toolkit"

    # Dimension caps
    MAX_FAMILY_DIM: int = 28      # explicit families: 2^28-bit bitset
    MAX_FORMULA_DIM: int = 200    # closed forms never materialize families
    MAX_CHAIN_DIM: int = 24       # level-streaming chain DP
    MAX_PATTERN_VERTICES: int = 21  # parsing and poset data: P:20, V:20
    MAX_PATTERN_SIZE: int = 16      # embedding enumeration and the tree estimate

    # Copy enumeration guard
    MAX_ENUM_DIM: int = 10
    MAX_COPY_EDGES: int = 2_000_000

    # Exact search
    BRUTEFORCE_MAX_VERTICES: int = 16
    SOLVER_TIMEOUT_SECONDS: float = 300.0
    SOLVER_TIMEOUT_CHECK_INTERVAL: int = 256
    SOLVER_ORBIT_BRANCHING: bool = False  # root split over a cube level

    DEFAULT_SEED: int = 0

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
