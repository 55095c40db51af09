from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    LOG: str = "INFO"
    OUTPUT_DIR: str = "runs"
    SEED: int = 0
    MAX_THREADS: Optional[int] = None
    DIRECT_SOLVE_MAX_UNKNOWNS: int = 20000
    CONE_MARGIN: float = 1e-10

    model_config = SettingsConfigDict(
        env_prefix="HMIX_",  # HMIX_LOG, HMIX_SEED, ...
        env_file=".env",
        validate_assignment=True,
        extra="ignore",
    )


settings = Settings()


def get_settings():
    return Settings()
