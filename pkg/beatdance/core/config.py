from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = False

    NUM_THREADS: int = 1  # recorded in checkpoint metadata
    DETERMINISTIC: bool = True

    HISTORY_MAX: int = 1200  # 60 s at 20 fps

    model_config = SettingsConfigDict(
        env_prefix="BEATDANCE_",
        env_file=".env",
        validate_assignment=True,
        extra="ignore",
    )


def get_settings() -> Settings:
    return Settings()
