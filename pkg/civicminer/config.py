import os
from typing import Optional
from dotenv import load_dotenv

load_dotenv()


class Settings:
    # Logging Configuration
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "WARNING").upper()
    # Unset means console-only logging
    LOG_DIR: Optional[str] = os.getenv("LOG_DIR") or None
    LOG_JSON: bool = os.getenv("LOG_JSON", "False").lower() == "true"
    LOG_USE_UTC: bool = os.getenv("LOG_USE_UTC", "False").lower() == "true"

    # Worker processes used by shard counting (1 = count inline)
    MINING_WORKERS: int = int(os.getenv("MINING_WORKERS", "1"))

    # Mining defaults; overridable by CLI flags only
    DEFAULT_ALPHA: float = 0.01
    DEFAULT_W: float = 1.6
    DEFAULT_MIN_ANTECEDENT_COUNT: int = 2
    DEFAULT_MIN_COOCCURRENCE: int = 0
    DEFAULT_TOP_K: int = 30
    DISPLAY_DECIMALS: int = 3


settings = Settings()
