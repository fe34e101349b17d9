"""
Configuration management for the nonseparable Gabor toolkit.
Settings come from keyword arguments and a JSON file; environment variables are not read.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Type

from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import (
    BaseSettings,
    JsonConfigSettingsSource,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

logger = logging.getLogger(__name__)

CONFIG_DIR = Path.home() / ".nsgabor"
CONFIG_FILE = CONFIG_DIR / "config.json"


class TransformConfig(BaseModel):
    """Algorithm dispatch for `auto` mode."""
    multiwin_threshold: int = Field(4, ge=1)  # largest lambda2 sent to the multiwindow path
    ola_ratio: int = Field(8, ge=1)  # FIR windows with L_g <= L/ola_ratio use blocking
    ola_block_multiple: int = Field(4, ge=2)  # target block length in units of L_g


class LimitsConfig(BaseModel):
    """Size bounds for the brute-force oracles."""
    oracle_limit: int = Field(4096, ge=1)
    naive_limit: int = Field(8192, ge=1)
    dense_limit: int = Field(256, ge=1)


class SolverConfig(BaseModel):
    """Dual window solver settings."""
    cg_tol: float = Field(1e-12, gt=0)
    cg_maxiter_factor: int = Field(10, ge=1)
    frame_ratio: float = Field(1e-10, gt=0)  # smallest/largest eigenvalue below this is not a frame


class BenchConfig(BaseModel):
    """Crossover benchmark settings."""
    l_factor: int = Field(2520, ge=1)
    repeats: int = Field(5, ge=1)
    seed: int = 0
    preset_pairs: List[Tuple[int, int]] = Field(
        default_factory=lambda: [(32, 64), (40, 60), (60, 80)]
    )


class AppConfig(BaseSettings):
    """Main application configuration."""
    model_config = SettingsConfigDict(
        json_file=CONFIG_FILE,
        json_file_encoding="utf-8",
        extra="ignore",
    )

    transform: TransformConfig = Field(default_factory=TransformConfig)
    limits: LimitsConfig = Field(default_factory=LimitsConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    bench: BenchConfig = Field(default_factory=BenchConfig)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # keyword arguments win over the JSON file; no env, dotenv or secrets
        return (init_settings, JsonConfigSettingsSource(settings_cls))


class ConfigManager:
    """Loads and saves the application configuration."""

    def __init__(self, path: Optional[Path] = None):
        self.path = Path(path) if path else CONFIG_FILE
        self.config = AppConfig.model_construct(
            transform=TransformConfig(),
            limits=LimitsConfig(),
            solver=SolverConfig(),
            bench=BenchConfig(),
        )

    def load(self, path: Optional[Path] = None) -> AppConfig:
        """Load configuration from the JSON file, falling back to defaults."""
        if path is not None:
            self.path = Path(path)
        try:
            if self.path == CONFIG_FILE:
                self.config = AppConfig()
            elif self.path.exists():
                with open(self.path, "r", encoding="utf-8") as f:
                    data = json.load(f)
                self.config = AppConfig(**data)
            else:
                logger.warning(f"Config file {self.path} not found, using defaults")
                self.config = AppConfig()
            logger.debug(f"Configuration loaded from {self.path}")
        except (ValidationError, ValueError, OSError) as e:
            logger.error(f"Error loading config: {e}")
            self.config = AppConfig.model_construct(
                transform=TransformConfig(),
                limits=LimitsConfig(),
                solver=SolverConfig(),
                bench=BenchConfig(),
            )
        return self.config

    def save(self):
        """Save configuration to file."""
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "w", encoding="utf-8") as f:
                f.write(self.config.model_dump_json(indent=2))
            logger.info(f"Configuration saved to {self.path}")
        except OSError as e:
            logger.error(f"Error saving config: {e}")
            raise


def get_config_manager() -> ConfigManager:
    """Get the singleton config manager instance."""
    if not hasattr(get_config_manager, '_instance'):
        get_config_manager._instance = ConfigManager()
    return get_config_manager._instance


def get_config() -> AppConfig:
    """Shortcut for the active configuration."""
    return get_config_manager().config
