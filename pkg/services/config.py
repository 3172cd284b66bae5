"""
Configuration Management for the dephasing simulator

Uses pydantic-settings for environment settings, pyyaml for named bath
profiles and pydantic models for run configuration files.

Precedence: built-in defaults < bath profile < config file < command-line flags
"""

import json
import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from libs.dephasing_exceptions import ConfigurationError
from services.dephasing_core.bath import BathParams
from services.dephasing_core.states import InputQubit

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_PROFILES_DIR = PROJECT_ROOT / "configs" / "bath-profiles"


class Settings(BaseSettings):
    """Application settings"""

    # Output
    DEPHASE_OUTPUT_DIR: str = ""          # empty: data goes to stdout
    DEPHASE_PROFILE: str = "calibrated"
    DEPHASE_PROFILES_DIR: str = ""

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "rich"              # rich, json

    # Numerics
    SCHEDULER_STEP: float = 0.05
    SCHEDULER_REFINE_TOL: float = 1e-4

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    @property
    def profiles_dir(self) -> Path:
        if self.DEPHASE_PROFILES_DIR:
            return Path(self.DEPHASE_PROFILES_DIR)
        return DEFAULT_PROFILES_DIR


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


def parse_beta_hbar(value: Union[str, float, None]) -> Optional[float]:
    """beta_hbar from a number or 'inf' / '.inf'"""
    if value is None:
        return None
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", ".inf", "infinity"):
            return math.inf
        try:
            return float(text)
        except ValueError:
            raise ConfigurationError("BAD_CONFIG", f"beta_hbar must be a number or inf: {value!r}")
    return float(value)


def list_bath_profiles(profiles_dir: Optional[Path] = None) -> List[str]:
    directory = profiles_dir or get_settings().profiles_dir
    return sorted(p.stem for p in Path(directory).glob("*.yaml"))


def load_bath_profile(name: str, profiles_dir: Optional[Path] = None) -> BathParams:
    """
    Load a named bath profile

    Args:
        name: Profile name (file stem under configs/bath-profiles)
        profiles_dir: Override for the profile directory

    Returns:
        BathParams

    Raises:
        ConfigurationError: unknown profile or malformed file
    """
    directory = Path(profiles_dir or get_settings().profiles_dir)
    path = directory / f"{name}.yaml"
    if not path.is_file():
        known = ", ".join(list_bath_profiles(directory)) or "none"
        raise ConfigurationError("UNKNOWN_PROFILE", f"no bath profile {name!r} (known: {known})")

    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        bath = data["bath"]
        params = BathParams(
            eta=float(bath["eta"]),
            omega_c=float(bath["omega_c"]),
            beta_hbar=parse_beta_hbar(bath["beta_hbar"]),
        )
    except (yaml.YAMLError, KeyError, TypeError, ValueError) as e:
        raise ConfigurationError("BAD_PROFILE", f"{path}: {e}") from e

    logger.debug(f"Loaded bath profile {name}: {params.to_dict()}")
    return params


ComplexLike = Union[float, List[float]]


def to_complex(value: ComplexLike) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if len(value) != 2:
        raise ValueError(f"complex numbers are [re, im], got {value}")
    return complex(value[0], value[1])


class BathConfig(BaseModel):
    """Bath overrides; unset fields come from the profile"""
    eta: Optional[float] = None
    omega_c: Optional[float] = None
    beta_hbar: Optional[Union[float, str]] = None


class RunConfig(BaseModel):
    """Run configuration mirrored by the command-line flags"""

    profile: Optional[str] = None
    bath: BathConfig = BathConfig()

    # Gate and input
    gate: Optional[str] = None
    euler_angles: Optional[List[float]] = None
    input: Optional[str] = None
    alpha: Optional[ComplexLike] = None
    beta: Optional[ComplexLike] = None

    # Schedule / sweep
    mode: Optional[str] = None            # distinct_times, simultaneous
    times: Optional[List[float]] = None
    t_gap: Optional[float] = None
    delta: float = 0.2
    outcome_branch: Optional[List[int]] = None
    grid: Optional[str] = None            # start:stop:count
    window: Optional[List[float]] = None
    step: Optional[float] = None
    refine_tol: Optional[float] = None

    # Conventions
    convention: str = "divisible"         # divisible, fresh-bath
    measured_qubits: str = "remove"       # remove, retain

    # Output
    format: Optional[str] = None          # csv, json
    output: Optional[str] = None

    @field_validator("times", "window")
    @classmethod
    def _nonnegative(cls, value: Optional[List[float]]) -> Optional[List[float]]:
        if value is not None and any(t < 0 for t in value):
            raise ValueError("times must be nonnegative")
        return value

    @field_validator("convention")
    @classmethod
    def _known_convention(cls, value: str) -> str:
        if value not in ("divisible", "fresh-bath"):
            raise ValueError(f"unknown convention {value!r}")
        return value

    @field_validator("measured_qubits")
    @classmethod
    def _known_handling(cls, value: str) -> str:
        if value not in ("remove", "retain"):
            raise ValueError(f"unknown measured-qubit handling {value!r}")
        return value

    def merged(self, overrides: Dict[str, Any]) -> "RunConfig":
        """New config with every non-None override applied on top"""
        data = self.model_dump(exclude_none=True)
        bath = dict(data.get("bath", {}))
        for key in ("eta", "omega_c", "beta_hbar"):
            if overrides.get(key) is not None:
                bath[key] = overrides[key]
        data["bath"] = bath
        data.update({
            k: v for k, v in overrides.items()
            if v is not None and k not in ("eta", "omega_c", "beta_hbar")
        })
        return build_run_config(data)

    def bath_params(self, settings: Optional[Settings] = None) -> BathParams:
        settings = settings or get_settings()
        base = load_bath_profile(self.profile or settings.DEPHASE_PROFILE, settings.profiles_dir)
        beta_hbar = parse_beta_hbar(self.bath.beta_hbar)
        return BathParams(
            eta=base.eta if self.bath.eta is None else self.bath.eta,
            omega_c=base.omega_c if self.bath.omega_c is None else self.bath.omega_c,
            beta_hbar=base.beta_hbar if beta_hbar is None else beta_hbar,
        )

    def input_qubit(self, default: Optional[InputQubit] = None) -> InputQubit:
        if self.alpha is not None or self.beta is not None:
            alpha = to_complex(self.alpha if self.alpha is not None else 0.0)
            beta = to_complex(self.beta if self.beta is not None else 0.0)
            return InputQubit(alpha, beta)
        if self.input is not None:
            return InputQubit.from_tag(self.input)
        if default is None:
            raise ConfigurationError(
                "BAD_CONFIG", "no input qubit given (--input or --alpha/--beta)"
            )
        return default


def build_run_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigurationError("BAD_CONFIG", str(e)) from e


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Load a run configuration file (JSON, or YAML for .yaml / .yml)

    Raises:
        ConfigurationError: missing or malformed file
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            if path.suffix.lower() in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except FileNotFoundError:
        raise ConfigurationError("BAD_CONFIG", f"config file not found: {path}")
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigurationError("BAD_CONFIG", f"{path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigurationError("BAD_CONFIG", f"{path}: top level must be a mapping")
    logger.debug(f"Loaded run config from {path}")
    return build_run_config(data)
