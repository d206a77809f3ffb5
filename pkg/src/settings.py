"""Configuração do kmv via variáveis de ambiente (arquivo .env opcional).

Os valores são lidos no momento da chamada de `load_settings`, de modo que os
testes podem sobrescrevê-los com `monkeypatch.setenv`.
"""

from __future__ import annotations

from dataclasses import dataclass
import os
from pathlib import Path

from dotenv import load_dotenv

from .logger_config import logger

# Carrega variáveis de ambiente do arquivo .env
load_dotenv()

DEFAULT_CACHE_DIR = ".kmv_cache"
DEFAULT_BUDGET_SECS = 600.0
DEFAULT_SNF_LIMIT = 48
DEFAULT_SEED = 7


@dataclass(frozen=True)
class Settings:
    cache_dir: Path
    saturation_window: int | None
    budget_secs: float
    snf_limit: int
    seed: int


def _read_int(name: str, default: int | None) -> int | None:
    """Lê uma variável inteira do ambiente; valores malformados caem no padrão."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Valor inválido para {name}: '{raw}'. Usando padrão {default}.")
        return default
    if value < 0:
        logger.warning(f"{name} não pode ser negativo ({value}). Usando padrão {default}.")
        return default
    return value


def _read_float(name: str, default: float) -> float:
    """Lê uma variável real positiva do ambiente."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning(f"Valor inválido para {name}: '{raw}'. Usando padrão {default}.")
        return default
    if value <= 0:
        logger.warning(f"{name} deve ser positivo ({value}). Usando padrão {default}.")
        return default
    return value


def load_settings() -> Settings:
    """Lê a configuração atual do ambiente.

    Returns:
        Settings: Valores efetivos de diretório de cache, janela de saturação,
            orçamento de tempo, limite da rota SNF e semente.
    """
    return Settings(
        cache_dir=Path(os.getenv("KMV_CACHE_DIR", DEFAULT_CACHE_DIR)),
        saturation_window=_read_int("KMV_SATURATION_WINDOW", None),
        budget_secs=_read_float("KMV_BUDGET_SECS", DEFAULT_BUDGET_SECS),
        snf_limit=_read_int("KMV_SNF_LIMIT", DEFAULT_SNF_LIMIT) or DEFAULT_SNF_LIMIT,
        seed=_read_int("KMV_SEED", DEFAULT_SEED) or 0,
    )
