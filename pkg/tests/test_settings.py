from pathlib import Path

import pytest

from src.settings import DEFAULT_BUDGET_SECS, DEFAULT_SEED, DEFAULT_SNF_LIMIT, load_settings

# Testes para src/settings.py

ENV_VARS = ["KMV_CACHE_DIR", "KMV_SATURATION_WINDOW", "KMV_BUDGET_SECS", "KMV_SNF_LIMIT", "KMV_SEED"]


@pytest.fixture
def clean_env(monkeypatch):
    """Remove as variáveis do kmv do ambiente."""
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    return monkeypatch


def test_defaults(clean_env):
    """Sem variáveis de ambiente valem os padrões."""
    settings = load_settings()
    assert settings.cache_dir == Path(".kmv_cache")
    assert settings.saturation_window is None
    assert settings.budget_secs == DEFAULT_BUDGET_SECS
    assert settings.snf_limit == DEFAULT_SNF_LIMIT
    assert settings.seed == DEFAULT_SEED


def test_overrides(clean_env, tmp_path):
    """Valores válidos do ambiente são usados."""
    clean_env.setenv("KMV_CACHE_DIR", str(tmp_path))
    clean_env.setenv("KMV_SATURATION_WINDOW", "12")
    clean_env.setenv("KMV_BUDGET_SECS", "2.5")
    clean_env.setenv("KMV_SNF_LIMIT", "10")
    clean_env.setenv("KMV_SEED", "123456789012")

    settings = load_settings()

    # Verificações
    assert settings.cache_dir == tmp_path
    assert settings.saturation_window == 12
    assert settings.budget_secs == 2.5
    assert settings.snf_limit == 10
    assert settings.seed == 123456789012


@pytest.mark.parametrize(
    ("name", "raw", "field", "expected"),
    [
        ("KMV_SATURATION_WINDOW", "abc", "saturation_window", None),
        ("KMV_SATURATION_WINDOW", "-3", "saturation_window", None),
        ("KMV_BUDGET_SECS", "rápido", "budget_secs", DEFAULT_BUDGET_SECS),
        ("KMV_BUDGET_SECS", "0", "budget_secs", DEFAULT_BUDGET_SECS),
        ("KMV_SNF_LIMIT", "1.5", "snf_limit", DEFAULT_SNF_LIMIT),
        ("KMV_SEED", "semente", "seed", DEFAULT_SEED),
    ],
)
def test_malformed_values_fall_back(clean_env, mocker, name, raw, field, expected):
    """Valores malformados geram aviso e caem no padrão."""
    # Configuração
    mock_logger = mocker.patch("src.settings.logger")
    clean_env.setenv(name, raw)

    # Verificações
    assert getattr(load_settings(), field) == expected
    mock_logger.warning.assert_called_once()


def test_blank_values_are_ignored(clean_env, mocker):
    """Strings vazias equivalem a variável ausente, sem aviso."""
    mock_logger = mocker.patch("src.settings.logger")
    clean_env.setenv("KMV_SATURATION_WINDOW", "  ")
    assert load_settings().saturation_window is None
    mock_logger.warning.assert_not_called()
