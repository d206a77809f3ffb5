from pathlib import Path
import sys

import pytest

# Adicionar o diretório raiz do projeto ao PYTHONPATH
ROOT_DIR = Path(__file__).parent
sys.path.insert(0, str(ROOT_DIR))


@pytest.fixture(autouse=True)
def isolated_cache_dir(monkeypatch, tmp_path):
    """Aponta o cache de resultados para um diretório temporário em cada teste."""
    monkeypatch.setenv("KMV_CACHE_DIR", str(tmp_path / "kmv-cache"))
    return tmp_path / "kmv-cache"
