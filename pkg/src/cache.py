"""Cache em disco de resultados JSON, endereçado pelo conteúdo do cálculo.

A chave é o SHA-256 de (schema, comando, p, n, modelo, hash da família). A escrita
é atômica (arquivo temporário + os.replace); entradas corrompidas são descartadas
com aviso e tratadas como ausentes.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
import tempfile

from .logger_config import logger
from .settings import load_settings
from .vplus import SCHEMA


def cache_key(command: str, p: int, n: int, model: str, fhash: str) -> str:
    """Chave canônica de um resultado."""
    payload = json.dumps(
        {"schema": SCHEMA, "command": command, "p": p, "n": n, "model": model, "family": fhash},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()


class ResultCache:
    """Diretório de resultados `<chave>.json`."""

    def __init__(self, directory: Path | str | None = None) -> None:
        self.directory = Path(directory) if directory is not None else load_settings().cache_dir

    def path_for(self, key: str) -> Path:
        return self.directory / f"{key}.json"

    def load(self, key: str) -> dict | None:
        """Lê o resultado da chave; None se ausente ou corrompido."""
        path = self.path_for(key)
        if not path.exists():
            return None
        try:
            with path.open(encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Entrada de cache corrompida em {path}: {e}. Ignorando.")
            return None
        if not isinstance(data, dict) or data.get("schema") != SCHEMA:
            logger.warning(f"Entrada de cache com schema inesperado em {path}. Ignorando.")
            return None
        logger.debug(f"Cache encontrado: {path.name}")
        return data

    def store(self, key: str, data: dict) -> Path:
        """Grava o resultado de forma atômica.

        Returns:
            Path: Caminho final da entrada.
        """
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(key)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(data, fh, sort_keys=True, indent=2)
            os.replace(tmp, path)
        except OSError:
            Path(tmp).unlink(missing_ok=True)
            raise
        logger.debug(f"Resultado gravado em {path}")
        return path


__all__ = ["ResultCache", "cache_key"]
