"""Números de Bernoulli módulo p, índices irregulares e o índice de irregularidade r(p).

Toda a aritmética é feita módulo p (ou p^2 nas somas de potências); pelo teorema
de von Staudt-Clausen os denominadores de B_2, ..., B_{p-3} são primos com p.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from sympy import isprime

from .errors import AlgorithmMismatchError, ParameterRangeError
from .fpfilter import binomial_row
from .logger_config import logger


@dataclass(frozen=True)
class IrregularityReport:
    """Índices pares 2i em [2, p-3] com p dividindo o numerador de B_{2i}."""

    p: int
    indices: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.indices)

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "indices": list(self.indices)}


def _check_odd_prime(p: int) -> None:
    if p < 3 or not isprime(p):  # noqa: PLR2004
        msg = f"p deve ser um primo ímpar, recebido {p}"
        raise ParameterRangeError(msg)


def _by_recurrence(p: int) -> dict[int, int]:
    """B_m mod p pela recorrência sum_{k<=m} C(m+1, k) B_k = 0."""
    top = p - 3
    values = np.zeros(top + 1, dtype=np.int64)
    values[0] = 1
    for m in range(1, top + 1):
        row = binomial_row(p, m + 1, m)
        acc = int(row @ values[:m]) % p
        values[m] = (-acc * pow(m + 1, -1, p)) % p
    return {m: int(values[m]) for m in range(2, top + 1, 2)}


def _by_power_sums(p: int) -> dict[int, int]:
    """B_m mod p por sum_{a<p} a^m = p·B_m mod p^2, m par em [2, p-3]."""
    modulus = p * p
    bases = np.arange(1, p, dtype=np.int64)
    square = bases * bases % modulus
    power = square.copy()
    out: dict[int, int] = {}
    for m in range(2, p - 2, 2):
        total = int(power.sum()) % modulus
        if total % p:
            msg = f"Soma de potências de grau {m} não divisível por p={p}"
            raise AlgorithmMismatchError(msg)
        out[m] = total // p % p
        power = power * square % modulus
    return out


@lru_cache(maxsize=256)
def bernoulli_mod_p(p: int) -> dict[int, int]:
    """B_{2i} mod p para 2 <= 2i <= p-3, por dois algoritmos independentes.

    Args:
        p (int): Primo ímpar (p = 3 devolve o mapa vazio).

    Returns:
        dict[int, int]: Mapa 2i -> B_{2i} mod p.

    Raises:
        ParameterRangeError: Se p não é primo ímpar.
        AlgorithmMismatchError: Se a recorrência e as somas de potências divergem.
    """
    _check_odd_prime(p)
    recurrence = _by_recurrence(p)
    power_sums = _by_power_sums(p)
    if recurrence != power_sums:
        bad = sorted(m for m in recurrence if recurrence[m] != power_sums.get(m))
        logger.error(f"Bernoulli mod {p}: algoritmos divergem em {bad[:5]}")
        msg = f"Recorrência e somas de potências divergem para p={p}"
        raise AlgorithmMismatchError(msg)
    return recurrence


def irregularity(p: int) -> IrregularityReport:
    """Índice de irregularidade r(p) e os índices irregulares de p.

    Args:
        p (int): Primo ímpar.

    Returns:
        IrregularityReport: Índices ordenados e r.
    """
    values = bernoulli_mod_p(p)
    indices = tuple(sorted(m for m, b in values.items() if b == 0))
    logger.info(f"p={p}: r(p)={len(indices)}, índices {list(indices)}")
    return IrregularityReport(p, indices)


__all__ = ["IrregularityReport", "bernoulli_mod_p", "irregularity"]
