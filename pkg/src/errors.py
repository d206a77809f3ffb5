"""Hierarquia de exceções compartilhada por todos os módulos do kmv.

As exceções se dividem em três famílias: erros de entrada (o chamador violou uma
pré-condição), armadilhas de consistência (duas construções independentes
discordaram, o que indica um bug) e erros de escala (a computação pedida está fora
do alcance suportado ou não pôde ser certificada).
"""

from __future__ import annotations

from typing import Any


class KmvError(Exception):
    """Classe base para erros do kmv."""


# --- Erros de entrada ---


class ParameterRangeError(KmvError, ValueError):
    """Parâmetro fora do intervalo admissível."""


class RingMismatchError(KmvError, ValueError):
    """Operandos pertencem a anéis diferentes."""


class IncompatibleTargetError(KmvError, ValueError):
    """Anel de destino incompatível com o elemento de origem."""


class ZeroElementError(KmvError, ValueError):
    """Operação não definida para o elemento zero."""


class NotAUnitError(KmvError, ValueError):
    """Elemento não é uma unidade do anel."""


class ValuationRangeError(KmvError, ValueError):
    """Valuação abaixo do mínimo exigido pela operação."""


class NotInSpanError(KmvError, ValueError):
    """Elemento fora do subgrupo gerado pela base."""


class NotCompatibleError(KmvError, ValueError):
    """Par de componentes sem imagem comum no anel D."""


class NotDivisibleError(KmvError, ValueError):
    """Divisão exata por p impossível."""


# --- Armadilhas de consistência ---


class ConsistencyError(KmvError):
    """Classe base para discordâncias internas que indicam bug."""


class NotIntegralError(ConsistencyError):
    """Divisão no corpo ciclotômico produziu coeficiente não inteiro."""


class InternalMismatchError(ConsistencyError):
    """Duas construções do mesmo objeto discordaram."""


class AlgorithmMismatchError(ConsistencyError):
    """Dois algoritmos independentes produziram resultados diferentes."""


class InvariantFailureError(ConsistencyError):
    """Um invariante verificado falhou."""

    def __init__(self, message: str, anchor: str | None = None) -> None:
        super().__init__(message)
        self.anchor = anchor


# --- Erros de escala ---


class UnsupportedScaleError(KmvError):
    """Computação fora da escala suportada."""


class SaturationUnverifiedError(KmvError):
    """Saturação dos pivôs não pôde ser certificada."""

    def __init__(self, message: str, report: Any = None) -> None:  # noqa: ANN401
        super().__init__(message)
        self.report = report


__all__ = [
    "AlgorithmMismatchError",
    "ConsistencyError",
    "IncompatibleTargetError",
    "InternalMismatchError",
    "InvariantFailureError",
    "KmvError",
    "NotAUnitError",
    "NotCompatibleError",
    "NotDivisibleError",
    "NotInSpanError",
    "NotIntegralError",
    "ParameterRangeError",
    "RingMismatchError",
    "SaturationUnverifiedError",
    "UnsupportedScaleError",
    "ValuationRangeError",
    "ZeroElementError",
]
