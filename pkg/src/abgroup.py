"""Grupos abelianos finitos de ordem potência de p: apresentações, forma normal de Smith
e escalonamento de subgrupos de 1-unidades pela valuação líder.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
import math
from typing import TYPE_CHECKING

import numpy as np
from sympy import ZZ, Matrix
from sympy.matrices.normalforms import invariant_factors, smith_normal_decomp

from .errors import NotAUnitError, ParameterRangeError, RingMismatchError
from .fpfilter import FilterRing, FpFilterElem
from .logger_config import logger

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence


@dataclass(frozen=True)
class PGroupPresentation:
    """Grupo ambiente (Z/p^{e_1}) x ... x (Z/p^{e_m}) com rótulos por coordenada."""

    p: int
    orders: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for order in self.orders:
            rest = order
            while rest % self.p == 0:
                rest //= self.p
            if rest != 1:
                msg = f"Ordem {order} não é potência de p={self.p}"
                raise ParameterRangeError(msg)
        if self.labels and len(self.labels) != len(self.orders):
            msg = "Número de rótulos difere do número de ordens"
            raise ParameterRangeError(msg)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def group_order(self) -> int:
        return math.prod(self.orders)

    @property
    def exponent(self) -> int:
        return max(self.orders, default=1)


def snf(m: Sequence[Sequence[int]] | Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Forma normal de Smith sobre Z.

    Args:
        m: Matriz inteira.

    Returns:
        tuple[Matrix, Matrix, Matrix]: (D, U, V) com U·M·V = D, D diagonal com
            cadeia de divisibilidade e U, V unimodulares.
    """
    mat = m if isinstance(m, Matrix) else Matrix(m)
    d, u, v = smith_normal_decomp(mat, domain=ZZ)
    return d, u, v


def quotient_structure(
    ambient: PGroupPresentation, subgroup: Iterable[Sequence[int]]
) -> tuple[int, ...]:
    """Decomposição cíclica de ambient/<subgroup>, ordens em ordem decrescente.

    Usa os fatores invariantes da matriz [vetores do subgrupo; diag(p^{e_i})], com os
    vetores reduzidos módulo as ordens das coordenadas.

    Args:
        ambient (PGroupPresentation): Grupo ambiente.
        subgroup: Vetores de expoentes, um por gerador.

    Returns:
        tuple[int, ...]: Ordens dos fatores cíclicos não triviais.
    """
    rows = [[int(c) % o for c, o in zip(vec, ambient.orders)] for vec in subgroup]
    if any(len(r) != ambient.rank for r in rows):
        msg = f"Vetores do subgrupo precisam ter {ambient.rank} coordenadas"
        raise ParameterRangeError(msg)
    if ambient.rank == 0:
        return ()
    rows = [r for r in rows if any(r)]
    rows.extend(
        [o if i == j else 0 for j in range(ambient.rank)] for i, o in enumerate(ambient.orders)
    )
    factors = invariant_factors(Matrix(rows), domain=ZZ)
    return tuple(sorted((int(f) for f in factors if int(f) != 1), reverse=True))


@dataclass
class EchelonState:
    """Escalonamento de um subgrupo de 1-unidades de F_p[x]/(x-1)^N.

    Cada pivô é guardado pela valuação v de (pivô - 1), com coeficiente líder 1.
    A imagem de Frobenius de todo pivô novo também é inserida, de modo que o
    conjunto de pivôs é exatamente o conjunto de valuações atingidas pelo subgrupo
    e a ordem do subgrupo é p^{#pivôs}.
    """

    ring: FilterRing
    pivots: dict[int, FpFilterElem] = field(default_factory=dict)
    processed: int = 0
    _powers: dict[tuple[int, int], np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def group_order(self) -> int:
        return self.ring.p ** len(self.pivots)

    def pivot_set(self) -> tuple[int, ...]:
        return tuple(sorted(self.pivots))

    def copy(self) -> EchelonState:
        return EchelonState(self.ring, dict(self.pivots), self.processed, dict(self._powers))

    def _check(self, u: FpFilterElem) -> None:
        if u.ring != self.ring:
            msg = f"Elemento em {u.ring}, escalonamento em {self.ring}"
            raise RingMismatchError(msg)
        if not u.is_one_unit():
            msg = f"{u!r} não é 1-unidade"
            raise NotAUnitError(msg)

    def _pivot_power(self, v: int, a: int) -> FpFilterElem:
        """pivot_v^a, guardado num dtype compacto."""
        key = (v, a)
        cached = self._powers.get(key)
        if cached is None:
            value = self.pivots[v] ** a
            dtype = np.uint8 if self.ring.p < 256 else np.int64  # noqa: PLR2004
            self._powers[key] = value.coeffs.astype(dtype)
            return value
        return FpFilterElem._wrap(self.ring, cached.astype(np.int64))

    def reduce(self, u: FpFilterElem) -> FpFilterElem:
        """Resíduo de u contra os pivôs; é 1 se e só se u pertence ao subgrupo."""
        self._check(u)
        p = self.ring.p
        cur = u
        while not cur.is_one():
            d = cur.coeffs.copy()
            d[0] = 0
            v = int(np.flatnonzero(d)[0])
            if v not in self.pivots:
                break
            a = int(d[v])
            cur = cur * self._pivot_power(v, p - a)
        return cur

    def contains(self, u: FpFilterElem) -> bool:
        return self.reduce(u).is_one()

    def insert(self, u: FpFilterElem) -> bool:
        """Insere u (e, por fechamento, as suas potências p-ésimas).

        Returns:
            bool: True se algum pivô novo foi criado.
        """
        self.processed += 1
        grew = False
        queue = deque([u])
        size, p = self.ring.size, self.ring.p
        while queue:
            residue = self.reduce(queue.popleft())
            if residue.is_one():
                continue
            d = residue - FpFilterElem.one(self.ring)
            v = d.valuation()
            lead = d.leading_coefficient()
            pivot = residue ** pow(lead, -1, p) if lead != 1 else residue
            self.pivots[v] = pivot
            grew = True
            logger.debug(f"Novo pivô na valuação {v} ({len(self.pivots)} no total)")
            if v * p < size:
                queue.append(pivot.frobenius())
        return grew

    def insert_all(self, elements: Iterable[FpFilterElem]) -> int:
        """Insere todos os elementos; devolve o número de inserções que criaram pivôs."""
        return sum(self.insert(u) for u in elements)


def _p_power(u: FpFilterElem, k: int) -> FpFilterElem:
    for _ in range(k):
        u = u.frobenius()
    return u


def layer_structure(
    base: EchelonState, generators: Sequence[FpFilterElem]
) -> tuple[int, ...]:
    """Decomposição cíclica exata de <base, X>/<base>, X = generators.

    Com m_k = #piv<base, X> - #piv<base, X^{p^k}>, d_k = m_k - m_{k-1} conta os
    fatores de ordem >= p^k; o número de fatores de ordem exatamente p^k é d_k - d_{k+1}.

    Args:
        base (EchelonState): Escalonamento do subgrupo pelo qual se quocienta.
        generators: Geradores adicionais X.

    Returns:
        tuple[int, ...]: Ordens cíclicas em ordem decrescente.
    """
    full = base.copy()
    full.insert_all(generators)
    total = len(full.pivots) - len(base.pivots)
    p = base.ring.p
    jumps: list[int] = []
    previous = 0
    k = 0
    while previous < total:
        k += 1
        layer = base.copy()
        layer.insert_all(_p_power(u, k) for u in generators)
        m_k = len(full.pivots) - len(layer.pivots)
        jumps.append(m_k - previous)
        previous = m_k
        logger.debug(f"Camada {k}: m_k={m_k} de {total}")
    jumps.append(0)
    orders: list[int] = []
    for i in range(len(jumps) - 1, 0, -1):
        orders.extend([p**i] * (jumps[i - 1] - jumps[i]))
    return tuple(orders)


__all__ = [
    "EchelonState",
    "PGroupPresentation",
    "layer_structure",
    "quotient_structure",
    "snf",
]
