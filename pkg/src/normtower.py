"""Mapas norma da torre: N: A_{k+1,l} -> A_{k,l}, a norma usual, N_{k,l} e o mergulho de unidades.

A_{k+1,l} é um A_{k,l}-módulo livre de base {1, x, ..., x^{p-1}} via
x_{k,l} -> x_{k+1,l}^p. A norma N é o determinante do operador de multiplicação
nessa base, calculado por eliminação sem frações (Bareiss) sobre Z[y] e só
depois reduzido pelo módulo de A_{k,l}.
"""

from __future__ import annotations

from functools import lru_cache

from sympy import ZZ, Symbol
from sympy.polys.matrices import DomainMatrix

from .errors import (
    IncompatibleTargetError,
    InternalMismatchError,
    ParameterRangeError,
)
from .exactpoly import (
    RingId,
    TowerElem,
    TupleRep,
    exact_inverse,
    from_tuple,
    reconstruct,
)
from .logger_config import logger

_Y = Symbol("y")
_POLY_RING = ZZ.poly_ring(_Y)


def _lift(coeffs: tuple[int, ...] | list[int]) -> object:
    """Lista de coeficientes inteiros (ordem crescente) como elemento de ZZ[y]."""
    return _POLY_RING.ring.from_dict({(i,): c for i, c in enumerate(coeffs) if c})


def multiplication_matrix(a: TowerElem) -> list[list[TowerElem]]:
    """Matriz p x p (entradas em A_{k,l}) da multiplicação por a em A_{k+1,l}.

    Escrevendo a = sum_i x^i c_i(x^p), a entrada [s][r] é c_{s-r} se s >= r e
    y·c_{s-r+p} caso contrário, com y = x_{k,l}.
    """
    ring = a.ring
    if ring.k < 1:
        msg = f"A norma N parte de A_{{k+1,l}}, recebido {ring}"
        raise ParameterRangeError(msg)
    p = ring.p
    target = RingId(p, ring.k - 1, ring.l)
    parts = [TowerElem.from_coeffs(target, a.coeffs[i::p]) for i in range(p)]
    y = TowerElem.gen(target)
    return [
        [parts[s - r] if s >= r else y * parts[s - r + p] for r in range(p)]
        for s in range(p)
    ]


def norm_det(a: TowerElem) -> TowerElem:
    """N: A_{k+1,l} -> A_{k,l}, determinante do operador de multiplicação.

    As entradas de `multiplication_matrix` são levantadas para ZZ[y], o
    determinante sai por Bareiss (DomainMatrix) e só então é reduzido pelo módulo
    de A_{k,l}; o resultado é multiplicativo exatamente e aditivo módulo p.

    Args:
        a (TowerElem): Elemento de A_{k+1,l}.

    Returns:
        TowerElem: A norma em A_{k,l}.
    """
    matrix = multiplication_matrix(a)
    p = a.ring.p
    target = matrix[0][0].ring
    rows = [[_lift(entry.coeffs) for entry in row] for row in matrix]
    det = DomainMatrix(rows, (p, p), _POLY_RING).det()
    coeffs = [0] * (max((m[0] for m in det.keys()), default=0) + 1)
    for (i,), c in det.items():
        coeffs[i] = int(c)
    return TowerElem.from_coeffs(target, coeffs)


def usual_norm(a: TowerElem, steps: int) -> TowerElem:
    """Norma usual Z[zeta_m] -> Z[zeta_{m-steps}], composição de normas de um passo.

    Args:
        a (TowerElem): Elemento de Z[zeta_m].
        steps (int): 0 <= steps <= m. Para descer até Z use `absolute_norm`.

    Returns:
        TowerElem: Elemento de Z[zeta_{m-steps}].
    """
    if not a.ring.is_cyclotomic:
        msg = f"A norma usual parte de Z[zeta_m], recebido {a.ring}"
        raise IncompatibleTargetError(msg)
    if not 0 <= steps <= a.ring.k:
        msg = f"steps={steps} fora de [0, {a.ring.k}]"
        raise ParameterRangeError(msg)
    cur = a
    for _ in range(steps):
        cur = norm_det(cur)
    return cur


def _norm_kl_inductive(a: TowerElem, k: int) -> TowerElem:
    l = a.ring.k - k  # noqa: E741
    if l == 1:
        return norm_det(a)
    return norm_det(reconstruct(a, norm_kl(a, k + 1)))


def _norm_kl_tuple(a: TowerElem, k: int) -> TowerElem:
    l = a.ring.k - k  # noqa: E741
    return from_tuple(TupleRep(tuple(usual_norm(a, j) for j in range(1, l + 1))))


@lru_cache(maxsize=2048)
def norm_kl(a: TowerElem, k: int) -> TowerElem:
    """N_{k,l}: Z[zeta_{k+l}] -> A_{k,l}, calculada de duas formas independentes.

    (i) pela definição indutiva N(a, N_{k+1,l-1}(a)); (ii) montando a tupla das
    normas usuais (Ñ_{k+l,1}(a), ..., Ñ_{k+l,l}(a)) via reconstrução. As duas
    precisam coincidir.

    Args:
        a (TowerElem): Elemento de Z[zeta_{k+l}].
        k (int): Nível de base, 0 <= k < nível de a.

    Returns:
        TowerElem: Elemento de A_{k,l}.

    Raises:
        InternalMismatchError: Se as duas construções discordam.
    """
    if not a.ring.is_cyclotomic:
        msg = f"N_{{k,l}} parte de Z[zeta_{{k+l}}], recebido {a.ring}"
        raise IncompatibleTargetError(msg)
    if not 0 <= k < a.ring.k:
        msg = f"k={k} fora de [0, {a.ring.k - 1}]"
        raise ParameterRangeError(msg)
    inductive = _norm_kl_inductive(a, k)
    via_tuple = _norm_kl_tuple(a, k)
    if inductive != via_tuple:
        logger.error(f"N_{{k,l}} divergiu em {a.ring}, k={k}")
        msg = f"Construção indutiva e por tuplas de N_{{{k},{a.ring.k - k}}} divergem"
        raise InternalMismatchError(msg)
    return inductive


def embed_unit(eps: TowerElem, k: int) -> TowerElem:
    """Mergulho de unidades Z[zeta_{k+l-1}]^* -> A_{k,l}^*, eps -> (eps, N_{k,l-1}(eps)).

    Args:
        eps (TowerElem): Unidade de Z[zeta_{k+l-1}].
        k (int): Nível de base do anel de destino.

    Returns:
        TowerElem: Unidade de A_{k,l}, l = nível(eps) - k + 1.

    Raises:
        NotAUnitError: Se eps não é unidade.
    """
    if not eps.ring.is_cyclotomic:
        msg = f"embed_unit parte de Z[zeta_n], recebido {eps.ring}"
        raise IncompatibleTargetError(msg)
    if not 0 <= k <= eps.ring.k:
        msg = f"k={k} fora de [0, {eps.ring.k}]"
        raise ParameterRangeError(msg)
    exact_inverse(eps)
    if k == eps.ring.k:
        return eps
    return reconstruct(eps, norm_kl(eps, k))


__all__ = [
    "embed_unit",
    "multiplication_matrix",
    "norm_det",
    "norm_kl",
    "usual_norm",
]
