"""Unidades explícitas: unidades ciclotômicas reais, eta-unidades e suas valuações.

Convenções:
    - xi_a = zeta^{(1-a)/2}·(zeta^a - 1)/(zeta - 1), com a ímpar (a par é trocado
      por p^{n+1} - a). Como o índice das unidades ciclotômicas nas unidades reais é
      h^+, primo com p para primos semi-regulares, as imagens nos p-grupos coincidem
      com as das unidades reais.
    - eta(s, k) no nível n: com eta = zeta^{(p^{n+1}+1)/2} (eta^2 = zeta,
      c(eta) = eta^{-1}), eps = (eta^{p^s+p^k} - eta^{-(p^s+p^k)})/(eta^{p^k} - eta^{-p^k}),
      para 0 <= k < s <= n. Para s = n+1 tem-se eta^{p^{n+1}} = 1 e eps degenera,
      por isso esse caso é rejeitado.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
import hashlib
import json
import math
from typing import TYPE_CHECKING

from sympy import multiplicity, primitive_root

from .errors import (
    IncompatibleTargetError,
    NotAUnitError,
    ParameterRangeError,
    ZeroElementError,
)
from .exactpoly import RingId, TowerElem, exact_inverse, mod_p_image
from .fpfilter import FilterRing, FpFilterElem, binomial_row
from .logger_config import logger

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence


class UnitKind(str, Enum):
    CYCLOTOMIC = "cyclotomic"
    ETA = "eta"
    POWER_PRODUCT = "power_product"


@dataclass(frozen=True)
class UnitDescriptor:
    """Receita simbólica de uma unidade real de Z[zeta_level]."""

    p: int
    level: int
    kind: UnitKind
    params: tuple[int, ...] = ()
    factors: tuple[tuple[UnitDescriptor, int], ...] = field(default=())

    @property
    def ring(self) -> RingId:
        return RingId.cyclotomic(self.p, self.level)

    def exact(self) -> TowerElem:
        """Valor exato em Z[zeta_level]."""
        return evaluate_exact(self)

    def image(self, target: FilterRing) -> FpFilterElem:
        """Imagem módulo p via zeta -> x̄ num anel F_p[x]/(x-1)^N."""
        return evaluate_image(self, target)

    def to_json(self) -> dict:
        data: dict = {"kind": self.kind.value, "p": self.p, "level": self.level}
        if self.kind is UnitKind.CYCLOTOMIC:
            data["a"] = self.params[0]
        elif self.kind is UnitKind.ETA:
            data["s"], data["k"] = self.params
        else:
            data["factors"] = [[d.to_json(), e] for d, e in self.factors]
        return data

    def __str__(self) -> str:
        if self.kind is UnitKind.CYCLOTOMIC:
            return f"xi_{self.params[0]}"
        if self.kind is UnitKind.ETA:
            return f"eta({self.params[0]},{self.params[1]})"
        return "·".join(f"{d}^{e}" for d, e in self.factors)


def cyclotomic_unit(p: int, level: int, a: int) -> UnitDescriptor:
    """Unidade ciclotômica real xi_a em Z[zeta_level].

    Args:
        p (int): Primo ímpar.
        level (int): Nível n >= 0 (zeta de ordem p^{n+1}).
        a (int): Índice 1 <= a < p^{n+1} com p não dividindo a.

    Returns:
        UnitDescriptor: Descritor com a já normalizado para o representante ímpar.

    Raises:
        ParameterRangeError: Para índices inválidos.
    """
    ring = RingId.cyclotomic(p, level)
    period = ring.period
    if level < 0 or not 1 <= a < period or a % p == 0:
        msg = f"Índice inválido para xi_a: a={a}, p={p}, nível {level}"
        raise ParameterRangeError(msg)
    if a % 2 == 0:
        a = period - a
    return UnitDescriptor(p, level, UnitKind.CYCLOTOMIC, (a,))


def eta_unit(p: int, level: int, s: int, k: int) -> UnitDescriptor:
    """Eta-unidade eps(s, k) em Z[zeta_level], com 0 <= k < s <= level.

    A valuação lambda-ádica de eps - 1 é exatamente p^s - p^k.

    Raises:
        ParameterRangeError: Fora do intervalo admissível (inclui s = level+1,
            em que a construção colapsa).
    """
    RingId.cyclotomic(p, level)
    if s == level + 1:
        msg = f"eta({s},{k}) no nível {level} degenera: zeta^(p^{s}) = 1"
        raise ParameterRangeError(msg)
    if not 0 <= k < s <= level:
        msg = f"Parâmetros fora de 0 <= k < s <= n: s={s}, k={k}, n={level}"
        raise ParameterRangeError(msg)
    return UnitDescriptor(p, level, UnitKind.ETA, (s, k))


def power_product(factors: Sequence[tuple[UnitDescriptor, int]]) -> UnitDescriptor:
    """Produto de potências de descritores de mesmo p e nível."""
    if not factors:
        msg = "Produto de potências vazio"
        raise ParameterRangeError(msg)
    p, level = factors[0][0].p, factors[0][0].level
    if any(d.p != p or d.level != level for d, _ in factors):
        msg = "Fatores de um produto precisam ter o mesmo p e nível"
        raise ParameterRangeError(msg)
    return UnitDescriptor(
        p, level, UnitKind.POWER_PRODUCT, factors=tuple((d, int(e)) for d, e in factors)
    )


def _cyclotomic_shift(period: int, a: int) -> int:
    return ((1 - a) // 2) % period


def _eta_data(p: int, level: int, s: int, k: int) -> tuple[int, int, int]:
    """Deslocamento e, passo p^k e comprimento m com eps = zeta^e·sum_{i<m} zeta^{i·p^k}."""
    period = p ** (level + 1)
    half = (period + 1) // 2
    return (-half * p**s) % period, p**k, p ** (s - k) + 1


@lru_cache(maxsize=2048)
def evaluate_exact(desc: UnitDescriptor) -> TowerElem:
    """Valor exato do descritor, com verificação de unidade."""
    ring = desc.ring
    if desc.kind is UnitKind.CYCLOTOMIC:
        a = desc.params[0]
        shift = _cyclotomic_shift(ring.period, a)
        coeffs = [0] * shift + [1] * a
        value = TowerElem.from_coeffs(ring, coeffs)
    elif desc.kind is UnitKind.ETA:
        shift, stride, length = _eta_data(desc.p, desc.level, *desc.params)
        coeffs = [0] * (shift + stride * (length - 1) + 1)
        for i in range(length):
            coeffs[shift + i * stride] = 1
        value = TowerElem.from_coeffs(ring, coeffs)
    else:
        value = TowerElem.one(ring)
        for d, e in desc.factors:
            value = value * evaluate_exact(d) ** e
    exact_inverse(value)
    return value


def _check_image_target(desc: UnitDescriptor, target: FilterRing) -> None:
    ring = desc.ring
    if target.p != desc.p or target.size > ring.degree:
        msg = f"{target} não é quociente de {ring}"
        raise IncompatibleTargetError(msg)


@lru_cache(maxsize=8192)
def evaluate_image(desc: UnitDescriptor, target: FilterRing) -> FpFilterElem:
    """Imagem módulo p do descritor, sem passar pelo valor exato.

    xi_a -> (1+t)^s·sum_j C(a, j+1) t^j e eta(s, k) -> (1+t)^e·sum_j C(m, j+1) t^{j·p^k}.
    """
    _check_image_target(desc, target)
    p, size = target.p, target.size
    period = desc.ring.period
    if desc.kind is UnitKind.CYCLOTOMIC:
        a = desc.params[0]
        shift = _cyclotomic_shift(period, a)
        body = FpFilterElem(target, binomial_row(p, a, size + 1)[1:])
    elif desc.kind is UnitKind.ETA:
        shift, stride, length = _eta_data(desc.p, desc.level, *desc.params)
        count = (size - 1) // stride + 1
        arr = [0] * size
        for j, c in enumerate(binomial_row(p, length, count + 1)[1:]):
            arr[j * stride] = int(c)
        body = FpFilterElem(target, arr)
    else:
        value = FpFilterElem.one(target)
        for d, e in desc.factors:
            value = value * evaluate_image(d, target) ** e
        return value
    return FpFilterElem(target, binomial_row(p, shift, size)) * body


def cyclotomic_family(p: int, level: int, bound: int) -> list[UnitDescriptor]:
    """Unidades xi_a com 1 < a < bound/2, p não dividindo a, na ordem das órbitas de Galois.

    Os índices são percorridos como potências de uma raiz primitiva módulo
    `bound` (uma potência de p), normalizados para min(a, bound - a).

    Args:
        p (int): Primo ímpar.
        level (int): Nível das unidades.
        bound (int): Potência de p que delimita os índices.

    Returns:
        list[UnitDescriptor]: A família, sem repetições.
    """
    if bound < p:
        return []
    root = int(primitive_root(bound))
    seen: set[int] = set()
    family: list[UnitDescriptor] = []
    a = 1
    for _ in range(bound):
        rep = min(a, bound - a)
        if rep > 1 and rep not in seen:
            seen.add(rep)
            family.append(cyclotomic_unit(p, level, rep))
        a = a * root % bound
    logger.debug(f"Família ciclotômica p={p}, nível {level}: {len(family)} unidades")
    return family


def complete_family(p: int, level: int) -> list[UnitDescriptor]:
    """Família que gera a imagem das unidades reais de nível `level` em R_level.

    xi_a com 1 < a < p^level/2 (x̄ tem ordem p^level em R_level, então índices
    maiores repetem imagens) mais eta(level, 0), que atinge a camada p^level - 1.
    """
    family = cyclotomic_family(p, level, p**level)
    family.append(eta_unit(p, level, level, 0))
    return family


def family_hash(family: Iterable[UnitDescriptor]) -> str:
    """Hash SHA-256 da serialização canônica de uma família de unidades."""
    payload = json.dumps([d.to_json() for d in family], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def lambda_val(a: TowerElem) -> int:
    """Valuação lambda-ádica de a != 0 em Z[zeta_n].

    Com a = p^e·b e b não divisível por p, v(a) = e·(p^{n+1} - p^n) + v(b̄), onde
    b̄ é a imagem de b em F_p[x]/(x-1)^{p^{n+1}-p^n} = Z[zeta_n]/p.

    Raises:
        ZeroElementError: Se a = 0.
    """
    ring = a.ring
    if not ring.is_cyclotomic:
        msg = f"lambda_val exige Z[zeta_n], recebido {ring}"
        raise IncompatibleTargetError(msg)
    if a.is_zero():
        msg = "Valuação do elemento zero não está definida"
        raise ZeroElementError(msg)
    e = int(multiplicity(ring.p, math.gcd(*a.coeffs)))
    reduced = a.exact_div(ring.p**e) if e else a
    return e * ring.degree + mod_p_image(reduced, FilterRing(ring.p, ring.degree)).valuation()


def in_filtration(eps: TowerElem, s: int) -> bool:
    """eps pertence a U_{n,s}, isto é, eps = 1 mod lambda^s."""
    d = eps - 1
    return d.is_zero() or lambda_val(d) >= s


def tilde_normalize(u: FpFilterElem) -> FpFilterElem:
    """Divide a unidade pelo seu valor em x=1, obtendo uma 1-unidade.

    Coincide com u^{(p-1)t}, (p-1)t = 1 módulo o expoente do grupo de 1-unidades.

    Raises:
        NotAUnitError: Se u não é unidade.
    """
    if not u.is_unit():
        msg = f"{u!r} não é unidade"
        raise NotAUnitError(msg)
    return u * pow(u.value_at_one, -1, u.p)


def tilde_power(u: FpFilterElem) -> FpFilterElem:
    """u^{(p-1)t} com (p-1)t = 1 módulo o expoente do grupo de 1-unidades."""
    if not u.is_unit():
        msg = f"{u!r} não é unidade"
        raise NotAUnitError(msg)
    period = u.ring.exponent
    t = pow(u.p - 1, -1, period) if period > 1 else 0
    return u ** ((u.p - 1) * t)


__all__ = [
    "UnitDescriptor",
    "UnitKind",
    "complete_family",
    "cyclotomic_family",
    "cyclotomic_unit",
    "eta_unit",
    "evaluate_exact",
    "evaluate_image",
    "family_hash",
    "in_filtration",
    "lambda_val",
    "power_product",
    "tilde_normalize",
    "tilde_power",
]
