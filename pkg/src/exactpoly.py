"""Aritmética exata nos anéis da torre A_{k,l} = Z[x]/((x^{p^{k+l}}-1)/(x^{p^k}-1)).

A_{n,1} é o anel de inteiros ciclotômicos Z[zeta_n], zeta_n uma raiz primitiva
p^{n+1}-ésima da unidade. Os elementos são sequências densas de inteiros de
precisão arbitrária, sempre reduzidas pelo módulo (forma canônica), de modo que
igualdade é igualdade de coeficientes.

Além das operações de anel, o módulo implementa o pullback
A_{k,l+1} -> Z[zeta_{k+l}] x A_{k,l} (split/reconstruct), a decomposição em
tuplas e as imagens módulo p nos anéis D.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
import math
from typing import TYPE_CHECKING

from sympy import QQ, ZZ, Poly, Symbol, isprime
from sympy.polys.polyerrors import NotInvertible

from .errors import (
    IncompatibleTargetError,
    NotAUnitError,
    NotCompatibleError,
    NotIntegralError,
    ParameterRangeError,
    RingMismatchError,
    ZeroElementError,
)
from .fpfilter import FilterRing, FpFilterElem, d_ring
from .logger_config import logger

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

_X = Symbol("x")


@dataclass(frozen=True, order=True)
class RingId:
    """Identifica A_{k,l}; com l = 1 é o anel Z[zeta_k]."""

    p: int
    k: int
    l: int  # noqa: E741

    def __post_init__(self) -> None:
        if self.p < 3 or not isprime(self.p):  # noqa: PLR2004
            msg = f"p deve ser um primo ímpar, recebido {self.p}"
            raise ParameterRangeError(msg)
        if self.k < 0 or self.l < 1:
            msg = f"Índices inválidos para A_{{k,l}}: k={self.k}, l={self.l}"
            raise ParameterRangeError(msg)

    @classmethod
    def cyclotomic(cls, p: int, n: int) -> RingId:
        """Z[zeta_n] = A_{n,1}."""
        return cls(p, n, 1)

    @property
    def block(self) -> int:
        return self.p**self.k

    @property
    def period(self) -> int:
        """p^{k+l}: x^{period} = 1 no anel."""
        return self.p ** (self.k + self.l)

    @property
    def degree(self) -> int:
        return self.period - self.block

    @property
    def is_cyclotomic(self) -> bool:
        return self.l == 1

    @property
    def level(self) -> int:
        """Nível ciclotômico k + l - 1 (o de Z[zeta_k] quando l = 1)."""
        return self.k + self.l - 1

    def modulus(self) -> tuple[int, ...]:
        """Coeficientes (grau crescente) de sum_{j<p^l} x^{j·p^k}."""
        coeffs = [0] * (self.degree + 1)
        for j in range(self.p**self.l):
            coeffs[j * self.block] = 1
        return tuple(coeffs)

    def filter_ring(self) -> FilterRing:
        """O anel D_{k,l} = A_{k,l}/p."""
        return d_ring(self.p, self.k, self.l)

    def __str__(self) -> str:
        if self.is_cyclotomic:
            return f"Z[zeta_{self.k}] (p={self.p})"
        return f"A_{{{self.k},{self.l}}} (p={self.p})"


def _reduce(coeffs: Iterable[int], ring: RingId) -> tuple[int, ...]:
    """Representante canônico módulo o módulo do anel.

    Dobra módulo x^{p^{k+l}} - 1; depois x^{deg + r} = -sum_{j} x^{j·p^k + r}
    elimina o bloco do topo.
    """
    period, block, deg = ring.period, ring.block, ring.degree
    folded = [0] * period
    for i, c in enumerate(coeffs):
        if c:
            folded[i % period] += int(c)
    top = folded[deg:]
    return tuple(folded[i] - top[i % block] for i in range(deg))


def _to_poly(coeffs: Sequence[int], domain: object = ZZ) -> Poly:
    return Poly(list(reversed(coeffs)) or [0], _X, domain=domain)


def _from_poly(poly: Poly) -> list[int]:
    return [int(c) for c in reversed(poly.all_coeffs())]


@dataclass(frozen=True)
class TowerElem:
    """Elemento exato de A_{k,l} em forma canônica reduzida."""

    ring: RingId
    coeffs: tuple[int, ...]

    # --- Construtores ---

    @classmethod
    def from_coeffs(cls, ring: RingId, coeffs: Iterable[int]) -> TowerElem:
        """Reduz uma sequência arbitrária de coeficientes (grau crescente)."""
        return cls(ring, _reduce(coeffs, ring))

    @classmethod
    def zero(cls, ring: RingId) -> TowerElem:
        return cls(ring, (0,) * ring.degree)

    @classmethod
    def one(cls, ring: RingId) -> TowerElem:
        return cls.from_coeffs(ring, [1])

    @classmethod
    def const(cls, ring: RingId, c: int) -> TowerElem:
        return cls.from_coeffs(ring, [c])

    @classmethod
    def gen(cls, ring: RingId) -> TowerElem:
        """O gerador x_{k,l} (zeta_k quando l = 1)."""
        return cls.monomial(ring, 1)

    @classmethod
    def monomial(cls, ring: RingId, i: int, c: int = 1) -> TowerElem:
        coeffs = [0] * (i % ring.period + 1)
        coeffs[-1] = c
        return cls.from_coeffs(ring, coeffs)

    @classmethod
    def from_json(cls, data: dict) -> TowerElem:
        header = data["ring"]
        ring = RingId(int(header["p"]), int(header["k"]), int(header["l"]))
        return cls.from_coeffs(ring, [int(c) for c in data["coeffs"]])

    def to_json(self) -> dict:
        return {
            "ring": {"p": self.ring.p, "k": self.ring.k, "l": self.ring.l},
            "coeffs": [str(c) for c in self.coeffs],
        }

    # --- Predicados ---

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_one(self) -> bool:
        return self == TowerElem.one(self.ring)

    # --- Aritmética ---

    def _coerce(self, other: TowerElem | int) -> TowerElem:
        if isinstance(other, int):
            return TowerElem.const(self.ring, other)
        if other.ring != self.ring:
            msg = f"Anéis diferentes: {self.ring} e {other.ring}"
            raise RingMismatchError(msg)
        return other

    def __add__(self, other: TowerElem | int) -> TowerElem:
        other = self._coerce(other)
        return TowerElem(self.ring, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other: TowerElem | int) -> TowerElem:
        other = self._coerce(other)
        return TowerElem(self.ring, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other: int) -> TowerElem:
        return self._coerce(other) - self

    def __neg__(self) -> TowerElem:
        return TowerElem(self.ring, tuple(-a for a in self.coeffs))

    def __mul__(self, other: TowerElem | int) -> TowerElem:
        if isinstance(other, int):
            return TowerElem(self.ring, tuple(a * other for a in self.coeffs))
        other = self._coerce(other)
        product = _to_poly(self.coeffs) * _to_poly(other.coeffs)
        return TowerElem.from_coeffs(self.ring, _from_poly(product))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> TowerElem:
        if e < 0:
            return exact_inverse(self) ** (-e)
        result = TowerElem.one(self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def conj(self) -> TowerElem:
        """x -> x^{-1}, usando x^{p^{k+l}} = 1."""
        period = self.ring.period
        out = [0] * period
        for i, c in enumerate(self.coeffs):
            out[(period - i) % period] += c
        return TowerElem.from_coeffs(self.ring, out)

    def mod_coeffs(self, m: int) -> TowerElem:
        """Redução coeficiente a coeficiente para [0, m); o módulo é mônico."""
        return TowerElem(self.ring, tuple(c % m for c in self.coeffs))

    def exact_div(self, d: int) -> TowerElem:
        """Divisão exata de todos os coeficientes por d.

        Raises:
            NotIntegralError: Se algum coeficiente não é divisível por d.
        """
        if any(c % d for c in self.coeffs):
            msg = f"Coeficientes de {self.ring} não divisíveis por {d}"
            raise NotIntegralError(msg)
        return TowerElem(self.ring, tuple(c // d for c in self.coeffs))

    def lift_to(self, ring: RingId) -> TowerElem:
        """O mesmo polinômio de grau reduzido, visto em outro anel da torre."""
        return TowerElem.from_coeffs(ring, self.coeffs)

    def __repr__(self) -> str:
        terms = [f"{c}*x^{i}" for i, c in enumerate(self.coeffs) if c]
        body = " + ".join(terms[:6]) + (" + ..." if len(terms) > 6 else "")  # noqa: PLR2004
        return f"TowerElem({self.ring}, {body or '0'})"


@dataclass(frozen=True)
class TupleRep:
    """Representação (a_l, ..., a_0) de um elemento de A_{k,l+1} por inteiros ciclotômicos."""

    components: tuple[TowerElem, ...]

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(c.ring.k for c in self.components)


def _check_same_p(a: TowerElem, target: FilterRing) -> None:
    if a.ring.p != target.p:
        msg = f"Primos diferentes: {a.ring} e {target}"
        raise IncompatibleTargetError(msg)


def mod_p_image(a: TowerElem, target: FilterRing) -> FpFilterElem:
    """Imagem de a em F_p[x]/(x-1)^N por redução módulo p (x -> x̄).

    Vale tanto para g (classes módulo p de A_{k,l} em D_{k,l}) quanto para f
    (zeta_{k+l} -> x̄ em D_{k,l}), pois ambos os módulos são congruentes a uma
    potência de (x-1) módulo p.

    Args:
        a (TowerElem): Elemento de A_{k,l} ou Z[zeta_n].
        target (FilterRing): Anel de destino com o mesmo p e N <= grau do módulo.

    Returns:
        FpFilterElem: A imagem.

    Raises:
        IncompatibleTargetError: Se p difere ou N excede o grau do módulo.
    """
    _check_same_p(a, target)
    if target.size > a.ring.degree:
        msg = f"{target} não é quociente de {a.ring}"
        raise IncompatibleTargetError(msg)
    return FpFilterElem.from_monomial(target, a.coeffs)


def g_map(a: TowerElem) -> FpFilterElem:
    """g_{k,l}: A_{k,l} -> D_{k,l}."""
    return mod_p_image(a, a.ring.filter_ring())


def f_map(a: TowerElem, k: int) -> FpFilterElem:
    """f_{k,l}: Z[zeta_{k+l}] -> D_{k,l} com zeta -> x̄, l = nível - k."""
    if not a.ring.is_cyclotomic:
        msg = f"f exige um inteiro ciclotômico, recebido {a.ring}"
        raise IncompatibleTargetError(msg)
    level = a.ring.k
    if not 0 <= k <= level:
        msg = f"k={k} fora de [0, {level}] para nível {level}"
        raise ParameterRangeError(msg)
    return mod_p_image(a, d_ring(a.ring.p, k, level - k))


def split(a: TowerElem) -> tuple[TowerElem, TowerElem]:
    """Decomposição do pullback: A_{k,l+1} -> Z[zeta_{k+l}] x A_{k,l}.

    Raises:
        ParameterRangeError: Se a está em A_{k,1}.
    """
    ring = a.ring
    if ring.l < 2:  # noqa: PLR2004
        msg = f"split exige l+1 >= 2, recebido {ring}"
        raise ParameterRangeError(msg)
    top = RingId.cyclotomic(ring.p, ring.k + ring.l - 1)
    rest = RingId(ring.p, ring.k, ring.l - 1)
    return a.lift_to(top), a.lift_to(rest)


@lru_cache(maxsize=64)
def _inverse_of_modulus(rest: RingId, top: RingId) -> tuple[tuple[int, ...], int]:
    """Inteiro w e denominador d com w/d = M_{k,l}^{-1} módulo Phi sobre QQ."""
    m_poly = _to_poly(rest.modulus(), QQ)
    phi_poly = _to_poly(top.modulus(), QQ)
    inv = m_poly.invert(phi_poly)
    coeffs = [QQ.to_sympy(c) for c in reversed(inv.all_coeffs())]
    den = reduce(math.lcm, (int(c.q) for c in coeffs), 1)
    numer = tuple(int(c * den) for c in coeffs)
    logger.debug(f"Inverso de M mod Phi para {rest}: denominador {den}")
    return numer, den


def reconstruct(a: TowerElem, b: TowerElem) -> TowerElem:
    """Elemento único de A_{k,l+1} que se decompõe em (a, b).

    Calcula c = b + t·M_{k,l}, onde t resolve t·M_{k,l} = a - b módulo Phi por
    divisão exata no corpo ciclotômico. Usa-se o levantamento de grau reduzido de b.

    Args:
        a (TowerElem): Elemento de Z[zeta_{k+l}].
        b (TowerElem): Elemento de A_{k,l}.

    Returns:
        TowerElem: Elemento de A_{k,l+1}.

    Raises:
        NotCompatibleError: Se f(a) != g(b) em D_{k,l}.
        NotIntegralError: Se t não é integral (indica bug).
    """
    top, rest = a.ring, b.ring
    if not top.is_cyclotomic or top.p != rest.p or top.k != rest.k + rest.l:
        msg = f"Par incompatível para reconstrução: {top} e {rest}"
        raise RingMismatchError(msg)
    target = rest.filter_ring()
    if mod_p_image(a, target) != mod_p_image(b, target):
        msg = f"f(a) != g(b) em {target}"
        raise NotCompatibleError(msg)
    numer, den = _inverse_of_modulus(rest, top)
    diff = a - b.lift_to(top)
    scaled = diff * TowerElem.from_coeffs(top, numer)
    try:
        t = scaled.exact_div(den)
    except NotIntegralError:
        logger.error(f"Reconstrução produziu t não integral em {top}")
        raise
    result_ring = RingId(rest.p, rest.k, rest.l + 1)
    t_times_m = _to_poly(t.coeffs) * _to_poly(rest.modulus())
    combined = list(b.coeffs) + [0] * (result_ring.degree - rest.degree)
    for i, c in enumerate(_from_poly(t_times_m)):
        combined[i] += c
    return TowerElem.from_coeffs(result_ring, combined)


def to_tuple(a: TowerElem) -> TupleRep:
    """Decompõe a em A_{k,L} como (a_{L-1}, ..., a_0) com a_j em Z[zeta_{k+j}]."""
    components: list[TowerElem] = []
    cur = a
    while cur.ring.l > 1:
        head, cur = split(cur)
        components.append(head)
    components.append(cur)
    return TupleRep(tuple(components))


def from_tuple(rep: TupleRep | Sequence[TowerElem]) -> TowerElem:
    """Inversa de `to_tuple`: reconstruções sucessivas a partir do nível mais baixo."""
    components = rep.components if isinstance(rep, TupleRep) else tuple(rep)
    if not components:
        msg = "Tupla vazia"
        raise ParameterRangeError(msg)
    cur = components[-1]
    for comp in reversed(components[:-1]):
        cur = reconstruct(comp, cur)
    return cur


@lru_cache(maxsize=4096)
def exact_inverse(a: TowerElem) -> TowerElem:
    """Inverso exato em A_{k,l} (inversão sobre QQ mais verificação de integralidade).

    Raises:
        ZeroElementError: Se a = 0.
        NotAUnitError: Se a não é invertível ou o inverso não é integral.
    """
    if a.is_zero():
        msg = "O elemento zero não é invertível"
        raise ZeroElementError(msg)
    try:
        inv = _to_poly(a.coeffs, QQ).invert(_to_poly(a.ring.modulus(), QQ))
    except NotInvertible as exc:
        msg = f"{a!r} não é invertível em {a.ring}"
        raise NotAUnitError(msg) from exc
    coeffs = [QQ.to_sympy(c) for c in reversed(inv.all_coeffs())]
    if any(c.q != 1 for c in coeffs):
        msg = f"{a!r} não é unidade de {a.ring} (inverso não integral)"
        raise NotAUnitError(msg)
    return TowerElem.from_coeffs(a.ring, [int(c) for c in coeffs])


def is_unit(a: TowerElem) -> bool:
    try:
        exact_inverse(a)
    except (NotAUnitError, ZeroElementError):
        return False
    return True


def absolute_norm(a: TowerElem) -> int:
    """Norma absoluta de a em Z[zeta_n]: resultante com o módulo ciclotômico."""
    if not a.ring.is_cyclotomic:
        msg = f"Norma absoluta definida apenas em Z[zeta_n], recebido {a.ring}"
        raise IncompatibleTargetError(msg)
    if a.is_zero():
        return 0
    return int(_to_poly(a.ring.modulus()).resultant(_to_poly(a.coeffs)))


__all__ = [
    "RingId",
    "TowerElem",
    "TupleRep",
    "absolute_norm",
    "exact_inverse",
    "f_map",
    "from_tuple",
    "g_map",
    "is_unit",
    "mod_p_image",
    "reconstruct",
    "split",
    "to_tuple",
]
