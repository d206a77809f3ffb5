"""Aritmética nos anéis D = F_p[x]/(x-1)^N e nos seus grupos de 1-unidades.

Os elementos são guardados na base (x-1)-ádica: o coeficiente de índice j é o
coeficiente de t^j, com t = x - 1. Nessa base a multiplicação é uma convolução
truncada em N termos, a valuação é o índice do primeiro coeficiente não nulo e o
Frobenius u -> u^p apenas espalha os coeficientes (t^j -> t^{jp}). A visão em
monômios fica a um produto de matriz de Pascal de distância (`monomial`).

O módulo também fornece a conjugação c (x -> x^{-1}), as projeções nas partes
plus/minus, exp/log truncados e o logaritmo discreto por descida na filtração
sobre as bases explícitas {1+t^j} e {1+y^{2i}}, com y = x - x^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
import math
from typing import TYPE_CHECKING, Literal

import numpy as np
from sympy import isprime

from .errors import (
    IncompatibleTargetError,
    InternalMismatchError,
    NotAUnitError,
    NotInSpanError,
    ParameterRangeError,
    RingMismatchError,
    UnsupportedScaleError,
    ValuationRangeError,
    ZeroElementError,
)
from .logger_config import logger

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

Base = Literal["x-1", "y"]

# Acima deste tamanho a convolução passa a ser feita por FFT
FFT_THRESHOLD = 192
# Limite para somas exatas em float64 (mantissa de 53 bits)
_FLOAT_EXACT_LIMIT = 2**52


@lru_cache(maxsize=None)
def _check_prime(p: int) -> None:
    """Validate an odd prime once per value."""
    if p < 3 or not isprime(p):  # noqa: PLR2004
        msg = f"p deve ser um primo ímpar, recebido {p}"
        raise ParameterRangeError(msg)


@dataclass(frozen=True, order=True)
class FilterRing:
    """Identifica o anel F_p[x]/(x-1)^size."""

    p: int
    size: int

    def __post_init__(self) -> None:
        _check_prime(self.p)
        if self.size < 1:
            msg = f"O expoente do módulo deve ser >= 1, recebido {self.size}"
            raise ParameterRangeError(msg)

    @property
    def exponent(self) -> int:
        """Menor potência p^m >= size; expoente do grupo de 1-unidades."""
        e = 1
        while e < self.size:
            e *= self.p
        return e

    @property
    def plus_rank(self) -> int:
        """Número de camadas da parte plus das 1-unidades."""
        return (self.size - 1) // 2

    def __str__(self) -> str:
        return f"F_{self.p}[x]/(x-1)^{self.size}"


def d_ring(p: int, k: int, l: int) -> FilterRing:  # noqa: E741
    """Anel D_{k,l} = F_p[x]/(x-1)^{p^{k+l}-p^k}."""
    if k < 0 or l < 1:
        msg = f"Índices inválidos para D_{{k,l}}: k={k}, l={l}"
        raise ParameterRangeError(msg)
    return FilterRing(p, p ** (k + l) - p**k)


def r_ring(p: int, n: int) -> FilterRing:
    """Anel R_n = F_p[x]/(x-1)^{p^n} do modelo de Kervaire-Murthy."""
    if n < 1:
        msg = f"O nível de R_n deve ser >= 1, recebido {n}"
        raise ParameterRangeError(msg)
    return FilterRing(p, p**n)


# --- Binomiais módulo p ---


@lru_cache(maxsize=None)
def _small_binomials(p: int) -> np.ndarray:
    table = np.zeros((p, p), dtype=np.int64)
    for a in range(p):
        for b in range(a + 1):
            table[a, b] = math.comb(a, b) % p
    table.setflags(write=False)
    return table


def binomial_table(p: int, exponents: Sequence[int] | np.ndarray, cols: int) -> np.ndarray:
    """Tabela C(m_i, j) mod p para cada expoente m_i e j < cols (teorema de Lucas).

    Args:
        p (int): Primo.
        exponents: Expoentes não negativos, um por linha.
        cols (int): Número de colunas.

    Returns:
        np.ndarray: Matriz int64 de forma (len(exponents), cols).
    """
    m = np.asarray(exponents, dtype=np.int64).reshape(-1, 1)
    if (m < 0).any():
        msg = "Expoentes binomiais devem ser não negativos"
        raise ParameterRangeError(msg)
    j = np.broadcast_to(np.arange(cols, dtype=np.int64), (m.shape[0], cols)).copy()
    m = np.broadcast_to(m, j.shape).copy()
    out = np.ones(j.shape, dtype=np.int64)
    small = _small_binomials(p)
    while j.any():
        out = out * small[m % p, j % p] % p
        m //= p
        j //= p
    return out


def binomial_row(p: int, m: int, length: int) -> np.ndarray:
    """C(m, j) mod p para j < length."""
    return binomial_table(p, [m], length)[0]


@lru_cache(maxsize=32)
def pascal_matrix(p: int, rows: int, cols: int) -> np.ndarray:
    """Matriz B[i][j] = C(i, j) mod p: linha i é x^i na base (x-1)-ádica."""
    table = binomial_table(p, np.arange(rows), cols)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=16)
def _inverse_pascal(p: int, n: int) -> np.ndarray:
    """Linhas t^j na base monomial: C(j, i)(-1)^{j-i} mod p."""
    idx = np.arange(n)
    sign = np.where((idx[:, None] - idx[None, :]) % 2 == 0, 1, -1)
    out = (pascal_matrix(p, n, n) * sign) % p
    out.setflags(write=False)
    return out


def _exact_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Produto de matrizes mod p em float64 (BLAS); toda soma parcial é exata."""
    if a.shape[-1] * (p - 1) ** 2 >= _FLOAT_EXACT_LIMIT:
        msg = f"Produto matricial grande demais para aritmética exata em float (p={p})"
        raise UnsupportedScaleError(msg)
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return np.rint(prod).astype(np.int64) % p


@lru_cache(maxsize=16)
def _conj_matrix(ring: FilterRing) -> np.ndarray:
    """Matriz de c na base (x-1): a linha j é c(t^j)."""
    p, n, period = ring.p, ring.size, ring.exponent
    reflected = binomial_table(p, (period - np.arange(n)) % period, n)
    logger.debug(f"Construindo matriz de conjugação para {ring}")
    out = _exact_matmul(_inverse_pascal(p, n), reflected, p)
    out.setflags(write=False)
    return out


# --- Convolução truncada ---


def _convolve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Convolução completa mod p, por FFT para operandos longos."""
    short = min(a.size, b.size)
    if short < FFT_THRESHOLD or short * (p - 1) ** 2 >= 2**40:
        return np.convolve(a, b) % p
    n = a.size + b.size - 1
    size = 1 << (n - 1).bit_length()
    fa = np.fft.rfft(a.astype(np.float64), size)
    fb = np.fft.rfft(b.astype(np.float64), size)
    return np.rint(np.fft.irfft(fa * fb, size)[:n]).astype(np.int64) % p


def _mul_arrays(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Produto em F_p[t]/(t^N) separando os termos constantes."""
    n = a.size
    a0, b0 = int(a[0]), int(b[0])
    out = (a * b0 + b * a0) % p
    out[0] = a0 * b0 % p
    ha = np.flatnonzero(a[1:])
    hb = np.flatnonzero(b[1:])
    if ha.size and hb.size:
        va, vb = int(ha[0]) + 1, int(hb[0]) + 1
        if va + vb < n:
            conv = _convolve(a[va : n - vb], b[vb : n - va], p)[: n - va - vb]
            out[va + vb :] = (out[va + vb :] + conv) % p
    return out


class FpFilterElem:
    """Elemento de F_p[x]/(x-1)^N na base (x-1)-ádica.

    Valores são imutáveis; igualdade é igualdade de anel e coeficientes.
    """

    __slots__ = ("_coeffs", "ring")

    def __init__(self, ring: FilterRing, coeffs: Iterable[int] | np.ndarray) -> None:
        arr = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs)
        arr = arr.astype(np.int64, copy=True) % ring.p
        if arr.size < ring.size:
            arr = np.concatenate([arr, np.zeros(ring.size - arr.size, dtype=np.int64)])
        elif arr.size > ring.size:
            arr = arr[: ring.size].copy()
        arr.setflags(write=False)
        self.ring = ring
        self._coeffs = arr

    @classmethod
    def _wrap(cls, ring: FilterRing, arr: np.ndarray) -> FpFilterElem:
        """Embrulha, sem cópia, um array já reduzido e do tamanho certo."""
        obj = cls.__new__(cls)
        arr.setflags(write=False)
        obj.ring = ring
        obj._coeffs = arr
        return obj

    # --- Construtores ---

    @classmethod
    def zero(cls, ring: FilterRing) -> FpFilterElem:
        return cls._wrap(ring, np.zeros(ring.size, dtype=np.int64))

    @classmethod
    def one(cls, ring: FilterRing) -> FpFilterElem:
        arr = np.zeros(ring.size, dtype=np.int64)
        arr[0] = 1
        return cls._wrap(ring, arr)

    @classmethod
    def t_power(cls, ring: FilterRing, j: int, c: int = 1) -> FpFilterElem:
        """O elemento c·t^j (zero se j >= N)."""
        arr = np.zeros(ring.size, dtype=np.int64)
        if 0 <= j < ring.size:
            arr[j] = c % ring.p
        return cls._wrap(ring, arr)

    @classmethod
    def gen_x(cls, ring: FilterRing) -> FpFilterElem:
        """A classe de x, isto é, 1 + t."""
        return cls.one(ring) + cls.t_power(ring, 1)

    @classmethod
    def from_monomial(cls, ring: FilterRing, coeffs: Sequence[int]) -> FpFilterElem:
        """Constrói o elemento a partir de coeficientes na base de monômios x^i."""
        m = np.asarray([int(c) % ring.p for c in coeffs], dtype=np.int64)
        if m.size == 0:
            return cls.zero(ring)
        t = (m @ pascal_matrix(ring.p, m.size, ring.size)) % ring.p
        return cls._wrap(ring, t)

    @classmethod
    def from_json(cls, data: dict) -> FpFilterElem:
        return cls(FilterRing(int(data["p"]), int(data["N"])), data["coeffs"])

    # --- Acesso ---

    @property
    def coeffs(self) -> np.ndarray:
        return self._coeffs

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def size(self) -> int:
        return self.ring.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpFilterElem):
            return NotImplemented
        return self.ring == other.ring and np.array_equal(self._coeffs, other._coeffs)

    def __hash__(self) -> int:
        return hash((self.ring, self._coeffs.tobytes()))

    def __repr__(self) -> str:
        terms = [f"{int(c)}*t^{j}" for j, c in enumerate(self._coeffs) if c]
        body = " + ".join(terms[:6]) + (" + ..." if len(terms) > 6 else "")  # noqa: PLR2004
        return f"FpFilterElem({self.ring}, {body or '0'})"

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.size, "coeffs": [int(c) for c in self._coeffs]}

    # --- Predicados ---

    def is_zero(self) -> bool:
        return not self._coeffs.any()

    def is_one(self) -> bool:
        return int(self._coeffs[0]) == 1 and not self._coeffs[1:].any()

    @property
    def value_at_one(self) -> int:
        return int(self._coeffs[0])

    def is_unit(self) -> bool:
        return self.value_at_one != 0

    def is_one_unit(self) -> bool:
        return self.value_at_one == 1

    # --- Aritmética ---

    def _check(self, other: FpFilterElem) -> None:
        if other.ring != self.ring:
            msg = f"Anéis diferentes: {self.ring} e {other.ring}"
            raise RingMismatchError(msg)

    def __add__(self, other: FpFilterElem | int) -> FpFilterElem:
        if isinstance(other, int):
            other = FpFilterElem.one(self.ring) * other
        self._check(other)
        return FpFilterElem._wrap(self.ring, (self._coeffs + other._coeffs) % self.p)

    __radd__ = __add__

    def __sub__(self, other: FpFilterElem | int) -> FpFilterElem:
        if isinstance(other, int):
            other = FpFilterElem.one(self.ring) * other
        self._check(other)
        return FpFilterElem._wrap(self.ring, (self._coeffs - other._coeffs) % self.p)

    def __neg__(self) -> FpFilterElem:
        return FpFilterElem._wrap(self.ring, (-self._coeffs) % self.p)

    def __mul__(self, other: FpFilterElem | int) -> FpFilterElem:
        if isinstance(other, (int, np.integer)):
            return FpFilterElem._wrap(self.ring, (self._coeffs * (int(other) % self.p)) % self.p)
        self._check(other)
        return FpFilterElem._wrap(self.ring, _mul_arrays(self._coeffs, other._coeffs, self.p))

    __rmul__ = __mul__

    def _small_pow(self, e: int) -> FpFilterElem:
        """Quadrado e multiplicação para expoentes pequenos."""
        result = FpFilterElem.one(self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def _one_unit_pow(self, e: int) -> FpFilterElem:
        """Potência de uma 1-unidade lendo o expoente na base p."""
        result = FpFilterElem.one(self.ring)
        base = self
        p = self.p
        while e:
            digit = e % p
            if digit:
                result = result * base._small_pow(digit)
            e //= p
            if e:
                base = base.frobenius()
        return result

    def __pow__(self, e: int) -> FpFilterElem:
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return FpFilterElem.one(self.ring)
        if not self.is_unit():
            return self._small_pow(e)
        c = self.value_at_one
        one_unit = self * pow(c, -1, self.p)
        return one_unit._one_unit_pow(e % self.ring.exponent) * pow(c, e, self.p)

    def inverse(self) -> FpFilterElem:
        """Inverso multiplicativo.

        Raises:
            NotAUnitError: Se o valor em x=1 é zero.
        """
        if not self.is_unit():
            msg = f"{self!r} não é unidade"
            raise NotAUnitError(msg)
        c_inv = pow(self.value_at_one, -1, self.p)
        one_unit = self * c_inv
        return one_unit._one_unit_pow(self.ring.exponent - 1) * c_inv

    # --- Estrutura ---

    def valuation(self) -> int:
        """Valuação (x-1)-ádica do elemento.

        Raises:
            ZeroElementError: Para o elemento zero.
        """
        nz = np.flatnonzero(self._coeffs)
        if nz.size == 0:
            msg = "Valuação do elemento zero não está definida"
            raise ZeroElementError(msg)
        return int(nz[0])

    def leading_coefficient(self, base: Base = "x-1") -> int:
        """Coeficiente líder na base (x-1) ou y = x - x^{-1}.

        Como y = 2t + O(t^2), o coeficiente em y^v é o coeficiente em t^v
        dividido por 2^v.
        """
        v = self.valuation()
        lead = int(self._coeffs[v])
        if base == "y":
            return lead * pow(2, -v, self.p) % self.p
        return lead

    def monomial(self) -> np.ndarray:
        """Coeficientes na base de monômios x^0, ..., x^{N-1}."""
        return (self._coeffs @ _inverse_pascal(self.p, self.size)) % self.p

    def conj(self) -> FpFilterElem:
        """Conjugação c: x -> x^{-1}."""
        return FpFilterElem._wrap(
            self.ring, _exact_matmul(self._coeffs[None, :], _conj_matrix(self.ring), self.p)[0]
        )

    def frobenius(self) -> FpFilterElem:
        """u^p, que leva t^j em t^{jp}."""
        arr = np.zeros(self.size, dtype=np.int64)
        src = self._coeffs[: (self.size - 1) // self.p + 1]
        arr[:: self.p][: src.size] = src
        return FpFilterElem._wrap(self.ring, arr)

    def truncate(self, ring: FilterRing) -> FpFilterElem:
        """Redução para um módulo (x-1)^M com M <= N."""
        if ring.p != self.p or ring.size > self.size:
            msg = f"Não é possível truncar {self.ring} para {ring}"
            raise IncompatibleTargetError(msg)
        return FpFilterElem._wrap(ring, self._coeffs[: ring.size].copy())

    def spread(self, ring: FilterRing) -> FpFilterElem:
        """Substituição x -> x^p (t^j -> t^{jp}) num anel de destino."""
        if ring.p != self.p:
            msg = f"Primos diferentes: {self.ring} e {ring}"
            raise IncompatibleTargetError(msg)
        arr = np.zeros(ring.size, dtype=np.int64)
        count = min(self.size, (ring.size - 1) // self.p + 1)
        arr[:: self.p][:count] = self._coeffs[:count]
        return FpFilterElem._wrap(ring, arr)


def y_element(ring: FilterRing) -> FpFilterElem:
    """y = x - x^{-1} = 2t - t^2 + t^3 - ..."""
    k = np.arange(ring.size)
    arr = np.where(k % 2 == 0, -1, 1).astype(np.int64)
    arr[0] = 0
    if ring.size > 1:
        arr[1] = 2
    return FpFilterElem(ring, arr)


@lru_cache(maxsize=4096)
def y_power(ring: FilterRing, m: int) -> FpFilterElem:
    """y^m no anel dado."""
    return y_element(ring) ** m


@lru_cache(maxsize=8)
def _y_table(ring: FilterRing) -> np.ndarray:
    """Rows y^0, ..., y^{N-1}."""
    y = y_element(ring)
    rows = [FpFilterElem.one(ring)]
    for _ in range(1, ring.size):
        rows.append(rows[-1] * y)
    table = np.stack([r.coeffs for r in rows])
    table.setflags(write=False)
    return table


def val(u: FpFilterElem, base: Base = "x-1") -> int:
    """Valuação na filtração.

    Para uma 1-unidade devolve a valuação de u - 1 (N se u = 1); para os demais
    elementos, a valuação do próprio elemento. Como y = t·(unidade), as bases
    x-1 e y dão o mesmo número.

    Args:
        u (FpFilterElem): Elemento não nulo.
        base (str): "x-1" ou "y".

    Returns:
        int: A valuação.

    Raises:
        ZeroElementError: Se u = 0.
    """
    if base not in ("x-1", "y"):
        msg = f"Base de valuação desconhecida: {base}"
        raise ParameterRangeError(msg)
    if u.is_zero():
        msg = "Valuação do elemento zero não está definida"
        raise ZeroElementError(msg)
    if u.is_one_unit():
        d = u - FpFilterElem.one(u.ring)
        return u.size if d.is_zero() else d.valuation()
    return u.valuation()


def _require_one_unit(u: FpFilterElem) -> None:
    if not u.is_unit():
        msg = f"{u!r} não é unidade"
        raise NotAUnitError(msg)
    if not u.is_one_unit():
        msg = f"{u!r} não é 1-unidade (valor em x=1 é {u.value_at_one})"
        raise ValuationRangeError(msg)


def plus_project(u: FpFilterElem) -> FpFilterElem:
    """Parte plus de uma 1-unidade: (u·c(u))^{(P+1)/2}, com P o expoente do grupo."""
    _require_one_unit(u)
    cu = u.conj()
    if cu == u:
        return u
    return (u * cu) ** ((u.ring.exponent + 1) // 2)


def minus_project(u: FpFilterElem) -> FpFilterElem:
    """Parte minus de uma 1-unidade, u / plus_project(u)."""
    return u * plus_project(u).inverse()


def trunc_exp(a: FpFilterElem) -> FpFilterElem:
    """Exponencial truncada 1 + a + ... + a^{p-1}/(p-1)!.

    Raises:
        ValuationRangeError: Se a tem valuação < 1.
    """
    one = FpFilterElem.one(a.ring)
    if a.is_zero():
        return one
    if a.valuation() < 1:
        msg = "A exponencial truncada exige valuação >= 1"
        raise ValuationRangeError(msg)
    p = a.p
    result, term = one, one
    for k in range(1, p):
        term = term * a * pow(k, -1, p)
        result = result + term
    return result


def trunc_log(u: FpFilterElem) -> FpFilterElem:
    """Logaritmo truncado sum_{k=1}^{p-1} (-1)^{k+1} y^k / k, com y = u - 1."""
    _require_one_unit(u)
    p = u.p
    y = u - FpFilterElem.one(u.ring)
    result, term = FpFilterElem.zero(u.ring), FpFilterElem.one(u.ring)
    for k in range(1, p):
        term = term * y
        coeff = pow(k, -1, p) if k % 2 == 1 else (-pow(k, -1, p)) % p
        result = result + term * coeff
    return result


# --- Bases e logaritmo discreto ---


class Part(str, Enum):
    FULL = "full"
    PLUS = "plus"


@dataclass(frozen=True)
class BasisEntry:
    index: int
    order: int


@dataclass(frozen=True)
class UnitBasis:
    """Base explícita do grupo de 1-unidades (FULL) ou da sua parte plus (PLUS).

    FULL: elementos 1 + t^j com p não dividindo j. PLUS: 1 + y^{2i} com p não
    dividindo i. A ordem de um elemento de índice j é p^e com e mínimo tal que
    j·p^e >= N.
    """

    p: int
    size: int
    part: Part
    entries: tuple[BasisEntry, ...]

    @property
    def ring(self) -> FilterRing:
        return FilterRing(self.p, self.size)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(e.order for e in self.entries)

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(e.index for e in self.entries)

    @property
    def group_order(self) -> int:
        return math.prod(self.orders)

    def element(self, i: int) -> FpFilterElem:
        j = self.entries[i].index
        one = FpFilterElem.one(self.ring)
        if self.part is Part.FULL:
            return one + FpFilterElem.t_power(self.ring, j)
        return one + y_power(self.ring, j)

    def elements(self) -> list[FpFilterElem]:
        return [self.element(i) for i in range(len(self.entries))]

    def evaluate(self, exps: Sequence[int]) -> FpFilterElem:
        """Produto dos elementos da base elevados aos expoentes dados."""
        result = FpFilterElem.one(self.ring)
        for i, e in enumerate(exps):
            if e % self.entries[i].order:
                result = result * self.element(i) ** int(e)
        return result


def _layer_order(p: int, j: int, size: int) -> int:
    order = 1
    while j * order < size:
        order *= p
    return order


@lru_cache(maxsize=64)
def unit_basis(p: int, size: int, part: Part | str = Part.FULL) -> UnitBasis:
    """Base do grupo de 1-unidades de F_p[x]/(x-1)^size ou da sua parte plus.

    Args:
        p (int): Primo ímpar.
        size (int): Expoente N do módulo, N >= 2.
        part: Part.FULL ou Part.PLUS.

    Returns:
        UnitBasis: A base, com o produto das ordens verificado.

    Raises:
        InternalMismatchError: Se o produto das ordens não bate com a ordem do grupo.
    """
    part = Part(part)
    ring = FilterRing(p, size)
    if size < 2:  # noqa: PLR2004
        msg = f"unit_basis exige N >= 2, recebido {size}"
        raise ParameterRangeError(msg)
    if part is Part.FULL:
        idx = [j for j in range(1, size) if j % p]
        expected_exp = size - 1
    else:
        idx = [2 * i for i in range(1, (size + 1) // 2) if i % p and 2 * i < size]
        expected_exp = ring.plus_rank
    entries = tuple(BasisEntry(j, _layer_order(p, j, size)) for j in idx)
    basis = UnitBasis(p, size, part, entries)
    if basis.group_order != p**expected_exp:
        msg = f"Produto das ordens {basis.group_order} != p^{expected_exp} para {ring}"
        raise InternalMismatchError(msg)
    logger.debug(f"Base {part.value} de {ring}: {len(entries)} geradores")
    return basis


def _binomial_series(ring: FilterRing, step: int, m: int) -> FpFilterElem:
    """(1 + t^step)^m = sum_k C(m, k) t^{k·step}."""
    arr = np.zeros(ring.size, dtype=np.int64)
    count = (ring.size - 1) // step + 1
    arr[::step] = binomial_row(ring.p, m, count)
    return FpFilterElem._wrap(ring, arr)


def _y_binomial_series(ring: FilterRing, step: int, m: int) -> FpFilterElem:
    """(1 + y^step)^m = sum_k C(m, k) y^{k·step}."""
    rows = _y_table(ring)[::step]
    coeffs = binomial_row(ring.p, m, rows.shape[0])
    return FpFilterElem._wrap(ring, _exact_matmul(coeffs[None, :], rows, ring.p)[0])


def _split_p_power(v: int, p: int) -> tuple[int, int]:
    e = 1
    while v % p == 0:
        v //= p
        e *= p
    return v, e


def dlog(u: FpFilterElem, basis: UnitBasis) -> tuple[int, ...]:
    """Logaritmo discreto de u sobre a base, por descida na filtração.

    A cada passo o termo líder a·(x-1)^v (ou a·y^v na parte plus), com
    v = j0·p^e e p não dividindo j0, é cancelado multiplicando por
    (1 + (x-1)^v)^{-a} = (1 + (x-1)^{j0})^{-a·p^e}. A valuação cresce
    estritamente, logo são no máximo N passos.

    Args:
        u (FpFilterElem): 1-unidade no anel da base.
        basis (UnitBasis): Base FULL ou PLUS.

    Returns:
        tuple[int, ...]: Expoentes reduzidos módulo as ordens.

    Raises:
        NotInSpanError: Se u não pertence ao subgrupo gerado pela base.
    """
    ring = basis.ring
    if u.ring != ring:
        msg = f"Elemento em {u.ring}, base em {ring}"
        raise RingMismatchError(msg)
    if not u.is_one_unit():
        msg = f"{u!r} não é 1-unidade"
        raise NotInSpanError(msg)
    p, period = ring.p, ring.exponent
    position = {e.index: i for i, e in enumerate(basis.entries)}
    exps = [0] * len(basis.entries)
    plus = basis.part is Part.PLUS
    cur = u
    while not cur.is_one():
        d = cur - FpFilterElem.one(ring)
        v = d.valuation()
        if plus and v % 2:
            msg = f"Valuação ímpar {v} encontrada: elemento fora da parte plus"
            raise NotInSpanError(msg)
        a = d.leading_coefficient("y" if plus else "x-1")
        j0, pe = _split_p_power(v, p)
        exps[position[j0]] += a * pe
        if plus:
            cur = cur * _y_binomial_series(ring, v, period - a)
        else:
            cur = cur * _binomial_series(ring, v, period - a)
    return tuple(e % entry.order for e, entry in zip(exps, basis.entries))


def plus_coordinates(a: FpFilterElem) -> np.ndarray:
    """Coordenadas de um elemento aditivo c-invariante na base {y^0, y^2, y^4, ...}.

    Raises:
        NotInSpanError: Se aparece um termo líder de grau ímpar em y.
    """
    ring = a.ring
    table = _y_table(ring)
    coords = np.zeros((ring.size + 1) // 2, dtype=np.int64)
    cur = a.coeffs.copy()
    while cur.any():
        v = int(np.flatnonzero(cur)[0])
        if v % 2:
            msg = f"Termo de grau ímpar {v} em y: elemento não é c-invariante"
            raise NotInSpanError(msg)
        b = int(cur[v]) * pow(2, -v, ring.p) % ring.p
        coords[v // 2] = b
        cur = (cur - b * table[v]) % ring.p
    return coords


__all__ = [
    "Base",
    "BasisEntry",
    "FilterRing",
    "FpFilterElem",
    "Part",
    "UnitBasis",
    "binomial_row",
    "binomial_table",
    "d_ring",
    "dlog",
    "minus_project",
    "pascal_matrix",
    "plus_coordinates",
    "plus_project",
    "r_ring",
    "trunc_exp",
    "trunc_log",
    "unit_basis",
    "val",
    "y_element",
    "y_power",
]
