"""Os homomorfismos phi, omega e Phi = phi - omega em U_{n-1, p^n - p^{n-1}}.

Para gamma em Z[zeta_{n-1}] com gamma = 1 mod p:
    phi(gamma)   = N_{n-1}((gamma - 1)/p) mod p,
    omega(gamma) = g_{n-1}((N_{n-1}(gamma) - 1)/p),
    Phi(gamma)   = phi(gamma) - omega(gamma),
todos com valores em D_{n-1} = D_{0,n-1}. Os três dependem só da classe de gamma
módulo p^2, por isso o domínio é construído com representantes de coeficientes em
[0, p^2): um escalonamento multiplicativo das unidades ciclotômicas reais em
(Z[zeta_{n-1}]/p^2)^*, cujos pivôs com valuação >= p^n - p^{n-1} são os
elementos do domínio.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from sympy import GF
from sympy.polys.matrices import DomainMatrix

from .errors import (
    IncompatibleTargetError,
    NotDivisibleError,
    NotInSpanError,
    NotIntegralError,
    UnsupportedScaleError,
    ValuationRangeError,
)
from .exactpoly import RingId, TowerElem, g_map, mod_p_image
from .fpfilter import FilterRing, FpFilterElem, plus_coordinates
from .logger_config import logger
from .normtower import norm_kl
from .units import cyclotomic_family, eta_unit, lambda_val

if TYPE_CHECKING:
    from collections.abc import Sequence

# Normas inteiras com coeficientes grandes dominam o custo
PHI_MAX_P = 7
PHI_LEVEL = 2


@dataclass(frozen=True)
class PhiInput:
    """Unidade real de Z[zeta_{n-1}] com gamma = 1 mod lambda^{p^n - p^{n-1}}."""

    unit: TowerElem
    n: int
    valuation: int

    @classmethod
    def from_unit(cls, unit: TowerElem, n: int | None = None) -> PhiInput:
        """Valida a pertença ao domínio e guarda a valuação de gamma - 1.

        Raises:
            ValuationRangeError: Se gamma - 1 tem valuação < p^n - p^{n-1}.
        """
        ring = unit.ring
        if not ring.is_cyclotomic:
            msg = f"O domínio de phi vive em Z[zeta_(n-1)], recebido {ring}"
            raise IncompatibleTargetError(msg)
        n = ring.k + 1 if n is None else n
        if n != ring.k + 1:
            msg = f"Unidade de nível {ring.k} não serve para n={n}"
            raise IncompatibleTargetError(msg)
        d = unit - 1
        valuation = 2 * ring.degree if d.is_zero() else lambda_val(d)
        if valuation < ring.degree:
            msg = f"Valuação {valuation} < {ring.degree}: fora de U_(n-1, p^n - p^(n-1))"
            raise ValuationRangeError(msg)
        return cls(unit, n, valuation)


def _unit_of(eps: PhiInput | TowerElem) -> TowerElem:
    return eps.unit if isinstance(eps, PhiInput) else eps


def _div_p(a: TowerElem, what: str) -> TowerElem:
    try:
        return a.exact_div(a.ring.p)
    except NotIntegralError as exc:
        msg = f"{what} não é divisível por p={a.ring.p}"
        raise NotDivisibleError(msg) from exc


def phi_small(eps: PhiInput | TowerElem) -> FpFilterElem:
    """phi(gamma) = N_{n-1}((gamma - 1)/p) mod p em D_{n-1}.

    Args:
        eps: Unidade do domínio (exata ou representante módulo p^2).

    Returns:
        FpFilterElem: Elemento c-invariante de D_{0,n-1}.

    Raises:
        NotDivisibleError: Se gamma - 1 não é divisível por p.
    """
    unit = _unit_of(eps)
    z = _div_p(unit - 1, "gamma - 1")
    return g_map(norm_kl(z, 0))


def omega(eps: PhiInput | TowerElem) -> FpFilterElem:
    """omega(gamma) = g_{n-1}((N_{n-1}(gamma) - 1)/p).

    Raises:
        NotDivisibleError: Se N_{n-1}(gamma) não é 1 módulo p.
    """
    unit = _unit_of(eps)
    norm = norm_kl(unit, 0)
    return g_map(_div_p(norm - 1, "N(gamma) - 1"))


def phi_big(eps: PhiInput | TowerElem) -> FpFilterElem:
    """Phi(gamma) = phi(gamma) - omega(gamma)."""
    return phi_small(eps) - omega(eps)


def order_valuation(a: FpFilterElem) -> int:
    """Valuação (x-1)-ádica em D, com O(0) = N."""
    return a.size if a.is_zero() else a.valuation()


# --- Domínio: escalonamento multiplicativo módulo p^2 ---


def _mul_mod(a: TowerElem, b: TowerElem, m: int) -> TowerElem:
    return (a * b).mod_coeffs(m)


def _pow_mod(a: TowerElem, e: int, m: int) -> TowerElem:
    result = TowerElem.one(a.ring)
    base = a.mod_coeffs(m)
    while e:
        if e & 1:
            result = _mul_mod(result, base, m)
        e >>= 1
        if e:
            base = _mul_mod(base, base, m)
    return result


def _layer(u: TowerElem) -> tuple[int, int] | None:
    """Valuação e coeficiente líder de u - 1 módulo p^2; None se u = 1 mod p^2.

    Abaixo de p^n - p^{n-1} o líder vem da imagem mod p; acima, da imagem de
    (u - 1)/p deslocada de p^n - p^{n-1}.
    """
    ring = u.ring
    target = FilterRing(ring.p, ring.degree)
    d = u - 1
    image = mod_p_image(d, target)
    if not image.is_zero():
        v = image.valuation()
        return v, int(image.coeffs[v])
    z = mod_p_image(d.exact_div(ring.p), target)
    if z.is_zero():
        return None
    w = z.valuation()
    return ring.degree + w, int(z.coeffs[w])


@dataclass
class PhiDomain:
    """Escalonamento das unidades reais 1 mod lambda de Z[zeta_{n-1}] módulo p^2."""

    p: int
    n: int
    pivots: dict[int, TowerElem] = field(default_factory=dict)

    @property
    def ring(self) -> RingId:
        return RingId.cyclotomic(self.p, self.n - 1)

    @property
    def modulus(self) -> int:
        return self.p * self.p

    @property
    def threshold(self) -> int:
        """p^n - p^{n-1}: início do domínio."""
        return self.ring.degree

    @property
    def kernel_start(self) -> int:
        """p^n - 1: a partir daqui phi se anula."""
        return self.p**self.n - 1

    def reduce(self, u: TowerElem) -> TowerElem:
        cur = u.mod_coeffs(self.modulus)
        while (layer := _layer(cur)) is not None:
            v, a = layer
            pivot = self.pivots.get(v)
            if pivot is None:
                break
            cur = _mul_mod(cur, _pow_mod(pivot, (-a) % self.p, self.modulus), self.modulus)
        return cur

    def contains(self, u: TowerElem) -> bool:
        return _layer(self.reduce(u)) is None

    def insert(self, u: TowerElem) -> bool:
        """Insere u e, por fechamento, as suas potências p-ésimas."""
        grew = False
        queue = [u.mod_coeffs(self.modulus)]
        while queue:
            residue = self.reduce(queue.pop())
            layer = _layer(residue)
            if layer is None:
                continue
            v, a = layer
            pivot = residue if a == 1 else _pow_mod(residue, pow(a, -1, self.p), self.modulus)
            self.pivots[v] = pivot
            grew = True
            queue.append(_pow_mod(pivot, self.p, self.modulus))
        return grew

    def domain_reps(self) -> list[tuple[int, TowerElem]]:
        """Pivôs com valuação em [p^n - p^{n-1}, p^n - 1)."""
        return sorted(
            (v, u) for v, u in self.pivots.items() if self.threshold <= v < self.kernel_start
        )

    def kernel_reps(self) -> list[tuple[int, TowerElem]]:
        """Pivôs com valuação em [p^n - 1, 2(p^n - p^{n-1}))."""
        return sorted((v, u) for v, u in self.pivots.items() if v >= self.kernel_start)

    def random_input(self, rng: np.random.Generator, *, kernel: bool = False) -> TowerElem:
        """Produto aleatório de representantes do domínio (ou só do núcleo)."""
        reps = self.kernel_reps() if kernel else self.domain_reps() + self.kernel_reps()
        result = TowerElem.one(self.ring)
        for _, u in reps:
            e = int(rng.integers(0, self.p))
            if e:
                result = _mul_mod(result, _pow_mod(u, e, self.modulus), self.modulus)
        return result


@lru_cache(maxsize=8)
def build_domain(p: int, n: int = PHI_LEVEL) -> PhiDomain:
    """Constrói o domínio de phi/omega/Phi a partir das unidades de nível n-1.

    Os geradores são xi_a^{p-1} (a < p^n/2) e eta(n-1, 0), todos 1 mod lambda; os
    produtos com valuação >= p^n - p^{n-1} aparecem como pivôs do escalonamento.

    Raises:
        UnsupportedScaleError: Fora de p <= 7, n = 2.
    """
    if n != PHI_LEVEL or p > PHI_MAX_P:
        msg = f"phi/omega/Phi suportados apenas para n = {PHI_LEVEL} e p <= {PHI_MAX_P}"
        raise UnsupportedScaleError(msg)
    domain = PhiDomain(p, n)
    family = cyclotomic_family(p, n - 1, p**n)
    family.append(eta_unit(p, n - 1, n - 1, 0))
    for desc in family:
        domain.insert(_pow_mod(desc.exact(), p - 1, domain.modulus))
    reps = domain.domain_reps()
    logger.info(
        f"Domínio de phi p={p}, n={n}: {len(domain.pivots)} pivôs, "
        f"{len(reps)} no domínio, {len(domain.kernel_reps())} no núcleo"
    )
    return domain


def phi_basis(domain: PhiDomain) -> list[tuple[TowerElem, FpFilterElem]]:
    """Pares (representante, phi(representante)) em ordem crescente de valuação."""
    return [(u, phi_small(u)) for _, u in domain.domain_reps()]


def _coordinates(target: FpFilterElem, basis: Sequence[FpFilterElem]) -> list[int]:
    """Coordenadas de target numa base com valuações líderes distintas."""
    p = target.p
    cur = target.coeffs.copy()
    coords = [0] * len(basis)
    for j in sorted(range(len(basis)), key=lambda i: order_valuation(basis[i])):
        b = basis[j]
        w = order_valuation(b)
        if w >= b.size or not cur[w]:
            continue
        c = int(cur[w]) * pow(int(b.coeffs[w]), -1, p) % p
        coords[j] = c
        cur = (cur - c * b.coeffs) % p
    if cur.any():
        msg = "Elemento fora do espaço gerado pela base de phi"
        raise NotInSpanError(msg)
    return coords


def transition_matrix(domain: PhiDomain) -> np.ndarray:
    """Matriz M com Phi(u_i) = sum_j M[i][j]·phi(u_j) sobre GF(p).

    Raises:
        NotInSpanError: Se alguma imagem de Phi sai do espaço gerado.
    """
    pairs = phi_basis(domain)
    basis = [img for _, img in pairs]
    rows = [_coordinates(phi_big(u), basis) for u, _ in pairs]
    return np.array(rows, dtype=np.int64).reshape(len(pairs), len(pairs))


def image_rank(images: Sequence[FpFilterElem]) -> int:
    """Posto sobre GF(p) das coordenadas plus de elementos c-invariantes."""
    if not images:
        return 0
    p = images[0].p
    field_ = GF(p)
    rows = [[field_(int(c)) for c in plus_coordinates(a)] for a in images]
    return DomainMatrix(rows, (len(rows), len(rows[0])), field_).rank()


def target_dimension(p: int, n: int = PHI_LEVEL) -> int:
    """Dimensão de D_{n-1}^+ sobre F_p, (p^{n-1} - 1)/2."""
    return (p ** (n - 1) - 1) // 2


__all__ = [
    "PhiDomain",
    "PhiInput",
    "build_domain",
    "image_rank",
    "omega",
    "order_valuation",
    "phi_basis",
    "phi_big",
    "phi_small",
    "target_dimension",
    "transition_matrix",
]
