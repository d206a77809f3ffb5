"""Estrutura de V_n^+, posições perdidas por faixa, os mapas pi_n e alpha_n e as saídas derivadas.

Dois modelos:
    - KM: R_n = F_p[x]/(x-1)^{p^n} com as imagens das unidades reais de nível n
      (zeta_n -> x̄);
    - tower: D̃_n = D_{0,n} com as imagens g_n das unidades de nível n-1 mergulhadas
      em A_{0,n} (normas inteiras exatas, só em escala pequena).

Nos dois casos o grupo ambiente é a parte plus das 1-unidades e o subgrupo é gerado
pelas projeções plus das imagens normalizadas (tilde) da família de unidades. A
família usada é completa (gera a imagem de todas as unidades reais quando p é
semi-regular), então a saturação é exata; o contador de estabilidade só decide
quando o orçamento de tempo acaba antes do fim da família.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
import math
import time
from typing import TYPE_CHECKING

from .abgroup import EchelonState, PGroupPresentation, layer_structure, quotient_structure
from .errors import (
    IncompatibleTargetError,
    InternalMismatchError,
    InvariantFailureError,
    ParameterRangeError,
    SaturationUnverifiedError,
    UnsupportedScaleError,
)
from .exactpoly import g_map
from .fpfilter import (
    FilterRing,
    FpFilterElem,
    Part,
    d_ring,
    dlog,
    plus_project,
    r_ring,
    unit_basis,
    y_power,
)
from .logger_config import logger
from .normtower import embed_unit
from .settings import load_settings
from .units import (
    UnitDescriptor,
    complete_family,
    cyclotomic_family,
    family_hash,
    tilde_normalize,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

SCHEMA = "kmv/1"
# Modelo tower exige normas inteiras exatas
TOWER_MAX_P = 7


class Model(str, Enum):
    KM = "km"
    TOWER = "tower"


class StructureMethod(str, Enum):
    AUTO = "auto"
    SNF = "snf"
    LAYERS = "layers"


@dataclass(frozen=True)
class VPlusReport:
    """Resultado do cálculo de V_n^+ num dos modelos."""

    p: int
    n: int
    model: Model
    cyclic_orders: tuple[int, ...]
    r: tuple[int, ...]
    missed: dict[int, tuple[int, ...]]
    saturated: bool
    saturation: str
    structure_method: str
    generator_count: int
    exhaustive: bool
    family_hash: str
    pivots: tuple[int, ...] = field(default=(), compare=False, repr=False)
    derived: dict = field(default_factory=dict, compare=False)

    @property
    def order(self) -> int:
        return math.prod(self.cyclic_orders)

    @property
    def is_trivial(self) -> bool:
        return not self.cyclic_orders

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "p": self.p,
            "n": self.n,
            "model": self.model.value,
            "cyclic_orders": list(self.cyclic_orders),
            "r": list(self.r),
            "missed": {str(k): list(v) for k, v in sorted(self.missed.items())},
            "saturated": self.saturated,
            "saturation": self.saturation,
            "structure_method": self.structure_method,
            "generator_count": self.generator_count,
            "exhaustive": self.exhaustive,
            "family_hash": self.family_hash,
            "derived": self.derived,
        }


@dataclass(frozen=True)
class PiKernelReport:
    """Núcleo de pi_n: V_n^+ -> V_{n-1}^+."""

    p: int
    n: int
    model: Model
    order: int
    cyclic_orders: tuple[int, ...]
    expected_order: int
    well_defined: bool

    @property
    def elementary(self) -> bool:
        return all(o == self.p for o in self.cyclic_orders)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "p": self.p,
            "n": self.n,
            "model": self.model.value,
            "order": self.order,
            "cyclic_orders": list(self.cyclic_orders),
            "expected_order": self.expected_order,
            "elementary": self.elementary,
            "well_defined": self.well_defined,
        }


@dataclass
class _Pipeline:
    """Estado intermediário guardado para os mapas e o núcleo de pi."""

    ring: FilterRing
    family: list[UnitDescriptor]
    images: list[FpFilterElem]
    state: EchelonState
    report: VPlusReport


def model_ring(p: int, n: int, model: Model | str) -> FilterRing:
    """Anel ambiente do modelo: R_n (KM) ou D_{0,n} (tower)."""
    model = Model(model)
    if n < 1:
        msg = f"O nível n deve ser >= 1, recebido {n}"
        raise ParameterRangeError(msg)
    return r_ring(p, n) if model is Model.KM else d_ring(p, 0, n)


def generator_family(p: int, n: int, model: Model | str) -> list[UnitDescriptor]:
    """Família de unidades cujas imagens geram o subgrupo de V_n^+.

    KM: xi_a de nível n com a < p^n/2 e eta(n, 0). Tower: xi_a de nível n-1 com
    a < p^n/2 (vazia para p = 3, n = 1).
    """
    model = Model(model)
    model_ring(p, n, model)
    if model is Model.KM:
        return complete_family(p, n)
    return cyclotomic_family(p, n - 1, p**n)


def _check_scale(p: int, n: int, model: Model) -> None:
    if model is Model.TOWER and p > TOWER_MAX_P and n > 1:
        msg = f"Modelo tower suportado apenas para p <= {TOWER_MAX_P} ou n = 1 (p={p}, n={n})"
        raise UnsupportedScaleError(msg)


def generator_image(desc: UnitDescriptor, ring: FilterRing, model: Model) -> FpFilterElem:
    """Imagem plus normalizada de uma unidade no anel do modelo."""
    if model is Model.KM:
        image = desc.image(ring)
    else:
        image = g_map(embed_unit(desc.exact(), 0))
    return plus_project(tilde_normalize(image))


def strip_of(m: int, p: int) -> int:
    """Índice k da faixa p^k+1, ..., p^{k+1}-1 que contém m."""
    k = 0
    while p ** (k + 1) < m:
        k += 1
    return k


def _missed_from_pivots(p: int, n: int, pivots: Sequence[int]) -> dict[int, tuple[int, ...]]:
    """Posições pares em [2, p^n - 3] sem pivô, agrupadas por faixa."""
    achieved = set(pivots)
    missed: dict[int, list[int]] = {k: [] for k in range(n)}
    for m in range(2, p**n - 2, 2):
        if m not in achieved:
            missed[strip_of(m, p)].append(m)
    return {k: tuple(v) for k, v in missed.items()}


def r_from_structure(p: int, n: int, orders: Sequence[int]) -> tuple[int, ...]:
    """r_0, ..., r_{n-1} a partir de V_n^+ = sum_j (Z/p^{n-j})^{r_j - r_{j-1}}.

    Raises:
        InvariantFailureError: Se aparece uma ordem fora de {p, ..., p^n}.
    """
    counts = [0] * n
    for order in orders:
        i = next((i for i in range(n) if p ** (n - i) == order), None)
        if i is None:
            msg = f"Ordem cíclica {order} fora de {{p, ..., p^{n}}}"
            raise InvariantFailureError(msg, anchor="forma de V_n^+ como soma de Z/p^(n-j)")
        counts[i] += 1
    r, acc = [], 0
    for c in counts:
        acc += c
        r.append(acc)
    return tuple(r)


def derived_outputs(p: int, n: int, orders: Sequence[int], r: Sequence[int]) -> dict:
    """Grupo de classes e fórmulas de Picard derivados de V_n^+.

    Valem condicionalmente à dualidade entre V_n^+ e Cl^(p) Q(zeta_{n-1}) para p
    semi-regular; não são calculados de forma independente.
    """
    r0 = r[0] if r else 0
    derived: dict = {
        "conditional": True,
        "class_group": {
            "field": f"Q(zeta_{n - 1})",
            "cyclic_orders": list(orders),
            "note": "dual de V_n^+ (condicional, p semi-regular)",
        },
        "prediction": {
            "hypothesis": "lambda = r(p)",
            "cyclic_orders": [p**n] * r0,
            "matches": list(orders) == [p**n] * r0,
        },
    }
    if n == 1:
        derived["pic_formula"] = {
            "group": f"Pic^(p) Z C_{p}",
            "formula": "(Z/pZ)^r(p)",
            "exponents": {str(p): r0},
            "cyclic_orders": [p] * r0,
        }
    elif n == 2:  # noqa: PLR2004
        small = (p - 3) // 2 + r[1] - r0
        derived["pic_formula"] = {
            "group": f"Pic^(p) Z C_{p**2}",
            "formula": "(Z/pZ)^((p-3)/2 + r_1 - r(p)) + (Z/p^2Z)^(2r(p))",
            "exponents": {str(p): small, str(p**2): 2 * r0},
            "cyclic_orders": [p**2] * (2 * r0) + [p] * small,
        }
    return derived


def _structure(
    state: EchelonState,
    images: Sequence[FpFilterElem],
    method: StructureMethod,
    snf_limit: int,
) -> tuple[tuple[int, ...], str]:
    ring = state.ring
    basis = unit_basis(ring.p, ring.size, Part.PLUS)
    if method is StructureMethod.AUTO:
        method = StructureMethod.SNF if len(basis.entries) <= snf_limit else StructureMethod.LAYERS
    if method is StructureMethod.SNF:
        ambient = PGroupPresentation(ring.p, basis.orders)
        vectors = [dlog(u, basis) for u in images]
        return quotient_structure(ambient, vectors), method.value
    return layer_structure(state, basis.elements()), method.value


@lru_cache(maxsize=32)
def _pipeline(  # noqa: PLR0913
    p: int,
    n: int,
    model: Model,
    window: int | None,
    budget_secs: float,
    method: StructureMethod,
    snf_limit: int,
) -> _Pipeline:
    _check_scale(p, n, model)
    ring = model_ring(p, n, model)
    family = generator_family(p, n, model)
    window = window or 2 * ring.size
    logger.info(f"V_{n}^+ p={p} ({model.value}): {len(family)} unidades em {ring}")

    state = EchelonState(ring)
    images: list[FpFilterElem] = []
    deadline = time.monotonic() + budget_secs
    stable = 0
    completed = True
    for desc in family:
        if time.monotonic() > deadline:
            completed = False
            logger.warning(f"Orçamento de {budget_secs}s esgotado após {len(images)} unidades")
            break
        image = generator_image(desc, ring, model)
        images.append(image)
        stable = 0 if state.insert(image) else stable + 1
    if completed:
        saturation = "exhaustive"
    elif len(state.pivot_set()) == ring.plus_rank:
        saturation = "full"
    elif stable >= window:
        saturation = "window"
    else:
        saturation = "none"

    pivots = state.pivot_set()
    missed = _missed_from_pivots(p, n, pivots)
    fhash = family_hash(family)
    if saturation == "none":
        partial = VPlusReport(
            p,
            n,
            model,
            (),
            (),
            missed,
            saturated=False,
            saturation=saturation,
            structure_method="none",
            generator_count=len(images),
            exhaustive=completed,
            family_hash=fhash,
            pivots=pivots,
        )
        msg = f"Pivôs não estabilizaram ({stable} < {window}) para p={p}, n={n}"
        raise SaturationUnverifiedError(msg, report=partial)

    orders, used = _structure(state, images, method, snf_limit)
    quotient_log = ring.plus_rank - len(pivots)
    if math.prod(orders) != p**quotient_log:
        msg = f"|V_n^+| = {math.prod(orders)} difere de p^{quotient_log} pela contagem de pivôs"
        raise InternalMismatchError(msg)
    r = r_from_structure(p, n, orders)
    if any(a > b for a, b in zip(r, r[1:])):
        msg = f"Sequência r = {list(r)} não é não decrescente"
        raise InvariantFailureError(msg, anchor="r_k não decrescente")
    for k in range(n):
        if len(missed[k]) != r[k]:
            msg = f"Faixa {k}: {len(missed[k])} posições perdidas, r_{k} = {r[k]}"
            raise InvariantFailureError(msg, anchor="contagem de posições perdidas por faixa")

    report = VPlusReport(
        p,
        n,
        model,
        orders,
        r,
        missed,
        saturated=True,
        saturation=saturation,
        structure_method=used,
        generator_count=len(images),
        exhaustive=completed,
        family_hash=fhash,
        pivots=pivots,
        derived=derived_outputs(p, n, orders, r),
    )
    logger.info(f"V_{n}^+ p={p} ({model.value}) = {list(orders) or 'trivial'}, r = {list(r)}")
    return _Pipeline(ring, family, images, state, report)


def _run(
    p: int,
    n: int,
    model: Model | str,
    window: int | None,
    budget_secs: float | None,
    method: StructureMethod | str,
) -> _Pipeline:
    settings = load_settings()
    return _pipeline(
        p,
        n,
        Model(model),
        window if window is not None else settings.saturation_window,
        budget_secs if budget_secs is not None else settings.budget_secs,
        StructureMethod(method),
        settings.snf_limit,
    )


def v_plus(
    p: int,
    n: int,
    model: Model | str = Model.KM,
    *,
    window: int | None = None,
    budget_secs: float | None = None,
    method: StructureMethod | str = StructureMethod.AUTO,
) -> VPlusReport:
    """Estrutura de V_n^+ num dos modelos.

    Args:
        p (int): Primo ímpar (semi-regular por hipótese).
        n (int): Nível, n >= 1.
        model: Model.KM ou Model.TOWER.
        window (int, optional): Janela de estabilidade W (padrão 2·N).
        budget_secs (float, optional): Orçamento de tempo para a inserção dos geradores.
        method: "auto", "snf" ou "layers".

    Returns:
        VPlusReport: Ordens cíclicas, r_k, posições perdidas e saídas derivadas.

    Raises:
        UnsupportedScaleError: Modelo tower fora da escala suportada.
        SaturationUnverifiedError: Orçamento esgotado sem estabilidade dos pivôs.
        InvariantFailureError: Contagem por faixa ou monotonicidade de r violadas.
    """
    return _run(p, n, model, window, budget_secs, method).report


def missed_places(
    p: int,
    level: int,
    model: Model | str = Model.KM,
    *,
    window: int | None = None,
    budget_secs: float | None = None,
) -> dict[int, tuple[int, ...]]:
    """Posições perdidas no nível `level`, agrupadas por faixa.

    Calculadas pelos pivôs de V_{level+1}^+: uma posição par 2k <= p^{level+1}-3 é
    perdida quando nenhum pivô tem valuação 2k. A posição de fronteira p^{level+1}-1
    não é varrida.
    """
    if level < 0:
        msg = f"O nível deve ser >= 0, recebido {level}"
        raise ParameterRangeError(msg)
    return v_plus(p, level + 1, model, window=window, budget_secs=budget_secs).missed


def _previous_ring(ring: FilterRing) -> FilterRing:
    p, size = ring.p, ring.size
    n = round(math.log(size + 1, p))
    if p**n == size + 1 and n >= 2:  # noqa: PLR2004
        return d_ring(p, 0, n - 1)
    n = round(math.log(size, p))
    if p**n == size and n >= 2:  # noqa: PLR2004
        return r_ring(p, n - 1)
    msg = f"{ring} não é R_n nem D_{{0,n}} com n >= 2"
    raise ParameterRangeError(msg)


def pi_map(v: FpFilterElem, target: FilterRing | None = None) -> FpFilterElem:
    """pi_n: truncação de um representante de V_n^+ para o anel de nível n-1.

    Args:
        v (FpFilterElem): Representante em R_n ou D_{0,n}, n >= 2.
        target (FilterRing, optional): Anel de destino (inferido se omitido).

    Returns:
        FpFilterElem: O representante truncado.
    """
    return v.truncate(target or _previous_ring(v.ring))


def _next_ring(ring: FilterRing) -> FilterRing:
    p, size = ring.p, ring.size
    n = round(math.log(size, p))
    if p**n == size:
        return r_ring(p, n + 1)
    n = round(math.log(size + 1, p))
    if p**n == size + 1:
        return d_ring(p, 0, n + 1)
    msg = f"{ring} não é R_n nem D_{{0,n}}"
    raise ParameterRangeError(msg)


def alpha_map(v: FpFilterElem, target: FilterRing | None = None) -> FpFilterElem:
    """alpha_n: x -> x^p sobre representantes, de nível n-1 para nível n."""
    target = target or _next_ring(v.ring)
    if target.size <= v.size:
        msg = f"alpha leva {v.ring} para um anel maior, recebido {target}"
        raise IncompatibleTargetError(msg)
    return v.spread(target)


def quotient_representatives(
    p: int, n: int, model: Model | str = Model.KM
) -> dict[int, FpFilterElem]:
    """Representantes 1 + y^m de V_n^+ para cada posição perdida m."""
    pipe = _run(p, n, model, None, None, StructureMethod.AUTO)
    one = FpFilterElem.one(pipe.ring)
    return {
        m: one + y_power(pipe.ring, m)
        for places in pipe.report.missed.values()
        for m in places
    }


def is_trivial_class(v: FpFilterElem, p: int, n: int, model: Model | str = Model.KM) -> bool:
    """v (1-unidade plus) é trivial em V_n^+, isto é, pertence à imagem das unidades."""
    pipe = _run(p, n, model, None, None, StructureMethod.AUTO)
    if v.ring != pipe.ring:
        msg = f"Representante em {v.ring}, V_{n}^+ vive em {pipe.ring}"
        raise IncompatibleTargetError(msg)
    return pipe.state.contains(v)


def pi_kernel(p: int, n: int, model: Model | str = Model.KM) -> PiKernelReport:
    """Ordem e estrutura do núcleo de pi_n: V_n^+ -> V_{n-1}^+.

    O núcleo é gerado pelas classes de 1 + y^m, m par em [N', N), onde N' é o
    módulo do nível n-1. Verifica também que as imagens truncadas dos geradores de
    nível n caem no subgrupo de nível n-1 (pi bem definido).

    Raises:
        ParameterRangeError: Se n < 2.
        InvariantFailureError: Se pi não é bem definido ou a ordem não confere.
    """
    model = Model(model)
    if n < 2:  # noqa: PLR2004
        msg = f"pi_n exige n >= 2, recebido {n}"
        raise ParameterRangeError(msg)
    upper = _run(p, n, model, None, None, StructureMethod.AUTO)
    lower = _run(p, n - 1, model, None, None, StructureMethod.AUTO)
    well_defined = all(lower.state.contains(pi_map(u, lower.ring)) for u in upper.images)
    if not well_defined:
        msg = f"Imagens truncadas de nível {n} fora do subgrupo de nível {n - 1}"
        raise InvariantFailureError(msg, anchor="pi_n bem definido")
    one = FpFilterElem.one(upper.ring)
    start = lower.ring.size + lower.ring.size % 2
    kernel_gens = [one + y_power(upper.ring, m) for m in range(start, upper.ring.size, 2)]
    orders = layer_structure(upper.state, kernel_gens)
    r_top = upper.report.r[n - 1]
    expected = p**r_top
    order = math.prod(orders)
    logger.info(f"ker pi_{n} p={p}: {list(orders) or 'trivial'} (esperado p^{r_top})")
    if order != expected:
        msg = f"|ker pi_{n}| = {order}, esperado p^r_{n - 1} = {expected}"
        raise InvariantFailureError(msg, anchor="ordem do núcleo de pi_n")
    check_order_recursion(upper.report, lower.report)
    return PiKernelReport(p, n, model, order, orders, expected, well_defined)


def check_order_recursion(upper: VPlusReport, lower: VPlusReport) -> None:
    """|V_n^+| = |V_{n-1}^+|·p^{r_{n-1}}, com r_0..r_{n-2} iguais nos dois níveis.

    Raises:
        ParameterRangeError: Se os relatórios não são de níveis consecutivos.
        InvariantFailureError: Se a recursão ou o prefixo de r não conferem.
    """
    n, p = upper.n, upper.p
    if lower.n != n - 1 or lower.p != p:
        msg = f"Relatórios de níveis {lower.n} e {n} não são consecutivos"
        raise ParameterRangeError(msg)
    if upper.r[: n - 1] != lower.r:
        msg = f"r de V_{n}^+ = {list(upper.r)} não estende r de V_{n - 1}^+ = {list(lower.r)}"
        raise InvariantFailureError(msg, anchor="r_k independente do nível")
    if upper.order != lower.order * p ** upper.r[n - 1]:
        msg = f"|V_{n}^+| = {upper.order} != |V_{n - 1}^+|·p^r_{n - 1} = {lower.order}·{p}^{upper.r[n - 1]}"
        raise InvariantFailureError(msg, anchor="|V_n^+| = |V_(n-1)^+|·p^(r_(n-1))")


def alpha_image(p: int, n: int, model: Model | str = Model.KM) -> tuple[int, ...]:
    """Decomposição cíclica da imagem de alpha_n: V_{n-1}^+ -> V_n^+.

    A imagem é gerada por alpha dos representantes 1 + y^m de V_{n-1}^+; alpha é
    injetivo exatamente quando as ordens coincidem com as de V_{n-1}^+.

    Raises:
        ParameterRangeError: Se n < 2.
    """
    model = Model(model)
    if n < 2:  # noqa: PLR2004
        msg = f"alpha_n exige n >= 2, recebido {n}"
        raise ParameterRangeError(msg)
    upper = _run(p, n, model, None, None, StructureMethod.AUTO)
    reps = quotient_representatives(p, n - 1, model)
    images = [alpha_map(v, upper.ring) for v in reps.values()]
    orders = layer_structure(upper.state, images)
    logger.info(f"alpha_{n}(V_{n - 1}^+) p={p}: {list(orders) or 'trivial'}")
    return orders


def v_minus(p: int, n: int) -> tuple[int, ...]:
    """Parte minus de V_n no modelo KM, G/(G^+·<x̄>) com G as 1-unidades de R_n.

    Não é comparada ao V_n^- do teorema de Kervaire-Murthy (grupo diferente).
    """
    ring = r_ring(p, n)
    base = EchelonState(ring)
    base.insert_all(unit_basis(p, ring.size, Part.PLUS).elements())
    base.insert(FpFilterElem.gen_x(ring))
    orders = layer_structure(base, unit_basis(p, ring.size, Part.FULL).elements())
    logger.info(f"V_{n}^- p={p}: {list(orders) or 'trivial'}")
    return orders


def clear_cache() -> None:
    """Descarta os resultados intermediários memorizados."""
    _pipeline.cache_clear()


__all__ = [
    "SCHEMA",
    "Model",
    "PiKernelReport",
    "StructureMethod",
    "VPlusReport",
    "alpha_image",
    "alpha_map",
    "check_order_recursion",
    "clear_cache",
    "derived_outputs",
    "generator_family",
    "generator_image",
    "is_trivial_class",
    "missed_places",
    "model_ring",
    "pi_kernel",
    "pi_map",
    "quotient_representatives",
    "r_from_structure",
    "strip_of",
    "v_minus",
    "v_plus",
]
