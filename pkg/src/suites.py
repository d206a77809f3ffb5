"""Suítes de verificação: cada uma percorre as propriedades de um módulo num primo p.

Cada verificação recebe um gerador próprio derivado da semente da suíte
(`numpy.random.SeedSequence.spawn`), de modo que o resultado é determinístico dado
(suíte, p, semente, tentativas). Falhas levam uma âncora descritiva da propriedade.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
import itertools
import math

import numpy as np
from sympy import Matrix

from .abgroup import EchelonState, PGroupPresentation, quotient_structure, snf
from .bernoulli import bernoulli_mod_p, irregularity
from .errors import InvariantFailureError, KmvError, UnsupportedScaleError
from .exactpoly import RingId, TowerElem, f_map, g_map
from .fpfilter import (
    FilterRing,
    FpFilterElem,
    Part,
    d_ring,
    dlog,
    r_ring,
    trunc_exp,
    trunc_log,
    unit_basis,
)
from .logger_config import logger
from .normtower import embed_unit, norm_det, norm_kl, usual_norm
from .phimaps import (
    PHI_MAX_P,
    build_domain,
    image_rank,
    omega,
    order_valuation,
    phi_big,
    phi_small,
    target_dimension,
    transition_matrix,
)
from .units import (
    cyclotomic_family,
    eta_unit,
    in_filtration,
    lambda_val,
    tilde_normalize,
)
from .vplus import (
    SCHEMA,
    TOWER_MAX_P,
    Model,
    alpha_image,
    check_order_recursion,
    missed_places,
    pi_kernel,
    v_plus,
)

DEFAULT_TRIALS = 50
# Aritmética exata (normas, unidades) só em escala pequena
EXACT_MAX_P = 7
EXHAUSTIVE_EXPLOG_MAX_P = 7


class Status(str, Enum):
    PASS = "pass"  # noqa: S105
    FAIL = "fail"
    SKIP = "skip"


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    status: Status
    trials: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        data = {
            "name": self.name,
            "anchor": self.anchor,
            "status": self.status.value,
            "trials": self.trials,
        }
        if self.detail:
            data["detail"] = self.detail
        return data


@dataclass
class SuiteReport:
    """Resultado de uma suíte num primo."""

    suite: str
    p: int
    seed: int
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status is not Status.FAIL for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.status is Status.FAIL]

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "suite": self.suite,
            "p": self.p,
            "seed": self.seed,
            "passed": self.passed,
            "results": [r.to_json() for r in self.results],
        }


class _Failure(Exception):
    """Uma verificação encontrou um contraexemplo."""


def _expect(condition: bool, detail: str) -> None:  # noqa: FBT001
    if not condition:
        raise _Failure(detail)


def _random_elem(ring: RingId, rng: np.random.Generator, bound: int = 3) -> TowerElem:
    return TowerElem.from_coeffs(ring, rng.integers(-bound, bound + 1, size=ring.degree).tolist())


def _random_one_unit(ring: FilterRing, rng: np.random.Generator) -> FpFilterElem:
    coeffs = rng.integers(0, ring.p, size=ring.size)
    coeffs[0] = 1
    return FpFilterElem(ring, coeffs)


def _exact_levels(p: int) -> list[int]:
    if p > EXACT_MAX_P:
        msg = f"Aritmética exata limitada a p <= {EXACT_MAX_P}"
        raise UnsupportedScaleError(msg)
    return [1, 2] if p <= 5 else [1]  # noqa: PLR2004


# --- normas ---


def _check_norm_multiplicative(p: int, rng: np.random.Generator, trials: int) -> int:
    for level in _exact_levels(p):
        ring = RingId.cyclotomic(p, level)
        for _ in range(trials):
            a, b = _random_elem(ring, rng), _random_elem(ring, rng)
            k = int(rng.integers(0, level))
            _expect(norm_kl(a * b, k) == norm_kl(a, k) * norm_kl(b, k), f"N(ab) != N(a)N(b), k={k}")
            _expect(norm_det(a * b) == norm_det(a) * norm_det(b), "norma determinante")
    return trials * len(_exact_levels(p))


def _check_norm_additive_mod_p(p: int, rng: np.random.Generator, trials: int) -> int:
    for level in _exact_levels(p):
        ring = RingId.cyclotomic(p, level)
        for _ in range(trials):
            a, b = _random_elem(ring, rng), _random_elem(ring, rng)
            lhs = g_map(norm_det(a + b))
            _expect(lhs == g_map(norm_det(a)) + g_map(norm_det(b)), "N(a+b) != N(a)+N(b) mod p")
    return trials * len(_exact_levels(p))


def _check_norm_generator(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    count = 0
    for level in _exact_levels(p):
        zeta = TowerElem.gen(RingId.cyclotomic(p, level))
        for k in range(level):
            _expect(norm_kl(zeta, k) == TowerElem.gen(RingId(p, k, level - k)), f"N(zeta) k={k}")
            count += 1
    return count


def _check_norm_mod_p_image(p: int, rng: np.random.Generator, trials: int) -> int:
    for level in _exact_levels(p):
        ring = RingId.cyclotomic(p, level)
        for _ in range(trials):
            a = _random_elem(ring, rng)
            k = int(rng.integers(0, level))
            _expect(g_map(norm_kl(a, k)) == f_map(a, k), f"g(N(a)) != f(a), k={k}")
    return trials * len(_exact_levels(p))


def _check_norm_square(p: int, rng: np.random.Generator, trials: int) -> int:
    levels = [lv for lv in _exact_levels(p) if lv >= 2]  # noqa: PLR2004
    count = 0
    for level in levels:
        ring = RingId.cyclotomic(p, level)
        for _ in range(trials):
            a = _random_elem(ring, rng)
            for k in range(1, level):
                lhs = norm_det(norm_kl(a, k))
                rhs = norm_kl(usual_norm(a, 1), k - 1)
                _expect(lhs == rhs, f"quadrado de normas não comuta, k={k}")
            count += 1
    return count


# --- unidades ---


def _check_eta_valuations(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    count = 0
    for level in _exact_levels(p):
        for s in range(1, level + 1):
            for k in range(s):
                eps = eta_unit(p, level, s, k).exact()
                v = lambda_val(eps - 1)
                _expect(v == p**s - p**k, f"eta({s},{k}) nível {level}: valuação {v}")
                _expect(eps.conj() == eps, f"eta({s},{k}) não é real")
                count += 1
    return count


def _check_top_layer_unit(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    count = 0
    for n in (1, 2):
        ring = r_ring(p, n)
        u = eta_unit(p, n, n, 0).image(ring)
        expected = FpFilterElem.one(ring) + FpFilterElem.t_power(ring, p**n - 1)
        _expect(u == expected, f"eps != 1 + (x-1)^(p^n - 1) em R_{n}")
        count += 1
    return count


def _check_even_valuations(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    n = 2 if p <= 13 else 1  # noqa: PLR2004
    ring = r_ring(p, n)
    family = cyclotomic_family(p, n, p**n)
    for desc in family:
        u = tilde_normalize(desc.image(ring))
        if not u.is_one():
            v = (u - 1).valuation()
            _expect(v % 2 == 0, f"{desc}: valuação ímpar {v}")
    return len(family)


def _base_units(p: int, level: int) -> list[TowerElem]:
    """eta(s,k), xi_a^(p-1) e -zeta no nível dado."""
    ring = RingId.cyclotomic(p, level)
    base = [eta_unit(p, level, s, j).exact() for s in range(1, level + 1) for j in range(s)]
    base += [d.exact() ** (p - 1) for d in cyclotomic_family(p, level, p ** (level + 1))[:3]]
    return base or [TowerElem.gen(ring) * -1]


def _embedding_pairs(p: int) -> tuple[tuple[int, int], ...]:
    if p > EXACT_MAX_P:
        msg = f"Núcleo de g∘phi verificado só para p <= {EXACT_MAX_P}"
        raise UnsupportedScaleError(msg)
    return ((0, 1), (1, 1), (0, 2)) if p <= 5 else ((0, 1), (1, 1))  # noqa: PLR2004


def _check_embedding_kernel(p: int, rng: np.random.Generator, trials: int) -> int:
    count = 0
    for k, l in _embedding_pairs(p):  # noqa: E741
        level = k + l - 1
        ring = RingId.cyclotomic(p, level)
        threshold = p ** (k + l) - p**k
        powers = [[u ** (p**j) for j in range(3)] for u in _base_units(p, level)]
        for _ in range(trials):
            eps = TowerElem.one(ring)
            for row in powers:
                if rng.integers(0, 2):
                    eps = eps * row[int(rng.integers(0, 3))]
            lhs = g_map(embed_unit(eps, k)).is_one()
            _expect(lhs == in_filtration(eps, threshold), f"núcleo de g∘phi, (k,l)=({k},{l})")
            count += 1
    return count


def _check_filtration(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    count = 0
    for n in _exact_levels(p):
        ring = RingId.cyclotomic(p, n - 1)
        units = [TowerElem.gen(ring), *_base_units(p, n - 1)]
        units += [u**p for u in units] + [u ** (p * p) for u in units]
        for eps in units:
            image = g_map(embed_unit(eps, 0))
            size = image.ring.size
            v = size if image.is_one() else (image - 1).valuation()
            for s in range(1, size + 1):
                _expect(in_filtration(eps, s) == (v >= s), f"filtração em s={s}, n={n}, v={v}")
            count += 1
    return count


# --- grupos ---


def _check_dlog_roundtrip(p: int, rng: np.random.Generator, trials: int) -> int:
    size = min(p * p, 50)
    basis = unit_basis(p, size, Part.FULL)
    for _ in range(trials):
        exps = [int(rng.integers(0, o)) for o in basis.orders]
        _expect(list(dlog(basis.evaluate(exps), basis)) == exps, "dlog(prod b^e) != e")
    return trials


def _check_frobenius(p: int, rng: np.random.Generator, trials: int) -> int:
    ring = FilterRing(p, min(p * p, 50))
    for _ in range(trials):
        u = _random_one_unit(ring, rng)
        _expect(u**p == u.frobenius(), "u^p != Frobenius(u)")
    return trials


def _subgroup_order(ambient: PGroupPresentation, gens: list[list[int]]) -> int:
    """Ordem de <gens> por fechamento em largura."""
    zero = (0,) * ambient.rank
    seen = {zero}
    frontier = [zero]
    while frontier:
        v = frontier.pop()
        for g in gens:
            w = tuple((a + b) % o for a, b, o in zip(v, g, ambient.orders))
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return len(seen)


def _check_snf(p: int, rng: np.random.Generator, trials: int) -> int:
    size = 6
    for _ in range(trials):
        m = Matrix(rng.integers(-4, 5, size=(size, size)).tolist())
        d, u, v = snf(m)
        _expect(u * m * v == d, "U·M·V != D")
        diag = [abs(int(d[i, i])) for i in range(size)]
        _expect(math.prod(diag) == abs(int(m.det())), "produto da diagonal != |det|")
        _expect(
            all(b == 0 or (a and b % a == 0) for a, b in zip(diag, diag[1:])),
            "diagonal sem cadeia de divisibilidade",
        )
    ambient = PGroupPresentation(p, (p * p, p) if p <= EXACT_MAX_P else (p, p))
    brute = min(trials, 10)
    for _ in range(brute):
        gens = [[int(rng.integers(0, o)) for o in ambient.orders] for _ in range(size)]
        gens = [g for g in gens if rng.integers(0, 3)]
        quotient = quotient_structure(ambient, gens)
        order = _subgroup_order(ambient, gens)
        _expect(math.prod(quotient) * order == ambient.group_order, f"|quociente| errado para {gens}")
    _expect(quotient_structure(ambient, []) == tuple(sorted(ambient.orders, reverse=True)), "quociente pelo trivial")
    return trials + brute + 1


def _check_echelon_order(p: int, rng: np.random.Generator, trials: int) -> int:
    ring = FilterRing(p, min(2 * p, 30))
    gens = [_random_one_unit(ring, rng) for _ in range(4)]
    reference = EchelonState(ring)
    reference.insert_all(gens)
    for _ in range(trials):
        state = EchelonState(ring)
        state.insert_all(gens[int(i)] for i in rng.permutation(len(gens)))
        _expect(state.pivot_set() == reference.pivot_set(), "pivôs dependem da ordem")
    return trials


def _check_explog(p: int, rng: np.random.Generator, trials: int) -> int:
    ring = d_ring(p, 0, 1)
    if ring.size < 2:  # noqa: PLR2004
        return 0
    if p <= EXHAUSTIVE_EXPLOG_MAX_P:
        tails = itertools.product(range(p), repeat=ring.size - 1)
    else:
        tails = (rng.integers(0, p, size=ring.size - 1).tolist() for _ in range(trials))
    count = 0
    for tail in tails:
        u = FpFilterElem(ring, [1, *tail])
        _expect(trunc_exp(trunc_log(u)) == u, f"E(L(u)) != u para {u!r}")
        count += 1
    return count


# --- V_n^+ ---


def _check_bernoulli_dual(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    return len(bernoulli_mod_p(p))


def _check_missed_bernoulli(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    missed = missed_places(p, 0).get(0, ())
    indices = irregularity(p).indices
    _expect(tuple(missed) == indices, f"posições perdidas {list(missed)} != índices {list(indices)}")
    return 1


def _check_regular_trivial(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    regular = irregularity(p).r == 0
    levels = (1, 2) if p <= 13 else (1,)  # noqa: PLR2004
    for n in levels:
        report = v_plus(p, n)
        _expect(report.is_trivial == regular, f"V_{n}^+ trivial={report.is_trivial}, regular={regular}")
    return len(levels)


def _check_model_agreement(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    # tower em n = 2 fica caro a partir de p = 7
    levels = [1, 2] if p < TOWER_MAX_P else [1]
    for n in levels:
        km = v_plus(p, n, Model.KM)
        tower = v_plus(p, n, Model.TOWER)
        _expect(km.cyclic_orders == tower.cyclic_orders, f"KM e tower divergem em n={n}")
    return len(levels)


def _recursion_scale(p: int) -> None:
    if p > 13:  # noqa: PLR2004
        msg = "V_2^+ verificado só para p <= 13"
        raise UnsupportedScaleError(msg)


def _check_pi_kernel(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    _recursion_scale(p)
    report = pi_kernel(p, 2)
    _expect(report.elementary, f"núcleo de pi_2 não elementar: {list(report.cyclic_orders)}")
    _expect(report.order == report.expected_order, f"|ker pi_2| = {report.order} != {report.expected_order}")
    return 1


def _check_order_recursion(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    _recursion_scale(p)
    try:
        check_order_recursion(v_plus(p, 2), v_plus(p, 1))
    except InvariantFailureError as e:
        raise _Failure(str(e)) from e
    return 1


def _check_alpha_injective(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    _recursion_scale(p)
    image = alpha_image(p, 2)
    lower = v_plus(p, 1)
    _expect(image == lower.cyclic_orders, f"alpha(V_1^+) = {list(image)}, V_1^+ = {list(lower.cyclic_orders)}")
    return 1


# --- phi, omega, Phi ---


def _phi_domain(p: int):  # noqa: ANN202
    if p > PHI_MAX_P:
        msg = f"phi/omega/Phi limitados a p <= {PHI_MAX_P}"
        raise UnsupportedScaleError(msg)
    return build_domain(p)


def _check_phi_homomorphism(p: int, rng: np.random.Generator, trials: int) -> int:
    domain = _phi_domain(p)
    m = domain.modulus
    for _ in range(trials):
        a, b = domain.random_input(rng), domain.random_input(rng)
        ab = (a * b).mod_coeffs(m)
        for name, fn in (("phi", phi_small), ("omega", omega), ("Phi", phi_big)):
            _expect(fn(ab) == fn(a) + fn(b), f"{name} não é homomorfismo")
    return trials


def _check_phi_kernel(p: int, rng: np.random.Generator, trials: int) -> int:
    domain = _phi_domain(p)
    count = 0
    for _, u in domain.kernel_reps():
        _expect(phi_big(u).is_zero() and phi_small(u).is_zero(), "phi não se anula em U_(1,p^2-1)")
        count += 1
    for _ in range(trials):
        u = domain.random_input(rng, kernel=True)
        _expect(phi_big(u).is_zero(), "Phi não se anula num produto do núcleo")
        count += 1
    return count


def _check_phi_interlacing(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    domain = _phi_domain(p)
    reps = domain.domain_reps()
    size = p ** (domain.n - 1) - 1
    for v, u in reps:
        w = order_valuation(phi_small(u))
        _expect(w == v - domain.threshold, f"O(phi) = {w} para valuação {v}")
        _expect(0 <= w < size, f"O(phi) = {w} fora de [0, {size})")
        _expect(order_valuation(omega(u)) >= size, "O(omega) abaixo de p^(n-1) - 1")
        _expect(order_valuation(phi_big(u)) == w, "O(Phi) != O(phi)")
    return len(reps)


def _check_phi_surjective(p: int, rng: np.random.Generator, trials: int) -> int:  # noqa: ARG001
    domain = _phi_domain(p)
    images = [phi_big(u) for _, u in domain.domain_reps()]
    rank = image_rank(images)
    _expect(rank == target_dimension(p, domain.n), f"posto {rank} != dim D^+")
    m = transition_matrix(domain)
    k = m.shape[0]
    _expect(bool(np.all(np.diag(m) == 1)), "diagonal da matriz de transição != 1")
    _expect(not np.tril(m, -1).any(), "matriz de transição não é triangular superior")
    return k + 1


Check = Callable[[int, np.random.Generator, int], int]

SUITES: dict[str, list[tuple[str, str, Check]]] = {
    "bernoulli": [
        ("bernoulli_dual", "Bernoulli por recorrência e por somas de potências", _check_bernoulli_dual),
    ],
    "norms": [
        ("norm_multiplicative", "multiplicatividade de N e N_{k,l}", _check_norm_multiplicative),
        ("norm_additive_mod_p", "aditividade de N módulo p", _check_norm_additive_mod_p),
        ("norm_generator", "N_{k,l}(zeta) = x", _check_norm_generator),
        ("norm_mod_p_image", "g(N_{k,l}(a)) = f(a)", _check_norm_mod_p_image),
        ("norm_square", "N∘N_{k,l} = N_{k-1,l}∘Ñ", _check_norm_square),
    ],
    "units": [
        ("eta_valuations", "valuação de eta(s,k) - 1 é p^s - p^k", _check_eta_valuations),
        ("top_layer_unit", "eps = 1 + (zeta-1)^(p^n-1) + t(zeta-1)^(p^n)", _check_top_layer_unit),
        ("even_valuations", "unidades reais têm valuação par", _check_even_valuations),
        ("embedding_kernel", "g(eps, N(eps)) = 1 sse eps = 1 mod lambda^(p^(k+l)-p^k)", _check_embedding_kernel),
        ("filtration", "eps em U_(n-1,s) sse g_n(eps) em D_(n,(s))", _check_filtration),
    ],
    "groups": [
        ("dlog_roundtrip", "dlog inverte a avaliação da base", _check_dlog_roundtrip),
        ("frobenius", "(1+u)^p = 1+u^p", _check_frobenius),
        ("snf", "forma normal de Smith", _check_snf),
        ("echelon_order", "pivôs independem da ordem de inserção", _check_echelon_order),
        ("explog", "E(L(u)) = u nas 1-unidades de D_1", _check_explog),
    ],
    "vplus": [
        ("missed_bernoulli", "posições perdidas no nível 0 = índices irregulares", _check_missed_bernoulli),
        ("regular_trivial", "V_n^+ trivial sse p regular", _check_regular_trivial),
        ("model_agreement", "modelos KM e tower isomorfos", _check_model_agreement),
        ("pi_kernel", "núcleo de pi_2 elementar de ordem p^(r_1)", _check_pi_kernel),
        ("order_recursion", "|V_2^+| = |V_1^+|·p^(r_1)", _check_order_recursion),
        ("alpha_injective", "alpha_2 injetivo em V_1^+", _check_alpha_injective),
    ],
    "phimaps": [
        ("phi_homomorphism", "phi, omega e Phi são homomorfismos", _check_phi_homomorphism),
        ("phi_kernel", "Phi se anula em U_(n-1,p^n-1)", _check_phi_kernel),
        ("phi_interlacing", "entrelaçamento das valuações de phi e omega", _check_phi_interlacing),
        ("phi_surjective", "Phi sobrejetiva em D_(n-1)^+ com transição unitriangular", _check_phi_surjective),
    ],
}


def suite_names() -> list[str]:
    return [*SUITES, "all"]


def _run_check(name: str, anchor: str, check: Check, p: int, rng: np.random.Generator, trials: int) -> CheckResult:
    try:
        count = check(p, rng, trials)
    except UnsupportedScaleError as e:
        logger.info(f"{name}: ignorada ({e})")
        return CheckResult(name, anchor, Status.SKIP, detail=str(e))
    except _Failure as e:
        logger.error(f"{name} falhou [{anchor}]: {e}")
        return CheckResult(name, anchor, Status.FAIL, detail=str(e))
    except KmvError as e:
        logger.error(f"{name} interrompida [{anchor}]: {type(e).__name__}: {e}")
        return CheckResult(name, anchor, Status.FAIL, detail=f"{type(e).__name__}: {e}")
    logger.debug(f"{name}: {count} casos")
    return CheckResult(name, anchor, Status.PASS, trials=count)


def run_suite(name: str, p: int, seed: int, trials: int = DEFAULT_TRIALS) -> list[SuiteReport]:
    """Executa uma suíte (ou todas, com name='all') no primo p.

    Args:
        name (str): Nome da suíte ou "all".
        p (int): Primo ímpar.
        seed (int): Semente de 64 bits; cada verificação recebe um filho próprio.
        trials (int): Tentativas por verificação aleatória.

    Returns:
        list[SuiteReport]: Um relatório por suíte executada.

    Raises:
        KeyError: Se a suíte não existe.
    """
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        msg = f"Suíte desconhecida: {name}"
        raise KeyError(msg)
    bernoulli_mod_p(p)
    reports = []
    for suite in names:
        checks = SUITES[suite]
        children = np.random.SeedSequence(seed, spawn_key=(sorted(SUITES).index(suite),)).spawn(len(checks))
        report = SuiteReport(suite, p, seed)
        for (check_name, anchor, check), child in zip(checks, children):
            report.results.append(
                _run_check(check_name, anchor, check, p, np.random.default_rng(child), trials)
            )
        status = "ok" if report.passed else f"{len(report.failures)} falha(s)"
        logger.info(f"Suíte {suite} p={p} semente={seed}: {status}")
        reports.append(report)
    return reports


__all__ = [
    "DEFAULT_TRIALS",
    "SUITES",
    "CheckResult",
    "Status",
    "SuiteReport",
    "run_suite",
    "suite_names",
]
