import numpy as np
import pytest

from src.errors import (
    IncompatibleTargetError,
    InternalMismatchError,
    NotAUnitError,
    ParameterRangeError,
)
from src.exactpoly import RingId, TowerElem, absolute_norm, f_map, g_map, is_unit
from src.normtower import embed_unit, multiplication_matrix, norm_det, norm_kl, usual_norm
from src.units import cyclotomic_family, eta_unit, in_filtration

# Testes para src/normtower.py


def random_elem(ring, rng, bound=3):
    return TowerElem.from_coeffs(ring, rng.integers(-bound, bound + 1, size=ring.degree).tolist())


@pytest.fixture
def rng():
    """Gerador com semente fixa."""
    return np.random.default_rng(23)


class TestNormDet:
    """Testes da norma de um passo."""

    @pytest.mark.parametrize("p", [3, 5, 7])
    def test_norm_of_zeta(self, p):
        """N(zeta_1) = zeta_0."""
        zeta = TowerElem.gen(RingId.cyclotomic(p, 1))
        assert norm_det(zeta) == TowerElem.gen(RingId.cyclotomic(p, 0))

    def test_norm_of_constant(self):
        """N(c) = c^p."""
        ring = RingId.cyclotomic(3, 1)
        assert norm_det(TowerElem.const(ring, 2)) == TowerElem.const(RingId.cyclotomic(3, 0), 8)

    def test_requires_level_one(self):
        """A norma parte de A_{k+1,l}."""
        with pytest.raises(ParameterRangeError):
            norm_det(TowerElem.one(RingId.cyclotomic(3, 0)))
        with pytest.raises(ParameterRangeError):
            multiplication_matrix(TowerElem.one(RingId.cyclotomic(3, 0)))

    def test_multiplication_matrix_first_column(self, rng):
        """A primeira coluna da matriz de multiplicação são as partes de a."""
        ring = RingId.cyclotomic(3, 1)
        a = random_elem(ring, rng)
        matrix = multiplication_matrix(a)
        assert len(matrix) == 3
        target = RingId.cyclotomic(3, 0)
        assert [row[0] for row in matrix] == [TowerElem.from_coeffs(target, a.coeffs[i::3]) for i in range(3)]

    def test_norm_is_det_of_multiplication_matrix(self, rng):
        """N(a) coincide com o determinante 3x3 (Sarrus) da matriz de multiplicação."""
        # Configuração
        a = random_elem(RingId.cyclotomic(3, 1), rng)
        m = multiplication_matrix(a)

        # Verificações
        sarrus = (
            m[0][0] * m[1][1] * m[2][2]
            + m[0][1] * m[1][2] * m[2][0]
            + m[0][2] * m[1][0] * m[2][1]
            - m[0][2] * m[1][1] * m[2][0]
            - m[0][0] * m[1][2] * m[2][1]
            - m[0][1] * m[1][0] * m[2][2]
        )
        assert norm_det(a) == sarrus

    @pytest.mark.parametrize(("p", "level"), [(3, 1), (3, 2), (5, 1)])
    def test_multiplicative(self, rng, p, level):
        """N(ab) = N(a)N(b) exatamente."""
        ring = RingId.cyclotomic(p, level)
        for _ in range(10):
            a, b = random_elem(ring, rng), random_elem(ring, rng)
            assert norm_det(a * b) == norm_det(a) * norm_det(b)

    @pytest.mark.parametrize(("p", "level"), [(3, 1), (3, 2), (5, 1)])
    def test_additive_mod_p(self, rng, p, level):
        """N(a+b) = N(a) + N(b) módulo p."""
        ring = RingId.cyclotomic(p, level)
        for _ in range(10):
            a, b = random_elem(ring, rng), random_elem(ring, rng)
            diff = norm_det(a + b) - norm_det(a) - norm_det(b)
            assert diff.mod_coeffs(p).is_zero()


class TestUsualNorm:
    """Testes da norma usual."""

    def test_zero_steps(self, rng):
        """Com steps = 0 a norma é a identidade."""
        a = random_elem(RingId.cyclotomic(3, 2), rng)
        assert usual_norm(a, 0) == a

    @pytest.mark.parametrize(("p", "level"), [(3, 1), (3, 2), (5, 1)])
    def test_transitive_to_absolute_norm(self, rng, p, level):
        """Descer até Z[zeta_0] e tomar a norma absoluta dá a norma absoluta de a."""
        ring = RingId.cyclotomic(p, level)
        for _ in range(5):
            a = random_elem(ring, rng)
            assert absolute_norm(usual_norm(a, level)) == absolute_norm(a)

    def test_invalid_arguments(self):
        """steps fora do intervalo e anéis não ciclotômicos são rejeitados."""
        with pytest.raises(ParameterRangeError):
            usual_norm(TowerElem.one(RingId.cyclotomic(3, 1)), 2)
        with pytest.raises(IncompatibleTargetError):
            usual_norm(TowerElem.one(RingId(3, 0, 2)), 1)


class TestNormKL:
    """Testes de N_{k,l}."""

    @pytest.mark.parametrize(("p", "level"), [(3, 1), (3, 2), (3, 3), (5, 2)])
    def test_norm_of_zeta_is_generator(self, p, level):
        """N_{k,l}(zeta) = x_{k,l}."""
        zeta = TowerElem.gen(RingId.cyclotomic(p, level))
        for k in range(level):
            assert norm_kl(zeta, k) == TowerElem.gen(RingId(p, k, level - k))

    @pytest.mark.parametrize(("p", "level"), [(3, 2), (5, 2)])
    def test_multiplicative(self, rng, p, level):
        """N_{k,l}(ab) = N_{k,l}(a)N_{k,l}(b)."""
        ring = RingId.cyclotomic(p, level)
        for _ in range(5):
            a, b = random_elem(ring, rng), random_elem(ring, rng)
            for k in range(level):
                assert norm_kl(a * b, k) == norm_kl(a, k) * norm_kl(b, k)

    @pytest.mark.parametrize(("p", "level"), [(3, 1), (3, 2), (3, 3), (5, 2)])
    def test_mod_p_image_is_f(self, rng, p, level):
        """g(N_{k,l}(a)) = f(a)."""
        ring = RingId.cyclotomic(p, level)
        for _ in range(5):
            a = random_elem(ring, rng)
            for k in range(level):
                assert g_map(norm_kl(a, k)) == f_map(a, k)

    @pytest.mark.parametrize(("p", "level"), [(3, 2), (3, 3), (5, 2)])
    def test_square_commutes(self, rng, p, level):
        """N(N_{k,l}(a)) = N_{k-1,l}(N(a)) para k >= 1."""
        ring = RingId.cyclotomic(p, level)
        for _ in range(5):
            a = random_elem(ring, rng)
            for k in range(1, level):
                assert norm_det(norm_kl(a, k)) == norm_kl(usual_norm(a, 1), k - 1)

    def test_invalid_base(self):
        """k deve ficar abaixo do nível."""
        with pytest.raises(ParameterRangeError):
            norm_kl(TowerElem.gen(RingId.cyclotomic(3, 1)), 1)
        with pytest.raises(IncompatibleTargetError):
            norm_kl(TowerElem.one(RingId(3, 0, 2)), 0)

    def test_constructions_disagree(self, mocker):
        """Divergência entre as duas construções levanta InternalMismatchError."""
        norm_kl.cache_clear()
        ring = RingId.cyclotomic(3, 2)
        mocker.patch("src.normtower._norm_kl_tuple", return_value=TowerElem.zero(RingId(3, 0, 2)))
        with pytest.raises(InternalMismatchError):
            norm_kl(TowerElem.gen(ring), 0)
        norm_kl.cache_clear()


class TestEmbedUnit:
    """Testes do mergulho de unidades."""

    def test_embeds_minus_zeta(self):
        """(-zeta_1, N(-zeta_1)) é unidade de A_{0,2}."""
        eps = -TowerElem.gen(RingId.cyclotomic(3, 1))
        image = embed_unit(eps, 0)
        assert image.ring == RingId(3, 0, 2)
        assert is_unit(image)

    def test_top_level_is_identity(self):
        """Com k igual ao nível o mergulho é a identidade."""
        eps = TowerElem.gen(RingId.cyclotomic(3, 1))
        assert embed_unit(eps, 1) == eps

    def test_rejects_non_units(self):
        """1 - zeta não é mergulhado."""
        ring = RingId.cyclotomic(3, 1)
        with pytest.raises(NotAUnitError):
            embed_unit(TowerElem.one(ring) - TowerElem.gen(ring), 0)

    @pytest.mark.parametrize("p", [3, 5])
    def test_kernel_of_reduction(self, p):
        """g(eps, N(eps)) = 1 exatamente quando eps = 1 mod lambda^{p^2-1}."""
        eta = eta_unit(p, 1, 1, 0).exact()
        threshold = p**2 - 1
        for eps in (eta, eta**p, eta ** (p * p)):
            assert g_map(embed_unit(eps, 0)).is_one() == in_filtration(eps, threshold)
        assert g_map(embed_unit(eta ** (p * p), 0)).is_one()
        assert not g_map(embed_unit(eta, 0)).is_one()


def base_units(p, level):
    ring = RingId.cyclotomic(p, level)
    units = [eta_unit(p, level, s, j).exact() for s in range(1, level + 1) for j in range(s)]
    units += [d.exact() ** (p - 1) for d in cyclotomic_family(p, level, p ** (level + 1))[:3]]
    return units or [-TowerElem.gen(ring)]


def random_products(p, level, rng, count):
    """Produtos aleatórios de potências p^j (j < 3) das unidades de base."""
    powers = [[u ** (p**j) for j in range(3)] for u in base_units(p, level)]
    for _ in range(count):
        eps = TowerElem.one(RingId.cyclotomic(p, level))
        for row in powers:
            if rng.integers(0, 2):
                eps = eps * row[int(rng.integers(0, 3))]
        yield eps


class TestEmbeddingKernelP7:
    """Núcleo de g∘mergulho em p = 7 sobre produtos aleatórios."""

    @pytest.mark.parametrize(("k", "level"), [(0, 0), (1, 1)])
    def test_random_products(self, k, level):
        """g(eps) = 1 sse eps = 1 mod lambda^(p^(k+l) - p^k)."""
        # Configuração
        p = 7
        rng = np.random.default_rng(7001)
        threshold = p ** (level + 1) - p**k

        # Verificações
        for eps in random_products(p, level, rng, 200):
            assert g_map(embed_unit(eps, k)).is_one() == in_filtration(eps, threshold)

    @pytest.mark.slow
    def test_random_products_into_a02(self):
        """Unidades de Z[zeta_1] mergulhadas em A_{0,2}, p = 7."""
        p = 7
        rng = np.random.default_rng(7002)
        for eps in random_products(p, 1, rng, 200):
            assert g_map(embed_unit(eps, 0)).is_one() == in_filtration(eps, p**2 - 1)
