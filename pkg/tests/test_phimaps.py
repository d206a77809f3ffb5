import numpy as np
import pytest

from src.errors import (
    IncompatibleTargetError,
    NotDivisibleError,
    UnsupportedScaleError,
    ValuationRangeError,
)
from src.exactpoly import RingId, TowerElem, f_map
from src.fpfilter import FilterRing, FpFilterElem
from src.phimaps import (
    PhiInput,
    build_domain,
    image_rank,
    omega,
    order_valuation,
    phi_basis,
    phi_big,
    phi_small,
    target_dimension,
    transition_matrix,
)
from src.units import eta_unit

# Testes para src/phimaps.py

SMALL_PRIMES = [3, 5]


@pytest.fixture
def rng():
    """Gerador com semente fixa."""
    return np.random.default_rng(41)


class TestDomain:
    """Testes da construção do domínio."""

    @pytest.mark.parametrize(("p", "n"), [(11, 2), (3, 3), (5, 1)])
    def test_scale_limits(self, p, n):
        """Só n = 2 e p <= 7."""
        with pytest.raises(UnsupportedScaleError):
            build_domain(p, n)

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_domain_representatives(self, p):
        """(p-1)/2 representantes com valuações pares em [p^2-p, p^2-1)."""
        domain = build_domain(p)
        reps = domain.domain_reps()
        assert len(reps) == (p - 1) // 2
        assert [v for v, _ in reps] == list(range(p * p - p, p * p - 1, 2))
        assert all(domain.contains(u) for _, u in reps)

    def test_input_validation(self):
        """A entrada precisa estar em U_(1, p^2-p)."""
        eta = eta_unit(3, 1, 1, 0).exact()
        with pytest.raises(ValuationRangeError):
            PhiInput.from_unit(eta)
        eps = PhiInput.from_unit(eta**3)
        assert eps.valuation == 6
        assert eps.n == 2
        one = PhiInput.from_unit(TowerElem.one(RingId.cyclotomic(3, 1)))
        assert one.valuation == 12

    def test_input_wrong_ring(self):
        """Anéis não ciclotômicos ou de outro nível são rejeitados."""
        with pytest.raises(IncompatibleTargetError):
            PhiInput.from_unit(TowerElem.one(RingId(3, 0, 2)))
        with pytest.raises(IncompatibleTargetError):
            PhiInput.from_unit(TowerElem.one(RingId.cyclotomic(3, 1)), n=3)


class TestMaps:
    """Testes de phi, omega e Phi."""

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_homomorphism(self, rng, p):
        """phi, omega e Phi são aditivos no produto módulo p^2."""
        domain = build_domain(p)
        for _ in range(10):
            a, b = domain.random_input(rng), domain.random_input(rng)
            ab = (a * b).mod_coeffs(domain.modulus)
            assert phi_small(ab) == phi_small(a) + phi_small(b)
            assert omega(ab) == omega(a) + omega(b)
            assert phi_big(ab) == phi_big(a) + phi_big(b)

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_kernel(self, rng, p):
        """Phi se anula em U_(1, p^2-1)."""
        domain = build_domain(p)
        for _, u in domain.kernel_reps():
            assert phi_big(u).is_zero()
        for _ in range(5):
            assert phi_big(domain.random_input(rng, kernel=True)).is_zero()

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_interlacing(self, p):
        """O(phi(u)) = v - (p^2 - p) e omega fica em ordem >= p - 1."""
        domain = build_domain(p)
        for v, u in domain.domain_reps():
            w = order_valuation(phi_small(u))
            assert w == v - domain.threshold
            assert order_valuation(omega(u)) >= p - 1
            assert order_valuation(phi_big(u)) == w

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_phi_is_reduction_of_quotient(self, p):
        """phi(u) = f((u-1)/p)."""
        domain = build_domain(p)
        for _, u in domain.domain_reps():
            assert phi_small(u) == f_map((u - 1).exact_div(p), 0)

    def test_exact_and_mod_p2_agree(self):
        """phi de eta^3 (p=3) é o mesmo com o valor exato e com o representante módulo 9."""
        eps = eta_unit(3, 1, 1, 0).exact() ** 3
        assert phi_small(PhiInput.from_unit(eps)) == phi_small(eps.mod_coeffs(9))
        assert phi_big(eps) == phi_big(eps.mod_coeffs(9))

    def test_not_divisible(self):
        """gamma - 1 precisa ser divisível por p."""
        with pytest.raises(NotDivisibleError):
            phi_small(eta_unit(3, 1, 1, 0).exact())

    def test_order_valuation_of_zero(self):
        """O(0) = N."""
        ring = FilterRing(5, 4)
        assert order_valuation(FpFilterElem.zero(ring)) == 4
        assert order_valuation(FpFilterElem.t_power(ring, 2)) == 2


class TestSurjectivity:
    """Testes da imagem de Phi e da matriz de transição."""

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_rank(self, p):
        """A imagem de Phi tem a dimensão de D_1^+."""
        domain = build_domain(p)
        images = [phi_big(u) for _, u in domain.domain_reps()]
        assert image_rank(images) == target_dimension(p)
        assert image_rank([]) == 0

    @pytest.mark.parametrize("p", SMALL_PRIMES)
    def test_transition_is_identity(self, p):
        """Com omega nulo no domínio a transição de phi para Phi é a identidade."""
        domain = build_domain(p)
        matrix = transition_matrix(domain)
        k = len(phi_basis(domain))
        assert matrix.shape == (k, k)
        assert np.array_equal(matrix, np.eye(k, dtype=np.int64))

    def test_target_dimension(self):
        """(p^{n-1} - 1)/2."""
        assert [target_dimension(p) for p in (3, 5, 7)] == [1, 2, 3]

    @pytest.mark.slow
    def test_p7(self):
        """Mesmas propriedades em p = 7."""
        domain = build_domain(7)
        reps = domain.domain_reps()
        assert len(reps) == 3
        assert image_rank([phi_big(u) for _, u in reps]) == 3
        assert np.array_equal(transition_matrix(domain), np.eye(3, dtype=np.int64))
