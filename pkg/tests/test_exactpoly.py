import numpy as np
import pytest

from src.errors import (
    NotAUnitError,
    NotCompatibleError,
    ParameterRangeError,
    RingMismatchError,
)
from src.exactpoly import (
    RingId,
    TowerElem,
    absolute_norm,
    exact_inverse,
    f_map,
    from_tuple,
    g_map,
    is_unit,
    mod_p_image,
    reconstruct,
    split,
    to_tuple,
)
from src.fpfilter import FilterRing, FpFilterElem, d_ring

# Testes para src/exactpoly.py

GRID = [(3, 0, 2), (3, 1, 2), (3, 0, 3), (5, 0, 2)]


def random_elem(ring, rng, bound=4):
    return TowerElem.from_coeffs(ring, rng.integers(-bound, bound + 1, size=ring.degree).tolist())


@pytest.fixture
def rng():
    """Gerador com semente fixa."""
    return np.random.default_rng(11)


class TestRingOps:
    """Testes das operações de anel e da forma canônica."""

    def test_modulus_degree(self):
        """O módulo de A_{k,l} tem grau p^{k+l} - p^k."""
        assert RingId(3, 0, 2).degree == 8
        assert RingId.cyclotomic(5, 1).degree == 20
        assert RingId(3, 1, 1).modulus() == (1, 0, 0, 1, 0, 0, 1)

    def test_reduction_p3(self):
        """Em Z[zeta_0] com p=3, x^2 = -1 - x e x·x^2 = 1."""
        ring = RingId.cyclotomic(3, 0)
        x = TowerElem.gen(ring)
        assert x**2 == TowerElem.from_coeffs(ring, [-1, -1])
        assert x * x**2 == TowerElem.one(ring)

    def test_power_of_lambda_p5(self):
        """(x-1)^4 em Z[zeta_0], p=5, confere com a expansão binomial reduzida."""
        ring = RingId.cyclotomic(5, 0)
        x = TowerElem.gen(ring)
        expanded = TowerElem.from_coeffs(ring, [1, -4, 6, -4, 1])
        assert (x - 1) ** 4 == expanded
        assert expanded == TowerElem.from_coeffs(ring, [0, -5, 5, -5])

    def test_identity(self, rng):
        """a·1 = a."""
        ring = RingId(5, 0, 2)
        a = random_elem(ring, rng)
        assert a * TowerElem.one(ring) == a
        assert a * 1 == a

    def test_ring_mismatch(self):
        """Operandos de anéis diferentes são rejeitados."""
        with pytest.raises(RingMismatchError):
            TowerElem.one(RingId(3, 0, 1)) + TowerElem.one(RingId(3, 0, 2))

    def test_conjugation(self):
        """c(zeta)·zeta = 1."""
        ring = RingId.cyclotomic(7, 1)
        x = TowerElem.gen(ring)
        assert x.conj() * x == TowerElem.one(ring)

    def test_invalid_ring(self):
        """Primos pares e índices inválidos são rejeitados."""
        with pytest.raises(ParameterRangeError):
            RingId(2, 0, 1)
        with pytest.raises(ParameterRangeError):
            RingId(3, 0, 0)

    def test_json_roundtrip(self):
        """Coeficientes serializados como strings decimais com cabeçalho do anel."""
        ring = RingId(3, 0, 2)
        a = TowerElem.from_coeffs(ring, [10**30, -2, 0, 5])
        data = a.to_json()
        assert data["ring"] == {"p": 3, "k": 0, "l": 2}
        assert data["coeffs"][0] == str(10**30)
        assert TowerElem.from_json(data) == a


class TestUnits:
    """Testes de inverso exato e norma absoluta."""

    def test_roots_of_unity_are_units(self):
        """zeta e -zeta são unidades."""
        ring = RingId.cyclotomic(5, 1)
        x = TowerElem.gen(ring)
        assert x * exact_inverse(x) == TowerElem.one(ring)
        assert is_unit(-x)

    def test_lambda_is_not_a_unit(self):
        """1 - zeta não é unidade."""
        ring = RingId.cyclotomic(3, 1)
        with pytest.raises(NotAUnitError):
            exact_inverse(TowerElem.one(ring) - TowerElem.gen(ring))
        assert not is_unit(TowerElem.zero(ring))

    @pytest.mark.parametrize(("p", "n"), [(3, 0), (3, 1), (5, 0), (7, 0)])
    def test_norm_of_lambda(self, p, n):
        """A norma absoluta de 1 - zeta_n é p."""
        ring = RingId.cyclotomic(p, n)
        assert abs(absolute_norm(TowerElem.one(ring) - TowerElem.gen(ring))) == p


class TestPullback:
    """Testes de split, reconstruct e tuplas."""

    def test_split_generator(self):
        """x_{0,2} (p=3) -> (zeta_1, x_{0,1})."""
        a = TowerElem.gen(RingId(3, 0, 2))
        top, rest = split(a)
        assert top == TowerElem.gen(RingId.cyclotomic(3, 1))
        assert rest == TowerElem.gen(RingId(3, 0, 1))

    def test_reconstruct_generator(self):
        """(zeta_1, x_{0,1}) -> x_{0,2} e (1, 1) -> 1."""
        top, rest = RingId.cyclotomic(3, 1), RingId(3, 0, 1)
        assert reconstruct(TowerElem.gen(top), TowerElem.gen(rest)) == TowerElem.gen(RingId(3, 0, 2))
        assert reconstruct(TowerElem.one(top), TowerElem.one(rest)) == TowerElem.one(RingId(3, 0, 2))

    def test_split_requires_height_two(self):
        """split exige l+1 >= 2."""
        with pytest.raises(ParameterRangeError):
            split(TowerElem.one(RingId(3, 0, 1)))

    def test_incompatible_pair(self):
        """f(a) != g(b) impede a reconstrução."""
        top, rest = RingId.cyclotomic(3, 1), RingId(3, 0, 1)
        with pytest.raises(NotCompatibleError):
            reconstruct(TowerElem.one(top), TowerElem.zero(rest))

    @pytest.mark.parametrize(("p", "k", "l"), GRID)
    def test_split_reconstruct_roundtrip(self, rng, p, k, l):  # noqa: E741
        """reconstruct(split(a)) = a e o quadrado do pullback comuta."""
        ring = RingId(p, k, l)
        for _ in range(40):
            a = random_elem(ring, rng)
            top, rest = split(a)
            target = rest.ring.filter_ring()
            assert mod_p_image(top, target) == mod_p_image(rest, target)
            assert reconstruct(top, rest) == a

    def test_to_tuple_generator(self):
        """x_{0,2} (p=3) -> (zeta_1, zeta_0)."""
        rep = to_tuple(TowerElem.gen(RingId(3, 0, 2)))
        assert rep.components == (
            TowerElem.gen(RingId.cyclotomic(3, 1)),
            TowerElem.gen(RingId.cyclotomic(3, 0)),
        )
        assert rep.levels == (1, 0)

    def test_tuple_roundtrip(self, rng):
        """from_tuple inverte to_tuple."""
        ring = RingId(3, 0, 3)
        for _ in range(20):
            a = random_elem(ring, rng)
            assert from_tuple(to_tuple(a)) == a
        assert to_tuple(TowerElem.one(ring)).components[-1] == TowerElem.one(RingId(3, 0, 1))


class TestModPImages:
    """Testes das imagens f e g."""

    def test_g_kills_multiples_of_p(self):
        """g(1 + p·x) = 1."""
        ring = RingId(3, 0, 1)
        a = TowerElem.from_coeffs(ring, [1, 3])
        assert g_map(a) == FpFilterElem.one(d_ring(3, 0, 1))

    def test_f_of_zeta(self):
        """f(zeta_1) = x̄ em D_{0,1} (p=3)."""
        zeta = TowerElem.gen(RingId.cyclotomic(3, 1))
        assert f_map(zeta, 0) == FpFilterElem.gen_x(d_ring(3, 0, 1))
        assert mod_p_image(TowerElem.gen(RingId.cyclotomic(3, 0)), FilterRing(3, 2)) == (
            FpFilterElem.gen_x(FilterRing(3, 2))
        )

    @pytest.mark.parametrize(("p", "k", "l"), [(3, 0, 1), (3, 0, 3), (3, 1, 2), (5, 0, 2), (5, 1, 1), (7, 0, 2)])
    def test_modulus_is_power_of_t_mod_p(self, p, k, l):  # noqa: E741
        """O módulo de A_{k,l} é (x-1)^{p^{k+l}-p^k} módulo p."""
        ring = RingId(p, k, l)
        target = FilterRing(p, ring.degree + 1)
        image = FpFilterElem.from_monomial(target, ring.modulus())
        assert image == FpFilterElem.t_power(target, ring.degree)
