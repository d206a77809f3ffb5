import pytest

from src.bernoulli import bernoulli_mod_p, irregularity
from src.errors import AlgorithmMismatchError, ParameterRangeError

# Testes para src/bernoulli.py


@pytest.mark.parametrize(
    ("p", "indices"),
    [
        (37, (32,)),
        (59, (44,)),
        (67, (58,)),
        (101, (68,)),
        (103, (24,)),
        (131, (22,)),
        (157, (62, 110)),
    ],
)
def test_irregular_primes(p, indices):
    """Índices irregulares conhecidos."""
    report = irregularity(p)
    assert report.indices == indices
    assert report.r == len(indices)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 41, 43])
def test_regular_primes(p):
    """Primos regulares têm r(p) = 0."""
    assert irregularity(p).r == 0


def test_small_values():
    """B_2 = 1/6 e B_4 = -1/30 reduzidos módulo p."""
    assert bernoulli_mod_p(3) == {}
    assert bernoulli_mod_p(5) == {2: 1}
    assert bernoulli_mod_p(7) == {2: 6, 4: 3}


def test_report_json():
    """Serialização do relatório."""
    assert irregularity(37).to_json() == {"p": 37, "r": 1, "indices": [32]}


@pytest.mark.parametrize("p", [1, 2, 9, 15, -7])
def test_invalid_prime(p):
    """Valores que não são primos ímpares são rejeitados."""
    bernoulli_mod_p.cache_clear()
    with pytest.raises(ParameterRangeError):
        bernoulli_mod_p(p)


def test_algorithms_disagree(mocker):
    """Divergência entre recorrência e somas de potências é detectada."""
    # Configuração
    bernoulli_mod_p.cache_clear()
    mocker.patch("src.bernoulli._by_power_sums", return_value={2: 0})

    # Verificações
    with pytest.raises(AlgorithmMismatchError):
        bernoulli_mod_p(5)
    bernoulli_mod_p.cache_clear()
