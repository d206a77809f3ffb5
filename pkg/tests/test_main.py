"""
Testes da interface de linha de comando em src/main.py.

Cobrem os subcomandos, os formatos de saída, o cache de resultados e o mapeamento
de exceções para códigos de saída.
"""

import json
from unittest.mock import MagicMock

import pytest

from src.errors import InvariantFailureError, SaturationUnverifiedError, UnsupportedScaleError
from src.main import (
    EXIT_INPUT,
    EXIT_INVARIANT,
    EXIT_OK,
    EXIT_SCALE,
    EXIT_UNSATURATED,
    build_parser,
    main,
    render,
)
from src.suites import CheckResult, Status, SuiteReport
from src.vplus import SCHEMA, v_plus


def run_json(capsys, argv):
    """Executa o comando e devolve (código, JSON da saída padrão)."""
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


class TestRender:
    """Testes dos formatos de saída."""

    DATA = {"a": {"b": 1}, "c": [1, 2]}

    def test_json(self):
        """JSON canônico com chaves ordenadas."""
        assert json.loads(render(self.DATA, "json")) == self.DATA
        assert render({"b": 1, "a": 2}, "json").index('"a"') < render({"b": 1, "a": 2}, "json").index('"b"')

    def test_csv(self):
        """CSV com cabeçalho e chaves pontilhadas."""
        assert render(self.DATA, "csv") == 'campo,valor\na.b,1\nc,"[1, 2]"'

    def test_table(self):
        """Tabela alinhada pela chave mais longa."""
        assert render(self.DATA, "table") == "a.b  1\nc    [1, 2]"

    def test_nested_lists(self):
        """Listas de objetos viram linhas indexadas."""
        assert render({"r": [{"x": 1}, {"x": 2}]}, "csv") == "campo,valor\nr[0].x,1\nr[1].x,2"


class TestParser:
    """Testes do parser de argumentos."""

    def test_prime_is_required(self):
        """-p é obrigatório."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["vplus"])

    def test_defaults(self):
        """Modelo KM, formato tabela e cache ligado."""
        args = build_parser().parse_args(["vplus", "-p", "37"])
        assert args.model == "km"
        assert args.format == "table"
        assert not args.no_cache
        assert args.structure == "auto"

    def test_negative_level(self):
        """Nível negativo é entrada inválida."""
        assert main(["vplus", "-p", "5", "-n", "-1"]) == EXIT_INPUT

    @pytest.mark.parametrize("budget", ["0", "-3.5"])
    def test_non_positive_budget(self, mocker, budget):
        """Orçamento de tempo <= 0 é rejeitado antes do cálculo."""
        spy = mocker.patch("src.main.v_plus")
        assert main(["vplus", "-p", "5", "--budget-secs", budget]) == EXIT_INPUT
        spy.assert_not_called()

    def test_zero_saturation_window(self, mocker):
        """Janela de saturação < 1 é entrada inválida."""
        spy = mocker.patch("src.main.v_plus")
        assert main(["missed", "-p", "5", "--saturation-window", "0"]) == EXIT_INPUT
        spy.assert_not_called()


class TestCommands:
    """Testes dos subcomandos com cálculos reais."""

    def test_bernoulli(self, capsys):
        """bernoulli -p 37 lista o índice 32."""
        code, data = run_json(capsys, ["bernoulli", "-p", "37"])
        assert code == EXIT_OK
        assert data == {"p": 37, "r": 1, "indices": [32]}

    def test_bernoulli_invalid_prime(self):
        """p = 9 não é primo."""
        assert main(["bernoulli", "-p", "9"]) == EXIT_INPUT

    def test_vplus_regular(self, capsys):
        """vplus -p 5 -n 2 é trivial."""
        code, data = run_json(capsys, ["vplus", "-p", "5", "-n", "2", "--no-cache"])
        assert code == EXIT_OK
        assert data["schema"] == SCHEMA
        assert data["cyclic_orders"] == []
        assert data["saturated"]

    def test_missed(self, capsys):
        """missed -p 37 --level 0."""
        code, data = run_json(capsys, ["missed", "-p", "37", "--level", "0", "--no-cache"])
        assert code == EXIT_OK
        assert data["missed"] == {"0": [32]}
        assert data["level"] == 0

    def test_norm(self, capsys):
        """N_{0,1}(zeta_1) = zeta_0 em p=3."""
        code, data = run_json(capsys, ["norm", "-p", "3", "-n", "1", "--coeffs", "0,1"])
        assert code == EXIT_OK
        assert data["norm"]["coeffs"] == ["0", "1"]
        assert data["norm"]["ring"] == {"p": 3, "k": 0, "l": 1}
        assert data["tuple"] == [data["norm"]]

    def test_unit_eta(self, capsys):
        """eta(1,0) em p=5 tem valuação 4."""
        code, data = run_json(capsys, ["unit", "-p", "5", "-n", "1", "--kind", "eta", "-s", "1", "-k", "0"])
        assert code == EXIT_OK
        assert data["unit"]["kind"] == "eta"
        assert data["image_valuation"] == 4
        assert data["lambda_valuation"] == 4

    def test_unit_cyclotomic(self, capsys):
        """xi_2 em p=5, nível 1 é normalizado para a = 23."""
        code, data = run_json(capsys, ["unit", "-p", "5", "-n", "1", "-a", "2"])
        assert code == EXIT_OK
        assert data["unit"]["a"] == 23

    def test_verify(self, capsys):
        """verify --suite groups passa em p = 5."""
        code, data = run_json(capsys, ["verify", "-p", "5", "--suite", "groups", "--trials", "3", "--seed", "4"])
        assert code == EXIT_OK
        assert data["seed"] == 4
        assert data["suites"][0]["passed"]


class TestExitCodes:
    """Testes do mapeamento de exceções para códigos de saída."""

    @pytest.mark.parametrize(
        ("error", "expected"),
        [
            (UnsupportedScaleError("grande demais"), EXIT_SCALE),
            (InvariantFailureError("r decresce", anchor="r_k"), EXIT_INVARIANT),
        ],
    )
    def test_vplus_errors(self, mocker, error, expected):
        """Erros do cálculo viram códigos de saída."""
        mocker.patch("src.main.v_plus", side_effect=error)
        assert main(["vplus", "-p", "37", "--no-cache"]) == expected

    def test_unsaturated_prints_partial_report(self, mocker, capsys):
        """Sem saturação o relatório parcial é impresso e o código é 4."""
        # Configuração
        partial = MagicMock()
        partial.to_json.return_value = {"schema": SCHEMA, "saturated": False}
        mocker.patch("src.main.v_plus", side_effect=SaturationUnverifiedError("sem tempo", report=partial))

        # Verificações
        code, data = run_json(capsys, ["vplus", "-p", "37", "--no-cache"])
        assert code == EXIT_UNSATURATED
        assert data == {"schema": SCHEMA, "saturated": False}

    def test_verify_failure(self, mocker, capsys):
        """Falhas de verificação vão para stderr e o código é 1."""
        failed = CheckResult("snf", "forma normal", Status.FAIL, detail="U·M·V != D")
        mocker.patch("src.main.run_suite", return_value=[SuiteReport("groups", 5, 1, [failed])])
        assert main(["verify", "-p", "5", "--suite", "groups"]) == EXIT_INVARIANT
        assert "FALHA snf: forma normal (U·M·V != D)" in capsys.readouterr().err


class TestCache:
    """Testes do cache de resultados na linha de comando."""

    def test_second_call_hits_cache(self, mocker, monkeypatch, tmp_path, capsys):
        """O segundo vplus idêntico não recalcula."""
        # Configuração
        monkeypatch.setenv("KMV_CACHE_DIR", str(tmp_path))
        spy = mocker.patch("src.main.v_plus", wraps=v_plus)

        # Ação
        first = run_json(capsys, ["vplus", "-p", "37"])
        second = run_json(capsys, ["vplus", "-p", "37"])

        # Verificações
        assert first == second
        assert first[1]["cyclic_orders"] == [37]
        spy.assert_called_once()
        assert len(list(tmp_path.glob("*.json"))) == 1

    def test_no_cache_always_computes(self, mocker, monkeypatch, tmp_path, capsys):
        """--no-cache ignora o diretório de cache."""
        monkeypatch.setenv("KMV_CACHE_DIR", str(tmp_path))
        spy = mocker.patch("src.main.v_plus", wraps=v_plus)
        run_json(capsys, ["vplus", "-p", "5", "--no-cache"])
        run_json(capsys, ["vplus", "-p", "5", "--no-cache"])
        assert spy.call_count == 2
        assert not list(tmp_path.glob("*.json"))
