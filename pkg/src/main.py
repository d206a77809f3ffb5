"""Interface de linha de comando do kmv.

Subcomandos: bernoulli, vplus, missed, verify, norm, unit. Códigos de saída:
0 ok, 1 falha de invariante, 2 entrada inválida, 3 escala não suportada,
4 resultado sem saturação verificada (o relatório parcial ainda é impresso).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
from pathlib import Path
import sys
from typing import TYPE_CHECKING

# Adiciona o diretório raiz ao PYTHONPATH quando executado diretamente
if __name__ == "__main__":
    ROOT_DIR = str(Path(__file__).parent.parent.absolute())
    if ROOT_DIR not in sys.path:
        sys.path.insert(0, ROOT_DIR)

from src.bernoulli import irregularity
from src.cache import ResultCache, cache_key
from src.errors import (
    ConsistencyError,
    InvariantFailureError,
    KmvError,
    SaturationUnverifiedError,
    UnsupportedScaleError,
)
from src.exactpoly import RingId, TowerElem, g_map, to_tuple
from src.fpfilter import FilterRing
from src.logger_config import logger
from src.normtower import norm_kl
from src.settings import load_settings
from src.suites import DEFAULT_TRIALS, run_suite, suite_names
from src.units import cyclotomic_unit, eta_unit, family_hash, lambda_val
from src.vplus import SCHEMA, Model, StructureMethod, generator_family, v_plus

if TYPE_CHECKING:
    from collections.abc import Sequence

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2
EXIT_SCALE = 3
EXIT_UNSATURATED = 4

# lambda_val exato na linha de comando
UNIT_EXACT_MAX_P = 7
UNIT_EXACT_MAX_LEVEL = 2


def _flatten(data: object, prefix: str = "") -> list[tuple[str, str]]:
    """Achata o JSON aninhado em linhas (chave pontilhada, valor)."""
    if isinstance(data, dict):
        rows: list[tuple[str, str]] = []
        for key in sorted(data):
            rows.extend(_flatten(data[key], f"{prefix}.{key}" if prefix else str(key)))
        return rows
    if isinstance(data, list) and any(isinstance(x, (dict, list)) for x in data):
        rows = []
        for i, item in enumerate(data):
            rows.extend(_flatten(item, f"{prefix}[{i}]"))
        return rows
    return [(prefix, json.dumps(data, ensure_ascii=False))]


def render(data: dict, fmt: str) -> str:
    """Renderiza um resultado como JSON canônico, CSV ou tabela.

    Args:
        data (dict): Resultado serializável.
        fmt (str): "json", "csv" ou "table".

    Returns:
        str: Texto pronto para a saída padrão.
    """
    if fmt == "json":
        return json.dumps(data, sort_keys=True, ensure_ascii=False, indent=2)
    rows = _flatten(data)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["campo", "valor"])
        writer.writerows(rows)
        return buffer.getvalue().rstrip("\n")
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _emit(data: dict, args: argparse.Namespace) -> None:
    print(render(data, args.format))  # noqa: T201


def _cached(args: argparse.Namespace, command: str, n: int, compute) -> dict:  # noqa: ANN001
    """Busca o resultado no cache; na falta, calcula e grava."""
    if args.no_cache:
        return compute()
    fhash = family_hash(generator_family(args.prime, n, args.model))
    key = cache_key(command, args.prime, n, args.model, fhash)
    cache = ResultCache()
    data = cache.load(key)
    if data is None:
        data = compute()
        cache.store(key, data)
    return data


# --- Comandos ---


def cmd_bernoulli(args: argparse.Namespace) -> int:
    _emit(irregularity(args.prime).to_json(), args)
    return EXIT_OK


def cmd_vplus(args: argparse.Namespace) -> int:
    n = args.level if args.level is not None else 1

    def compute() -> dict:
        return v_plus(
            args.prime,
            n,
            args.model,
            window=args.saturation_window,
            budget_secs=args.budget_secs,
            method=args.structure,
        ).to_json()

    _emit(_cached(args, "vplus", n, compute), args)
    return EXIT_OK


def cmd_missed(args: argparse.Namespace) -> int:
    level = args.level if args.level is not None else 0

    def compute() -> dict:
        report = v_plus(
            args.prime,
            level + 1,
            args.model,
            window=args.saturation_window,
            budget_secs=args.budget_secs,
        )
        return {
            "schema": SCHEMA,
            "p": args.prime,
            "level": level,
            "model": report.model.value,
            "missed": {str(k): list(v) for k, v in sorted(report.missed.items())},
        }

    _emit(_cached(args, "missed", level + 1, compute), args)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else load_settings().seed
    reports = run_suite(args.suite, args.prime, seed, args.trials)
    _emit({"schema": SCHEMA, "seed": seed, "suites": [r.to_json() for r in reports]}, args)
    failures = [f for r in reports for f in r.failures]
    for failure in failures:
        print(f"FALHA {failure.name}: {failure.anchor} ({failure.detail})", file=sys.stderr)  # noqa: T201
    return EXIT_INVARIANT if failures else EXIT_OK


def cmd_norm(args: argparse.Namespace) -> int:
    n = args.level if args.level is not None else 1
    ring = RingId.cyclotomic(args.prime, n)
    coeffs = [int(c) for c in args.coeffs.split(",") if c.strip()]
    a = TowerElem.from_coeffs(ring, coeffs)
    image = norm_kl(a, args.base)
    data = {
        "schema": SCHEMA,
        "input": a.to_json(),
        "norm": image.to_json(),
        "tuple": [c.to_json() for c in to_tuple(image).components] if image.ring.l > 1 else [image.to_json()],
        "g_image": g_map(image).to_json(),
    }
    _emit(data, args)
    return EXIT_OK


def cmd_unit(args: argparse.Namespace) -> int:
    n = args.level if args.level is not None else 1
    if args.kind == "eta":
        desc = eta_unit(args.prime, n, args.s, args.k)
    else:
        desc = cyclotomic_unit(args.prime, n, args.a)
    ring = desc.ring
    d = desc.image(FilterRing(args.prime, ring.degree)) - 1
    data = {
        "schema": SCHEMA,
        "unit": desc.to_json(),
        "image_valuation": d.size if d.is_zero() else d.valuation(),
    }
    if args.prime <= UNIT_EXACT_MAX_P and n <= UNIT_EXACT_MAX_LEVEL:
        exact = desc.exact() - 1
        data["lambda_valuation"] = None if exact.is_zero() else lambda_val(exact)
    _emit(data, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    """Monta o parser com todos os subcomandos."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-p", "--prime", type=int, required=True, help="Primo ímpar p")
    common.add_argument("-n", "--level", type=int, default=None, help="Nível n")
    common.add_argument("--model", choices=[m.value for m in Model], default=Model.KM.value)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    fmt.add_argument("--format", dest="format", choices=["table", "json", "csv"])
    common.add_argument("--seed", type=int, default=None, help="Semente de 64 bits")
    common.add_argument("--budget-secs", type=float, default=None)
    common.add_argument("--saturation-window", type=int, default=None)
    common.add_argument("--no-cache", action="store_true", help="Ignora o cache de resultados")
    common.set_defaults(format="table")

    parser = argparse.ArgumentParser(prog="kmv", description="Grupos V_n^+ de Kervaire-Murthy")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("bernoulli", parents=[common]).set_defaults(handler=cmd_bernoulli)

    vplus = sub.add_parser("vplus", parents=[common])
    vplus.add_argument("--structure", choices=[m.value for m in StructureMethod], default="auto")
    vplus.set_defaults(handler=cmd_vplus)

    sub.add_parser("missed", parents=[common]).set_defaults(handler=cmd_missed)

    verify = sub.add_parser("verify", parents=[common])
    verify.add_argument("--suite", choices=suite_names(), default="all")
    verify.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    verify.set_defaults(handler=cmd_verify)

    norm = sub.add_parser("norm", parents=[common])
    norm.add_argument("-k", "--base", type=int, default=0, help="Nível de base k de N_{k,l}")
    norm.add_argument("--coeffs", required=True, help="Coeficientes separados por vírgula")
    norm.set_defaults(handler=cmd_norm)

    unit = sub.add_parser("unit", parents=[common])
    unit.add_argument("--kind", choices=["cyclotomic", "eta"], default="cyclotomic")
    unit.add_argument("-a", type=int, default=2, help="Índice a de xi_a")
    unit.add_argument("-s", type=int, default=1)
    unit.add_argument("-k", type=int, default=0)
    unit.set_defaults(handler=cmd_unit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Ponto de entrada do comando `kmv`.

    Returns:
        int: Código de saída.
    """
    args = build_parser().parse_args(argv)
    if args.level is not None and args.level < 0:
        logger.error(f"Nível inválido: {args.level}")
        return EXIT_INPUT
    if args.budget_secs is not None and args.budget_secs <= 0:
        logger.error(f"Orçamento de tempo inválido: {args.budget_secs}")
        return EXIT_INPUT
    if args.saturation_window is not None and args.saturation_window < 1:
        logger.error(f"Janela de saturação inválida: {args.saturation_window}")
        return EXIT_INPUT
    try:
        return args.handler(args)
    except SaturationUnverifiedError as e:
        logger.warning(f"Resultado sem saturação verificada: {e}")
        if e.report is not None:
            _emit(e.report.to_json(), args)
        return EXIT_UNSATURATED
    except UnsupportedScaleError as e:
        logger.error(f"Escala não suportada: {e}")
        return EXIT_SCALE
    except InvariantFailureError as e:
        logger.error(f"Invariante violado [{e.anchor}]: {e}")
        return EXIT_INVARIANT
    except ConsistencyError as e:
        logger.error(f"Inconsistência interna: {type(e).__name__}: {e}")
        return EXIT_INVARIANT
    except (KmvError, ValueError, KeyError) as e:
        logger.error(f"Entrada inválida: {e}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
