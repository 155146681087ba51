"""Command-line front end for Schur-type expressions, induced maps and verdicts."""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import logging
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .canonical_maps import MAP_BUILDERS, DescentError, MapParameterError, named_map
from .expressions import (
    Base,
    DirectSum,
    SchurSyntaxError,
    Sym,
    TensorModule,
    TensorProduct,
    Wedge,
    degree_of,
    enumerate_basis,
    expression_summands,
    format_expr,
    parse_schur_expr,
    rank_of,
)
from .functor import DegreeMismatchError, induced_map
from .matrices import (
    ExactMatrix,
    MatrixFormatError,
    ShapeMismatchError,
    UnsupportedRingError,
    determinant,
    generic_matrix,
    load_matrix,
)
from .polynomials import NotDivisibleError
from .rings import RingMismatchError, RingSpec, RingSpecError, ScalarSyntaxError
from .verify import (
    DEFAULT_SEED,
    DESCENT_FAILED,
    NOT_SCALAR,
    REFUTED,
    BudgetExceededError,
    ClaimParameterError,
    ConjectureTable,
    DivisibilityError,
    Verdict,
    check_det_identity,
    check_rank_identity,
    check_wedge_factorization,
    explore_phi_conjecture,
    verify_composition_scalars,
    verify_theorem_4_3,
    verify_theorem_5_2,
    verify_theorem_5_4,
)

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_USAGE = 2
EXIT_DESCENT = 3

CLAIMS = ("det", "t42_scalars", "t43", "t52", "t54", "lemma51", "conjecture", "rank_identity")

DEFAULT_CONFIG: dict[str, Any] = {
    "seed": DEFAULT_SEED,
    "budget_dim": 20,
    "budget_indeterminates": 9,
    "trials": 100,
    "entry_bound": 50,
    "max_basis": 50,
    "max_workers": 1,
    "conjecture_budget": 50_000,
}

VERDICT_COLUMNS = ("claim_id", "status", "parameters", "witness")
CONJECTURE_COLUMNS = (
    "n",
    "k",
    "rank",
    "expected",
    "scalar",
    "matches",
    "descends",
    "descent_checked",
)

ClaimResult = Verdict | ConjectureTable


class ConfigError(ValueError):
    """Raised for unusable flags, config files, matrix files or claim ids."""


USAGE_ERRORS = (
    ConfigError,
    SchurSyntaxError,
    RingSpecError,
    RingMismatchError,
    ScalarSyntaxError,
    ShapeMismatchError,
    UnsupportedRingError,
    DegreeMismatchError,
    DivisibilityError,
    BudgetExceededError,
    NotDivisibleError,
    MapParameterError,
    ClaimParameterError,
    MatrixFormatError,
    OSError,
)


@dataclass(frozen=True)
class CliConfig:
    """Flags merged over the optional config file and the built-in defaults."""

    command: str
    ring: str | None
    seed: int
    output: str
    budget_dim: int
    budget_indeterminates: int
    trials: int
    entry_bound: int
    max_basis: int
    max_workers: int
    conjecture_budget: int
    progress: bool


def load_config(path: Path | None) -> dict[str, Any]:
    """Load a JSON config and merge it over the built-in defaults."""
    config = json.loads(json.dumps(DEFAULT_CONFIG))
    if path is None:
        return config
    with path.open("r", encoding="utf-8") as file_obj:
        try:
            user_config = json.load(file_obj)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(user_config, dict):
        raise ConfigError(f"Config file {path} must hold a JSON object")
    unknown = sorted(set(user_config) - set(DEFAULT_CONFIG))
    if unknown:
        raise ConfigError(f"Unknown config key(s) in {path}: {', '.join(unknown)}")
    for key, value in user_config.items():
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"Config key {key!r} must be an integer, got {value!r}")
    config.update(user_config)
    return config


def resolve_config(args: argparse.Namespace) -> CliConfig:
    config = load_config(getattr(args, "config", None))
    budget = getattr(args, "budget", None)
    if budget is not None:
        config["budget_dim"] = budget
    for key in ("seed", "trials", "entry_bound", "max_basis", "max_workers"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    if config["max_workers"] < 1:
        raise ConfigError("--max-workers must be at least 1")
    return CliConfig(
        command=args.command,
        ring=getattr(args, "ring", None),
        output=getattr(args, "output", "text"),
        progress=getattr(args, "progress", False),
        **config,
    )


def setup_logging(log_file: Path | None, verbose: bool = False) -> logging.Logger:
    """Configure stderr and optional file logging for the package."""
    logger = logging.getLogger("schurtypes")
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
    logger.handlers.clear()
    formatter = logging.Formatter("%(asctime)s %(levelname)s %(message)s")

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(formatter)
    logger.addHandler(console)

    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def report_columns(results: list[ClaimResult]) -> tuple[str, ...]:
    """Verdict columns, followed by the table columns when a conjecture table is present."""
    if any(isinstance(result, ConjectureTable) for result in results):
        return VERDICT_COLUMNS + CONJECTURE_COLUMNS
    return VERDICT_COLUMNS


def report_rows(results: list[ClaimResult]) -> list[dict[str, Any]]:
    """One row per verdict and one per conjecture row, each keyed by every report column.

    Cells keep their native types; a column a row has no value for is ``None``.
    """
    columns = report_columns(results)
    rows: list[dict[str, Any]] = []
    for result in results:
        if isinstance(result, Verdict):
            entries = [
                {
                    "claim_id": result.claim_id,
                    "status": result.status,
                    "parameters": result.parameters,
                    "witness": result.evidence.get("witness"),
                }
            ]
        else:
            entries = [
                {
                    "claim_id": result.claim_id,
                    "status": "table",
                    "parameters": result.parameters,
                    **row.to_dict(),
                }
                for row in result.rows
            ]
        rows.extend({column: entry.get(column) for column in columns} for entry in entries)
    return rows


def csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def write_csv(path: Path, results: list[ClaimResult]) -> None:
    """Write the report as CSV; nested parameters and witnesses become JSON cells."""
    columns = report_columns(results)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as file_obj:
        writer = csv.writer(file_obj)
        writer.writerow(columns)
        for row in report_rows(results):
            writer.writerow([csv_cell(row[column]) for column in columns])


def write_json(path: Path, results: list[ClaimResult]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as file_obj:
        json.dump(report_rows(results), file_obj, indent=2, sort_keys=True)
        file_obj.write("\n")


def write_report(path: Path, results: list[ClaimResult]) -> None:
    """Write a ``.json`` report or, for any other suffix, a CSV report."""
    if path.suffix.lower() == ".json":
        write_json(path, results)
    else:
        write_csv(path, results)


def emit_json(payload: Any) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def ast_to_dict(expr: TensorModule) -> dict[str, Any]:
    if isinstance(expr, DirectSum):
        return {"kind": "sum", "summands": [ast_to_dict(summand) for summand in expr.summands]}
    if isinstance(expr, Base):
        return {"kind": "M"}
    if isinstance(expr, (Sym, Wedge)):
        return {
            "kind": "S" if isinstance(expr, Sym) else "W",
            "r": expr.r,
            "child": ast_to_dict(expr.child),
        }
    assert isinstance(expr, TensorProduct)
    return {"kind": "T", "children": [ast_to_dict(child) for child in expr.children]}


def render_matrix(matrix: ExactMatrix) -> list[str]:
    """Aligned text rows, each prefixed with its codomain label when there is one."""
    cells = matrix.formatted_rows()
    widths = [max((len(row[j]) for row in cells), default=1) for j in range(matrix.cols)]
    labels = [str(label) for label in matrix.codomain_labels or ()]
    label_width = max((len(label) for label in labels), default=0)
    lines = [f"ring {matrix.spec}, {matrix.rows}x{matrix.cols}"]
    if matrix.domain_labels is not None:
        lines.append("columns: " + " ".join(str(label) for label in matrix.domain_labels))
    for i, row in enumerate(cells):
        body = "  ".join(value.rjust(width) for value, width in zip(row, widths))
        prefix = f"{labels[i].ljust(label_width)} | " if labels else ""
        lines.append(f"{prefix}[ {body} ]")
    return lines


def cmd_inspect(args: argparse.Namespace, config: CliConfig) -> int:
    expr = parse_schur_expr(args.expr)
    labels = enumerate_basis(expr, args.n)
    shown = labels[: config.max_basis]
    payload = {
        "expression": format_expr(expr),
        "ast": ast_to_dict(expr),
        "n": args.n,
        "degree": degree_of(expr),
        "rank": rank_of(expr, args.n),
        "summands": [
            {
                "expression": format_expr(summand),
                "degree": degree_of(summand),
                "rank": rank_of(summand, args.n),
            }
            for summand in expression_summands(expr)
        ],
        "basis": [str(label) for label in shown],
        "basis_truncated": len(shown) < len(labels),
    }
    if config.output == "json":
        emit_json(payload)
        return EXIT_OK
    print(f"expression: {payload['expression']}")
    print(f"degree: {payload['degree']}")
    print(f"rank at n={args.n}: {payload['rank']}")
    if isinstance(expr, DirectSum):
        for summand in payload["summands"]:
            print(f"  {summand['expression']}: degree {summand['degree']}, rank {summand['rank']}")
    print(f"basis ({len(labels)}):")
    for label in payload["basis"]:
        print(f"  {label}")
    if payload["basis_truncated"]:
        print(f"  ... {len(labels) - len(shown)} more (raise --max-basis to list them)")
    return EXIT_OK


def cmd_induced(args: argparse.Namespace, config: CliConfig) -> int:
    expr = parse_schur_expr(args.expr)
    if args.generic is not None:
        matrix = generic_matrix(args.generic)
    elif args.matrix is not None:
        try:
            matrix = load_matrix(args.matrix)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Matrix file {args.matrix} is not valid JSON: {exc}") from exc
    else:
        raise ConfigError("induced needs a matrix file or --generic N")
    if config.ring is not None:
        matrix = matrix.change_ring(RingSpec.parse(config.ring))
    started = time.perf_counter()
    induced = induced_map(expr, matrix)
    LOGGER.info(
        "Induced %s on a %sx%s matrix in %.2fs",
        format_expr(expr),
        matrix.rows,
        matrix.cols,
        time.perf_counter() - started,
    )
    det = determinant(induced) if args.det else None
    if config.output == "json":
        payload: dict[str, Any] = {"expression": format_expr(expr), "matrix": induced.to_json_dict()}
        if det is not None:
            payload["determinant"] = str(det)
        emit_json(payload)
        return EXIT_OK
    print("\n".join(render_matrix(induced)))
    if det is not None:
        print(f"determinant: {det}")
    return EXIT_OK


def cmd_map(args: argparse.Namespace, config: CliConfig) -> int:
    spec = RingSpec.parse(config.ring) if config.ring is not None else RingSpec.integers()
    try:
        built = named_map(
            args.name, rank=args.rank, spec=spec, n=args.n, k=args.k, allow_odd=args.allow_odd
        )
    except DescentError as exc:
        LOGGER.error("%s", exc)
        if config.output == "json":
            emit_json({"name": args.name, "error": str(exc), "witness": exc.witness.to_dict()})
        return EXIT_DESCENT
    if config.output == "json":
        emit_json(built.to_dict())
        return EXIT_OK
    print(f"{built.name}: {format_expr(built.src_expr)} -> {format_expr(built.dst_expr)} at rank {built.n}")
    print("\n".join(render_matrix(built.matrix)))
    certificate = built.certificate()
    print(
        f"descent certificate: {certificate['checked_tensors']} tensor(s) checked, "
        f"residual {certificate['residual_rows']}x{certificate['residual_cols']} is zero"
    )
    return EXIT_OK


def run_claim(claim_id: str, args: argparse.Namespace, config: CliConfig) -> ClaimResult:
    started = time.perf_counter()
    LOGGER.info("Checking %s", claim_id)
    ring = RingSpec.parse(config.ring) if config.ring is not None else None
    result: ClaimResult
    if claim_id == "det":
        if args.expr is None:
            raise ConfigError("verify det needs --expr")
        result = check_det_identity(
            parse_schur_expr(args.expr),
            args.n if args.n is not None else 2,
            args.mode,
            trials=config.trials,
            entry_bound=config.entry_bound,
            seed=config.seed,
            budget_dim=config.budget_dim,
            budget_indeterminates=config.budget_indeterminates,
            progress=config.progress,
        )
    elif claim_id == "t42_scalars":
        result = verify_composition_scalars(spec=ring or RingSpec.integers())
    elif claim_id == "t43":
        result = verify_theorem_4_3(spec=ring or RingSpec.integers())
    elif claim_id == "t52":
        result = verify_theorem_5_2(args.rank, ring or RingSpec.localized([3]))
    elif claim_id == "t54":
        result = verify_theorem_5_4(args.rank, ring or RingSpec.localized([3]))
    elif claim_id == "lemma51":
        result = check_wedge_factorization(
            args.m,
            args.n if args.n is not None else 1,
            args.lemma_trials,
            config.seed,
            progress=config.progress,
        )
    elif claim_id == "conjecture":
        rows = explore_phi_conjecture(
            args.max_n,
            args.max_k,
            include_odd=args.include_odd,
            budget=config.conjecture_budget,
            spec=ring or RingSpec.integers(),
            progress=config.progress,
        )
        result = ConjectureTable(
            {"max_n": args.max_n, "max_k": args.max_k, "include_odd": args.include_odd},
            tuple(rows),
        )
    elif claim_id == "rank_identity":
        result = check_rank_identity(args.n_max)
    else:
        raise ConfigError(f"Unknown claim {claim_id!r}")
    status = result.status if isinstance(result, Verdict) else "table"
    LOGGER.info("%s finished in %.2fs: %s", claim_id, time.perf_counter() - started, status)
    return result


def exit_code_for(results: list[ClaimResult]) -> int:
    statuses = {result.status for result in results if isinstance(result, Verdict)}
    if DESCENT_FAILED in statuses:
        return EXIT_DESCENT
    if statuses & {REFUTED, NOT_SCALAR}:
        return EXIT_REFUTED
    return EXIT_OK


def print_result(result: ClaimResult) -> None:
    if isinstance(result, ConjectureTable):
        print(f"{result.claim_id}: exploratory table")
        print("  n  k  expected  scalar  descends  checked")
        for row in result.rows:
            descends = "unchecked" if row.descends is None else row.descends
            print(
                f"  {row.n}  {row.k}  {row.expected}  {row.scalar}  "
                f"{descends}  {row.descent_checked}"
            )
        return
    print(f"{result.claim_id}: {result.status}")
    for key, value in sorted(result.evidence.items()):
        if key == "inverse":
            continue
        print(f"  {key}: {json.dumps(value, sort_keys=True)}")


def cmd_verify(args: argparse.Namespace, config: CliConfig) -> int:
    claims = sorted(set(args.claims))
    unknown = [claim for claim in claims if claim not in CLAIMS]
    if unknown:
        raise ConfigError(f"Unknown claim(s): {', '.join(unknown)}")
    results: list[ClaimResult] = []
    if config.max_workers == 1 or len(claims) == 1:
        for claim in claims:
            results.append(run_claim(claim, args, config))
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=config.max_workers) as executor:
            futures = [executor.submit(run_claim, claim, args, config) for claim in claims]
            for future in concurrent.futures.as_completed(futures):
                results.append(future.result())
    results.sort(key=lambda result: result.claim_id)

    if args.report:
        write_report(args.report, results)
        LOGGER.info("Wrote verification report to %s", args.report)

    if config.output == "json":
        payloads = [result.to_dict() for result in results]
        emit_json(payloads[0] if len(payloads) == 1 else payloads)
    else:
        for result in results:
            print_result(result)
    return exit_code_for(results)


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _common_options() -> argparse.ArgumentParser:
    """Global flags accepted before or after the subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", default=argparse.SUPPRESS, help="Scalar ring, e.g. Z, Q, Z[1/3].")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--output", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument(
        "--budget",
        type=positive_int,
        default=argparse.SUPPRESS,
        help="Largest module dimension for symbolic determinant checks.",
    )
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS)
    common.add_argument("--log-file", type=Path, default=argparse.SUPPRESS)
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--progress", action="store_true", default=argparse.SUPPRESS)
    return common


def build_parser() -> argparse.ArgumentParser:
    """Create the command-line argument parser."""
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="schur-types",
        description="Exact induced maps and identity checks for Schur-type tensor modules.",
        parents=[common],
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    inspect = subparsers.add_parser(
        "inspect", parents=[common], help="Parse an expression and list its basis."
    )
    inspect.add_argument("expr")
    inspect.add_argument("--n", type=positive_int, default=2, help="Rank of the base module.")
    inspect.add_argument(
        "--max-basis", type=positive_int, help="Largest number of basis labels to list."
    )

    induced = subparsers.add_parser(
        "induced", parents=[common], help="Compute the induced map of a square matrix."
    )
    induced.add_argument("expr")
    induced.add_argument("matrix", nargs="?", type=Path, help="Matrix JSON file.")
    induced.add_argument(
        "--generic", type=positive_int, metavar="N", help="Use the N x N matrix of indeterminates."
    )
    induced.add_argument("--det", action="store_true", help="Also print the determinant.")

    maps = subparsers.add_parser("map", parents=[common], help="Build a named canonical map.")
    maps.add_argument("name", choices=sorted(MAP_BUILDERS))
    maps.add_argument("--n", type=positive_int, default=2)
    maps.add_argument("--k", type=positive_int, default=2)
    maps.add_argument("--rank", type=positive_int, default=2)
    maps.add_argument("--allow-odd", action="store_true")

    verify = subparsers.add_parser("verify", parents=[common], help="Check one or more claims.")
    verify.add_argument("claims", nargs="+", metavar="claim", help=", ".join(CLAIMS))
    verify.add_argument("--expr")
    verify.add_argument("--n", type=positive_int)
    verify.add_argument("--mode", choices=("symbolic", "random"), default="symbolic")
    verify.add_argument("--trials", type=positive_int, help="Random determinant trials.")
    verify.add_argument("--entry-bound", type=positive_int)
    verify.add_argument("--rank", type=positive_int, default=2)
    verify.add_argument("--m", type=positive_int, default=1)
    verify.add_argument(
        "--lemma-trials", type=positive_int, default=20, help="Unimodular trials for lemma51."
    )
    verify.add_argument("--max-n", type=positive_int, default=3)
    verify.add_argument("--max-k", type=positive_int, default=4)
    verify.add_argument("--n-max", type=positive_int, default=12)
    verify.add_argument("--include-odd", action="store_true")
    verify.add_argument("--report", type=Path)
    verify.add_argument("--max-workers", type=positive_int)
    return parser


COMMANDS = {
    "inspect": cmd_inspect,
    "induced": cmd_induced,
    "map": cmd_map,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    """Run the command-line workflow."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(getattr(args, "log_file", None), getattr(args, "verbose", False))
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](args, config)
    except DescentError as exc:
        LOGGER.error("%s", exc)
        if getattr(args, "output", "text") == "json":
            emit_json({"error": str(exc), "witness": exc.witness.to_dict()})
        return EXIT_DESCENT
    except USAGE_ERRORS as exc:
        parser.error(str(exc))
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
