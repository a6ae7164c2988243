"""
Qudit secret-sharing laboratory: command-line entry point
"""
import argparse
import sys
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator
from rich.markup import escape

from attacks import (
    BENCHMARK_COLUMNS, benchmark_dimensions, benchmark_rows, intercept_resend_report,
    intercept_resend_session, outsider_probe_audit, participant_report, participant_session,
)
from config import (
    DEFAULT_BENCHMARK_ROUNDS, DEFAULT_PARTIES, DEFAULT_ROUNDS, DEFAULT_SEED,
    DEFAULT_TEST_FRACTION, EXAMPLE_EXPERIMENTS, IDENTITY_TOLERANCE, LOG_LEVEL,
    MAX_AUDIT_DIMENSION, MAX_ENUMERATION, STATE_TOLERANCE,
)
from protocol import AnnouncementOrder, ProtocolVariant, SessionConfig, SessionOrchestrator
from quantum.bases import (
    BasisKind, family_is_orthonormal, max_mbb_law_error, max_unbiasedness_error,
    projector_set, same_projector_sets, validate_dimension,
)
from quantum.errors import QssError
from quantum.ghz import GhzSpec, lookup_table, residual_matching_error, verify_uniqueness
from utils.console import console, setup_logging, show_agent_working, show_checks, show_stage
from utils.exporters import results_path, write_csv, write_json, write_jsonl

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_USAGE = 2
EXIT_IO = 3

COMMANDS = ("lookup-table", "benchmark-detection", "simulate", "verify")
FORMATS = {
    "lookup-table": ("json",),
    "benchmark-detection": ("csv", "json"),
    "simulate": ("jsonl", "json"),
    "verify": ("json",),
}


class CliConfig(BaseModel):
    """Validated command-line options"""
    subcommand: Literal["lookup-table", "benchmark-detection", "simulate", "verify"]
    d: Optional[int] = Field(default=None, ge=2, description="Register dimension")
    d_range: Optional[str] = Field(default=None, description="Inclusive range a..b for benchmarks")
    n: int = Field(default=DEFAULT_PARTIES, ge=2, description="Number of parties")
    kind: BasisKind = BasisKind.MUB
    variant: ProtocolVariant = ProtocolVariant.ORIGINAL
    rounds: Optional[int] = Field(default=None, ge=1)
    test_fraction: float = Field(default=DEFAULT_TEST_FRACTION, gt=0.0, lt=1.0)
    seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2 ** 64)
    attack: Literal["none", "intercept", "participant"] = "none"
    out: Optional[Path] = None
    format: Optional[Literal["json", "csv", "jsonl"]] = None
    verbose: bool = False

    @model_validator(mode="after")
    def _check_command_options(self):
        if self.subcommand == "benchmark-detection":
            if self.d_range is None and self.d is None:
                raise ValueError("benchmark-detection needs --d-range a..b or --d")
            low, high = self.dimension_bounds
            if not 2 <= low <= high:
                raise ValueError(f"--d-range must satisfy 2 <= a <= b, got {self.d_range}")
        elif self.d is None:
            raise ValueError(f"{self.subcommand} needs --d")
        if self.format is not None and self.format not in FORMATS[self.subcommand]:
            raise ValueError(f"{self.subcommand} writes {' or '.join(FORMATS[self.subcommand])}, not {self.format}")
        return self

    @property
    def dimension_bounds(self) -> tuple[int, int]:
        if self.d_range is None:
            return self.d, self.d
        try:
            low, high = (int(part) for part in self.d_range.split(".."))
        except ValueError as exc:
            raise ValueError(f"--d-range must look like 3..31, got {self.d_range!r}") from exc
        return low, high

    @property
    def output_format(self) -> str:
        return self.format or FORMATS[self.subcommand][0]

    def session_config(self) -> SessionConfig:
        return SessionConfig(
            d=self.d,
            n=self.n,
            kind=self.kind,
            variant=self.variant,
            rounds=self.rounds or DEFAULT_ROUNDS,
            test_fraction=self.test_fraction,
            seed=self.seed,
            announcement_order=AnnouncementOrder.RUSHING if self.attack == "participant" else AnnouncementOrder.SIMULTANEOUS,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Qudit secret-sharing laboratory")
    parser.add_argument("--preset", choices=sorted(EXAMPLE_EXPERIMENTS), help="Run a named reproduction preset")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Logging level for library diagnostics")
    subparsers = parser.add_subparsers(dest="subcommand")
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--d", type=int, help="Register dimension")
        sub.add_argument("--n", type=int, default=DEFAULT_PARTIES, help="Number of parties, dealer included")
        sub.add_argument("--kind", choices=[k.value for k in (BasisKind.MUB, BasisKind.MBB)], default=BasisKind.MUB.value)
        sub.add_argument("--variant", choices=[v.value for v in ProtocolVariant], default=ProtocolVariant.ORIGINAL.value)
        sub.add_argument("--rounds", type=int, help="Rounds per session or per benchmark dimension")
        sub.add_argument("--test-fraction", type=float, default=DEFAULT_TEST_FRACTION)
        sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sub.add_argument("--attack", choices=["none", "intercept", "participant"], default="none")
        sub.add_argument("--out", type=Path, help="Output file (default under the results folder)")
        sub.add_argument("--format", choices=["json", "csv", "jsonl"])
        sub.add_argument("--verbose", action="store_true", help="Show party and adversary activity")
        if name == "benchmark-detection":
            sub.add_argument("--d-range", help="Inclusive dimension range a..b")
    return parser


def expand_preset(argv: list[str]) -> list[str]:
    """Replace ``--preset NAME`` with the preset's arguments, keeping any extra flags"""
    if "--preset" not in argv:
        return argv
    position = argv.index("--preset")
    if position + 1 >= len(argv) or argv[position + 1] not in EXAMPLE_EXPERIMENTS:
        raise QssError(f"--preset must be one of {', '.join(sorted(EXAMPLE_EXPERIMENTS))}")
    rest = argv[:position] + argv[position + 2:]
    head = []
    if "--log-level" in rest:
        i = rest.index("--log-level")
        head, rest = rest[i:i + 2], rest[:i] + rest[i + 2:]
    return head + EXAMPLE_EXPERIMENTS[argv[position + 1]] + rest


def cmd_lookup_table(cli: CliConfig) -> int:
    table = lookup_table(cli.d, cli.n, cli.kind)
    out = cli.out or results_path(f"lookup_{cli.kind.value}_d{cli.d}_n{cli.n}.json")
    write_json(out, table.to_json_dict())
    console.print(f"Lookup table with {len(table.rows)} rows saved to: {out}")
    return EXIT_OK


def cmd_benchmark_detection(cli: CliConfig) -> int:
    low, high = cli.dimension_bounds
    d_values = benchmark_dimensions(cli.kind, low, high)
    if not d_values:
        for d in range(low, high + 1):
            validate_dimension(d, cli.kind)
    rounds = cli.rounds or DEFAULT_BENCHMARK_ROUNDS
    if cli.verbose:
        show_stage("Intercept-resend benchmark", f"{cli.kind.value} bases, d in {d_values}, {rounds} rounds each")
    rows = benchmark_rows(cli.kind, d_values, rounds, cli.seed, verbose=cli.verbose)
    out = cli.out or results_path(f"benchmark_{cli.kind.value}_{low}-{high}.{cli.output_format}")
    if cli.output_format == "csv":
        write_csv(out, rows, BENCHMARK_COLUMNS)
    else:
        write_json(out, rows)
    console.print(f"Benchmark with {len(rows)} rows saved to: {out}")
    return EXIT_OK


def cmd_simulate(cli: CliConfig) -> int:
    cfg = cli.session_config()
    orchestrator = SessionOrchestrator(cfg, verbose=cli.verbose)
    rng = cfg.rng()
    if cli.attack == "intercept":
        transcripts = intercept_resend_session(cfg, rng)
    elif cli.attack == "participant":
        if cli.verbose:
            show_agent_working("Charlie*", "replacing the GHZ source with two EPR pairs")
        transcripts = participant_session(cfg, rng)
    else:
        transcripts = orchestrator.run_rounds(rng)
    result = orchestrator.finalize(transcripts, rng)
    if cli.attack == "intercept":
        result.attack = intercept_resend_report(cfg, result.transcripts).summary()
    elif cli.attack == "participant":
        result.attack = participant_report(cfg, result.transcripts, result.stats).summary()

    base = Path(cli.out or results_path(f"session_{cfg.variant.value}_{cfg.kind.value}_d{cfg.d}_n{cfg.n}_{cli.attack}"))
    if cli.output_format == "json":
        summary_path = write_json(cli.out or base.with_name(base.name + ".summary.json"), result.summary())
        console.print(f"Session summary saved to: {summary_path}")
        return EXIT_OK
    if base.suffix == ".jsonl":
        base = base.with_suffix("")
    transcript_path = write_jsonl(base.with_name(base.name + ".jsonl"), (t.to_json_line() for t in result.transcripts))
    summary_path = write_json(base.with_name(base.name + ".summary.json"), result.summary())
    console.print(f"Results saved to: {transcript_path.parent}")
    console.print(f"  • Transcript: {transcript_path.name}")
    console.print(f"  • Summary: {summary_path.name}")
    return EXIT_OK


def verification_checks(cli: CliConfig) -> tuple[list[tuple[str, bool, str]], dict]:
    d, n, kind = cli.d, cli.n, cli.kind
    validate_dimension(d, kind)
    spec = GhzSpec(d=d, n=n)
    report = verify_uniqueness(spec, kind)
    checks = [
        ("GHZ uniqueness", report.passed,
         f"max V-perp overlap {max(report.max_type1_overlap, report.max_type2_overlap):.6f} < {report.min_ghz_overlap:.6f}"),
        ("Type-1 overlaps", abs(report.max_type1_overlap - report.expected_type1_overlap) <= STATE_TOLERANCE,
         f"{report.max_type1_overlap:.12f} vs d^(-n/2) = {report.expected_type1_overlap:.12f}"),
        ("Type-2 overlaps", report.max_type2_overlap <= IDENTITY_TOLERANCE, f"{report.max_type2_overlap:.3e}"),
        ("Diagonal phases cancel", report.phases_cancel, "<Lambda|jj...j> = d^(-n/2) for every j"),
        ("<Lambda|GHZ> = d^((1-n)/2)",
         max(abs(report.min_ghz_overlap - report.derived_ghz_overlap), abs(report.max_ghz_overlap - report.derived_ghz_overlap)) <= STATE_TOLERANCE,
         f"measured {report.min_ghz_overlap:.12f}"),
        ("Basis family orthonormal", family_is_orthonormal(kind, d), f"{d} bases"),
    ]
    details = {"uniqueness": report.model_dump(mode="json")}
    if kind is BasisKind.MUB:
        error = max_unbiasedness_error(d)
        checks.append(("MUB unbiasedness", error <= STATE_TOLERANCE, f"max deviation {error:.3e}"))
    else:
        error = max_mbb_law_error(d)
        checks.append(("MBB overlap law", error <= IDENTITY_TOLERANCE, f"max deviation {error:.3e}"))
    if d == 3:
        same = same_projector_sets(projector_set(BasisKind.MUB, 3), projector_set(BasisKind.MBB, 3))
        checks.append(("d=3 MBB equals MUB", same, "rank-1 projector sets"))
    if d ** (2 * (n - 1)) <= MAX_ENUMERATION:
        residual = residual_matching_error(spec, kind)
        checks.append(("Residual matches dealer vector", residual <= STATE_TOLERANCE, f"max 1 - fidelity {residual:.3e}"))
    if spec.size <= MAX_AUDIT_DIMENSION:
        audit = outsider_probe_audit(d, n, kind)
        checks.append(("Outsider probe audit", audit.passed,
                       f"{len(audit.survivors)} survivors, undetectable subspace dim {audit.undetectable_dimension}"))
        details["outsider_audit"] = audit.model_dump(mode="json", exclude={"uniqueness"})
    return checks, details


def cmd_verify(cli: CliConfig) -> int:
    checks, details = verification_checks(cli)
    show_checks(f"Invariants for d={cli.d}, n={cli.n}, {cli.kind.value}", checks)
    report = details["uniqueness"]
    console.print(
        f"<Lambda|GHZ> measured {report['min_ghz_overlap']:.12f}; "
        f"d^((1-n)/2) = {report['derived_ghz_overlap']:.12f}; d^(1-n/2) = {report['alternate_ghz_overlap']:.12f}"
    )
    passed = all(ok for _, ok, _ in checks)
    if cli.out is not None:
        details["checks"] = [{"name": name, "passed": ok, "detail": detail} for name, ok, detail in checks]
        details["passed"] = passed
        write_json(cli.out, details)
    return EXIT_OK if passed else EXIT_INVARIANT


HANDLERS = {
    "lookup-table": cmd_lookup_table,
    "benchmark-detection": cmd_benchmark_detection,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
}


def main(argv: Optional[list[str]] = None) -> int:
    """Main function; returns the process exit code"""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = expand_preset(argv)
        args = build_parser().parse_args(argv)
    except QssError as e:
        console.print(f"[red]{escape(str(e))}[/red]")
        return EXIT_USAGE
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        setup_logging(args.log_level)
    except ValueError:
        console.print(f"[red]unknown log level {escape(args.log_level)}[/red]")
        return EXIT_USAGE
    if args.subcommand is None:
        console.print("[red]choose a subcommand: " + ", ".join(COMMANDS) + "[/red]")
        return EXIT_USAGE

    options = {key: value for key, value in vars(args).items() if key not in ("preset", "log_level")}
    try:
        cli = CliConfig(**options)
        return HANDLERS[cli.subcommand](cli)
    except (ValidationError, QssError) as e:
        console.print(f"[red]Invalid arguments:[/red] {escape(str(e))}")
        return EXIT_USAGE
    except OSError as e:
        console.print(f"[red]Could not write results:[/red] {escape(str(e))}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
