import csv
import logging
import sys
from typing import Optional

import click
import orjson
from tqdm import tqdm

from qturan.core.exceptions import TuranError
from qturan.models.schemas import Pattern
from qturan.services import bounds, chains, construct, detect, solver
from qturan.services.pattern import out_star_leaves, parse_pattern
from qturan.utils.error_messages import EXIT_FAILURE, exit_code_for, format_cli_error
from qturan.utils.formats import load_qfam, save_qfam

logger = logging.getLogger(__name__)


class NRange(click.ParamType):
    """Inclusive dimension range written a..b."""
    name = "a..b"

    def convert(self, value, param, ctx):
        if isinstance(value, range):
            return value
        try:
            low, high = (int(part) for part in value.split(".."))
        except ValueError:
            self.fail(f"'{value}' is not of the form a..b", param, ctx)
        if not 1 <= low <= high:
            self.fail(f"need 1 <= a <= b, got '{value}'", param, ctx)
        return range(low, high + 1)


def _fail(error: Exception) -> None:
    logger.debug("Command failed", exc_info=True)
    click.echo(format_cli_error(error), err=True)
    raise click.exceptions.Exit(exit_code_for(error))


def _pattern(spec: str) -> Pattern:
    try:
        return parse_pattern(spec)
    except TuranError as e:
        _fail(e)


def _bool(value: bool) -> str:
    return "true" if value else "false"


def _dump_json(payload: dict) -> str:
    return orjson.dumps(payload, option=orjson.OPT_INDENT_2).decode()


pattern_option = click.option("--pattern", "pattern_spec", required=True, help="P:<k>, V:<r>, C4 or file:<path>")
dim_option = click.option("--n", "n", required=True, type=click.IntRange(min=1), help="Cube dimension")
family_option = click.option(
    "--family", "family_path", required=True, type=click.Path(exists=True, dir_okay=False), help="QFAM v1 file"
)


@click.command("construct")
@pattern_option
@dim_option
@click.option("--out", "out_path", type=click.Path(dir_okay=False, writable=True), help="Write QFAM v1 here")
@click.option(
    "--maximal",
    type=click.Choice(["ascending", "descending", "random"]),
    default=None,
    help="Greedily complete the construction to a maximal free family",
)
@click.option("--seed", type=int, default=None, help="Seed for --maximal random")
def construct_command(pattern_spec: str, n: int, out_path: Optional[str], maximal: Optional[str], seed: Optional[int]):
    """Build the best level construction, verify freeness and print its size."""
    p = _pattern(pattern_spec)
    try:
        family, method = construct.best_construction(n, p, verify=True)
        click.echo(f"construction: {method}")
        click.echo(f"size: {len(family)}")
        click.echo("free: true")
        if maximal:
            family = solver.complete_to_maximal(family, p, order=maximal, seed=seed)
            click.echo(f"maximal size ({maximal}): {len(family)}")
        if out_path:
            save_qfam(family, out_path)
            click.echo(f"written: {out_path}")
    except (TuranError, OSError) as e:
        _fail(e)


@click.command("check")
@pattern_option
@family_option
def check_command(pattern_spec: str, family_path: str):
    """Report whether a family is free of a pattern, with a witness copy if not."""
    p = _pattern(pattern_spec)
    try:
        family = load_qfam(family_path)
        witness = detect.contains_copy(family, p)
    except (TuranError, OSError) as e:
        _fail(e)
    if witness is None:
        click.echo("free")
        return
    click.echo("not free")
    for line in witness.describe(p):
        click.echo(f"  {line}")


@click.command("exact")
@pattern_option
@dim_option
@click.option("--method", type=click.Choice(["auto", "bruteforce", "bnb"]), default="auto", show_default=True)
@click.option("--timeout", type=click.FloatRange(min=0), default=None, help="Seconds (default from settings)")
@click.option("--json", "as_json", is_flag=True, help="Print the JSON report")
@click.option("--json-canonical", "canonical", is_flag=True, help="JSON report without elapsed_ms")
@click.option("--orbit/--no-orbit", "orbit", default=None, help="Split the branch and bound root over a cube level")
def exact_command(
    pattern_spec: str,
    n: int,
    method: str,
    timeout: Optional[float],
    as_json: bool,
    canonical: bool,
    orbit: Optional[bool],
):
    """Compute ex_v(F, Q_n) exactly by brute force or branch and bound."""
    p = _pattern(pattern_spec)
    try:
        result = solver.exact_exv(n, p, method=method, timeout=timeout, orbit_branching=orbit)
    except TuranError as e:
        _fail(e)

    report = result.to_report()
    if as_json or canonical:
        exclude = {"elapsed_ms"} if canonical else set()
        click.echo(_dump_json(report.model_dump(exclude=exclude)))
    else:
        status = "exact" if result.exact else "inexact (timeout)"
        click.echo(f"ex_v({p.name}, Q_{n}) = {result.value} [{status}]")
        click.echo(f"method: {result.method}, nodes: {result.nodes}, elapsed_ms: {report.elapsed_ms}")
        if not result.exact:
            click.echo(f"bounds: {result.lower_bound} <= ex_v <= {result.upper_bound}")
        click.echo("witness: " + " ".join(report.witness))
    if not result.exact:
        raise click.exceptions.Exit(EXIT_FAILURE)


@click.command("bound")
@pattern_option
@dim_option
@click.option("--json", "as_json", is_flag=True)
def bound_command(pattern_spec: str, n: int, as_json: bool):
    """Print the construction lower bound and the best upper bound."""
    p = _pattern(pattern_spec)
    try:
        report = bounds.pattern_bounds(n, p)
    except TuranError as e:
        _fail(e)
    if as_json:
        # bounds outgrow 64-bit integers
        click.echo(report.model_dump_json(indent=2))
        return
    click.echo(f"lower: {report.lower} ({report.lower_method})")
    note = "" if report.certified else ", asymptotic-only"
    click.echo(f"upper: {report.upper} ({report.upper_method}{note})")
    click.echo(f"certified: {_bool(report.certified)}")
    if report.vacuous:
        click.echo("note: estimate is at least 2^n at this dimension")


@click.command("chains")
@family_option
@click.option("--lubell", "show_lubell", is_flag=True, help="Lubell function")
@click.option("--profile", "show_profile", is_flag=True, help="Chain profile C_0..C_{n+1}")
@click.option("--fat", "fat_k", type=click.IntRange(min=0), default=None, help="Chains with at least k members")
@click.option("--weight", "show_weight", is_flag=True, help="Total binomial chain weight")
def chains_command(family_path: str, show_lubell: bool, show_profile: bool, fat_k: Optional[int], show_weight: bool):
    """Exact chain statistics of a family."""
    if not (show_lubell or show_profile or show_weight or fat_k is not None):
        show_lubell = show_profile = show_weight = True
    try:
        family = load_qfam(family_path)
        if show_lubell:
            value = chains.lubell(family)
            click.echo(f"lubell: {value.numerator}/{value.denominator} = {value.value} (~{float(value.value):.6f})")
        if show_profile:
            stats = chains.chain_profile(family)
            for t, count in enumerate(stats.counts):
                click.echo(f"C_{t}: {count}")
        if fat_k is not None:
            click.echo(f"fat({fat_k}): {chains.fat_chain_count(family, fat_k)}")
        if show_weight:
            weight = chains.total_chain_weight(family)
            click.echo(f"total_chain_weight: {weight}")
    except (TuranError, OSError) as e:
        _fail(e)


@click.command("table")
@pattern_option
@click.option("--n-range", "n_values", required=True, type=NRange(), help="Inclusive range a..b")
@click.option("--csv", "csv_path", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--growth", is_flag=True, help="V_r construction growth report instead of bounds")
def table_command(pattern_spec: str, n_values: range, csv_path: str, growth: bool):
    """Write a CSV table of bounds (or the V_r growth report) over a range of n."""
    p = _pattern(pattern_spec)
    try:
        if growth:
            leaves = out_star_leaves(p)
            if leaves is None or leaves < 2:
                raise TuranError(f"--growth needs an out-star V:<r> with r >= 2, got {p.name}")
            header = ["n", "size", "excess", "ratio"]
            rows = [
                [row.n, row.size, row.excess, f"{float(row.ratio):.6f}"]
                for row in construct.vr_growth_report(leaves, n_values)
            ]
        else:
            header = ["n", "lower", "upper", "exact", "certified", "method"]
            rows = [
                [row.n, row.lower, row.upper, _bool(row.exact), _bool(row.certified), row.method]
                for n in tqdm(n_values, desc=f"table {p.name}", disable=None, file=sys.stderr)
                for row in bounds.bound_table(p, [n])
            ]
        # nothing touches the file until every row is computed
        with open(csv_path, "w", newline="", encoding="utf-8") as sink:
            writer = csv.writer(sink, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except (TuranError, OSError) as e:
        _fail(e)
    click.echo(f"written: {csv_path} ({len(rows)} rows)")


@click.command("export")
@pattern_option
@dim_option
@click.option("--wcnf", "wcnf_path", required=True, type=click.Path(dir_okay=False, writable=True))
def export_command(pattern_spec: str, n: int, wcnf_path: str):
    """Export the MaxSAT (WCNF) instance whose optimum is ex_v(F, Q_n)."""
    p = _pattern(pattern_spec)
    try:
        with open(wcnf_path, "w", encoding="utf-8") as sink:
            stats = solver.export_wcnf(n, p, sink)
    except (TuranError, OSError) as e:
        _fail(e)
    click.echo(f"nv={stats.nv} nc={stats.nc} top={stats.top} soft={stats.soft} hard={stats.hard}")


ALL_COMMANDS = [
    construct_command,
    check_command,
    exact_command,
    bound_command,
    chains_command,
    table_command,
    export_command,
]