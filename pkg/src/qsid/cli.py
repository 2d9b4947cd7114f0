"""Command-line front end: ``qsid verify | expand | table | count | suite``.

Exit status is 0 when every check passes, 1 when a check fails (or a product
diverges), and 2 for usage errors.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

import click

from . import identities as ids
from .partitions import PartitionError, count_A, count_B, table_csv, table_header, table_rows
from .products import DivergentFactor, ProductSpec, expand_product, expand_theta, load_spec
from .qseries import SeriesError
from .report import SCHEMA_VERSION, format_exponent


class Rational(click.ParamType):
    name = "rational"

    def convert(self, value: Any, param: Any, ctx: Any) -> Fraction:
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational number such as 300 or 7/2", param, ctx)


RATIONAL = Rational()


def _format_option(*choices: str):
    return click.option(
        "--format", "fmt", type=click.Choice(choices), default=choices[0],
        show_default=True, help="Output format.",
    )


_output_option = click.option(
    "-o", "--output", type=click.Path(dir_okay=False, writable=True),
    help="Write to this file instead of standard output.",
)


def _emit(text: str, output: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2)


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Exact q-series expansion and identity verification."""


@main.command()
@click.option("--identity", "name", required=True, help="Registered identity name.")
@click.option("--l", "l", type=int)
@click.option("--s", "s", type=int)
@click.option("--r", "r", type=int, help="Theta parameter (kappa_product).")
@click.option("--u", "u", type=int, help="Shift parameter (kappa_shift).")
@click.option("--order", type=RATIONAL, help="Compare below q^ORDER (default from the defaults file).")
@click.option("--reading", help="Alternative reading of an ambiguous formula.")
@_format_option("text", "json")
@click.option("--no-timing", is_flag=True, help="Omit elapsed time for byte-stable output.")
@_output_option
def verify(name, l, s, r, u, order, reading, fmt, no_timing, output) -> None:
    """Check one identity coefficient by coefficient."""
    params = {k: v for k, v in (("l", l), ("s", s), ("r", r), ("u", u)) if v is not None}
    try:
        ids.validate(name, params, reading)
        if order is not None:
            ids.check_order(order)
        rep = ids.verify(name, params, order, reading)
    except ids.IdentityError as exc:
        raise click.UsageError(str(exc)) from None
    timing = not no_timing
    _emit(_dump(rep.to_dict(timing)) if fmt == "json" else rep.summary(timing), output)
    sys.exit(0 if rep.passed else 1)


def _read_spec(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise click.UsageError(f"cannot read spec file: {exc}") from None
    try:
        return load_spec(text)
    except json.JSONDecodeError as exc:
        raise click.UsageError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise click.UsageError(f"{path}: invalid spec: {exc}") from None


@main.command()
@click.option("--spec", "spec_path", required=True, help="JSON product or theta spec.")
@click.option("--order", type=RATIONAL, required=True, help="Expand below q^ORDER.")
@_format_option("text", "json", "csv")
@_output_option
def expand(spec_path, order, fmt, output) -> None:
    """Expand a product or theta spec and list its nonzero coefficients."""
    spec = _read_spec(spec_path)
    try:
        ids.check_order(order)
    except ids.IdentityError as exc:
        raise click.UsageError(str(exc)) from None
    try:
        series = expand_product(spec, order) if isinstance(spec, ProductSpec) else expand_theta(spec, order)
    except DivergentFactor as exc:
        click.echo(f"Error: divergent product: {exc}", err=True)
        sys.exit(1)
    except SeriesError as exc:
        raise click.UsageError(str(exc)) from None
    terms = [(format_exponent(e), c) for e, c in series.terms()]
    if fmt == "json":
        text = _dump({
            "schema": SCHEMA_VERSION,
            "order": format_exponent(series.order),
            "terms": [[e, str(c)] for e, c in terms],
        })
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["exponent", "coefficient"])
        w.writerows(terms)
        text = buf.getvalue()
    else:
        text = "".join(f"{e}, {c}\n" for e, c in terms)
    _emit(text, output)


def _check_nmax(nmax: int) -> None:
    if nmax > ids.max_order():
        raise click.UsageError(f"--nmax {nmax} exceeds the cap {ids.max_order()}")


def _text_table(header: list[str], rows: list[list[int]]) -> str:
    cells = [header] + [[str(x) for x in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    return "".join(
        "  ".join(c.rjust(w) for c, w in zip(row, widths)).rstrip() + "\n" for row in cells
    )


@main.command()
@click.option("--l", "l", type=int, required=True, help="Odd level l >= 3.")
@click.option("--nmax", type=click.IntRange(min=1), required=True)
@_format_option("text", "json", "csv")
@_output_option
def table(l, nmax, fmt, output) -> None:
    """Tabulate A_l(n) and B_{l,s}(n) for 1 <= n <= NMAX."""
    _check_nmax(nmax)
    try:
        header, rows = table_header(l), table_rows(l, nmax)
    except PartitionError as exc:
        raise click.UsageError(str(exc)) from None
    if fmt == "csv":
        text = table_csv(l, nmax)
    elif fmt == "json":
        text = _dump({"schema": SCHEMA_VERSION, "l": l, "columns": header, "rows": rows})
    else:
        text = _text_table(header, rows)
    _emit(text, output)


@main.command()
@click.option("--l", "l", type=int, required=True, help="Odd level l >= 3.")
@click.option("--s", "s", type=int, help="Count B_{l,s}; omit to count A_l.")
@click.option("--nmax", type=click.IntRange(min=0), required=True)
@_format_option("text", "json", "csv")
@_output_option
def count(l, s, nmax, fmt, output) -> None:
    """Count partitions of every n <= NMAX in the A_l or B_{l,s} family."""
    _check_nmax(nmax)
    try:
        tab = count_A(l, nmax) if s is None else count_B(l, s, nmax)
    except PartitionError as exc:
        raise click.UsageError(str(exc)) from None
    if fmt == "csv":
        text = tab.to_csv()
    elif fmt == "json":
        text = _dump({
            "schema": SCHEMA_VERSION, "l": l, "s": s,
            "counts": [str(c) for c in tab.counts],
        })
    else:
        text = _text_table(["n", "count"], [[n, c] for n, c in enumerate(tab.counts)])
    _emit(text, output)


@main.command()
@click.option("--config", "config_path", help="JSON list of cases (default: the built-in suite).")
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@_format_option("text", "json")
@click.option("--no-timing", is_flag=True, help="Omit elapsed time for byte-stable output.")
@_output_option
def suite(config_path, jobs, fmt, no_timing, output) -> None:
    """Run a list of identity checks; exit 1 if any fails."""
    config = None
    if config_path:
        try:
            config = json.loads(Path(config_path).read_text())
        except OSError as exc:
            raise click.UsageError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise click.UsageError(
                f"{config_path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from None
    try:
        reports = ids.run_suite(config, jobs=jobs)
    except ids.IdentityError as exc:
        raise click.UsageError(str(exc)) from None
    timing = not no_timing
    failed = sum(not r.passed for r in reports)
    if fmt == "json":
        text = _dump({
            "schema": SCHEMA_VERSION,
            "passed": len(reports) - failed,
            "failed": failed,
            "reports": [r.to_dict(timing) for r in reports],
        })
    else:
        lines = [r.summary(timing) for r in reports]
        lines.append(f"{len(reports) - failed} passed, {failed} failed")
        text = "\n".join(lines)
    _emit(text, output)
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
