"""Command line interface of the i4mirror engine."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Generator, Mapping

import click
from click_spinner import spinner
from tabulate import tabulate

from . import __version__
from .artifacts import (
    OutputSchemas,
    provenance,
    series_document,
    write_json,
    write_series_csv,
)
from .config import CONFIG_PATH, DEVELOP_MODE, RunConfig
from .exceptions import (
    ConfigError,
    DomainPointError,
    I4MirrorError,
    InvariantViolation,
    TruncationError,
)
from .qseries import QSeries
from .utils import fraction_to_str, parse_complex, parse_fraction, parse_int_vector

logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_VERIFICATION_FAILED = 3
EXIT_INVARIANT = 4


@contextmanager
def _spinner_with_message(
    message: str, message_final: str = "Done.\n"
) -> Generator[None, None, None]:
    try:
        click.echo(message, err=True, nl=False)
        with spinner():
            yield
    except Exception:
        click.echo(err=True)  # create new line
        raise
    else:
        click.echo(message_final, err=True)


class _Group(click.Group):
    """Translate package errors into the documented exit codes."""

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except (ConfigError, DomainPointError, TruncationError) as error:
            raise click.UsageError(str(error), ctx)
        except InvariantViolation as error:
            click.secho(f"Invariant '{error.invariant}' violated: {error}", fg="red", err=True)
            ctx.exit(EXIT_INVARIANT)
        except I4MirrorError as error:
            click.secho(f"Error: {error}", fg="red", err=True)
            ctx.exit(EXIT_INVARIANT)


def _emit(config: RunConfig, name: str, document: Mapping[str, Any], schema: Any = None) -> None:
    if not config.emit_json:
        return
    for path in write_json(config.output / name, document, schema):
        logger.info("Wrote '%s'.", path)


def _emit_series(config: RunConfig, stem: str, series: Mapping[str, QSeries], tag: str, **details: Any) -> None:
    schemas = OutputSchemas.from_package()
    _emit(config, f"{stem}.json", series_document(series, tag, **details), schemas.series_document)
    if config.emit_csv:
        for path in write_series_csv(config.output / f"{stem}.csv", series):
            logger.info("Wrote '%s'.", path)


def _parse(parser: Any, value: str | None, param: str) -> Any:
    if value is None:
        return None
    try:
        return parser(value)
    except ValueError as error:
        raise click.BadParameter(str(error), param_hint=param)


def _walls_option(path: str | None, order: int) -> Any:
    from .gw import default_walls
    from .mirror import WallTable

    if path is None:
        return default_walls(order)
    return WallTable.load(path, schema=OutputSchemas.from_package().walls)


@click.group(cls=_Group, context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(version=__version__, prog_name="i4mirror")
@click.option("-v", "--verbose", count=True)
@click.option(
    "--config",
    "config_path",
    type=click.Path(dir_okay=False, exists=True, path_type=Path),
    help="Flat TOML file with run settings, command line options take precedence.",
)
@click.option(
    "--out",
    "output",
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory for all written artifacts.",
)
@click.option("--json/--no-json", "emit_json", default=None, help="Write JSON artifacts.")
@click.option("--csv/--no-csv", "emit_csv", default=None, help="Also write series as CSV.")
@click.option("--offset", "theta_label_offset", type=int, help="Theta label offset (mod 4).")
@click.option(
    "--nome-power",
    type=click.Choice(["1", "2", "4"]),
    help="The nome q = exp(i pi rho) is v raised to this power.",
)
@click.option("--dps", "mp_dps", type=int, help="Decimal digits of the mpmath numerics.")
@click.pass_context
def cli(
    ctx: click.Context,
    verbose: int,
    config_path: Path | None,
    output: Path | None,
    emit_json: bool | None,
    emit_csv: bool | None,
    theta_label_offset: int | None,
    nome_power: str | None,
    mp_dps: int | None,
) -> None:
    logging.basicConfig(level=max(0, logging.WARNING - 10 * verbose))
    config = RunConfig.defaults()
    if config_path is not None:
        config = RunConfig.from_file(config_path, base=config)
    ctx.obj = config.merge(
        output=output,
        emit_json=emit_json,
        emit_csv=emit_csv,
        theta_label_offset=theta_label_offset,
        nome_power=int(nome_power) if nome_power else None,
        mp_dps=mp_dps,
    )


@cli.command()
@click.pass_obj
def info(config: RunConfig) -> None:
    """Show the resolved configuration."""
    click.echo(f"i4mirror, version {__version__}")
    click.echo(f"Config file:   {CONFIG_PATH}{'' if CONFIG_PATH.is_file() else ' (absent)'}")
    if DEVELOP_MODE:
        click.secho("Develop mode:  on", fg="yellow")
    rows = [[key, value] for key, value in config.to_json().items()]
    click.echo(tabulate(rows, headers=("Setting", "Value"), colalign=("left", "left")))


@cli.group(invoke_without_command=True)
@click.option("--x", "x", help="x-coordinate, e.g. 3 or 7/2.")
@click.option("--y", "y", help="y-coordinate, must be positive.")
@click.pass_context
def phi(ctx: click.Context, x: str | None, y: str | None) -> None:
    """Evaluate the PL function phi on the affine base."""
    from .affine import cone_of
    from .affine import phi as evaluate

    if ctx.invoked_subcommand is not None:
        return
    if x is None or y is None:
        raise click.UsageError("Give both --x and --y, or use a subcommand.", ctx)
    point = (_parse(parse_fraction, x, "--x"), _parse(parse_fraction, y, "--y"))
    value = evaluate(point)
    click.echo(str(value))
    config: RunConfig = ctx.obj
    _emit(
        config,
        "phi.json",
        {
            "metadata": provenance("derived"),
            "point": [fraction_to_str(c) for c in point],
            "cone": list(cone_of(point).rays),
            "value": [fraction_to_str(c) for c in value.coefficients],
        },
    )


@phi.command(name="table")
@click.option("--range", "radius", type=click.IntRange(min=0), default=8, show_default=True)
@click.pass_obj
def phi_table(config: RunConfig, radius: int) -> None:
    """phi, kink class and difference bound at the points (k, 1), |k| <= RANGE."""
    from .affine import integral_points, kink, kink_index
    from .affine import phi as evaluate
    from .affine import phi_difference_bound

    rows, entries = [], []
    for point in integral_points(radius):
        k = point[0]
        bound = phi_difference_bound(k) if abs(k) > 1 else None
        status = "" if bound is None else ("ok" if bound.passed else "FAILED")
        rows.append([k, str(evaluate(point)), str(kink(k)), f"D{kink_index(k)}", status])
        entries.append(
            {
                "k": k,
                "phi": [fraction_to_str(c) for c in evaluate(point).coefficients],
                "kink": [fraction_to_str(c) for c in kink(k).coefficients],
                "difference_bound": None if bound is None else bound.to_json(),
            }
        )
    click.echo(
        tabulate(
            rows,
            headers=("k", "phi(k, 1)", "kink", "ray label", "difference bound"),
            colalign=("right", "left", "left", "left", "left"),
        )
    )
    _emit(config, "phi_table.json", {"metadata": provenance("derived"), "points": entries})


@phi.command(name="figure")
@click.option("--out", "path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--range", "radius", type=click.IntRange(min=1), default=4, show_default=True)
@click.pass_obj
def phi_figure(config: RunConfig, path: Path | None, radius: int) -> None:
    """Draw the rays, their labels and kinks and the cone C as SVG."""
    from .svg import render_base

    for written in render_base(path or config.output / "base.svg", radius=radius):
        click.echo(str(written))


@cli.command()
@click.option("--order", type=click.IntRange(min=0), default=2, show_default=True)
@click.option("--out", "path", type=click.Path(dir_okay=False, path_type=Path))
@click.pass_obj
def walls(config: RunConfig, order: int, path: Path | None) -> None:
    """Write the wall table built from the curve counts."""
    from .gw import default_walls

    table = default_walls(order)
    rows = [
        [str(wall.ray), wall.tangency, wall.class_tag, wall.fibre_steps, fraction_to_str(wall.count), wall.provenance]
        for wall in table
    ]
    click.echo(
        tabulate(rows, headers=("Ray", "Tangency", "Class", "Fibre steps", "Count", "Provenance"))
    )
    target = path or config.output / "walls.yaml"
    target.parent.mkdir(parents=True, exist_ok=True)
    click.echo(f"Wrote {table.dump(target)}.", err=True)


@cli.command(name="mirror-eqs")
@click.option("--grade", type=int, help="Truncation order of the structure constants.")
@click.option(
    "--walls",
    "walls_path",
    type=click.Path(dir_okay=False, exists=True),
    help="Wall table (YAML), defaults to the built-in curve counts.",
)
@click.option("--empty-walls", is_flag=True, help="Ignore all walls, only unbent pairs.")
@click.option("--svg", "svg_product", help="Draw the broken lines of one product, e.g. '0,2'.")
@click.pass_obj
def mirror_eqs(
    config: RunConfig,
    grade: int | None,
    walls_path: str | None,
    empty_walls: bool,
    svg_product: str | None,
) -> None:
    """Structure constants of the mirror equations as truncated series."""
    from .mirror import (
        TARGETS,
        WallTable,
        assemble_equations,
        enumerate_pairs,
        pencil_parameter,
        specialize_symmetric,
        spot_check,
    )

    grade = grade if grade is not None else config.mirror_grade
    if grade < 1:
        raise click.BadParameter(f"The grade must be positive, got {grade}.", param_hint="--grade")
    table = WallTable() if empty_walls else _walls_option(walls_path, max(2, grade))
    with _spinner_with_message(f"Expanding the theta products to grade {grade}... "):
        equations = assemble_equations(table, grade, config.theta_label_offset)
        report = spot_check((0, 1), (2, 1), table, min(grade, 9))
    if not report.passed:
        click.secho(
            f"Endpoint spot check differs at {', '.join(sorted(report.differences))}.",
            fg="yellow",
            err=True,
        )
    rows = [
        [key, len(series), str(specialize_symmetric(series).truncate(min(grade, 25)))]
        for key, series in sorted(equations.coefficients.items())
    ]
    click.echo(tabulate(rows, headers=("Coefficient", "Terms", "On the symmetric locus")))
    try:
        click.echo(f"t(v) = {pencil_parameter(equations)}")
    except InvariantViolation as error:
        click.secho(f"No common pencil parameter: {error}", fg="yellow", err=True)
    _emit_series(
        config,
        "mirror_eqs",
        equations.coefficients,
        "derived",
        truncation=grade,
        theta_label_offset=config.theta_label_offset,
        walls=len(table),
    )
    if svg_product or config.emit_svg:
        from .svg import render_broken_lines

        x_p, x_q = _parse(lambda text: parse_int_vector(text, 2), svg_product or "0,2", "--svg")
        P, Q = (x_p, 1), (x_q, 1)
        pairs = [
            pair for target in TARGETS for pair in enumerate_pairs(P, Q, target, table, grade)
        ]
        for path in render_broken_lines(config.output / f"broken_lines_{x_p}_{x_q}.svg", pairs, P, Q):
            click.echo(f"Wrote {path}.", err=True)


@cli.command(name="i-function")
@click.option("--max-grade", type=click.IntRange(min=0), help="Largest total degree a+b+c+d.")
@click.pass_obj
def i_function(config: RunConfig, max_grade: int | None) -> None:
    """I-function summands of the unravelled threefold and their Stirling certificate."""
    from .gw import i_function as compute
    from .gw import stirling_certificate

    max_grade = max_grade if max_grade is not None else config.ifunction_grade
    with _spinner_with_message(f"Computing the I-function to grade {max_grade}... "):
        table = compute(max_grade=max_grade)
        certificate = stirling_certificate(table)
    rows = [
        [str(beta), fraction_to_str(table.scalar_factor(beta)), ", ".join(map(str, table.reduced[beta].powers()))]
        for beta in table.classes
    ]
    click.echo(tabulate(rows, headers=("Class", "Scalar factor", "hbar powers")))
    message = (
        f"Stirling certificate (c={certificate.c}, r={certificate.r}): "
        f"{certificate.checked} coefficients, {len(certificate.failures)} failures"
    )
    if certificate.minimal_r is not None:
        message += f", minimal r {certificate.minimal_r:.3f}"
    click.secho(message, fg="green" if certificate.passed else "red", err=True)
    _emit(
        config,
        "i_function.json",
        {
            "metadata": provenance("derived", max_grade=max_grade),
            "table": table.to_json(),
            "certificate": certificate.to_json(),
        },
    )


@cli.command(name="j-coeffs")
@click.option("--class", "class_", required=True, help="Curve class a,b,c,d, e.g. 0,2,0,1.")
@click.option("--normalization", type=click.Choice(["divisor", "raw"]))
@click.pass_obj
def j_coeffs(config: RunConfig, class_: str, normalization: str | None) -> None:
    """The H2-coefficient of the J-function at a curve class."""
    from .gw import ThreefoldClass, curve_count

    vector = _parse(lambda text: parse_int_vector(text, 4), class_, "--class")
    if any(component < 0 for component in vector):
        raise click.BadParameter(f"Classes are effective, got {class_}.", param_hint="--class")
    beta = ThreefoldClass.of(vector)
    normalization = normalization or config.pairing_normalization
    with _spinner_with_message(f"Solving the mirror map below {beta}... "):
        count = curve_count(beta, normalization)
    click.echo(fraction_to_str(count))
    _emit(
        config,
        "j_coeffs.json",
        {
            "metadata": provenance("measured", normalization=normalization),
            "class": list(beta.vector),
            "count": fraction_to_str(count),
        },
    )


@cli.command()
@click.option("--degree", type=click.IntRange(min=0), required=True)
@click.pass_obj
def sections(config: RunConfig, degree: int) -> None:
    """Section classes of the Goldilocks zone and the predicted bisection count."""
    from .gw import bisection_classes, goldilocks_zone, predicted_bisection_count

    zone = goldilocks_zone(degree)
    rows = [
        [str(section), section.self_intersection, fraction_to_str(section.arithmetic_genus)]
        for section in zone
    ]
    click.echo(tabulate(rows, headers=("Class", "Self-intersection", "p_a")))
    bisections = len(bisection_classes(degree))
    predicted = predicted_bisection_count(degree)
    click.echo(f"|GZ(S, {degree})| = {len(zone)}")
    click.echo(f"bisection classes: {bisections}, predicted count: {predicted}")
    _emit(
        config,
        "sections.json",
        {
            "metadata": provenance("derived", degree=degree),
            "goldilocks_zone": [[section.d, *section.a] for section in zone],
            "bisection_classes": bisections,
            "predicted_bisection_count": predicted,
        },
    )


@cli.command(name="bryan-leung")
@click.option("--order", type=click.IntRange(min=0), required=True)
@click.pass_obj
def bryan_leung(config: RunConfig, order: int) -> None:
    """Coefficients of prod (1 - z^m)^-12 up to z^ORDER."""
    from .gw import bryan_leung_series

    series = bryan_leung_series(order)
    click.echo(" ".join(fraction_to_str(series.coefficient((m,))) for m in range(order + 1)))
    _emit_series(config, "bryan_leung", {"bryan_leung": series}, "published", order=order)


@cli.group()
def elliptic() -> None:
    """The mirror curve on the symmetric locus."""


@elliptic.command(name="j-check")
@click.pass_obj
def j_check(config: RunConfig) -> None:
    """The j-invariant of the pencil along both computations."""
    from .elliptic import pencil_j_invariant, s_form, u_form, weierstrass_data

    j = pencil_j_invariant()
    click.echo(f"j(t) = {j}")
    click.echo(f"j(s) = {s_form()}")
    click.echo(f"j(u) = {u_form()}")
    _emit(
        config,
        "elliptic_j.json",
        {
            "metadata": provenance("derived"),
            "weierstrass": weierstrass_data().to_json(),
            "j": j.to_json(),
            "s_form": s_form().to_json(),
            "u_form": u_form().to_json(),
        },
    )


@elliptic.command(name="theta")
@click.option("--rho", required=True, help="Point of the upper half plane, e.g. 3i or 1/2+2i.")
@click.option("--tol", type=float, help="Bound on the omitted tail.")
@click.pass_obj
def theta_command(config: RunConfig, rho: str, tol: float | None) -> None:
    """The four Jacobi theta constants at RHO."""
    import mpmath

    from .elliptic import theta

    point = _parse(parse_complex, rho, "--rho")
    tol = tol if tol is not None else config.theta_tol
    values = [theta(kind, point, tol, config.mp_dps) for kind in (1, 2, 3, 4)]
    rows = [
        [f"Theta_{value.kind}", mpmath.nstr(value.value, 20), mpmath.nstr(value.tail_bound, 3), value.terms]
        for value in values
    ]
    click.echo(tabulate(rows, headers=("Theta", "Value", "Tail bound", "Terms")))
    _emit(
        config,
        "theta.json",
        {"metadata": provenance("derived", tol=tol), "values": [value.to_json() for value in values]},
    )


@elliptic.command(name="bridge")
@click.option("--order", type=click.IntRange(min=1), help="Grade of the mirror series.")
@click.option("--rho", default="3i", show_default=True)
@click.pass_obj
def bridge(config: RunConfig, order: int | None, rho: str) -> None:
    """Compare the symmetric locus series with theta constants."""
    import mpmath

    from .elliptic import symmetric_locus_bridge
    from .mirror import WallTable, assemble_equations
    from .verification import bridge_series

    order = order or config.bridge_order
    point = _parse(parse_complex, rho, "--rho")
    with _spinner_with_message(f"Expanding the theta products to grade {order}... "):
        equations = assemble_equations(WallTable(), order, config.theta_label_offset)
    rows = symmetric_locus_bridge(
        bridge_series(equations), point, config.nome_power, dps=config.mp_dps
    )
    click.echo(
        tabulate(
            [
                [row.identity, mpmath.nstr(row.constant, 12), str(row.expected), mpmath.nstr(row.residual, 3)]
                for row in rows
            ],
            headers=("Series", "Measured constant", "Expected", "Residual"),
        )
    )
    for row in rows:
        if row.residual > 1e-8:
            click.secho(
                f"{row.identity}: measured constant {mpmath.nstr(row.constant, 8)} "
                f"instead of {row.expected} ({row.convention}).",
                fg="yellow",
                err=True,
            )
    _emit(
        config,
        "bridge.json",
        {"metadata": provenance("measured", order=order), "rows": [row.to_json() for row in rows]},
    )


@elliptic.command(name="modular")
@click.option("--rho", required=True)
@click.pass_obj
def modular(config: RunConfig, rho: str) -> None:
    """Transformation laws and j at rho / (2 - rho)."""
    import mpmath

    from .elliptic import modular_consistency

    point = _parse(parse_complex, rho, "--rho")
    report = modular_consistency(point, config.theta_tol, config.mp_dps)
    click.echo(
        tabulate(
            [[name, mpmath.nstr(value, 5)] for name, value in report.checks.items()],
            headers=("Check", "Relative difference"),
        )
    )
    if not report.passed:
        click.secho(f"Modular consistency fails at rho = {rho}.", fg="yellow", err=True)
    _emit(config, "modular.json", {"metadata": provenance("derived"), "report": report.to_json()})


@cli.command()
@click.option("--quick", is_flag=True, help="Desk-scale sizes for the slow checks.")
@click.pass_context
def verify(ctx: click.Context, quick: bool) -> None:
    """Run the acceptance suite and write verify.json."""
    from .verification import run_suite

    config: RunConfig = ctx.obj
    with _spinner_with_message("Running the verification suite... "):
        results = list(run_suite(config, quick=quick))
    rows = [[name, entry.status, f"{entry.lhs} | {entry.rhs}"] for name, entry in results]
    click.echo(tabulate(rows, headers=("Check", "Status", "Detail"), maxcolwidths=[None, None, 80]))
    passed = all(entry.passed for _, entry in results)
    document = {
        "metadata": provenance("derived", quick=quick, config=config.to_json()),
        "passed": passed,
        "checks": [entry.to_json() for _, entry in results],
    }
    schemas = OutputSchemas.from_package()
    for path in write_json(config.output / "verify.json", document, schemas.report):
        logger.info("Wrote '%s'.", path)
    if not passed:
        failed = [name for name, entry in results if not entry.passed]
        click.secho(f"Failed checks: {', '.join(failed)}", fg="red", err=True)
        ctx.exit(EXIT_VERIFICATION_FAILED)
    click.secho("All checks passed.", fg="green", err=True)


if __name__ == "__main__":
    cli()
