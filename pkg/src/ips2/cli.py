"""Command-line harness: generate datasets, benchmark SC/PPC/IPS2, sweep parameters."""

from __future__ import annotations

import asyncio
import json
import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from ips2.dataset import write_csv
from ips2.errors import Ips2Error, UsageError
from ips2.metrics import METRIC_NAMES
from ips2.models import (
    ClusterConfig,
    DatasetSource,
    EmbedMode,
    ExperimentSpec,
    Method,
    MetricsReport,
    NoiseKind,
    Standardization,
)
from ips2.services import (
    BenchService,
    SweepParam,
    gain_table,
    load_dataset,
    run_sweep,
    write_dumps,
    write_gain_table,
    write_report,
)
from ips2.services.sweep import SWEEP_FILE, parse_values
from ips2.synthgen import GENERATORS, generate, make_noise_model

logger = logging.getLogger(__name__)

OUTPUT_ENV = "IPS2_OUTPUT_DIR"
DEFAULT_OUTPUT = "ips2-out"

console = Console()
err_console = Console(stderr=True)

app = typer.Typer(
    name="ips2",
    help="Cluster with pairwise plus high-order similarity and benchmark against SC/PPC.",
    add_completion=False,
    no_args_is_help=True,
)

OutputDir = Annotated[
    Path,
    typer.Option("--output-dir", "-o", envvar=OUTPUT_ENV, help="Directory for results"),
]
Seed = Annotated[int, typer.Option("--seed", min=0, help="Base seed")]
Dim = Annotated[Optional[int], typer.Option("--dim", min=1, help="Feature dimension")]
N3 = Annotated[Optional[int], typer.Option("--n3", min=1, help="USdata2 cluster-3 size")]
NoiseStd = Annotated[
    Optional[float],
    typer.Option("--noise-std", min=0.0, help="Built-in white noise std of USdata1/2"),
]
Verbose = Annotated[bool, typer.Option("--verbose", "-v", help="Enable debug logging")]

CsvPath = Annotated[
    Optional[Path], typer.Option("--csv", exists=True, dir_okay=False, help="Input CSV")
]
LabelColumn = Annotated[
    Optional[str], typer.Option("--label-column", help="Label column name or 0-based index")
]
Header = Annotated[bool, typer.Option("--header", help="The CSV has a header row")]
Generator = Annotated[
    Optional[str], typer.Option("--generator", "-g", help="Synthetic dataset generator")
]
GenSeed = Annotated[int, typer.Option("--gen-seed", min=0, help="Dataset generator seed")]
Methods = Annotated[str, typer.Option("--methods", help="Comma-separated subset of sc,ppc,ips2")]
Repeats = Annotated[int, typer.Option("--repeats", "-r", min=1, help="Runs per method")]
Clusters = Annotated[int, typer.Option("--clusters", "-c", min=2, help="Cluster count")]
Neighbors = Annotated[int, typer.Option("--k", min=1, help="Neighbor count")]
SigmaT = Annotated[float, typer.Option("--sigma-t", help="Tensor similarity scale")]
Eps = Annotated[float, typer.Option("--eps", help="Tensor similarity denominator guard")]
Bandwidth = Annotated[
    str, typer.Option("--bandwidth", help="Gaussian kernel bandwidth: 'median' or a number")
]
Restarts = Annotated[int, typer.Option("--restarts", min=1, help="k-means restarts")]
Embed = Annotated[EmbedMode, typer.Option("--embed-mode", help="How IPS2 clusters U")]
Standardize = Annotated[
    Standardization, typer.Option("--standardize", help="Feature standardization")
]
Noise = Annotated[
    Optional[NoiseKind], typer.Option("--noise-kind", help="Additive noise, reference parameters")
]
Workers = Annotated[int, typer.Option("--workers", "-w", min=1, help="Parallel runs")]
SpecFile = Annotated[
    Optional[Path],
    typer.Option(
        "--spec-file", exists=True, dir_okay=False, help="Experiment spec or report JSON"
    ),
]
DumpSimilarities = Annotated[
    bool, typer.Option("--dump-similarities", help="Dump S, V, U and their histograms")
]
DumpTensor = Annotated[
    bool, typer.Option("--dump-tensor", help="Dump the unfolded tensor similarities")
]


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


@contextmanager
def _guard() -> Iterator[None]:
    """Report library errors in red; usage errors exit 2, everything else 1."""
    try:
        yield
    except UsageError as e:
        err_console.print(f"[red]Error:[/red] {e.title} {e.detail}".rstrip())
        raise typer.Exit(2) from e
    except ValidationError as e:
        err_console.print(f"[red]Invalid options:[/red] {e}")
        raise typer.Exit(2) from e
    except Ips2Error as e:
        err_console.print(f"[red]{e.code.value} error:[/red] {e.title} {e.detail}".rstrip())
        raise typer.Exit(1) from e


def _generator_params(dim: int | None, n3: int | None, noise_std: float | None) -> dict[str, Any]:
    params = {"dim": dim, "n3": n3, "noise_std": noise_std}
    return {k: v for k, v in params.items() if v is not None}


def _parse_methods(raw: str) -> list[Method]:
    try:
        return [Method(name.strip().lower()) for name in raw.split(",") if name.strip()]
    except ValueError as e:
        raise UsageError(f"unknown method in {raw!r}", "choose from sc, ppc, ips2") from e


def _parse_bandwidth(raw: str) -> str | float:
    if raw == "median":
        return raw
    try:
        return float(raw)
    except ValueError as e:
        raise UsageError(f"bandwidth must be 'median' or a number, got {raw!r}") from e


def _read_spec_file(path: Path, output_dir: Path) -> ExperimentSpec:
    data = json.loads(path.read_text(encoding="utf-8"))
    if "schema_version" in data and "spec" in data:
        data = data["spec"]
    return ExperimentSpec.model_validate({**data, "output_dir": str(output_dir)})


def _build_spec(
    *,
    spec_file: Path | None,
    csv: Path | None,
    label_column: str | None,
    header: bool,
    generator: str | None,
    gen_seed: int,
    params: dict[str, Any],
    methods: str,
    repeats: int,
    seed: int,
    clusters: int,
    k: int,
    sigma_t: float,
    eps: float,
    bandwidth: str,
    restarts: int,
    embed_mode: EmbedMode,
    standardize: Standardization,
    noise_kind: NoiseKind | None,
    workers: int,
    output_dir: Path,
    dump_similarities: bool,
    dump_tensor: bool,
) -> ExperimentSpec:
    if spec_file is not None:
        return _read_spec_file(spec_file, output_dir)
    if (csv is None) == (generator is None):
        raise UsageError("give exactly one of --csv or --generator")

    if csv is not None:
        column: str | int | None = label_column
        if label_column is not None and label_column.lstrip("-").isdigit():
            column = int(label_column)
        source = DatasetSource(kind="csv", path=str(csv), label_column=column, has_header=header)
    else:
        source = DatasetSource(kind="generator", generator=generator, params=params, seed=gen_seed)

    return ExperimentSpec(
        source=source,
        standardization=standardize,
        noise=make_noise_model(noise_kind) if noise_kind is not None else None,
        methods=_parse_methods(methods),
        config=ClusterConfig(
            c=clusters,
            k=k,
            sigma_t=sigma_t,
            eps=eps,
            kernel_bandwidth=_parse_bandwidth(bandwidth),
            restarts=restarts,
            embed_mode=embed_mode,
            seed=seed,
        ),
        repeats=repeats,
        output_dir=str(output_dir),
        dump_similarities=dump_similarities,
        dump_tensor=dump_tensor,
        workers=workers,
    )


def _summary_table(report: MetricsReport) -> Table:
    table = Table(title=f"{report.dataset.name} (m={report.dataset.m}, n={report.dataset.n})")
    table.add_column("method")
    for name in METRIC_NAMES:
        table.add_column(name, justify="right")
    table.add_column("failed", justify="right")
    for summary in report.methods:
        cells = []
        for name in METRIC_NAMES:
            metric = summary.metrics.get(name)
            cells.append("-" if metric is None else f"{metric.mean:.3f} ± {metric.std:.3f}")
        style = "red" if summary.failed else None
        table.add_row(summary.method.value, *cells, str(summary.failed), style=style)
    return table


def _print_failures(report: MetricsReport) -> None:
    for run in report.runs:
        if run.error is not None:
            err_console.print(
                f"[red]✖ {run.method.value} seed={run.seed}:[/red] {run.error.code} {run.error.title}"
            )


@app.command("gen")
def cmd_gen(
    generator: Annotated[str, typer.Argument(help=f"One of: {', '.join(GENERATORS)}")],
    seed: Seed = 0,
    dim: Dim = None,
    n3: N3 = None,
    noise_std: NoiseStd = None,
    out: Annotated[
        Optional[Path], typer.Option("--out", help="CSV path (default: output dir)")
    ] = None,
    output_dir: OutputDir = Path(DEFAULT_OUTPUT),
    verbose: Verbose = False,
) -> None:
    """Generate a synthetic dataset as CSV with a ``label`` column."""
    _configure_logging(verbose)
    with _guard():
        dataset = generate(generator, seed, **_generator_params(dim, n3, noise_std))
        path = out or output_dir / f"{generator}-seed{seed}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        write_csv(dataset, path)
        console.print(f"Wrote {dataset.m}x{dataset.n} dataset to {path}")


@app.command("bench")
def cmd_bench(
    csv: CsvPath = None,
    label_column: LabelColumn = None,
    header: Header = False,
    generator: Generator = None,
    gen_seed: GenSeed = 0,
    dim: Dim = None,
    n3: N3 = None,
    noise_std: NoiseStd = None,
    methods: Methods = "sc,ppc,ips2",
    repeats: Repeats = 1,
    seed: Seed = 0,
    clusters: Clusters = 2,
    k: Neighbors = 10,
    sigma_t: SigmaT = 1.0,
    eps: Eps = 1e-4,
    bandwidth: Bandwidth = "median",
    restarts: Restarts = 20,
    embed_mode: Embed = EmbedMode.SPECTRAL,
    standardize: Standardize = Standardization.NONE,
    noise_kind: Noise = None,
    workers: Workers = 1,
    spec_file: SpecFile = None,
    dump_similarities: DumpSimilarities = False,
    dump_tensor: DumpTensor = False,
    output_dir: OutputDir = Path(DEFAULT_OUTPUT),
    verbose: Verbose = False,
) -> None:
    """Run each method ``repeats`` times and write report.json plus timings.json."""
    _configure_logging(verbose)
    with _guard():
        spec = _build_spec(
            spec_file=spec_file,
            csv=csv,
            label_column=label_column,
            header=header,
            generator=generator,
            gen_seed=gen_seed,
            params=_generator_params(dim, n3, noise_std),
            methods=methods,
            repeats=repeats,
            seed=seed,
            clusters=clusters,
            k=k,
            sigma_t=sigma_t,
            eps=eps,
            bandwidth=bandwidth,
            restarts=restarts,
            embed_mode=embed_mode,
            standardize=standardize,
            noise_kind=noise_kind,
            workers=workers,
            output_dir=output_dir,
            dump_similarities=dump_similarities,
            dump_tensor=dump_tensor,
        )
        dataset = load_dataset(spec)
        service = BenchService(workers=spec.workers)
        try:
            outcome = asyncio.run(service.execute_batch(spec, dataset))
        finally:
            service.close()

        target = Path(spec.output_dir)
        path = write_report(outcome.report, outcome.runs, target)
        if spec.dump_similarities or spec.dump_tensor:
            write_dumps(dataset, spec.config, target / "dumps", tensor=spec.dump_tensor)

        console.print(_summary_table(outcome.report))
        console.print(f"Report: {path}")
        if not outcome.succeeded:
            _print_failures(outcome.report)
            raise typer.Exit(1)


@app.command("sweep")
def cmd_sweep(
    param: Annotated[SweepParam, typer.Option("--param", "-p", help="Quantity to vary")],
    values: Annotated[str, typer.Option("--values", help="Comma-separated sweep values")],
    csv: CsvPath = None,
    label_column: LabelColumn = None,
    header: Header = False,
    generator: Generator = None,
    gen_seed: GenSeed = 0,
    dim: Dim = None,
    n3: N3 = None,
    noise_std: NoiseStd = None,
    methods: Methods = "sc,ppc,ips2",
    repeats: Repeats = 1,
    seed: Seed = 0,
    clusters: Clusters = 2,
    k: Neighbors = 10,
    sigma_t: SigmaT = 1.0,
    eps: Eps = 1e-4,
    bandwidth: Bandwidth = "median",
    restarts: Restarts = 20,
    embed_mode: Embed = EmbedMode.SPECTRAL,
    standardize: Standardize = Standardization.NONE,
    noise_kind: Noise = None,
    workers: Workers = 1,
    spec_file: SpecFile = None,
    output_dir: OutputDir = Path(DEFAULT_OUTPUT),
    verbose: Verbose = False,
) -> None:
    """Bench at every sweep value and write sweep.csv with the IPS2-over-SC gain."""
    _configure_logging(verbose)
    with _guard():
        spec = _build_spec(
            spec_file=spec_file,
            csv=csv,
            label_column=label_column,
            header=header,
            generator=generator,
            gen_seed=gen_seed,
            params=_generator_params(dim, n3, noise_std),
            methods=methods,
            repeats=repeats,
            seed=seed,
            clusters=clusters,
            k=k,
            sigma_t=sigma_t,
            eps=eps,
            bandwidth=bandwidth,
            restarts=restarts,
            embed_mode=embed_mode,
            standardize=standardize,
            noise_kind=noise_kind,
            workers=workers,
            output_dir=output_dir,
            dump_similarities=False,
            dump_tensor=False,
        )
        sweep_values = parse_values(param, [v for v in values.split(",") if v.strip()])
        service = BenchService(workers=spec.workers)
        try:
            points = asyncio.run(run_sweep(service, spec, param, sweep_values))
        finally:
            service.close()

        for point in points:
            write_report(
                point.outcome.report, point.outcome.runs, Path(point.outcome.report.spec.output_dir)
            )
        rows = gain_table(points, param, spec.methods)
        path = write_gain_table(rows, param, Path(spec.output_dir) / SWEEP_FILE)

        table = Table(title=f"sweep over {param.value} (mean ACC)")
        for column in rows[0]:
            table.add_column(column, justify="right")
        for row in rows:
            table.add_row(
                *("-" if v is None else f"{v:.3f}" if isinstance(v, float) else str(v) for v in row.values())
            )
        console.print(table)
        console.print(f"Sweep table: {path}")
        if not all(point.outcome.succeeded for point in points):
            for point in points:
                _print_failures(point.outcome.report)
            raise typer.Exit(1)
