"""
Command-line entry point (``ipiskit``).

Exit codes: 0 success, 1 I/O or validation error, 2 usage error.
Command output goes to stdout; logs go to stderr.
"""

import asyncio
import functools
import json
import logging
import sys
from collections import Counter
from pathlib import Path

import click
import uvicorn

from ipiskit import __version__
from ipiskit.app.api.stub import create_stub_app
from ipiskit.app.core.config import TRAINING_REFERENCE, settings
from ipiskit.app.core.exceptions import IpisKitException
from ipiskit.app.core.exit_codes import describe, exit_code_for
from ipiskit.app.core.logging_config import configure_logging
from ipiskit.app.schemas.generation import EndpointConfig
from ipiskit.app.schemas.prompt import SCENARIOS
from ipiskit.app.services import corpus, metrics, reporting
from ipiskit.app.services.inference import GenerationCache, InferenceClient, write_predictions
from ipiskit.app.services.normalize import default_stoplist, load_stoplist, normalize
from ipiskit.app.services.notation import expansion, parse_text
from ipiskit.app.services.prompts import SystemPromptLibrary, build_all
from ipiskit.app.services.rewriter import Lexicon, get_profile, load_genres, rewrite, self_check

logger = logging.getLogger(__name__)

TASKS = ("proofreading", "translation")
STRATEGIES = ("coordination", "slash", "star", "osoba", "neutral")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def handle_errors(func):
    """Turn toolkit and I/O exceptions into a stderr message and an exit code."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (IpisKitException, OSError) as exc:
            click.echo(describe(exc), err=True)
            raise click.exceptions.Exit(exit_code_for(exc)) from exc

    return wrapper


def _read_text(text: str | None, input_path: Path | None = None) -> str:
    if text is not None and input_path is not None:
        raise click.UsageError("give either TEXT or --input, not both")
    if input_path is not None:
        return input_path.read_text(encoding="utf-8")
    if text is not None:
        return text
    return click.get_text_stream("stdin").read()


def _stoplist(path: Path | None):
    if path is not None:
        return load_stoplist(path)
    if settings.stoplist_path is not None:
        return load_stoplist(settings.stoplist_path)
    return default_stoplist()


@click.group()
@click.version_option(__version__, prog_name="ipiskit")
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Log level (default: IPIS_LOG_LEVEL)",
)
def cli(log_level: str | None) -> None:
    """Polish gender-inclusive notation, evaluation and baseline rewriting toolkit."""
    configure_logging(log_level or settings.log_level)


@cli.command("expand")
@click.argument("text", required=False)
@click.option("--json", "as_json", is_flag=True, help="Print parsed nodes as JSON")
@click.option("--inclusive-only", is_flag=True, help="Only print star forms and slash pairs")
def cmd_expand(text: str | None, as_json: bool, inclusive_only: bool) -> None:
    """Print the masculine and feminine expansions of each word in TEXT (or stdin)."""
    text = _read_text(text)
    items = []
    for token, node in parse_text(text):
        result = expansion(node)
        if inclusive_only and result is None:
            continue
        words = [result.masculine, result.feminine] if result else [token.text]
        items.append({"token": token.text, "node": node.model_dump(), "expansion": words})

    if as_json:
        click.echo(json.dumps(items, ensure_ascii=False, indent=2))
        return
    for item in items:
        click.echo(" ".join(item["expansion"]))


@cli.command("normalize")
@click.argument("text", required=False)
@click.option("--stoplist", "stoplist_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@handle_errors
def cmd_normalize(text: str | None, stoplist_path: Path | None) -> None:
    """Print the normalized bag of TEXT (or stdin), one line, reading order."""
    bag = normalize(_read_text(text), _stoplist(stoplist_path))
    click.echo(" ".join(bag.tokens))


def _dataset_files(paths: tuple[Path, ...]) -> list[Path]:
    files = []
    for path in paths:
        if path.is_dir():
            files.extend(sorted(p for p in path.rglob("*") if p.suffix in (".json", ".jsonl")))
        else:
            files.append(path)
    return files


@cli.command("stats")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--task", type=click.Choice(TASKS), default=None, help="Require every record to be of this task")
@click.option("--json", "as_json", is_flag=True, help="Print JSON instead of a table")
@handle_errors
def cmd_stats(paths: tuple[Path, ...], task: str | None, as_json: bool) -> None:
    """Count records per task and split in dataset files or directories."""
    totals: Counter = Counter()
    for path in _dataset_files(paths):
        records = corpus.load(path, task)
        if not records:
            # an empty file still gets a row; its split can only come from the file name
            split = path.stem if path.stem in corpus.SPLITS else None
            empty = corpus.stats(records, task, split)
            totals[(empty.task, empty.split)] += 0
            continue
        for item in corpus.stats_by_split(records):
            totals[(item.task, item.split)] += item.count

    order = {name: i for i, name in enumerate(corpus.SPLITS)}
    rows = [
        {"task": t, "split": s, "count": totals[(t, s)]}
        for t, s in sorted(totals, key=lambda k: (k[0], order.get(k[1], len(order))))
    ]
    if as_json:
        click.echo(json.dumps(rows, indent=2))
        return
    for row in rows:
        click.echo(f"{row['task']:<13} {row['split'] or '-':<6} {row['count']:>7}")


def _eval_options(func):
    options = [
        click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path)),
        click.option("--pred", "pred_path", required=True,
                     type=click.Path(exists=True, dir_okay=False, path_type=Path),
                     help="Predictions JSONL ({ipis_id, output} per line)"),
        click.option("--scenario", default="default", show_default=True, help="Scenario label for the report"),
        click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False, path_type=Path),
                     help="Directory for report.json and report.txt"),
        click.option("--timestamp", default=None, help="Manifest timestamp (default: SOURCE_DATE_EPOCH or now)"),
        click.option("--lowercase/--no-lowercase", default=None, help="Lowercase before BLEU/chrF"),
        click.option("--model", "model_id", default=None, help="Model that produced the predictions; labels table rows"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@cli.command("eval-proof")
@_eval_options
@click.option("--stoplist", "stoplist_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@handle_errors
def cmd_eval_proof(
    dataset: Path,
    pred_path: Path,
    scenario: str,
    out_dir: Path,
    timestamp: str | None,
    lowercase: bool | None,
    model_id: str | None,
    stoplist_path: Path | None,
) -> None:
    """Score proofreading predictions against a dataset."""
    lowercase = settings.bleu_lowercase if lowercase is None else lowercase
    records = corpus.load(dataset, "proofreading")
    predictions = corpus.load_predictions(pred_path)
    manifest = reporting.build_manifest(
        "eval-proof",
        {
            "dataset": str(dataset),
            "predictions": str(pred_path),
            "scenario": scenario,
            "model": model_id,
            "stoplist": str(stoplist_path or settings.resolved_stoplist_path),
            "bleu": metrics.bleu_signature(lowercase),
            "lowercase": lowercase,
        },
        timestamp,
    )
    report = reporting.evaluate_proofreading(
        records, predictions, scenario, manifest, _stoplist(stoplist_path), lowercase
    )
    reporting.write_report(report, out_dir)
    click.echo(reporting.render_table(report), nl=False)


@cli.command("eval-mt")
@_eval_options
@handle_errors
def cmd_eval_mt(
    dataset: Path,
    pred_path: Path,
    scenario: str,
    out_dir: Path,
    timestamp: str | None,
    lowercase: bool | None,
    model_id: str | None,
) -> None:
    """Score translation predictions per direction and user-prompt language."""
    lowercase = settings.bleu_lowercase if lowercase is None else lowercase
    records = corpus.load(dataset, "translation")
    predictions = corpus.load_predictions(pred_path)
    manifest = reporting.build_manifest(
        "eval-mt",
        {
            "dataset": str(dataset),
            "predictions": str(pred_path),
            "scenario": scenario,
            "model": model_id,
            "bleu": metrics.bleu_signature(lowercase),
            "lowercase": lowercase,
        },
        timestamp,
    )
    report = reporting.evaluate_translation(records, predictions, scenario, manifest, lowercase)
    reporting.write_report(report, out_dir)
    click.echo(reporting.render_table(report), nl=False)


@cli.command("table")
@click.argument("reports", nargs=-1, required=True, type=click.Path(exists=True, path_type=Path))
@handle_errors
def cmd_table(reports: tuple[Path, ...]) -> None:
    """Stack saved reports (report.json files or their directories) into one table per task."""
    loaded = [reporting.load_report(path) for path in reports]
    click.echo(reporting.render_combined(loaded), nl=False)


@cli.command("rewrite")
@click.argument("text", required=False)
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--lexicon", "lexicon_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--genres", "genres_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--genre", default=None, help="Genre profile (default: IPIS_DEFAULT_GENRE)")
@click.option("--strategy", type=click.Choice(STRATEGIES), default=None,
              help="Strategy override; must be allowed by the genre")
@click.option("--order", "coordination_order", type=click.Choice(("masc-first", "fem-first")), default=None)
@click.option("--output", "output_path", type=click.Path(dir_okay=False, path_type=Path))
@click.option("--show-plan", is_flag=True, help="Print the replacements to stderr")
@handle_errors
def cmd_rewrite(
    text: str | None,
    input_path: Path | None,
    lexicon_path: Path | None,
    genres_path: Path | None,
    genre: str | None,
    strategy: str | None,
    coordination_order: str | None,
    output_path: Path | None,
    show_plan: bool,
) -> None:
    """Rewrite generic-masculine forms in TEXT (or --input, or stdin) inclusively."""
    source = _read_text(text, input_path)
    lexicon = Lexicon.load(lexicon_path or settings.resolved_lexicon_path)
    profiles = load_genres(genres_path or settings.resolved_genres_path)
    profile = get_profile(genre or settings.default_genre, profiles)

    rewritten, plan = rewrite(
        source,
        lexicon,
        profile,
        strategy=strategy,
        coordination_order=coordination_order or settings.coordination_order,
    )
    if not self_check(rewritten, plan):
        logger.error("[REWRITE] Self-check failed: text outside the replaced spans changed")

    if show_plan:
        for item in plan.replacements:
            click.echo(
                f"{item.start}-{item.end}\t{plan.source[item.start:item.end]}\t"
                f"{item.replacement}\t{item.strategy}",
                err=True,
            )
    if output_path is not None:
        output_path.write_text(rewritten, encoding="utf-8")
    else:
        click.echo(rewritten, nl=not rewritten.endswith("\n"))


@cli.command("generate")
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--scenario", required=True, type=click.Choice(SCENARIOS))
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path),
              help="Predictions JSONL; existing successful lines are reused")
@click.option("--task", type=click.Choice(TASKS), default=None)
@click.option("--endpoint", default=None, help="Endpoint base URL (default: IPIS_BASE_URL)")
@click.option("--model", "model_id", default=None)
@click.option("--parallelism", type=click.IntRange(min=1), default=None)
@click.option("--max-retries", type=click.IntRange(min=0), default=None)
@click.option("--timeout", type=click.FloatRange(min=0, min_open=True), default=None)
@click.option("--temperature", type=click.FloatRange(0, 2), default=None)
@click.option("--pool", "pool_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Exemplar records for fewshot scenarios (normally the train split)")
@click.option("-k", "k", type=click.IntRange(min=1), default=None, help="Exemplars per fewshot bundle")
@click.option("--seed", type=int, default=None)
@click.option("--system-prompt-dir", type=click.Path(exists=True, file_okay=False, path_type=Path), default=None)
@click.option("--dry-run", is_flag=True, help="Print bundles as JSON lines without sending requests")
@handle_errors
def cmd_generate(
    dataset: Path,
    scenario: str,
    out_path: Path | None,
    task: str | None,
    endpoint: str | None,
    model_id: str | None,
    parallelism: int | None,
    max_retries: int | None,
    timeout: float | None,
    temperature: float | None,
    pool_path: Path | None,
    k: int | None,
    seed: int | None,
    system_prompt_dir: Path | None,
    dry_run: bool,
) -> None:
    """Send prompt bundles for every record to a chat-completion endpoint."""
    records = corpus.load(dataset, task)
    pool = corpus.load(pool_path, task) if pool_path else []
    library = SystemPromptLibrary(pl_dir=system_prompt_dir or settings.system_prompt_dir)
    bundles = build_all(
        records,
        scenario,
        fewshot_pool=pool,
        k=k or settings.fewshot_k,
        seed=settings.seed if seed is None else seed,
        library=library,
    )

    if dry_run:
        for bundle in bundles:
            click.echo(json.dumps(bundle.model_dump(mode="json"), ensure_ascii=False))
        return
    if out_path is None:
        raise click.UsageError("--out is required unless --dry-run is given")

    cfg = EndpointConfig.from_settings(
        settings,
        base_url=endpoint,
        model_id=model_id,
        parallelism=parallelism,
        max_retries=max_retries,
        timeout=timeout,
        temperature=temperature,
    )
    client = InferenceClient(cfg)
    results = asyncio.run(client.generate_batch(bundles, cache=GenerationCache(out_path)))
    # Compact the append-only cache to one line per record, in dataset order.
    write_predictions(results, out_path)

    failed = [record.ipis_id for record in results if not record.ok]
    click.echo(f"{len(results) - len(failed)} ok, {len(failed)} failed -> {out_path}")
    for ipis_id in failed:
        click.echo(f"failed: {ipis_id}", err=True)


def _parse_failures(values: tuple[str, ...]) -> dict[str, int]:
    failures = {}
    for value in values:
        needle, sep, code = value.rpartition("=")
        if not sep or not needle or not code.isdigit():
            raise click.BadParameter(f"expected SUBSTRING=STATUS, got {value!r}", param_hint="--fail-on")
        failures[needle] = int(code)
    return failures


@cli.command("serve-stub")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
@click.option("--fail-on", multiple=True, help="SUBSTRING=STATUS: fail requests whose last user turn contains SUBSTRING")
@click.option("--latency", default=0.0, show_default=True, type=float, help="Maximum random delay in seconds")
def cmd_serve_stub(host: str, port: int, fail_on: tuple[str, ...], latency: float) -> None:
    """Run the echo chat-completion stub server."""
    app = create_stub_app(fail_on=_parse_failures(fail_on), latency=(0.0, latency))
    click.echo(f"Echo stub on http://{host}:{port}/v1", err=True)
    uvicorn.run(app, host=host, port=port, log_level=settings.log_level.lower())


@cli.command("info")
def cmd_info() -> None:
    """Show the active configuration and the instruction-tuning reference setup."""
    click.echo(f"ipiskit {__version__}")
    click.echo(f"endpoint: {settings.base_url} model={settings.model_id} parallelism={settings.parallelism}")
    click.echo(f"lexicon: {settings.resolved_lexicon_path}")
    click.echo(f"stoplist: {settings.resolved_stoplist_path}")
    click.echo(f"genres: {settings.resolved_genres_path}")
    click.echo("")
    click.echo("Instruction-tuning reference (documentation only; nothing here trains models):")
    width = max(len(key) for key in TRAINING_REFERENCE)
    for key, value in TRAINING_REFERENCE.items():
        click.echo(f"  {key:<{width}}  {value}")


def main() -> None:
    """Console script entry point."""
    cli(prog_name="ipiskit")


if __name__ == "__main__":
    sys.exit(main())
