"""Operator command line: build indexes, ask questions, generate question
datasets, audit claimed citations, and run evaluations without the service.

Commands wrap the library operations one to one. Exit codes: 0 success,
1 validation problem (bad input, missing file), 2 runtime failure
(provider or backend error).
"""

import csv
import json
import sys
from pathlib import Path

import click

from . import evaluation
from .corpus import CorpusError, CorpusIndex, load_index, read_records
from .gateway import (
    CompletionRequest,
    ProviderError,
    build_question_generation_prompt,
    default_registry,
)
from .pipeline import PipelineError, answer_question
from .service.config import ConfigError, ServiceConfig, load_config
from .verifier import audit_answers, load_claims, render_dot_grid

DEFAULT_PER_DOMAIN = 5


class RuntimeFailure(click.ClickException):
    exit_code = 2


def _load_service_config(path: str | None) -> ServiceConfig | None:
    if not path:
        return None
    try:
        return load_config(path)
    except (OSError, ConfigError) as exc:
        raise click.ClickException(f"config: {exc}") from exc


def _resolve_index(
    corpus: str | None, index_dir: str | None, config: ServiceConfig | None
) -> CorpusIndex:
    path: Path | None = None
    if corpus:
        path = Path(corpus)
    elif index_dir:
        path = Path(index_dir) / "corpus.jsonl"
    elif config and config.corpus_path:
        path = config.corpus_path
    if path is None:
        raise click.ClickException(
            "no corpus configured; pass --corpus/--index or set one in --config"
        )
    if not path.exists():
        raise click.ClickException(f"corpus file not found: {path}")
    try:
        return load_index(path)
    except CorpusError as exc:
        raise click.ClickException(f"malformed corpus: {exc}") from exc


@click.group()
@click.option("--config", "config_path", type=str, default=None, help="Service config file.")
@click.pass_context
def cli(ctx, config_path):
    """Evidence-grounded scholarly question answering."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = _load_service_config(config_path)


@cli.group()
def index():
    """Corpus index operations."""


@index.command("build")
@click.option("--corpus", required=True, type=str, help="Line-delimited corpus file.")
@click.option("--out", required=True, type=str, help="Output index directory.")
def index_build(corpus, out):
    """Ingest a corpus file and write a queryable index directory."""
    source = Path(corpus)
    if not source.exists():
        raise click.ClickException(f"corpus file not found: {source}")
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        records = list(read_records(source))
        built = CorpusIndex.ingest(records)
    except CorpusError as exc:
        raise click.ClickException(f"malformed corpus: {exc}") from exc
    with open(out_dir / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json(), ensure_ascii=False) + "\n")
    stats = built.stats
    stats_obj = {
        "document_count": stats.document_count,
        "full_text_count": stats.full_text_count,
        "mean_abstract_words": round(stats.mean_abstract_words, 2),
    }
    (out_dir / "stats.json").write_text(
        json.dumps(stats_obj, indent=2) + "\n", encoding="utf-8"
    )
    click.echo(
        f"indexed {stats.document_count} documents "
        f"({stats.full_text_count} with full text, "
        f"mean abstract {stats.mean_abstract_words:.1f} words)"
    )


@cli.command()
@click.option("--question", required=True, type=str)
@click.option("--provider", default="stub", show_default=True)
@click.option("--corpus", type=str, default=None, help="Corpus file to search.")
@click.option("--index", "index_dir", type=str, default=None, help="Index directory.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def ask(ctx, question, provider, corpus, index_dir, fmt):
    """Answer one question with linked citations."""
    if not question.strip():
        raise click.ClickException("question must be non-empty")
    backend = _resolve_index(corpus, index_dir, ctx.obj.get("config"))
    registry = default_registry()
    try:
        answer = answer_question(question, backend, registry.get(provider))
    except (PipelineError, ProviderError) as exc:
        raise RuntimeFailure(str(exc)) from exc
    if fmt == "json":
        click.echo(json.dumps(answer.to_dict(), indent=2, ensure_ascii=False))
        return
    click.echo(answer.answer_text)
    if answer.insufficient_evidence:
        click.echo("\n(insufficient evidence)")
    if answer.citations:
        click.echo("\nCitations:")
        for i, citation in enumerate(answer.citations, 1):
            click.echo(f"  {i}. {citation.title} - {citation.url}")


@cli.command("gen-questions")
@click.option("--domains", "domains_file", type=str, default=None,
              help="Domain list, one per line (defaults to the bundled list).")
@click.option("--per-domain", default=DEFAULT_PER_DOMAIN, show_default=True, type=int)
@click.option("--provider", default="stub", show_default=True)
@click.option("--out", type=str, default="questions.csv", show_default=True)
def gen_questions(domains_file, per_domain, provider, out):
    """Write a (domain, question) dataset via the question template."""
    if per_domain < 1:
        raise click.ClickException("--per-domain must be >= 1")
    if domains_file:
        path = Path(domains_file)
        if not path.exists():
            raise click.ClickException(f"domains file not found: {path}")
        raw = path.read_text(encoding="utf-8")
    else:
        from importlib import resources

        raw = resources.files("scholarqa.data").joinpath("domains.txt").read_text("utf-8")
    domains = [
        line.strip() for line in raw.splitlines()
        if line.strip() and not line.startswith("#")
    ]
    if not domains:
        raise click.ClickException("domains file contains no domains")

    registry = default_registry()
    completion = registry.get(provider)
    rows = []
    for domain in domains:
        prompt = build_question_generation_prompt(domain).render()
        for seed in range(per_domain):
            try:
                response = completion.complete(
                    CompletionRequest(prompt=prompt, provider=provider, seed=seed)
                )
            except ProviderError as exc:
                raise RuntimeFailure(str(exc)) from exc
            rows.append((domain, response.text))

    out_path = Path(out)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["domain", "question"])
        writer.writerows(rows)
    click.echo(f"wrote {len(rows)} questions to {out_path}")


@cli.command()
@click.option("--claims", "claims_file", required=True, type=str)
@click.option("--corpus", type=str, default=None)
@click.option("--index", "index_dir", type=str, default=None)
@click.option("--out", type=str, default=None, help="Write the report as JSON.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def audit(ctx, claims_file, corpus, index_dir, out, fmt):
    """Verify claimed citations and print the verdict grid and rates."""
    path = Path(claims_file)
    if not path.exists():
        raise click.ClickException(f"claims file not found: {path}")
    backend = _resolve_index(corpus, index_dir, ctx.obj.get("config"))
    try:
        claims = load_claims(path)
    except ValueError as exc:
        raise click.ClickException(f"malformed claims: {exc}") from exc
    report = audit_answers(claims, backend)
    grid = render_dot_grid(report)
    payload = {
        "rates": {k: round(v, 2) for k, v in report.rates.items()},
        "total_claims": report.total_claims,
        "grid": grid.text.splitlines(),
        "issues": list(report.issues),
    }
    if out:
        Path(out).write_text(
            json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    if fmt == "json":
        click.echo(json.dumps(payload, indent=2, ensure_ascii=False))
        return
    click.echo(grid.text)
    click.echo(
        "factual {factual_pct:.1f}% / conflated {conflated_pct:.1f}% / "
        "fictional {fictional_pct:.1f}%".format(**report.rates)
    )
    for issue in report.issues:
        click.echo(f"issue: {issue}", err=True)


@cli.command("eval")
@click.option("--annotations", "annotations_file", type=str, default=None)
@click.option("--reference-tables", is_flag=True,
              help="Report over the bundled published tables instead.")
@click.option("--corpus", type=str, default=None,
              help="Corpus for per-domain size/length correlations.")
@click.option("--index", "index_dir", type=str, default=None)
@click.option("--out-dir", type=str, default=None, help="Export report CSVs here.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@click.pass_context
def eval_command(ctx, annotations_file, reference_tables, corpus, index_dir, out_dir, fmt):
    """Agreement, domain means, rank curve, and correlation suite."""
    report = evaluation.EvalReport()
    if reference_tables:
        report.table = evaluation.load_reference_tables()
        report.agreement = evaluation.load_reference_agreement()
    else:
        if not annotations_file:
            raise click.ClickException(
                "pass --annotations or use --reference-tables"
            )
        path = Path(annotations_file)
        if not path.exists():
            raise click.ClickException(f"annotations file not found: {path}")
        try:
            records = evaluation.load_annotations_csv(path)
            report.table = evaluation.domain_means(records)
        except (ValueError, evaluation.InsufficientDataError) as exc:
            raise click.ClickException(f"annotations: {exc}") from exc
        try:
            report.agreement = evaluation.compute_agreement(records)
        except evaluation.InsufficientDataError as exc:
            report.notes.append(f"agreement skipped: {exc}")

    corpus_stats = None
    if corpus or index_dir or (ctx.obj.get("config") and ctx.obj["config"].corpus_path):
        corpus_stats = _resolve_index(corpus, index_dir, ctx.obj.get("config")).domain_stats()
    report.curve = evaluation.rank_relevance_curve(report.table)
    report.correlations = evaluation.correlation_suite(report.table, corpus_stats)

    if out_dir:
        written = evaluation.export_report(report, out_dir)
        click.echo(f"exported {len(written)} files to {out_dir}", err=True)

    if fmt == "json":
        payload = {
            "agreement": report.agreement.kappas if report.agreement else None,
            "rank_curve": {
                "means": list(report.curve.means),
                "non_increasing": report.curve.non_increasing,
            },
            "correlations": [
                {"name": e.name, "n": e.n, "r": round(e.r, 4)}
                for e in report.correlations.entries
            ],
            "skipped": list(report.correlations.skipped),
            "notes": report.notes,
        }
        click.echo(json.dumps(payload, indent=2, ensure_ascii=False))
        return

    if report.agreement:
        click.echo("Inter-annotator agreement (quadratic-weighted kappa):")
        for metric in evaluation.AGREEMENT_METRICS:
            click.echo(f"  {metric:<18} {report.agreement.kappas[metric]:.3f}")
    curve_values = ", ".join(f"{m:.2f}" for m in report.curve.means)
    trend = "non-increasing" if report.curve.non_increasing else "not monotone"
    click.echo(f"Mean relevance by citation position: {curve_values} ({trend})")
    click.echo("Correlations (Pearson r):")
    for entry in report.correlations.entries:
        click.echo(f"  {entry.name:<42} r = {entry.r:>5.2f} (n={entry.n})")
    for skipped in report.correlations.skipped:
        click.echo(f"  skipped: {skipped}")
    for note in report.notes:
        click.echo(f"note: {note}", err=True)


@cli.command()
@click.option("--host", default=None, help="Override the configured listen host.")
@click.option("--port", default=None, type=int, help="Override the configured port.")
@click.pass_context
def serve(ctx, host, port):
    """Run the HTTP service (requires --config)."""
    config = ctx.obj.get("config")
    if config is None:
        raise click.ClickException("serve requires --config")
    import uvicorn

    from .service import create_app

    uvicorn.run(
        create_app(config),
        host=host or config.host,
        port=port or config.port,
        log_level="info",
    )


def main():
    try:
        cli(standalone_mode=True, obj={})
    except CorpusError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except (ProviderError, PipelineError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
