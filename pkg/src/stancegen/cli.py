"""Command-line entry point: the pipeline runner plus per-stage commands.

Exit codes: 0 on success, 2 for configuration errors, 3 for stage failures.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .corpus import CIC_SCHEMA, PIPELINE_SCHEMA, SEMEVAL_SCHEMA, load_corpus
from .evaluation import PredictionSet, error_confusion, majority_error_set, score, upperbound
from .lexicon import extract_hashtags
from .pipeline import ConfigError, RunConfig, StageError, load_run_config, run

logger = logging.getLogger("stancegen")

SCHEMAS = {"cic": CIC_SCHEMA, "semeval": SEMEVAL_SCHEMA, "pipeline": PIPELINE_SCHEMA}


def _schema_option():
    return click.option(
        "--schema",
        "schema_name",
        type=click.Choice(sorted(SCHEMAS)),
        default="pipeline",
        show_default=True,
        help="column layout of the corpus file",
    )


def _read_corpus(path: str, schema_name: str, language: str = "mixed"):
    return load_corpus(path, SCHEMAS[schema_name], language=language).corpus


@click.group()
@click.option("--log-level", default="info", show_default=True,
              type=click.Choice(["debug", "info", "warning", "error"]))
def main(log_level: str) -> None:
    """Corpus generation and benchmarking toolkit for stance detection."""
    logging.basicConfig(level=log_level.upper(), format="%(levelname)s %(name)s: %(message)s")


def _run_stages(config, workspace, seed, resume, only=None, overrides=None):
    try:
        cfg = load_run_config(config, workspace=workspace, seed=seed, resume=resume)
        if only:
            if only not in cfg.stages:
                raise ConfigError(f"config does not define stage {only!r}")
            params = dict(cfg.stages[only])
            params.update(overrides or {})
            cfg = RunConfig(
                workspace=cfg.workspace,
                seed=cfg.seed,
                languages=cfg.languages,
                stages={only: params},
                resume=cfg.resume,
                resources=cfg.resources,
                base_dir=cfg.base_dir,
            )
        report = run(cfg, log=logger.info)
    except ConfigError as exc:
        logger.error("%s", exc)
        sys.exit(2)
    except StageError as exc:
        logger.error("%s", exc)
        sys.exit(3)
    click.echo(json.dumps(report))


def _stage_command(name: str, help_text: str):
    @main.command(name=name, help=help_text)
    @click.option("--config", required=True, type=click.Path(exists=True))
    @click.option("--workspace", type=click.Path(), default=None)
    @click.option("--seed", type=int, default=None, help="override the config seed")
    @click.option("--resume/--no-resume", default=None)
    def _cmd(config, workspace, seed, resume, _stage=name):
        _run_stages(config, workspace, seed, resume, only=_stage)

    return _cmd


@main.command()
@click.option("--config", required=True, type=click.Path(exists=True))
@click.option("--workspace", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None, help="override the config seed")
@click.option("--resume/--no-resume", default=None)
def run_pipeline(config, workspace, seed, resume):
    """Run every configured stage in order (the `run` command)."""
    _run_stages(config, workspace, seed, resume)


main.commands["run"] = main.commands.pop("run-pipeline")

for _name, _help in (
    ("ingest", "Parse, language-split, dedup and length-filter a raw dump."),
    ("propagate", "Spread seed labels along retweet edges and label tweets."),
    ("lda", "Train the topic model and select extra on-topic tweets."),
    ("assemble", "Build the balanced corpus from the on-topic pools."),
    ("split", "Generate train/dev/test splits."),
    ("preprocess", "Export the four preprocessed text views of each split."),
    ("train", "Train a classifier on the split (optionally grid-searched)."),
):
    _stage_command(_name, _help)


@main.command(name="filter", help="Keep on-topic tweets via the hashtag/keyword lexicon.")
@click.option("--config", required=True, type=click.Path(exists=True))
@click.option("--workspace", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
@click.option("--resume/--no-resume", default=None)
def filter_cmd(config, workspace, seed, resume):
    _run_stages(config, workspace, seed, resume, only="filter")


@main.command(help="Run grid search for the train stage (then train the best).")
@click.option("--config", required=True, type=click.Path(exists=True))
@click.option("--workspace", type=click.Path(), default=None)
@click.option("--seed", type=int, default=None)
def grid(config, workspace, seed):
    _run_stages(config, workspace, seed, resume=False, only="train", overrides={"grid": True})


@main.command(name="hashtags", help="Rank the hashtags of a corpus by frequency.")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@_schema_option()
@click.option("--top", default=50, show_default=True)
def hashtags_cmd(corpus_path, schema_name, top):
    corpus = _read_corpus(corpus_path, schema_name)
    for tag, count in extract_hashtags(corpus)[:top]:
        click.echo(f"{tag}\t{count}")


@main.command(name="score", help="Score a prediction file against a gold corpus.")
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--pred", required=True, type=click.Path(exists=True))
@_schema_option()
@click.option("--json", "as_json", is_flag=True, help="emit the JSON report")
def score_cmd(gold, pred, schema_name, as_json):
    report = score(_read_corpus(gold, schema_name), PredictionSet.from_tsv(pred))
    if as_json:
        click.echo(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))
    else:
        click.echo(report.to_text_table())


@main.command(name="errors", help="Items misclassified by >= threshold of the given systems.")
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--pred", "preds", required=True, multiple=True, type=click.Path(exists=True))
@click.option("--threshold", default=3, show_default=True)
@_schema_option()
def errors_cmd(gold, preds, threshold, schema_name):
    gold_corpus = _read_corpus(gold, schema_name)
    systems = [PredictionSet.from_tsv(p) for p in preds]
    disputed = majority_error_set(gold_corpus, systems, threshold=threshold)
    for item in disputed:
        votes = ",".join(f"{s}:{lab.value}" for s, lab in sorted(item.predictions.items()))
        click.echo(f"{item.tweet_id}\t{item.gold.value}\t{votes}")
    matrix = error_confusion(disputed)
    click.echo("# confusion (gold -> predicted, wrong votes only)", err=False)
    for g, row in matrix.items():
        for p, count in row.items():
            if count:
                click.echo(f"# {g.value} -> {p.value}: {count}")


@main.command(name="upperbound", help="Oracle score over several prediction files.")
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--pred", "preds", required=True, multiple=True, type=click.Path(exists=True))
@_schema_option()
def upperbound_cmd(gold, preds, schema_name):
    gold_corpus = _read_corpus(gold, schema_name)
    report = upperbound(gold_corpus, [PredictionSet.from_tsv(p) for p in preds])
    click.echo(report.to_text_table())


@main.command(help="Generate the bundled synthetic demo dump and its config.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", default=20190301, show_default=True)
def synth(out_dir, seed):
    from .synthetic import DemoSpec, build_demo_dump, write_demo_config

    out = Path(out_dir)
    info = build_demo_dump(out, DemoSpec(seed=seed))
    write_demo_config(out)
    click.echo(json.dumps(info))


@main.command(help="Serve the curation API (and UI, when built) over HTTP.")
@click.option("--workspace", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(workspace, host, port):
    import uvicorn

    from .service.app import create_app
    from .service.state import StateError

    try:
        app = create_app(Path(workspace))
    except StateError as exc:
        logger.error("%s", exc)
        sys.exit(3)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
