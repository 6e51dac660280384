"""Command-line entry points for training, evaluation, analysis and serving."""

from __future__ import annotations

import functools
from pathlib import Path

import click

from mathnlp import __version__
from mathnlp.classify import (
    FeatureIndex,
    evaluate as evaluate_model,
    load_linear_svm,
    load_naive_bayes,
    save_linear_svm,
    save_naive_bayes,
    train_linear_svm,
    train_naive_bayes,
)
from mathnlp.errors import MathNlpError
from mathnlp.feedback import FeedbackLog
from mathnlp.ingest import read_labeled_corpus, read_lexicon, read_tagged_corpus
from mathnlp.phrases import read_pattern_file
from mathnlp.pipeline import (
    analyze_document,
    document_features,
    load_pipeline,
    result_to_json,
    result_to_text,
)
from mathnlp.report import metrics_rows, write_report
from mathnlp.tagger import TagSet, load_hmm, save_hmm, train_hmm


def friendly_errors(command):
    """Turn pipeline exceptions into clean CLI failures (exit code 1)."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except MathNlpError as exc:
            raise click.ClickException(f"{type(exc).__name__}: {exc}") from exc

    return wrapper


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Key-phrase extraction and class proposals for mathematical texts."""


@main.command("train-tagger")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False), help="tagged corpus, one 'token<TAB>tag' per line")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--k-trans", type=float, default=0.01, show_default=True, help="transition smoothing")
@click.option("--k-emit", type=float, default=0.1, show_default=True, help="emission smoothing")
@friendly_errors
def train_tagger(corpus_path: str, out_path: str, k_trans: float, k_emit: float) -> None:
    """Train the PoS tagger on a tagged corpus."""
    tagset = TagSet.default()
    corpus = read_tagged_corpus(corpus_path, tagset)
    model = train_hmm(corpus, tagset=tagset, k_trans=k_trans, k_emit=k_emit)
    save_hmm(model, out_path)
    click.echo(
        f"trained tagger on {corpus.token_count} tokens "
        f"({len(corpus.sentences)} sentences), vocabulary {len(model.vocabulary)}, "
        f"saved to {out_path}"
    )


def _corpus_vectors(docs, source, index, frozen, tagger, patterns, stoplist):
    return [
        (
            document_features(
                doc.text, source, index, frozen, tagger=tagger, patterns=patterns, stoplist=stoplist
            ),
            doc.labels,
        )
        for doc in docs
    ]


def _keyphrase_inputs(source, tagger_path, lexicons_dir):
    """(tagger, patterns, stoplist) when needed for keyphrase featurization."""
    if source != "keyphrases":
        return None, None, None
    if tagger_path is None:
        raise click.UsageError("--source keyphrases requires --tagger")
    tagger = load_hmm(tagger_path)
    patterns = None
    stoplist = None
    if lexicons_dir is not None:
        pattern_path = Path(lexicons_dir) / "patterns.txt"
        if pattern_path.exists():
            patterns = tuple(read_pattern_file(pattern_path))
        stoplist_path = Path(lexicons_dir) / "phrase_stoplist.tsv"
        if stoplist_path.exists():
            stoplist = read_lexicon(stoplist_path, "phrase_stoplist")
    return tagger, patterns, stoplist


@main.command("train-classifier")
@click.option("--method", type=click.Choice(["nb", "svm"]), required=True)
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, dir_okay=False), help="labeled corpus: doc_id<TAB>code,code<TAB>text")
@click.option("--source", type=click.Choice(["tokens", "keyphrases"]), default="tokens", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--alpha", type=float, default=1.0, show_default=True, help="NB smoothing")
@click.option("--lambda", "lambda_reg", type=float, default=1e-4, show_default=True, help="SVM regularization")
@click.option("--epochs", type=int, default=20, show_default=True, help="SVM epochs")
@click.option("--seed", type=int, default=0, show_default=True, help="SVM shuffle seed")
@click.option("--tagger", "tagger_path", type=click.Path(exists=True, dir_okay=False), default=None, help="tagger model, needed for --source keyphrases")
@click.option("--lexicons", "lexicons_dir", type=click.Path(exists=True, file_okay=False), default=None, help="lexicon directory for keyphrase patterns/stoplist")
@friendly_errors
def train_classifier(
    method: str,
    corpus_path: str,
    source: str,
    out_path: str,
    alpha: float,
    lambda_reg: float,
    epochs: int,
    seed: int,
    tagger_path: str | None,
    lexicons_dir: str | None,
) -> None:
    """Train a class-proposal model on a labeled corpus."""
    docs = read_labeled_corpus(corpus_path)
    tagger, patterns, stoplist = _keyphrase_inputs(source, tagger_path, lexicons_dir)
    index = FeatureIndex()
    corpus = _corpus_vectors(docs, source, index, False, tagger, patterns, stoplist)
    if method == "nb":
        model = train_naive_bayes(corpus, alpha=alpha, index=index, source=source)
        save_naive_bayes(model, out_path)
    else:
        model = train_linear_svm(
            corpus, lambda_reg=lambda_reg, epochs=epochs, seed=seed, index=index, source=source
        )
        save_linear_svm(model, out_path)
    click.echo(
        f"trained {method} on {len(docs)} documents "
        f"({len(model.classes)} classes, {len(index)} features), saved to {out_path}"
    )


@main.command("analyze")
@click.option("--in", "in_path", required=True, type=click.Path(exists=False, dir_okay=False, allow_dash=True), help="input file, or - for stdin")
@click.option("--models", "models_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--lexicons", "lexicons_dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json", show_default=True)
@friendly_errors
def analyze(in_path: str, models_dir: str, lexicons_dir: str | None, fmt: str) -> None:
    """Analyze one document and print the result."""
    with click.open_file(in_path, encoding="utf-8") as handle:
        text = handle.read()
    pipeline = load_pipeline(models_dir, lexicons_dir)
    result = analyze_document(text, pipeline)
    if fmt == "json":
        click.echo(result_to_json(result))
    else:
        click.echo(result_to_text(result), nl=False)


@main.command("evaluate")
@click.option("--method", type=click.Choice(["nb", "svm"]), required=True)
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--test", "test_path", required=True, type=click.Path(exists=True, dir_okay=False), help="labeled corpus to score")
@click.option("--k", type=int, default=3, show_default=True, help="ranking cutoff")
@click.option("--tagger", "tagger_path", type=click.Path(exists=True, dir_okay=False), default=None, help="tagger model, needed for keyphrase-source models")
@click.option("--lexicons", "lexicons_dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--report", "report_dir", type=click.Path(file_okay=False), default=None, help="directory for metrics.tsv and figures")
@friendly_errors
def evaluate(
    method: str,
    model_path: str,
    test_path: str,
    k: int,
    tagger_path: str | None,
    lexicons_dir: str | None,
    report_dir: str | None,
) -> None:
    """Score a trained classifier on a labeled test corpus."""
    model = load_naive_bayes(model_path) if method == "nb" else load_linear_svm(model_path)
    docs = read_labeled_corpus(test_path)
    tagger, patterns, stoplist = _keyphrase_inputs(model.source, tagger_path, lexicons_dir)
    test_set = _corpus_vectors(docs, model.source, model.feature_index, True, tagger, patterns, stoplist)
    metrics = evaluate_model(model, test_set, k)
    for key, value in metrics_rows(metrics, method):
        click.echo(f"{key}\t{value}")
    if report_dir is not None:
        paths = write_report(metrics, method, report_dir)
        for path in paths:
            click.echo(f"wrote {path}")


@main.command("serve")
@click.option("--models", "models_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--lexicons", "lexicons_dir", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--feedback-log", "feedback_path", required=True, type=click.Path(dir_okay=False, writable=True))
@friendly_errors
def serve(models_dir: str, lexicons_dir: str | None, host: str, port: int, feedback_path: str) -> None:
    """Serve the HTTP API for the review interface."""
    import uvicorn

    from mathnlp.server import create_app

    pipeline = load_pipeline(models_dir, lexicons_dir)
    app = create_app(pipeline, FeedbackLog(feedback_path))
    click.echo(f"serving on http://{host}:{port} (models: {models_dir})")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
