"""Shared fixtures: fixture paths, small trained models, model directories."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

from datagen import make_tagged_corpus
from mathnlp.classify import FeatureIndex, train_linear_svm, train_naive_bayes
from mathnlp.ingest import read_labeled_corpus
from mathnlp.pipeline import document_features, load_pipeline
from mathnlp.tagger import train_hmm
from mathnlp.classify import save_linear_svm, save_naive_bayes
from mathnlp.tagger import save_hmm

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def small_corpus():
    return make_tagged_corpus(n_tokens=4000, seed=42)


@pytest.fixture(scope="session")
def small_tagger(small_corpus):
    return train_hmm(small_corpus)


@pytest.fixture(scope="session")
def labeled_docs():
    return read_labeled_corpus(FIXTURES / "labeled_corpus.tsv")


def train_fixture_classifiers(tagger, labeled_docs):
    """(nb, svm) trained on the fixture corpus with token features."""
    index = FeatureIndex()
    corpus = [
        (document_features(doc.text, "tokens", index, False), doc.labels)
        for doc in labeled_docs
    ]
    nb = train_naive_bayes(corpus, alpha=1.0, index=index)
    svm = train_linear_svm(corpus, lambda_reg=1e-4, epochs=20, seed=11, index=index)
    return nb, svm


@pytest.fixture(scope="session")
def fixture_classifiers(small_tagger, labeled_docs):
    return train_fixture_classifiers(small_tagger, labeled_docs)


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory, small_tagger, fixture_classifiers) -> Path:
    path = tmp_path_factory.mktemp("models")
    save_hmm(small_tagger, path / "tagger.hmm")
    nb, svm = fixture_classifiers
    save_naive_bayes(nb, path / "nb.model")
    save_linear_svm(svm, path / "svm.model")
    return path


@pytest.fixture(scope="session")
def lexicon_dir(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("lexicons")
    for name in (
        "acronyms.tsv",
        "person_names.tsv",
        "named_entities.tsv",
        "phrase_stoplist.tsv",
    ):
        (path / name).write_bytes((FIXTURES / name).read_bytes())
    (path / "msc.tsv").write_bytes((FIXTURES / "msc2010_top.tsv").read_bytes())
    return path


@pytest.fixture(scope="session")
def fixture_pipeline(model_dir, lexicon_dir):
    return load_pipeline(model_dir, lexicon_dir)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance-criterion outcomes even under output capture."""
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", [])
    if results:
        terminalreporter.section("acceptance")
        for name, passed in results:
            terminalreporter.write_line(f"[ACCEPTANCE] {name}: {'PASS' if passed else 'FAIL'}")
