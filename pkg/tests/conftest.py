import pytest

from stancegen.corpus import Corpus, LabeledTweet, StanceLabel, Tweet
from stancegen.textprep import load_default_resources


@pytest.fixture(scope="session")
def resources():
    return load_default_resources()


SMALL_DEMO_CONFIG = """\
workspace: workspace
seed: 3
languages: [es, ca]
stages:
  ingest: {raw: raw.jsonl, min_words: 3}
  propagate: {seeds: seeds.tsv, max_hops: 2}
  filter: {lexicon: lexicon.txt}
  lda: {num_topics: 3, alpha: 0.5, beta: 0.01, iterations: 40, burn_in: 10,
        anchors: [independencia, republica], min_share: 0.5}
  assemble: {target_total: 150, min_words: 4}
  split: {method: user_disjoint, label_tolerance: 0.1}
  preprocess: {types: [A, B, C, D]}
  train: {language: es, system: tfidf-svm, C: 10, gamma: 0.01}
  score: {}
"""


@pytest.fixture(scope="session")
def demo_workspace(tmp_path_factory):
    """A small end-to-end pipeline run shared by service and CLI tests."""
    from stancegen.pipeline import load_run_config, run
    from stancegen.synthetic import DemoSpec, build_demo_dump

    root = tmp_path_factory.mktemp("demo")
    build_demo_dump(
        root,
        DemoSpec(n_authors_per_side=14, n_neutral_authors=4, tweets_per_author=14, seed=5),
    )
    config_path = root / "config.yaml"
    config_path.write_text(SMALL_DEMO_CONFIG, encoding="utf-8")
    cfg = load_run_config(config_path, workspace=root / "workspace")
    run(cfg)
    return root / "workspace"


def make_tweet(tid, text="hola mundo feliz", author="a1", language="und", retweet_of=None):
    return Tweet(id=str(tid), author_id=author, language=language, text=text,
                 retweet_of_author=retweet_of)


def make_corpus(rows, name="fx", language="mixed"):
    """rows: (id, label or None, text[, author]) tuples."""
    items = []
    for row in rows:
        tid, label, text = row[:3]
        author = row[3] if len(row) > 3 else f"user-{tid}"
        items.append(
            LabeledTweet(
                tweet=Tweet(id=str(tid), author_id=author, text=text),
                label=StanceLabel(label) if label else None,
            )
        )
    return Corpus(name=name, language=language, items=tuple(items))
