"""Acceptance suite: one test per release criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s`. Criteria that need the
released corpus distribution (or pre-trained embedding files) skip with a
warning when the data is not present; point CIC_DATA_DIR and
STANCEGEN_EMBEDDINGS_DIR at the downloaded files to enable them.
"""

import os
import time
from decimal import Decimal
from pathlib import Path

import numpy as np
import pytest

from stancegen.corpus import CIC_SCHEMA, ColumnSchema, StanceLabel, distribution, load_corpus
from stancegen.evaluation import f1_average_percent
from stancegen.learners.softmax import LinearSoftmaxClassifier
from stancegen.learners.svm import compute_kernel, dual_objective, kkt_violation, smo_solve
from stancegen.lda import LdaConfig, train_lda
from stancegen.pipeline import load_run_config, run
from stancegen.splits import SplitSpec, split_user_disjoint
from stancegen.synthetic import (
    DemoSpec,
    build_demo_dump,
    homophily_graph,
    planted_topic_corpus,
    write_demo_config,
)
from stancegen.textprep import PreprocessType, load_default_resources, preprocess

from conftest import make_corpus
from oracles import brute_force_svm_dual, finite_difference_grad


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")


def report_skip(name: str, reason: str) -> None:
    print(f"ACCEPTANCE {name}: SKIPPED ({reason})")


# --------------------------------------------------------------------------
# 1. Metric golden cells: every self-consistent (F1_against, F1_favor,
# F1_avg) triple of the published result tables, frozen. Two triples whose
# printed average cannot arise from the printed inputs are excluded.

GOLDEN_F1_CELLS = [
    # English benchmark results
    ("73.24", "53.52", "63.38"),
    ("72.06", "53.56", "62.81"),
    ("72.94", "61.58", "67.26"),
    ("73.90", "62.29", "68.10"),
    ("75.30", "65.03", "70.17"),
    ("76.23", "66.57", "71.40"),
    ("76.87", "67.43", "72.15"),
    # TW-1O Catalan
    ("22.86", "94.68", "58.77"),
    ("0.00", "93.88", "46.94"),
    ("28.57", "94.33", "61.45"),
    ("05.71", "94.03", "49.87"),
    ("21.62", "94.86", "58.24"),
    # TW-1O Spanish
    ("68.50", "64.53", "66.52"),
    ("63.65", "58.85", "61.25"),
    ("69.58", "65.37", "67.48"),
    ("66.80", "65.11", "65.96"),
    ("66.67", "62.16", "64.42"),
    ("65.54", "59.26", "62.40"),
    # CIC Catalan test (original and user-disjoint re-split)
    ("68.89", "72.91", "70.90"),
    ("70.20", "72.49", "71.35"),
    ("59.43", "64.46", "61.95"),
    ("67.91", "65.77", "66.84"),
    ("70.73", "72.21", "71.47"),
    ("69.62", "70.63", "70.13"),
    ("70.64", "77.52", "74.08"),
    ("69.98", "75.60", "72.79"),
    ("53.13", "77.98", "65.56"),
    ("60.90", "77.52", "69.21"),
    ("70.69", "78.67", "74.68"),
    ("71.63", "78.10", "74.87"),
    # CIC Spanish test (original and user-disjoint re-split)
    ("70.67", "71.50", "71.09"),
    ("69.56", "74.12", "71.84"),
    ("64.24", "62.51", "63.38"),
    ("64.39", "66.99", "65.69"),
    ("69.76", "71.22", "70.49"),
    ("75.17", "74.27", "74.72"),
    ("70.20", "71.35", "70.78"),
    ("69.54", "71.83", "70.69"),
    ("68.02", "72.86", "70.44"),
    ("74.68", "72.45", "73.57"),
    ("70.01", "70.75", "70.38"),
]


def test_metric_golden_cells():
    bad = [
        (a, f, want)
        for a, f, want in GOLDEN_F1_CELLS
        if f1_average_percent(a, f) != Decimal(want)
    ]
    report("metric-golden-cells", not bad, f"{len(GOLDEN_F1_CELLS)} cells")
    assert not bad, f"cells not reproduced: {bad}"


# --------------------------------------------------------------------------
# 2. Released-corpus loader counts, per split and label.

TABLE7 = {
    "CIC-CA": {"train": (2680, 2545, 752), "dev": (1201, 506, 372), "test": (937, 850, 205)},
    "CIC-CA-Random": {"train": (2416, 2335, 1277), "dev": (820, 763, 427), "test": (804, 752, 454)},
    "CIC-ES": {"train": (2560, 2276, 1100), "dev": (875, 702, 503), "test": (953, 843, 265)},
    "CIC-ES-Random": {"train": (2515, 2420, 1111), "dev": (856, 782, 377), "test": (829, 807, 380)},
}
PART_ALIASES = {"train": ("train",), "dev": ("dev", "val", "valid", "validation"), "test": ("test",)}


def _find_release_file(root: Path, dataset: str, part: str):
    base = root / dataset
    for alias in PART_ALIASES[part]:
        for suffix in (".tsv", ".txt", ".csv"):
            candidate = base / f"{alias}{suffix}"
            if candidate.exists():
                return candidate
    matches = [
        p
        for alias in PART_ALIASES[part]
        for p in root.rglob(f"*{alias}*")
        if p.is_file() and dataset.lower() in str(p).lower().replace("_", "-")
    ]
    return matches[0] if len(matches) == 1 else None


def _load_release(path: Path):
    for schema in (CIC_SCHEMA, ColumnSchema(fields=("id", "label", "text"), has_header=False)):
        try:
            result = load_corpus(path, schema)
        except Exception:
            continue
        if not result.errors:
            return result.corpus
    return None


def test_release_loader_distribution_counts():
    root = os.environ.get("CIC_DATA_DIR")
    if not root:
        report_skip("release-loader-counts", "CIC_DATA_DIR not set; see README")
        pytest.skip("released corpus not available (set CIC_DATA_DIR)")
    root = Path(root)
    checked = 0
    for dataset, parts in TABLE7.items():
        for part, (against, favor, none) in parts.items():
            path = _find_release_file(root, dataset, part)
            if path is None:
                continue
            corpus = _load_release(path)
            assert corpus is not None, f"could not parse {path}"
            dist = distribution(corpus)
            got = (dist.get(StanceLabel.AGAINST), dist.get(StanceLabel.FAVOR), dist.get(StanceLabel.NONE))
            assert got == (against, favor, none), f"{dataset}/{part}: {got} != {(against, favor, none)}"
            checked += 1
    if checked == 0:
        report_skip("release-loader-counts", f"no release files under {root}")
        pytest.skip("no release files found")
    report("release-loader-counts", True, f"{checked} split files")


# --------------------------------------------------------------------------
# 3. Desk-scale baseline reproduction on the released corpus.

BASELINE_TARGETS = {"CIC-ES": 71.09, "CIC-CA": 70.90}
SOFTMAX_TARGET_ES = 72.43
TOLERANCE = 4.0


def _load_release_split(root: Path, dataset: str):
    parts = {}
    for part in ("train", "dev", "test"):
        path = _find_release_file(root, dataset, part)
        if path is None:
            return None
        corpus = _load_release(path)
        if corpus is None:
            return None
        parts[part] = corpus
    return parts


def test_baseline_reproduction_desk_scale():
    root = os.environ.get("CIC_DATA_DIR")
    if not root:
        report_skip("baseline-reproduction", "CIC_DATA_DIR not set; see README")
        pytest.skip("released corpus not available (set CIC_DATA_DIR)")
    from stancegen.evaluation import score
    from stancegen.learners import SoftmaxPipeline, TfidfSvmPipeline, grid_search, load_embeddings

    resources = load_default_resources()
    root = Path(root)
    for dataset, target in BASELINE_TARGETS.items():
        parts = _load_release_split(root, dataset)
        if parts is None:
            report_skip("baseline-reproduction", f"{dataset} files missing")
            pytest.skip(f"{dataset} not found under {root}")
        lang = "ca" if dataset.endswith("CA") else "es"
        result = grid_search(
            parts["train"],
            parts["dev"],
            lambda c, g: TfidfSvmPipeline(resources, C=c, gamma=g, language=lang),
        )
        pipeline = TfidfSvmPipeline(resources, C=result.best_c, gamma=result.best_gamma, language=lang)
        pipeline.fit(parts["train"])
        f1 = score(parts["test"], pipeline.predict_corpus(parts["test"])).f1_avg * 100
        ok = abs(f1 - target) <= TOLERANCE
        report("baseline-reproduction", ok, f"{dataset} tfidf-svm {f1:.2f} vs {target}")
        assert ok

    emb_dir = os.environ.get("STANCEGEN_EMBEDDINGS_DIR")
    if not emb_dir:
        report_skip("baseline-softmax", "STANCEGEN_EMBEDDINGS_DIR not set")
        pytest.skip("embedding files not available")
    parts = _load_release_split(root, "CIC-ES")
    table = load_embeddings(Path(emb_dir) / "cc.es.300.vec", limit=500_000)
    pipeline = SoftmaxPipeline(resources, table=table, epochs=20, language="es")
    pipeline.fit(parts["train"])
    from stancegen.evaluation import score as score_fn

    f1 = score_fn(parts["test"], pipeline.predict_corpus(parts["test"])).f1_avg * 100
    ok = abs(f1 - SOFTMAX_TARGET_ES) <= TOLERANCE
    report("baseline-softmax", ok, f"CIC-ES softmax {f1:.2f} vs {SOFTMAX_TARGET_ES}")
    assert ok


# --------------------------------------------------------------------------
# 4. Byte-for-byte preprocessing goldens.

GOLDEN_ORIGINAL = (
    "@pilarc_pilarc Ten, manipuladora se te cayó el ME ESTAS HABLANDO EN POLACO??  "
    "que le suelta el fachamierda primero #ZASCA https://t.co/XQ08KuVgtI"
)
GOLDEN_A = "manipulador cayo hablar polaco suelto fachamierda #zasca"
GOLDEN_D = (
    "pilarc_pilarc Ten, manipuladora se te cayó el ME ESTAS HABLANDO EN POLACO??  "
    "que le suelta el fachamierda primero ZASCA"
)


def test_preprocessing_goldens():
    resources = load_default_resources()
    got_a = preprocess(GOLDEN_ORIGINAL, PreprocessType.A, resources, "es")
    got_d = preprocess(GOLDEN_ORIGINAL, PreprocessType.D)
    ok = got_a == GOLDEN_A and got_d == GOLDEN_D
    report("preprocessing-goldens", ok)
    assert got_a == GOLDEN_A
    assert got_d == GOLDEN_D


# --------------------------------------------------------------------------
# 5. SMO against the brute-force QP oracle.


def test_smo_oracle_equivalence():
    rng = np.random.default_rng(12345)
    worst_gap = 0.0
    worst_kkt = 0.0
    for trial in range(50):
        n = int(rng.integers(2, 7))
        while True:
            y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
            if len(set(y.tolist())) == 2:
                break
        X = rng.normal(size=(n, 2))
        C = float(rng.uniform(0.5, 10.0))
        kernel = "rbf" if trial % 3 else "linear"
        gamma = float(rng.uniform(0.1, 2.0))
        K = compute_kernel(X, X, kernel, gamma)
        alpha, b = smo_solve(K, y, C, tol=1e-10)
        gap = abs(dual_objective(K, y, alpha) - brute_force_svm_dual(K, y, C))
        worst_gap = max(worst_gap, gap)
        worst_kkt = max(worst_kkt, kkt_violation(K, y, alpha, b, C))
    ok = worst_gap < 1e-6 and worst_kkt <= 1e-3
    report("smo-oracle-equivalence", ok, f"worst gap {worst_gap:.2e}, worst KKT {worst_kkt:.2e}")
    assert worst_gap < 1e-6
    assert worst_kkt <= 1e-3


# --------------------------------------------------------------------------
# 6. LDA property suite on the planted corpus.


def test_lda_property_suite():
    planted = planted_topic_corpus(n_docs=200, doc_len=30, vocab_size=20, n_topics=2, seed=9)
    cfg = LdaConfig(num_topics=2, alpha=0.5, beta=0.01, iterations=200, burn_in=50, seed=42)
    model = train_lda(planted.docs, cfg, validate_every_sweep=True)

    purities = []
    for k in range(2):
        top = {w for w, _ in model.top_words(k, 10)}
        purities.append(max(len(top & set(v)) for v in planted.vocabularies) / 10)
    sets = [set(v) for v in planted.vocabularies]
    mapping = {
        k: max(range(2), key=lambda t: len({w for w, _ in model.top_words(k, 10)} & sets[t]))
        for k in range(2)
    }
    hits = sum(
        mapping[model.dominant_topic(d)[0]] == true_topic
        for d, true_topic in enumerate(planted.topic_of_doc)
    )
    accuracy = hits / len(planted.docs)

    again = train_lda(planted.docs, cfg)
    deterministic = np.array_equal(model.topic_word_counts, again.topic_word_counts) and all(
        np.array_equal(a, b) for a, b in zip(model.assignments, again.assignments)
    )
    ok = min(purities) >= 0.9 and accuracy >= 0.95 and deterministic
    report(
        "lda-property-suite",
        ok,
        f"purity {min(purities):.2f}, dominant accuracy {accuracy:.3f}, bit-exact {deterministic}",
    )
    assert min(purities) >= 0.9
    assert accuracy >= 0.95
    assert deterministic


# --------------------------------------------------------------------------
# 7. User-disjoint split properties over 20 seeds.


def test_split_properties_20_seeds():
    rows = []
    labels = ("AGAINST", "FAVOR", "NONE")
    for u in range(100):
        for t in range(10):
            rows.append((u * 100 + t, labels[u % 3], f"text prou llarg {u} {t}", f"user{u:03d}"))
    corpus = make_corpus(rows)
    global_props = distribution(corpus).proportions()
    spec = SplitSpec()
    ok = True
    for seed in range(20):
        split = split_user_disjoint(corpus, SplitSpec(seed=seed))
        users = [{it.tweet.author_id for it in part} for part in split.parts().values()]
        for a, b in ((0, 1), (0, 2), (1, 2)):
            ok &= not (users[a] & users[b])
        for ratio, part in zip(spec.ratios, split.parts().values()):
            ok &= abs(len(part) / len(corpus) - ratio) <= 0.02
            props = distribution(part).proportions()
            for lab in StanceLabel:
                ok &= abs(props[lab] - global_props[lab]) <= 0.05
    report("split-properties", ok, "20 seeds, 1000 tweets, 100 users")
    assert ok


# --------------------------------------------------------------------------
# 8. Propagation agreement on the planted homophilous graph.


def test_propagation_planted_agreement():
    from stancegen.corpus import AccountLabel
    from stancegen.propagation import PropagationConfig, propagate

    planted = homophily_graph(n_nodes=200, seeds_per_community=10, p_within=0.9, p_cross=0.1, seed=11)
    seeds = [AccountLabel(author_id=a, label=StanceLabel.FAVOR) for a in planted.seeds_per_community[0]]
    seeds += [AccountLabel(author_id=a, label=StanceLabel.AGAINST) for a in planted.seeds_per_community[1]]
    out = propagate(planted.graph, seeds, PropagationConfig(max_hops=1))
    propagated = [a for a in out if a.provenance == "propagated"]
    want = {0: StanceLabel.FAVOR, 1: StanceLabel.AGAINST}
    agree = sum(1 for a in propagated if a.label is want[planted.community_of[a.author_id]])
    rate = agree / len(propagated) if propagated else 0.0
    ok = rate >= 0.95 and len(propagated) > 0
    report("propagation-agreement", ok, f"{rate:.3f} over {len(propagated)} labeled accounts")
    assert ok


# --------------------------------------------------------------------------
# 9. Softmax gradient check.


def test_softmax_gradient_check():
    docs = [["bon", "dia", "independencia"], ["mal", "dia", "unionisme"],
            ["bon", "vespre", "independencia"], ["mal", "vespre", "unionisme"], ["bon", "dia"]]
    labels = ["FAVOR", "AGAINST", "FAVOR", "AGAINST", "NONE"]
    model = LinearSoftmaxClassifier(epochs=2, lr0=0.1, dim=5, random_state=7).fit(docs, labels)
    _, grad_w, grad_b = model.loss_and_gradients(docs, labels)

    def loss_at_w(w):
        saved = model.output_
        model.output_ = w
        out = model.loss_and_gradients(docs, labels)[0]
        model.output_ = saved
        return out

    num_w = finite_difference_grad(loss_at_w, model.output_.copy())
    rel = np.abs(grad_w - num_w) / np.maximum(np.abs(num_w), 1e-8)
    ok = float(rel.max()) < 1e-4
    report("softmax-gradient-check", ok, f"max relative error {rel.max():.2e}")
    assert ok


# --------------------------------------------------------------------------
# 10. End-to-end determinism on the bundled synthetic fixture.


def test_end_to_end_determinism(tmp_path):
    started = time.monotonic()
    demo = tmp_path / "demo"
    build_demo_dump(demo, DemoSpec())
    config = write_demo_config(demo)
    outputs = []
    for attempt in (1, 2):
        cfg = load_run_config(config, workspace=tmp_path / f"ws{attempt}")
        run(cfg)
        outputs.append(
            {
                f"{lang}/{part}": (tmp_path / f"ws{attempt}" / "split" / lang / f"{part}.tsv").read_bytes()
                for lang in ("es", "ca")
                for part in ("train", "dev", "test")
            }
        )
    elapsed = time.monotonic() - started
    identical = outputs[0] == outputs[1]
    scored = (tmp_path / "ws1" / "score" / "report.json").exists()
    balanced = (tmp_path / "ws1" / "assemble" / "balanced_es.tsv").exists()
    ok = identical and scored and balanced and elapsed < 300
    report("e2e-determinism", ok, f"two runs in {elapsed:.1f}s, byte-identical {identical}")
    assert identical
    assert scored and balanced
    assert elapsed < 300
