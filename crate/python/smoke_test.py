#!/usr/bin/env python3
"""Smoke test for the _embedrank extension module.

Build the cdylib first, then run this script from anywhere:

    cargo build -p embedrank-python --release
    python3 python/smoke_test.py

The script stages the compiled library into a temp directory under the
importable name _embedrank.so, then drives a miniature end-to-end pass:
text utilities, similarity features, retrieval metrics, a BM25 index, CNN
training on a synthetic corpus, and DRMM training on sampled triplets.
"""

import atexit
import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / "release" / "lib_embedrank.so",
        REPO / "target" / "debug" / "lib_embedrank.so",
    ]
    src = next((p for p in candidates if p.exists()), None)
    if src is None:
        sys.exit("build the extension first: cargo build -p embedrank-python --release")
    stage = Path(tempfile.mkdtemp(prefix="embedrank-py."))
    atexit.register(shutil.rmtree, stage, ignore_errors=True)
    shutil.copy2(src, stage / "_embedrank.so")
    sys.path.insert(0, str(stage))
    import _embedrank

    return _embedrank


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def raises(exc, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except exc:
        return True
    return False


def check_text(er):
    assert er.tokenize("Hello, World! x2") == ["hello", "world", "x2"]
    assert er.tokenize("") == []
    assert er.split_paragraphs("first para\n\nsecond\npara\n\n\nthird") == [
        "first para",
        "second\npara",
        "third",
    ]


def check_features(er):
    assert close(er.cosine_sim([1.0, 0.0], [1.0, 0.0]), 1.0)
    assert close(er.cosine_sim([1.0, 0.0], [0.0, 1.0]), 0.0)
    assert er.cosine_sim([0.0, 0.0], [1.0, 0.0]) is None
    assert raises(ValueError, er.cosine_sim, [1.0], [1.0, 2.0])

    w = er.gating_weights([1.0, 2.0, 3.0], 0.7)
    assert close(sum(w), 1.0)
    shifted = er.gating_weights([11.0, 12.0, 13.0], 0.7)
    assert all(close(a, b) for a, b in zip(w, shifted))
    assert er.gating_weights([5.0, -1.0], 0.0) == [0.5, 0.5]

    assert er.hinge_loss(1.0, 0.5, 0.1) == 0.0
    assert close(er.hinge_loss(0.5, 1.0, 0.1), 0.6)

    # Term mode keeps the last bin for exact matches; bins=4 leaves three
    # cosine bins over [-1, 1) with 1.0 absorbed by the last of them.
    assert er.bin_index(-1.0, bins=4, mode="term") == 0
    assert er.bin_index(0.0, bins=4, mode="term") == 1
    assert er.bin_index(1.0, bins=4, mode="term") == 2
    assert er.bin_index(-1.0, bins=4, mode="paragraph") == 0
    assert er.bin_index(1.0, bins=4, mode="paragraph") == 3
    assert raises(ValueError, er.bin_index, 1.5)
    assert raises(ValueError, er.bin_index, 0.0, 1)
    assert raises(ValueError, er.bin_index, 0.0, 4, "word")

    hist = er.interaction_histogram(
        [1.0, 0.0],
        [([1.0, 0.0], 2, False), ([0.0, 1.0], 1, False), ([1.0, 0.0], 1, True)],
        bins=4,
        mode="term",
    )
    assert all(close(a, b) for a, b in zip(hist, [0.0, math.log(2), math.log(3), math.log(2)]))
    assert raises(ValueError, er.interaction_histogram, [1.0, 0.0], [([1.0], 1, False)])


def check_metrics(er):
    qrels = {"a": 2, "b": 0, "c": 1}
    assert close(er.average_precision(["a", "b", "c"], qrels), (1.0 + 2.0 / 3.0) / 2.0)
    assert close(er.precision_at_k(["a", "b", "c"], qrels, 2), 0.5)
    # DCG gains 2^g - 1 with log2(rank + 1) discounts; ideal order is [a, c].
    dcg = 3.0 + 0.0 + 1.0 / 2.0
    ideal = 3.0 + 1.0 / math.log2(3.0)
    assert close(er.ndcg_at_k(["a", "b", "c"], qrels, 3), dcg / ideal)
    assert raises(ValueError, er.average_precision, ["a"], {})
    assert raises(ValueError, er.precision_at_k, ["a"], qrels, 0)

    runs = {"q1": ["a", "b"], "q2": ["x", "y"]}
    batch = {"q1": {"a": 1, "b": 0}, "q2": {"x": 0, "y": 1}}
    assert close(er.mean_average_precision(runs, batch), 0.75)
    assert close(er.mean_precision_at_k(runs, batch, 1), 0.5)

    m = er.multilabel_metrics([[True, False]], [[True, True]])
    assert close(m["precision"], 0.5) and close(m["recall"], 1.0)
    assert close(m["f1"], 2.0 / 3.0) and close(m["accuracy"], 0.5)
    swapped = er.multilabel_metrics([[True, False]], [[True, True]], conventional=True)
    assert close(swapped["precision"], 1.0) and close(swapped["recall"], 0.5)
    assert raises(ValueError, er.multilabel_metrics, [[True]], [[True, False]])


def check_index(er, tmp):
    docs = [
        ("d1", ["cat", "cat", "dog"]),
        ("d2", ["dog", "bird"]),
        ("d3", ["fish"]),
    ]
    index = er.Index.build(docs)
    assert index.doc_count == 3
    assert close(index.avg_doc_len, 2.0)
    assert index.df("dog") == 2 and index.df("cat") == 1 and index.df("nope") == 0
    assert index.bm25("cat".split(), "d1") > 0.0
    assert index.bm25("cat".split(), "d2") == 0.0
    assert index.pool(["cat"], 2)[0] == "d1"
    scores = index.bm25_all(["dog"])
    by_id = dict(zip(index.doc_ids(), scores))
    assert by_id["d2"] > by_id["d1"] > 0.0 and by_id["d3"] == 0.0

    path = tmp / "index.json"
    index.save(path)
    back = er.Index.load(path)
    assert back.doc_ids() == index.doc_ids()
    assert close(back.gating_idf("dog"), index.gating_idf("dog"))
    assert close(back.bm25_idf("cat"), index.bm25_idf("cat"))
    assert raises(FileNotFoundError, er.Index.load, tmp / "absent.json")


def check_vectors(er, tmp):
    wv = er.WordVectors.from_entries(2, [("a", [1.0, 2.0]), ("b", [3.0, 4.0])])
    assert wv.dim == 2 and len(wv) == 2
    assert "a" in wv and "z" not in wv
    assert wv.get("a") == [1.0, 2.0]
    assert raises(KeyError, wv.get, "z")
    assert raises(ValueError, er.WordVectors.from_entries, 2, [("a", [1.0])])

    path = tmp / "vecs.txt"
    path.write_text("cat 0.5 -0.25\ndog 1 0\n")
    loaded = er.WordVectors.load(path)
    assert loaded.dim == 2 and loaded.get("cat") == [0.5, -0.25]


def check_triplets(er):
    qrels = {"q1": {"a": 2, "b": 0, "c": 1}}
    triplets = er.sample_triplets(qrels, per_query=4, seed=3)
    assert len(triplets) == 4
    for qid, rel, nonrel in triplets:
        assert qid == "q1" and rel in {"a", "c"} and nonrel == "b"
    widened = er.sample_triplets(qrels, per_query=8, seed=3, corpus_doc_ids=["a", "b", "c", "d"])
    assert any(nonrel == "d" for _, _, nonrel in widened)
    assert er.sample_triplets(qrels, per_query=4, seed=3) == triplets


def check_cnn(er, tmp):
    train, test, label_names, vectors = er.synthetic_classification_dataset(11, 80, 20, 4)
    config = json.dumps(
        {
            "sequence_length": 40,
            "stages": [{"filters": 8, "width": 3, "pool": 2}],
            "embedding_dim": 12,
            "label_count": 4,
            "dropout": 0.0,
            "epochs": 4,
            "learning_rate": 0.05,
        }
    )
    model, losses = er.TextCnn.train(config, train, vectors, seed=11)
    assert len(losses) == 4 and losses[-1] < losses[0]
    assert sorted(model.labels()) == sorted(label_names)
    assert model.embedding_dim == 12

    tokens = er.tokenize(test[0][1])
    probs = model.probabilities(tokens, vectors)
    assert len(probs) == 4 and all(0.0 <= p <= 1.0 for p in probs)
    assert set(model.predict_labels(tokens, vectors)) <= set(label_names)
    emb = model.embed(tokens, vectors)
    assert len(emb) == 12
    para = model.embed_paragraph_mean(test[0][1], vectors)
    assert len(para) == 12

    path = tmp / "cnn.bin"
    model.save(path)
    back = er.TextCnn.load(path)
    assert back.probabilities(tokens, vectors) == probs
    assert raises(ValueError, er.TextCnn.train, "{not json", train, vectors, 11)


def term_units(tokens, index, vectors, query_side):
    counts, order = {}, []
    for t in tokens:
        if t not in counts:
            order.append(t)
            counts[t] = 0
        counts[t] += 1
    zero = [0.0] * vectors.dim
    return [
        (t, vectors.get(t) if t in vectors else zero, index.gating_idf(t), 1 if query_side else counts[t])
        for t in order
    ]


def check_drmm(er, tmp):
    docs, queries, qrels, vectors = er.synthetic_retrieval_dataset(7, 40, 4, 3)
    index = er.Index.build([(doc_id, er.tokenize(text)) for doc_id, text, _ in docs])
    q_units = {qid: term_units(er.tokenize(text), index, vectors, True) for qid, text in queries}
    d_units = {
        doc_id: term_units(er.tokenize(text), index, vectors, False) for doc_id, text, _ in docs
    }
    triplets = er.sample_triplets(qrels, per_query=8, seed=7)

    config = json.dumps({"bins": 8, "hidden": [4], "epochs": 3, "learning_rate": 0.05})
    model, losses = er.Drmm.train(config, triplets, q_units, d_units, seed=7)
    assert len(losses) == 3
    assert json.loads(model.config_json())["bins"] == 8
    assert math.isfinite(model.idf_scale)

    def ranking(qid):
        scored = [(doc_id, model.score(q_units[qid], units)) for doc_id, units in d_units.items()]
        scored.sort(key=lambda t: (-t[1], t[0]))
        return [doc_id for doc_id, _ in scored]

    runs = {qid: ranking(qid) for qid in q_units}
    assert er.mean_average_precision(runs, qrels) >= 0.7

    path = tmp / "drmm.bin"
    model.save(path)
    back = er.Drmm.load(path)
    qid = next(iter(q_units))
    doc_id = next(iter(d_units))
    assert back.score(q_units[qid], d_units[doc_id]) == model.score(q_units[qid], d_units[doc_id])


def check_gradients(er):
    rows = er.gradient_check(seeds=3)
    assert rows and all(passed for _, _, _, passed in rows)
    assert all(err < er.GRADCHECK_TOL for _, _, err, _ in rows)


def main():
    er = load_module()
    assert er.__version__
    checks = [
        check_text,
        check_features,
        check_metrics,
        check_index,
        check_vectors,
        check_triplets,
        check_cnn,
        check_drmm,
        check_gradients,
    ]
    with tempfile.TemporaryDirectory(prefix="embedrank-artifacts.") as tmp_str:
        tmp = Path(tmp_str)
        for check in checks:
            if check in (check_index, check_vectors, check_cnn, check_drmm):
                check(er, tmp)
            else:
                check(er)
            print(f"{check.__name__}: ok")
    print(f"smoke test passed ({len(checks)} sections)")


if __name__ == "__main__":
    main()
