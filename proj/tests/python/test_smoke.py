import json
import random

import pytest

import rsclf

DEPRESSIVE = "dukai tharaha hithana prashnaya therum nidaganna bayai paluwai kandulu".split()
CALM = "ada jim yoga kala gedara giya kama kanna sellam".split()


def corpus(n=80, seed=1):
    rng = random.Random(seed)
    texts, labels = [], []
    for i in range(n):
        pool = DEPRESSIVE if i % 2 else CALM
        texts.append(" ".join(rng.choice(pool) for _ in range(rng.randint(3, 8))))
        labels.append(i % 2)
    return texts, labels


SMALL = json.dumps({"models": {"nn": {"hidden": 16, "epochs": 5, "batch_size": 8}, "forest": {"n_trees": 9}}})


def test_preprocessing():
    assert rsclf.clean("Mata oyata!! #sad http://t.co/x") == "mata oyata"
    assert rsclf.preprocess("") == []


def test_fit_predict_and_round_trip(tmp_path):
    texts, labels = corpus()
    for model in rsclf.MODELS:
        pipe = rsclf.Pipeline.fit(texts, labels, model=model, config=SMALL)
        assert pipe.model == model
        path = tmp_path / f"{model}.json"
        pipe.save(str(path))
        again = rsclf.Pipeline.load(str(path))
        assert again.predict_many(texts) == pipe.predict_many(texts)
        report = pipe.evaluate(texts, labels)
        assert 0.0 <= report["accuracy"] <= 1.0


def test_prediction_shape():
    texts, labels = corpus()
    pipe = rsclf.Pipeline.fit(texts, labels, model="mnb")
    p = pipe.predict("dukai tharaha")
    assert p["label"] == 1
    assert p["label_name"] == "depressive"
    assert rsclf.Pipeline.from_json(pipe.to_json()).predict("qqq")["oov"]


def test_benchmark_json():
    texts, labels = corpus(120)
    result = rsclf.benchmark(texts, labels, ["mnb", "tree"], SMALL)
    assert len(result["reports"]) == 2
    accs = [r["accuracy"] for r in result["reports"]]
    assert accs == sorted(accs, reverse=True)


def test_errors_map_to_python_exceptions():
    texts, labels = corpus()
    with pytest.raises(rsclf.UsageError):
        rsclf.Pipeline.fit(texts, labels, config='{"bogus": 1}')
    with pytest.raises(rsclf.UsageError):
        rsclf.Pipeline.fit(texts, labels, model="perceptron")
    with pytest.raises(rsclf.DataError):
        rsclf.Pipeline.fit(texts, [1] * len(texts), model="mnb")
    with pytest.raises(rsclf.DataError):
        rsclf.Pipeline.from_json('{"format_version": 1')
    assert json.loads(rsclf.default_config())["seed"] == 42
