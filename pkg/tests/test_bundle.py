import pytest
import struct

import numpy as np

from glyphread.bundle import FORMAT_VERSION, MAGIC, ModelBundle, dumps, load_bundle, loads, save_bundle
from glyphread.errors import BundleFormatError
from glyphread.inference.beamsearch import DecodeConfig, beam_decode
from glyphread.inference.ngram import fit
from glyphread.training.trainer import TrainConfig, train
from test_utils import random_image, small_samples, toy_model, toy_model_config


def test_round_trip_decodes_identically(tmp_path):
    model = toy_model(seed=7)
    path = tmp_path / "model.gbm"
    save_bundle(path, ModelBundle(model))
    restored = load_bundle(path).model

    assert restored.config == model.config
    assert all(np.array_equal(restored.params[name], model.params[name]) for name in model.params)
    config = DecodeConfig(beam_width=4, max_length=8)
    for seed in range(5):
        image = random_image(seed)
        before = beam_decode(model, image, config)
        after = beam_decode(restored, image, config)
        assert [(r.word, r.score) for r in before] == [(r.word, r.score) for r in after]


def test_dump_is_deterministic():
    assert dumps(ModelBundle(toy_model(seed=1))) == dumps(ModelBundle(toy_model(seed=1)))
    assert dumps(ModelBundle(toy_model(seed=1))) != dumps(ModelBundle(toy_model(seed=2)))


def test_language_model_and_lexicon_survive():
    lm = fit(["cat", "car"], k_max=3, delta=0.2)
    bundle = loads(dumps(ModelBundle(toy_model(), lm, ["car", "cat"])))
    assert bundle.lm.counts == lm.counts
    assert (bundle.lm.k_max, bundle.lm.delta) == (3, 0.2)
    assert bundle.lexicon == ["car", "cat"]


def test_optional_sections_absent():
    bundle = loads(dumps(ModelBundle(toy_model())))
    assert bundle.lm is None and bundle.lexicon is None


def test_same_seed_training_gives_identical_bundles():
    samples = small_samples(["ab", "ba"], per_word=2)
    config = TrainConfig(epochs=1, batch_size=2, seed=9)
    first, _ = train(toy_model_config(), config, samples)
    second, _ = train(toy_model_config(), config, samples)
    assert dumps(ModelBundle(first)) == dumps(ModelBundle(second))


def corrupt_magic(data):
    return b"NOTAMODL" + data[len(MAGIC):]


def corrupt_version(data):
    return MAGIC + struct.pack("<I", FORMAT_VERSION + 1) + data[len(MAGIC) + 4:]


@pytest.mark.parametrize("corrupt,message", [
    (corrupt_magic, "not a model bundle"),
    (corrupt_version, "version"),
    (lambda data: data[:-3], "truncated"),
    (lambda data: data[:4], "truncated"),
    (lambda data: data + b"\0\0", "trailing"),
])
def test_malformed_bundles(corrupt, message):
    data = dumps(ModelBundle(toy_model()))
    with pytest.raises(BundleFormatError, match=message):
        loads(corrupt(data))


def test_missing_parameter_is_rejected():
    model = toy_model()
    model.params.pop(next(iter(model.params)))
    with pytest.raises(BundleFormatError, match="missing parameters"):
        loads(dumps(ModelBundle(model)))
