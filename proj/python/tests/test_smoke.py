import json
import os
import struct

import numpy as np
import pytest

import ssdaae


def test_variants_and_keys():
    assert ssdaae.variants() == ["cnn", "cnn+noise", "saae", "sdaae", "ssaae", "ssdaae"]
    assert "train.sigma" in ssdaae.config_keys()


def test_synth_is_seeded():
    a = ssdaae.synth_generate(4, seed=5)
    b = ssdaae.synth_generate(4, seed=5)
    assert a["images"].shape == (8, 3, 64, 64)
    assert a["images"].dtype == np.float32
    assert np.array_equal(a["images"], b["images"])
    assert a["labels"] == [0, 1] * 4
    assert 0.0 <= a["images"].min() and a["images"].max() <= 1.0


def test_metrics_match_a_hand_example():
    scores = [0.9, 0.8, 0.7, 0.6]
    labels = [1, 1, 0, 0]
    assert ssdaae.specificity_at_sensitivity(scores, labels, 0.95) == (0.8, 1.0, 1.0)
    assert ssdaae.roc_auc(scores, labels) == 1.0
    assert ssdaae.roc_auc([0.5, 0.5], [1, 0]) == 0.5
    report = ssdaae.metrics_report(scores, labels)
    assert [r["target"] for r in report["rows"]] == ssdaae.SENSITIVITY_TARGETS


def test_auc_agrees_with_pairwise_count():
    rng = np.random.default_rng(3)
    scores = np.round(rng.random(60), 1)
    labels = (rng.random(60) < 0.4).astype(int)
    labels[:2] = [1, 0]
    pos, neg = scores[labels == 1], scores[labels == 0]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    assert ssdaae.roc_auc(scores.tolist(), labels.tolist()) == pytest.approx(wins / (len(pos) * len(neg)), abs=1e-12)


def test_contract_errors_surface_as_python_exceptions():
    with pytest.raises(ssdaae.ContractError):
        ssdaae.roc_auc([0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        ssdaae.resolve_config(no_such__key=1)


def test_tensor_file_layout(tmp_path):
    images = np.random.default_rng(0).random((2, 3, 64, 64), dtype=np.float32)
    path = tmp_path / "x.f32"
    ssdaae.write_tensor_file(path, images)
    raw = path.read_bytes()
    assert struct.unpack("<4I", raw[:16]) == (2, 3, 64, 64)
    assert np.array_equal(np.frombuffer(raw[16:], dtype="<f4").reshape(2, 3, 64, 64), images)
    assert np.array_equal(ssdaae.read_tensor_file(path), images)


def test_patch_removal_crops_skin():
    image = np.empty((3, 200, 200), dtype=np.float32)
    image[0], image[1], image[2] = 0.80, 0.55, 0.45
    image[:, :40, :40] = [[[0.1]], [[0.2]], [[0.9]]]
    crop, rect, reason = ssdaae.remove_identifier_patch(image)
    assert reason == ""
    assert crop.shape == (3, 64, 64)
    top, left, height, width = rect
    assert height >= 16 and width >= 16
    blue = np.full((3, 100, 100), 0.5, dtype=np.float32)
    blue[2] = 1.0
    crop, _, reason = ssdaae.remove_identifier_patch(blue)
    assert crop is None and reason


def test_train_predict_generate(tmp_path):
    out = ssdaae.train(
        variant="ssdaae",
        seed=2,
        arch__preset="desk",
        train__epochs=1,
        train__batch_size=8,
        data__synth__n_per_class=10,
        data__synth__seed=4,
        split__n_unlabelled=4,
        split__n_labelled_train=8,
        split__n_val=4,
        split__n_test=4,
        out=str(tmp_path),
    )
    run_dir = out["run_dir"]
    assert os.path.isdir(os.path.join(run_dir, "best"))
    assert len(out["step_log_sha256"]) == 64
    assert len(out["test"]["rows"]) == 4

    config = json.loads(open(os.path.join(run_dir, "config.json")).read())
    assert config["train.epochs"] == 1

    model = ssdaae.Model.load(os.path.join(run_dir, "best"))
    assert model.variant == "ssdaae"
    images = ssdaae.synth_generate(2, seed=9)["images"]
    p = model.predict(images)
    assert len(p) == 4 and all(0.0 <= v <= 1.0 for v in p)
    assert model.predict(images) == p
    g0 = model.generate(3, label="0", seed=1)
    assert g0.shape == (3, 3, 64, 64)
    assert np.array_equal(g0, model.generate(3, label="0", seed=1))
