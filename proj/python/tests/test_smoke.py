# Copyright 2026 The orcafd Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import numpy as np
import pytest

import orcafd


def test_tensor_roundtrip(tmp_path):
    rng = np.random.default_rng(0)
    a = rng.standard_normal((7, 5)).astype(np.float32)
    path = tmp_path / "m.orcaemb"
    orcafd.write_matrix(path, a)
    back, normalized = orcafd.read_matrix(path)
    assert back.dtype == np.float32
    assert not normalized
    assert back.tobytes() == a.tobytes()


def test_missing_tensor_is_input_error(tmp_path):
    with pytest.raises(orcafd.InputError):
        orcafd.read_matrix(tmp_path / "absent.orcaemb")


def test_similarity_and_softmax():
    s = orcafd.similarity_logits(np.array([1, 0], np.float32),
                                 np.array([[1, 0], [0, 1]], np.float32))
    assert list(s) == [100.0, 0.0]
    p = orcafd.softmax([10.0, 0.0], 1000.0)
    assert abs(p[0] - 0.5025) < 1e-5
    with pytest.raises(orcafd.InputError):
        orcafd.softmax([1.0, 2.0], 0.0)
    assert np.allclose(orcafd.l2_normalize([3.0, 4.0]), [0.6, 0.8])


def test_csfs():
    assert orcafd.csf_msp([0.2, 0.5, 0.3]) == 0.5
    assert abs(orcafd.csf_doctor([0.5, 0.3, 0.2]) - 0.38) < 1e-15
    assert orcafd.csf_odin([0.0, 0.0]) == 0.5


def test_ranking_and_orca():
    top = orcafd.top_k_concepts([9.0, 7.0, 8.0, 1.0], 2, 2)
    assert [t[0] for t in top] == [0, 2]
    assert [t[1] for t in top] == [0, 1]
    w = orcafd.rank_weights(3)
    assert np.allclose(w, [0.43621, 0.34569, 0.21810], atol=1e-5)
    # Ranked categories [A, B, A].
    logits = [9.0, 7.0, 0.0, 8.0, 1.0, 0.5]
    pred, conf = orcafd.orca_r(logits, 3)
    assert pred == 0
    assert abs(conf - 0.65431) < 1e-5
    b_pred, b_conf = orcafd.orca_b(logits, 3)
    u_pred, u_conf = orcafd.orca_r(logits, 3, scheme="uniform")
    assert (b_pred, b_conf) == (u_pred, u_conf)


def test_metrics_and_gate():
    conf = np.array([0.9, 0.8, 0.2, 0.1])
    correct = np.array([True, True, False, False])
    assert orcafd.auroc(conf, correct) == 1.0
    assert orcafd.fpr_at_tpr(conf, correct) == 0.0
    with pytest.raises(orcafd.InputError):
        orcafd.auroc(conf, np.ones(4, bool))
    assert orcafd.gate(0.5, 0.5) == "accept"
    assert orcafd.gate(0.3, 0.5) == "detect"


def test_synthetic_evaluation(tmp_path):
    bundle, planted = orcafd.make_synthetic_bundle(samples=200, train_samples=50,
                                                   seed=3)
    assert bundle.num_samples == 200
    assert sum(planted) == 60
    results = orcafd.evaluate(bundle)
    assert len(results) == 11
    assert results["orca-r"]["auroc"] >= 0.95
    assert results["zero-shot+msp"]["auroc"] <= 0.6
    assert results["orca-r"]["confidences"].shape == (200,)

    manifest = orcafd.write_bundle(bundle, tmp_path / "bundle")
    loaded = orcafd.load_manifest(manifest)
    again = orcafd.evaluate(loaded, methods=["orca-r"])
    assert again["orca-r"]["confidences"].tobytes() == \
        results["orca-r"]["confidences"].tobytes()


def test_undefined_metric_is_nan(tmp_path):
    eye = np.eye(2, dtype=np.float32)
    orcafd.write_matrix(tmp_path / "img.orcaemb", eye)
    orcafd.write_matrix(tmp_path / "txt.orcaemb", eye)
    (tmp_path / "labels.json").write_text("[0, 1]")
    (tmp_path / "catalog.json").write_text(
        json.dumps([{"name": "a", "concepts": ["a0"]},
                    {"name": "b", "concepts": ["b0"]}]))
    (tmp_path / "manifest.json").write_text(json.dumps({
        "images": "img.orcaemb", "labels": "labels.json",
        "catalog": "catalog.json", "category_text": "txt.orcaemb",
        "concept_text": "txt.orcaemb", "categories": ["a", "b"]}))
    bundle = orcafd.load_manifest(tmp_path / "manifest.json")
    res = orcafd.evaluate(bundle, methods=["orca-b"])
    assert math.isnan(res["orca-b"]["auroc"])
    assert res["orca-b"]["acc"] == 1.0
