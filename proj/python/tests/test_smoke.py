import json
import math

import numpy as np
import pytest

import gaitgraph as gg


def test_topology_and_adjacency():
    topo = gg.coco17_topology()
    assert len(topo["joints"]) == 17
    a = gg.coco17_adjacency()
    assert a.shape == (17, 17)
    assert np.array_equal(a, a.T)
    two = gg.normalize_adjacency(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(two, 0.5)
    ops, masks = gg.partition(3)
    assert len(ops) == 3
    assert np.array_equal(sum(masks), a + np.eye(17))
    with pytest.raises(gg.TopologyError):
        gg.normalize_adjacency(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_shape_trace_rows():
    rows = gg.shape_trace(60)
    assert len(rows) == 10
    assert rows[0] == ("Block 0", "BatchNorm", (60, 17, 3))
    assert rows[-1][2] == (1, 128)
    assert [r[2][0] for r in gg.shape_trace(20)[1:8]] == [20, 20, 20, 10, 10, 5, 5]


def test_supcon_loss():
    rng = np.random.default_rng(0)
    f = rng.normal(size=(4, 8))
    f /= np.linalg.norm(f, axis=1, keepdims=True)
    loss, grad = gg.supcon_loss(f, [0, 0, 1, 1], 0.1)
    assert loss > 0
    assert grad.shape == (4, 8)
    zero, _ = gg.supcon_loss(f[:2], [3, 3], 0.1)
    assert zero == 0.0
    with pytest.raises(gg.ContractError):
        gg.supcon_loss(2 * f, [0, 0, 1, 1], 0.1)


def test_augmentation_round_trips():
    seq = gg.synthesize_sequence(3, "bg", 2, 54)
    assert seq.shape[1:] == (17, 3)
    assert np.array_equal(gg.reverse_time(gg.reverse_time(seq)), seq)
    assert np.allclose(gg.mirror_pose(gg.mirror_pose(seq)), seq, atol=1e-9)
    norm = gg.normalize_coords(seq)
    moved = seq.copy()
    moved[:, :, :2] = 3.0 * moved[:, :, :2] + np.array([100.0, -40.0])
    assert np.allclose(gg.normalize_coords(moved), norm, atol=1e-9)
    window = gg.sample_window(seq, 60, center=True)
    assert window.shape == (60, 17, 3)


def test_model_embed_and_weights(tmp_path):
    model = gg.Model(channel_divisor=8, seed=1)
    seq = gg.synthesize_sequence(1, view=90)
    e = model.embed(seq, window=40)
    assert e.shape == (128,)
    assert math.isclose(float(np.linalg.norm(e)), 1.0, abs_tol=1e-5)
    out = model.forward(np.zeros((2, 20, 17, 3), dtype=np.float32) + 0.1)
    assert out.shape == (2, 128)

    path = str(tmp_path / "w.ggw")
    model.save(path)
    loaded = gg.Model.load(path)
    assert loaded.spec_hash == model.spec_hash
    assert np.array_equal(loaded.embed(seq, window=40), e)
    a, b = model.state_dict(), loaded.state_dict()
    assert a.keys() == b.keys()
    assert all(np.array_equal(a[k], b[k]) for k in a)

    bad = tmp_path / "bad.ggw"
    bad.write_bytes(b"XXXX" + open(path, "rb").read()[4:])
    with pytest.raises(gg.FormatError):
        gg.Model.load(str(bad))


def test_csv_and_index(tmp_path):
    seq = gg.synthesize_sequence(2, "cl", 1, 180)
    path = tmp_path / "002-cl-01-180.csv"
    gg.write_pose_csv(str(path), seq)
    assert np.array_equal(gg.read_pose_csv(str(path)), seq)
    index = gg.index_corpus(str(tmp_path))
    assert index["subjects"] == [2]
    assert len(index["records"]) == 1
    assert index["warnings"]


def test_rank1():
    g = np.eye(3, dtype=np.float32)[[0, 1, 0, 1]]
    table = gg.rank1_cross_view(g, [1, 2, 1, 2], [0, 0, 90, 90], g, [1, 2, 1, 2], [0, 0, 90, 90])
    assert table["mean"] == 100.0


def test_config_and_short_training(tmp_path):
    cfg = gg.default_config()
    assert cfg["train.temperature"] == 0.01
    corpus = tmp_path / "corpus"
    assert gg.synthesize_corpus(str(corpus), subjects=3) == 330
    summary = gg.train(
        {
            "corpus": str(corpus),
            "out": str(tmp_path / "run"),
            "model.channel_divisor": 8,
            "train.cycles": "1:0.01",
            "train.subjects_per_batch": 1,
            "train.sequences_per_subject": 2,
            "train.temperature": 0.1,
            "augment.window": 16,
        },
        stop_after_epochs=None,
    )
    assert summary["finished"]
    assert summary["epochs_completed"] == 1
    assert all(math.isfinite(h["loss"]) for h in summary["history"])
    model = gg.Model.load(summary["weights"])
    result = model.evaluate(str(corpus), window=16)
    assert [t["condition"] for t in result["tables"]] == ["NM", "BG", "CL"]
    saved = json.loads((tmp_path / "run" / "config.json").read_text())
    assert saved["model.channel_divisor"] == 8
