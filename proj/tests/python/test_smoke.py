import json
import os
import subprocess

import numpy as np
import pytest

import decgan


def test_synthetic_dataset_shapes_and_invariants():
    d = decgan.generate_synthetic(n_nodes=12, n_features=10, samples_per_class=4,
                                  circuits=[[0, 1, 2], [3, 4, 5]], seed=3)
    assert len(d["adjacency"]) == 8
    assert sorted(set(d["labels"])) == [0, 1]
    a = d["adjacency"][0]
    assert a.shape == (12, 12)
    assert np.array_equal(a, a.T)
    assert np.all(np.diag(a) == 0.0)
    assert np.all(a >= 0.0)
    assert d["features"][0].shape == (12, 10)
    assert d["truth"][1] == [[0, 1, 2], [3, 4, 5]]
    again = decgan.generate_synthetic(n_nodes=12, n_features=10, samples_per_class=4,
                                      circuits=[[0, 1, 2], [3, 4, 5]], seed=3)
    assert np.array_equal(again["adjacency"][5], d["adjacency"][5])


def test_overlapping_circuits_raise():
    with pytest.raises(decgan.ValidationError):
        decgan.generate_synthetic(n_nodes=8, circuits=[[0, 1, 2], [2, 3]])


def test_decouple_partitions_nodes():
    d = decgan.generate_synthetic(n_nodes=12, n_features=10, samples_per_class=2,
                                  circuits=[[0, 1, 2], [3, 4, 5]], seed=1)
    out = decgan.decouple(d["features"][0], d["adjacency"][0], t=2, k=3, seed=4)
    nodes = [v for c in out["circuits"] for v in c] + list(out["supplement"])
    assert sorted(nodes) == list(range(12))
    assert all(len(c) <= 3 for c in out["circuits"])
    a = d["adjacency"][0]
    total = sum(out["sparse_adjacencies"]) + out["residual_adjacency"]
    assert np.allclose(total, a, rtol=0.0, atol=1e-15)
    for c in out["circuits"]:
        assert np.all(out["residual_adjacency"][np.ix_(c, c)] == 0.0)


def test_hypergraph_spectra():
    edges = [[0, 1, 4, 5], [0, 1, 2], [2, 3], [3, 4]]
    lap = decgan.laplacian(edges, 6)
    ev = np.linalg.eigvalsh(lap)
    assert ev.min() > -1e-9 and ev.max() < 1 + 1e-9
    assert decgan.spectral_similarity(edges, edges, 6) == 0.0
    assert decgan.spatial_similarity([[1, 2, 3]], [[2, 3, 4]]) == pytest.approx(0.5)
    with pytest.raises(decgan.DimensionError):
        decgan.spatial_similarity([[1]], [[1], [2]])


def test_metrics():
    m = decgan.binary_metrics([1, 1, 1, 1, 0, 0, 0, 0, 0, 0], [1, 1, 1, 0, 1, 1, 0, 0, 0, 0])
    assert m["acc"] == pytest.approx(0.7)
    assert m["sen"] == pytest.approx(0.6)
    assert m["spe"] == pytest.approx(0.8)
    assert decgan.auc([0.1, 0.9], [False, True]) == 1.0
    assert decgan.circuit_recovery([[0, 1, 2]], [[0, 1, 2]]) == 1.0


def test_cross_validate_small_run():
    config = json.dumps({"t": 2, "k": 3, "epochs": 1, "folds": 2, "batch_size": 4,
                         "hidden": 6, "selector_dim": 4, "latent_dim": 4,
                         "generator_hidden": 8})
    report = decgan.cross_validate(config, n_nodes=10, n_features=8, samples_per_class=6,
                                   circuits=[[0, 1, 2], [3, 4, 5]], data_seed=2)
    assert len(report["folds"]) == 2
    assert 0.0 <= report["mean"]["acc"] <= 1.0
    assert report == decgan.cross_validate(config, n_nodes=10, n_features=8,
                                           samples_per_class=6,
                                           circuits=[[0, 1, 2], [3, 4, 5]], data_seed=2)


def test_cli_in_process_and_binary(tmp_path):
    out = tmp_path / "data"
    assert decgan.run_cli(["gen-data", "--nodes", "10", "--features", "6", "--samples", "4",
                           "--circuits", "2x3", "--out", str(out)]) == 0
    assert (out / "ground_truth.json").exists()
    assert decgan.run_cli(["gen-data", "--out", str(out)]) == 2
    exe = os.environ.get("DECGAN_CLI")
    if exe:
        res = subprocess.run([exe, "--help"], capture_output=True, text=True)
        assert res.returncode == 0
        assert "gen-data" in res.stdout
