import json

import numpy as np
import pytest

from rotblur.cli import main
from rotblur.corpus import disk_image, textured_shape, write_corpus
from rotblur.image import read_pgm, write_pgm


@pytest.fixture()
def shape_pgm(tmp_path):
    path = tmp_path / "shape.pgm"
    write_pgm(path, textured_shape(97, 5))
    return path


def run(argv, capsys=None):
    code = main([str(a) for a in argv])
    if capsys is None:
        return code
    return code, capsys.readouterr().out


# --- blur ---------------------------------------------------------------------

def test_blur_disk_is_fixed_point(tmp_path, capsys):
    src = tmp_path / "disk.pgm"
    dst = tmp_path / "out.pgm"
    write_pgm(src, disk_image(97, 30.0))
    code, out = run(["blur", src, dst, "--ucm", "0.157,1", "--steps", "40"], capsys)
    assert code == 0
    assert np.abs(read_pgm(dst) - read_pgm(src)).mean() < 2.0
    assert out.count("blur_constant(delta=") == 4


def test_blur_accepts_pi_literals(shape_pgm, tmp_path):
    dst = tmp_path / "b.pgm"
    assert run(["blur", shape_pgm, dst, "--ucm", "pi/20,1", "--steps", "30"]) == 0
    assert dst.exists()


def test_blur_flag_validation(shape_pgm, tmp_path, capsys):
    dst = tmp_path / "b.pgm"
    code = run(["blur", shape_pgm, dst])
    assert code == 2
    code = run(["blur", shape_pgm, dst, "--ucm", "1,1", "--rcm", "1,1,1"])
    assert code == 2
    capsys.readouterr()


def test_blur_missing_input(tmp_path):
    assert run(["blur", tmp_path / "nope.pgm", tmp_path / "o.pgm", "--ucm", "1,1"]) == 1


# --- transform / noise -----------------------------------------------------------

def test_transform_deterministic(shape_pgm, tmp_path):
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    assert run(["transform", shape_pgm, a, "--phi", "pi/6", "--scale", "1.2"]) == 0
    assert run(["transform", shape_pgm, b, "--phi", "pi/6", "--scale", "1.2"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_noise_seeded(shape_pgm, tmp_path):
    a, b, c = (tmp_path / n for n in ("a.pgm", "b.pgm", "c.pgm"))
    assert run(["noise", shape_pgm, a, "--snr", "10", "--seed", "3"]) == 0
    assert run(["noise", shape_pgm, b, "--snr", "10", "--seed", "3"]) == 0
    assert run(["noise", shape_pgm, c, "--snr", "10", "--seed", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


# --- moments / features -----------------------------------------------------------

def test_moments_csv(shape_pgm, capsys):
    code, out = run(["moments", shape_pgm, "--max-order", "2"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p,q,m_pq,re_c_pq,im_c_pq"
    assert len(lines) == 1 + 6  # (p,q) pairs with p+q <= 2
    for line in lines[1:]:
        p, q, m_pq, re_c, im_c = line.split(",")
        # Shortest round-trip float formatting.
        assert repr(float(m_pq)) == m_pq


def test_features_rmbmi6_normalized_15_columns(shape_pgm, capsys):
    code, out = run(["features", shape_pgm, "--set", "rmbmi6", "--normalized"], capsys)
    assert code == 0
    header, row = out.strip().splitlines()
    assert len(header.split(",")) == 1 + 15
    assert len(row.split(",")) == 1 + 15


def test_features_hm5_5_columns(shape_pgm, capsys):
    code, out = run(["features", shape_pgm, "--set", "hm5"], capsys)
    assert code == 0
    assert len(out.strip().splitlines()[0].split(",")) == 1 + 5


def test_features_same_image_identical_rows(shape_pgm, capsys):
    code, out = run(["features", shape_pgm, shape_pgm, "--set", "rmbmi4", "--normalized"], capsys)
    assert code == 0
    _, row1, row2 = out.strip().splitlines()
    assert row1.split(",")[1:] == row2.split(",")[1:]


def test_features_unnormalized_hu_rejected(shape_pgm, capsys):
    code = run(["features", shape_pgm, "--set", "geometric"])
    assert code == 2
    capsys.readouterr()


# --- experiment --------------------------------------------------------------------

def write_stability_config(tmp_path, out_csv):
    config = dict(experiment="stability",
                  corpus=dict(synthetic=dict(kind="stability", count=2, size=97)),
                  models=["ucm"], similarity=False, feature_family="rmbmi4",
                  degradations_per_image=2, n_steps=15, seed=0,
                  output=str(out_csv))
    path = tmp_path / "stab.json"
    path.write_text(json.dumps(config))
    return path


def test_experiment_stability_deterministic(tmp_path):
    out_csv = tmp_path / "stab.csv"
    cfg = write_stability_config(tmp_path, out_csv)
    assert run(["experiment", cfg]) == 0
    first = out_csv.read_bytes()
    manifest = json.loads((tmp_path / "stab.csv.manifest.json").read_text())
    assert manifest["tool"] == "rotblur"
    assert run(["experiment", cfg]) == 0
    assert out_csv.read_bytes() == first
    header = first.decode().splitlines()[0]
    assert header == "feature,ucm_n"


def test_experiment_classification_with_noise(tmp_path):
    out_csv = tmp_path / "cls.csv"
    config = dict(experiment="classification",
                  corpus=dict(synthetic=dict(kind="classification", count=3)),
                  models=["ucm"], similarity=False, features=["rmbmi4", "hm5"],
                  degradations_per_image=2, n_steps=15, seed=0,
                  noise=dict(snr_db=[40.0]), output=str(out_csv))
    cfg = tmp_path / "cls.json"
    cfg.write_text(json.dumps(config))
    assert run(["experiment", cfg]) == 0
    lines = out_csv.read_text().strip().splitlines()
    assert lines[0] == "feature_set,ucm_n"
    assert {ln.split(",")[0] for ln in lines[1:]} == {"rmbmi4", "hm5"}
    noise_lines = (tmp_path / (str(out_csv) + ".noise.csv")).read_text().strip().splitlines()
    assert noise_lines[0] == "snr_db,ucm_n"


def test_experiment_user_corpus_dir(tmp_path):
    corpus_dir = tmp_path / "corpus"
    write_corpus(corpus_dir, [textured_shape(97, s) for s in (1, 2)])
    out_csv = tmp_path / "user.csv"
    config = dict(experiment="stability", corpus=dict(dir=str(corpus_dir)),
                  models=["ucm"], similarity=False, feature_family="rmbmi4",
                  degradations_per_image=2, n_steps=15, seed=0, output=str(out_csv))
    cfg = tmp_path / "user.json"
    cfg.write_text(json.dumps(config))
    assert run(["experiment", cfg]) == 0
    assert out_csv.exists()


def test_experiment_config_errors(tmp_path, capsys):
    missing = tmp_path / "missing.json"
    assert run(["experiment", missing]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"experiment": "telepathy", "output": "x.csv"}))
    assert run(["experiment", bad]) == 2
    no_out = tmp_path / "noout.json"
    no_out.write_text(json.dumps({"experiment": "stability"}))
    assert run(["experiment", no_out]) == 2
    capsys.readouterr()
