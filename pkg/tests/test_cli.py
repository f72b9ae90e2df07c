import io
import json
import logging

import numpy as np
import pytest

from lsro import __version__
from lsro.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main
from lsro_data.features_io import read_features, write_features
from lsro_data.samples import Dataset, Split

TINY_CONFIG = """\
# tiny grid used by the command line tests
synth.num_identities = 10
synth.samples_per_identity_per_camera = [2, 3]
synth.feature_dim = 5
synth.heldout_identities = 2
gan.latent_dim = 3
gan.gen_hidden = [6]
gan.disc_hidden = [6]
gan.epochs = 1
net.hidden_dims = [6]
net.embed_dim = 4
train.epochs = 2
train.decay_epoch = 1
train.pseudo_warmup_epochs = 1
experiment.repeats = 1
experiment.generated_multiples = [0, 1]
"""


@pytest.fixture(autouse=True)
def _restore_logging():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers = handlers
    root.setLevel(level)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "lab.cfg").write_text(TINY_CONFIG, encoding="utf-8")
    return tmp_path


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_usage_errors(workdir, capsys):
    assert run("--bogus")[0] == EXIT_CONFIG
    assert run()[0] == EXIT_CONFIG
    assert run("sample-outliers")[0] == EXIT_CONFIG
    assert "usage:" in capsys.readouterr().err


def test_config_errors(workdir):
    assert run("--config", "missing.cfg", "gen-data")[0] == EXIT_CONFIG
    (workdir / "bad.cfg").write_text("synth.cameras = 1\n", encoding="utf-8")
    assert run("--config", "bad.cfg", "gen-data")[0] == EXIT_CONFIG


def test_environment_overrides(workdir, monkeypatch):
    monkeypatch.setenv("LSRO__SYNTH__NUM_IDENTITIES", "1")
    assert run("--config", "lab.cfg", "gen-data")[0] == EXIT_CONFIG


def test_gen_data_writes_manifest(workdir):
    code, out = run("--config", "lab.cfg", "--out", "data", "gen-data")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["split"]["test_identities"] == 5
    train = read_features(workdir / "data" / "train.lsrofeat")
    assert len(train) == payload["samples"]["train"]
    assert (workdir / "data" / "manifest.json").exists()


def test_flags_after_the_command(workdir):
    code, _ = run("gen-data", "--config", "lab.cfg", "--out", "late", "--seed", "4")
    assert code == EXIT_OK
    assert (workdir / "late" / "query.lsrofeat").exists()


def test_gan_then_outliers(workdir):
    assert run("--config", "lab.cfg", "--out", "g", "train-gan")[0] == EXIT_OK
    code, out = run("--config", "lab.cfg", "--out", "g", "sample-outliers", "--count", "7")
    assert code == EXIT_OK and json.loads(out)["count"] == 7
    outliers = read_features(workdir / "g" / "outliers.lsrofeat")
    assert len(outliers) == 7 and (outliers.identities == -1).all()
    assert run("--config", "lab.cfg", "--out", "g", "sample-outliers", "--count", "0")[0] == EXIT_CONFIG


def test_train_then_evaluate_embeddings(workdir):
    code, out = run("--config", "lab.cfg", "--out", "t", "train", "--strategy", "lsro", "--generated", "8")
    assert code == EXIT_OK
    row = json.loads(out)["row"]
    assert row["strategy"] == "lsro" and row["num_generated"] == 8

    code, out = run("--config", "lab.cfg", "--out", "e", "evaluate", "--manifest", "t/embeddings.json", "--k-max", "5")
    assert code == EXIT_OK
    assert json.loads(out)["map"] == pytest.approx(row["map"], abs=1e-9)
    assert (workdir / "e" / "metrics.csv").read_text().splitlines()[0] == "mode,k,value"

    code, _ = run(
        "--config", "lab.cfg", "--out", "c", "evaluate",
        "--query", "data/none.lsrofeat", "--gallery", "data/none.lsrofeat",
    )
    assert code == EXIT_RUNTIME


def test_evaluate_without_cross_camera_match_is_a_runtime_error(workdir):
    feats = Dataset(np.eye(3), [0, 0, 1], [0, 0, 0], [Split.QUERY, Split.GALLERY, Split.GALLERY], [0, 0, 0])
    write_features(workdir / "flat.lsrofeat", feats)
    assert run("evaluate", "--features", "flat.lsrofeat")[0] == EXIT_RUNTIME


def test_evaluate_needs_inputs(workdir):
    assert run("evaluate")[0] == EXIT_CONFIG


def test_sweep_and_report(workdir):
    code, out = run("--config", "lab.cfg", "--out", "s", "sweep")
    assert code == EXIT_OK
    assert "4 recorded, 4 new, 0 resumed, 0 failed" in out
    assert "expected cells: 4" in out

    code, out = run("--config", "lab.cfg", "--out", "s", "sweep")
    assert "0 new, 4 resumed" in out

    code, out = run("--config", "lab.cfg", "--out", "s", "report")
    assert code == EXIT_OK
    assert out.splitlines()[3].startswith("baseline")


def test_sweep_with_failed_cells_exits_nonzero(workdir):
    assert run("--config", "lab.cfg", "--out", "f", "sweep")[0] == EXIT_OK
    with (workdir / "lab.cfg").open("a", encoding="utf-8") as fh:
        fh.write("synth.heldout_identities = 0\nexperiment.outlier_source = \"heldout_real\"\n")
    assert run("--config", "lab.cfg", "--out", "f2", "sweep")[0] == EXIT_RUNTIME
