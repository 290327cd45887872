"""The stenotrainer command: train and export end to end on the toy corpus."""

import struct

import pytest

from stenotrainer import cli

HEADER = struct.Struct("<4sHII")


def run_cli(*args):
    return cli.run(list(args))


def test_usage_error_exits_2(capsys):
    assert run_cli("train") == 2   # missing required arguments
    assert run_cli("no-such-command") == 2


def test_missing_manifest_exits_1(tmp_path, toy_corpus, capsys):
    rc = run_cli("train", str(tmp_path / "nope.jsonl"),
                 "--table", str(toy_corpus.table),
                 "--out", str(tmp_path / "run"))
    assert rc == 1
    assert "error[IO]" in capsys.readouterr().err


def test_bad_size_exits_2(toy_corpus, tmp_path):
    rc = run_cli("train", str(toy_corpus.manifest),
                 "--table", str(toy_corpus.table),
                 "--out", str(tmp_path / "run"), "--size", "banana")
    assert rc == 2


@pytest.fixture(scope="module")
def cli_run_dir(toy_corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("cli-run")
    rc = cli.run(["train", str(toy_corpus.manifest),
                  "--targets", str(toy_corpus.targets_path),
                  "--table", str(toy_corpus.table),
                  "--out", str(out), "--epochs", "1", "--warmup", "0",
                  "--patience", "0", "--size", "256x128", "--seed", "0"])
    assert rc == 0
    return out


def test_cli_train_writes_checkpoint_and_log(cli_run_dir):
    assert (cli_run_dir / "best.pt").is_file()
    assert (cli_run_dir / "epochs.jsonl").is_file()


def test_cli_export_writes_tensors(cli_run_dir, toy_corpus, tmp_path, capsys):
    out = tmp_path / "logits"
    rc = run_cli("export", str(toy_corpus.manifest),
                 "--targets", str(toy_corpus.targets_path),
                 "--table", str(toy_corpus.table),
                 "--checkpoint", str(cli_run_dir / "best.pt"),
                 "--out", str(out), "--split", "validation",
                 "--size", "256x128")
    assert rc == 0
    assert "wrote 8 tensor files" in capsys.readouterr().out
    files = sorted(out.glob("*.logt"))
    assert len(files) == 8
    magic, version, t, c = HEADER.unpack_from(files[0].read_bytes())
    assert magic == b"LOGT" and version == 1 and t == 32
    assert (out / "charset.txt").is_file()


def test_cli_export_rejects_foreign_targets(cli_run_dir, toy_corpus,
                                            tmp_path, capsys):
    bad = tmp_path / "targets.tsv"
    bad.write_text("line-032\tjag QQQ\n", encoding="utf-8")
    rc = run_cli("export", str(toy_corpus.manifest),
                 "--targets", str(bad),
                 "--table", str(toy_corpus.table),
                 "--checkpoint", str(cli_run_dir / "best.pt"),
                 "--out", str(tmp_path / "logits"), "--split", "validation",
                 "--size", "256x128")
    assert rc == 1
    err = capsys.readouterr().err
    assert err.startswith("error[")
