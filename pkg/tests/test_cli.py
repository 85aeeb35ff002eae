import json

import pytest

from nashlab.cli import main


def _summary(capsys):
    out = capsys.readouterr().out.splitlines()
    line = [ln for ln in out if ln.startswith("#summary ")][-1]
    return json.loads(line[len("#summary ") :]), out


def test_embed_commands(capsys):
    assert main(["congestion-sim", "--n", "5", "--trials", "10", "--seed", "2"]) == 0
    s, lines = _summary(capsys)
    assert "bot_rate=0.0" in lines and s["violations"] == 0
    assert main(["dichotomy", "--N", "10", "--trials", "10", "--solver", "noncanonical"]) == 0
    s, _ = _summary(capsys)
    assert s["p_canonical"] == 0.0
    assert main(["coupling", "--n", "4", "--N", "16", "--trials", "5"]) == 0
    assert _summary(capsys)[0]["N"] == 16


def test_full_file_flow(tmp_path, capsys):
    o = ["--out", str(tmp_path)]
    f = lambda name: str(tmp_path / name)  # noqa: E731
    assert main(o + ["sample-instance", "--N", "64"]) == 0
    assert main(o + ["build-code", "--n", "6"]) == 0
    assert main(o + ["build-family", "--m", "36"]) == 0
    capsys.readouterr()
    io = ["--instance", f("instance.txt"), "--code", f("code.txt")]
    assert main(["build-brouwer", *io, "--profile", "default"]) == 0
    assert _summary(capsys)[0]["segments"] == 253
    assert main(o + ["find-fixed-point", *io]) == 0
    assert main(o + ["eval-f", *io, "--point", f("fixed_point.txt")]) == 0
    assert main(["decode-fp", *io, "--point", f("fixed_point.txt")]) == 0
    fp = _summary(capsys)[0]
    assert fp["reason"] == "sink"
    assert main(["check-lipschitz", *io, "--samples", "200", "--boundary", "50"]) == 0
    assert main(o + ["build-game", "--instance", f("instance.txt")]) == 0
    g = io + ["--family", f("family.txt"), "--composed", f("composed.txt")]
    assert main(o + ["plant", *g, "--fixed-point", f("fixed_point.txt")]) == 0
    s = ["--strategy-a", f("strategy_A.txt"), "--strategy-b", f("strategy_B.txt")]
    capsys.readouterr()
    assert main(["check-wsne", *g, *s, "--eps", "1e-9"]) == 0
    assert _summary(capsys)[0]["passed"] is True
    assert main(["check-ane", *g, *s, "--eps", "1e-9"]) == 0
    assert main(o + ["prune", *g, *s, "--eps", "1e-9"]) == 0
    assert main(o + ["extract", *g, *s]) == 0
    capsys.readouterr()
    assert main(["verify-reduction", *g, *s]) == 0
    assert _summary(capsys)[0]["vertex"] == fp["vertex"]
    # swapped strategy files are rejected
    assert main(["check-wsne", *g, "--strategy-a", s[3], "--strategy-b", s[1], "--eps", "1e-9"]) == 2


def test_pipeline_missing_input(tmp_path, capsys):
    assert main(["--out", str(tmp_path), "pipeline", "--stages", "brouwer"]) == 2
    assert "stage brouwer" in capsys.readouterr().err


def test_global_flags_after_subcommand(tmp_path, capsys):
    assert main(["sample-instance", "--N", "8", "--out", str(tmp_path), "--seed", "4"]) == 0
    assert (tmp_path / "instance.txt").exists()


def test_acceptance_subset(capsys):
    assert main(["acceptance", "--criteria", "1,9"]) == 0
    out = capsys.readouterr().out
    assert "[PASS] 1." in out and "[PASS] 9." in out


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["nope"])
