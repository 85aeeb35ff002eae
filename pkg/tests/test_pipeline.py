import json

import pytest

from nashlab.pipeline import ARTIFACTS, PipelineConfig, PipelineError, run_pipeline


@pytest.fixture(scope="module")
def two_runs(tmp_path_factory):
    a = run_pipeline(PipelineConfig(out=tmp_path_factory.mktemp("a")))
    b = run_pipeline(PipelineConfig(out=tmp_path_factory.mktemp("b")))
    return a, b


def test_manifest_has_seven_artifacts(two_runs):
    a, _ = two_runs
    assert sorted(a["artifacts"]) == sorted(ARTIFACTS)
    assert len(a["artifacts"]) == 7
    assert a["config"]["m"] == 36


def test_hashes_are_reproducible(two_runs):
    a, b = two_runs
    assert {k: v["sha256"] for k, v in a["artifacts"].items()} == {k: v["sha256"] for k, v in b["artifacts"].items()}
    assert a["results"] == b["results"]


def test_verification_results(two_runs):
    v = two_runs[0]["results"]["verify"]
    assert v["max_regret"] <= 1e-12 and v["uncovered"] == 0
    assert v["solution"] == two_runs[0]["results"]["brouwer"]["endpoint"]


def test_seed_changes_artifacts(tmp_path, two_runs):
    c = run_pipeline(PipelineConfig(seed=1, out=tmp_path, stages=("instance", "code", "family")))
    assert c["artifacts"]["instance"]["sha256"] != two_runs[0]["artifacts"]["instance"]["sha256"]
    assert json.loads((tmp_path / "manifest.json").read_text()) == c


def test_missing_input_names_stage_and_file(tmp_path):
    with pytest.raises(PipelineError) as e:
        run_pipeline(PipelineConfig(out=tmp_path, stages=("brouwer",)))
    assert e.value.stage == "brouwer" and "instance" in str(e.value)


def test_single_stage_rerun_on_existing_artifacts(tmp_path):
    run_pipeline(PipelineConfig(out=tmp_path, stages=("instance", "code")))
    man = run_pipeline(PipelineConfig(out=tmp_path, stages=("brouwer",)))
    assert man["results"]["brouwer"]["residual"] <= 1e-8


def test_unknown_stage(tmp_path):
    with pytest.raises(PipelineError):
        run_pipeline(PipelineConfig(out=tmp_path, stages=("instance", "bogus")))


def test_m_padding_rule():
    assert PipelineConfig(n=6, ell=2).m == 36
    assert PipelineConfig(n=10, ell=4).m == 64
    assert PipelineConfig(n=7, ell=3).m == 36
