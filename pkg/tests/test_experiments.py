import io

import pytest

from pmatch.experiments import (SUITES, ExperimentConfig, UnknownSuite, broder_perfect_fraction,
                                run_acceptance, run_torpid_experiment, write_csv)


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(ks=())
    with pytest.raises(ValueError):
        ExperimentConfig(family="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(cut="nope")
    assert ExperimentConfig(family="counterexample").cut == "S1S3"
    with pytest.raises(ValueError):
        ExperimentConfig(seed=None).require_seed()


def test_torpid_rows_and_skip():
    rows = run_torpid_experiment(ExperimentConfig(ks=(1, 2), cut="near-uv"))
    assert [r["omega"] for r in rows] == [143, 415]
    assert rows[1]["ratio"] == pytest.approx(1 / 3)
    skipped = run_torpid_experiment(ExperimentConfig(ks=(1,), cap=10))
    assert skipped[0]["status"] == "skipped"


def test_broder_fraction_decays():
    rows = broder_perfect_fraction([1, 2])
    assert [r["perfect"] for r in rows] == [8, 8]
    assert rows[0]["near"] == 19888
    assert rows[1]["fraction"] < rows[0]["fraction"] / 5


def test_csv_is_deterministic():
    rows = run_torpid_experiment(ExperimentConfig(ks=(1,)))
    for r in rows:
        r.pop("seconds")
    a, b = io.StringIO(), io.StringIO()
    write_csv(rows, a)
    write_csv(rows, b)
    assert a.getvalue() == b.getvalue()
    assert a.getvalue().startswith("k,n,cut,chain,status,omega")


def test_unknown_suite_lists_names():
    with pytest.raises(UnknownSuite) as info:
        run_acceptance("nope")
    for name in SUITES:
        assert name in str(info.value)


def test_designated_cut_values():
    # exact values of the Near(x1, v) cut on H_k; the decay is slower than 0.6 per step
    rows = run_torpid_experiment(ExperimentConfig(ks=(1, 2, 3)))
    assert [r["cut"] for r in rows] == ["near-x1v"] * 3
    assert [r["phi"] for r in rows] == pytest.approx([0.08, 0.04320987654320988, 0.029411764705882356])
    assert rows[2]["ratio"] == pytest.approx(0.680672268907563)
    assert all(r["phi"] <= r["bound"] for r in rows)
    assert rows[1]["phi_near_uv"] == pytest.approx(1 / 90)
