import json

import pytest

from splitgame.errors import UnknownSuite
from splitgame.lab.suites import SUITES, SuiteConfig, run_suite

SMALL = SuiteConfig(seed=3, nmax=3, samples=40)


def test_unknown():
    with pytest.raises(UnknownSuite):
        run_suite("nope")


@pytest.mark.parametrize(
    "name",
    ["duality", "encoding", "examples", "transitivity", "distinguisher-complete", "dg-implies-ef", "union-chain", "skolem-lst"],
)
def test_small_runs_pass(name):
    report = run_suite(name, SMALL)
    assert report.cases > 0
    assert report.passed, report.to_text()


def test_rank_collapse_small():
    report = run_suite("rank-collapse", SuiteConfig(nmax=2))
    assert report.passed and report.cases == (5 * 5 + 12 * 12) * 2 * 7


def test_json_is_byte_stable():
    a = run_suite("examples", SMALL)
    b = run_suite("examples", SMALL)
    assert a.to_json_lines() == b.to_json_lines()
    head = json.loads(a.to_json_lines().splitlines()[0])
    assert head["suite"] == "examples" and head["passed"] and "wall_time" not in head


def test_failures_sorted_and_replayable():
    report = run_suite("covering", SMALL)
    keys = [f.case for f in report.failures]
    assert keys == sorted(keys)
    for f in report.failures:
        assert f.case.startswith("closure-")
        assert any(name.endswith("-M.str") for name in f.artifacts)
        assert f.command.startswith("splitgame solve")


def test_soundness_breaks_only_with_wide_splits():
    report = run_suite("game-logic-sound", SuiteConfig(nmax=3, samples=60))
    assert report.failures
    assert all("-t2-" in f.case for f in report.failures)


def test_registry_names():
    assert set(SUITES) == {
        "duality", "encoding", "examples", "covering", "transitivity", "game-logic-sound",
        "distinguisher-complete", "dg-implies-ef", "rank-collapse", "union-chain", "skolem-lst",
    }
