"""Acceptance criteria, one test each. Every test records a PASS/FAIL line
that is printed in the terminal summary."""

import time

import pytest

from conftest import ACCEPTANCE_LINES
from splitgame.lab.corpus import CorpusSpec, Family, classify, generate_corpus
from splitgame.lab.suites import SuiteConfig, run_suite

WIDE_SPLIT_GAP = (
    "width-2 splits count pairs (e.g. 'at most one element' has rank 1) while Duplicator "
    "answers any 2-element challenge block by block; no finite-width analog of the "
    "infinite pigeonhole the argument needs"
)


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def suite(name: str, **kw):
    start = time.perf_counter()
    report = run_suite(name, SuiteConfig(**kw))
    return report, time.perf_counter() - start


def test_01_rank_collapse():
    report, elapsed = suite("rank-collapse")
    ok = report.passed and elapsed < 300
    record(1, "solver agrees with the literal bounded game", ok, f"{report.cases} cases, {len(report.failures)} disagreements, {elapsed:.0f}s")
    assert ok, report.to_text()


def test_02_transitivity():
    report, elapsed = suite("transitivity")
    ok = report.passed and elapsed < 600
    record(2, "Duplicator-win relation is transitive", ok, f"{report.cases} triples, {len(report.failures)} violations, {elapsed:.0f}s")
    assert ok, report.to_text()


@pytest.mark.xfail(strict=True, reason=WIDE_SPLIT_GAP)
def test_03_game_logic_soundness():
    report, elapsed = suite("game-logic-sound")
    pairs = {f.case for f in report.failures}
    record(3, "Duplicator-won pairs agree on random sentences", report.passed, f"{report.cases} checks, {len(pairs)} pairs separated, {elapsed:.0f}s")
    assert report.passed, report.to_text()


def test_04_constructive_completeness():
    report, elapsed = suite("distinguisher-complete")
    record(4, "separating sentence for every Spoiler-won pair", report.passed, f"{report.cases} pairs, {len(report.failures)} failures, {elapsed:.0f}s")
    assert report.passed, report.to_text()


@pytest.mark.xfail(strict=True, reason=WIDE_SPLIT_GAP)
def test_05_covering_sentence():
    report, elapsed = suite("covering")
    evals = [f for f in report.failures if not f.case.startswith("closure-")]
    closure = [f for f in report.failures if f.case.startswith("closure-")]
    record(
        5,
        "covering sentence and its rank-2 closure",
        report.passed,
        f"{len(evals)} evaluation mismatches, {len(closure)} closure failures, {elapsed:.0f}s",
    )
    assert report.passed, report.to_text()


def test_06_example_sentences():
    report, elapsed = suite("examples")
    record(6, "example sentences match brute force", report.passed, f"{report.cases} cases, {len(report.failures)} failures")
    assert report.passed, report.to_text()


def test_07_union_chains():
    report, elapsed = suite("union-chain")
    ok = report.passed and report.cases >= 200
    linked = report.table["chains with every link elementary"]
    record(7, "elementary chains have elementary ends", ok, f"{report.cases} chains ({linked} fully elementary), {len(report.failures)} failures")
    assert ok, report.to_text()


def test_08_skolem_hulls():
    report, elapsed = suite("skolem-lst")
    ok = report.passed and report.cases >= 100
    record(8, "Skolem hulls are elementary", ok, f"{report.cases} cases, {len(report.failures)} failures")
    assert ok, report.to_text()


def test_09_dg_implies_efc():
    report, elapsed = suite("dg-implies-ef")
    infinite = [f for f in report.failures if "-b" not in f.case.rsplit("-t", 1)[1]]
    ok = not infinite
    record(9, "DG-infinite pairs are EFC-infinite", ok, f"{report.cases} checks, {len(infinite)} violations")
    for key in sorted(report.table):
        ACCEPTANCE_LINES.append(f"        rank table {key}: {report.table[key]}")
    assert ok, report.to_text()


def test_10_duality():
    report, elapsed = suite("duality")
    ok = report.passed and report.cases >= 2000
    record(10, "dualize negates in both modes", ok, f"{report.cases // 2} formulas x 2 modes, {len(report.failures)} failures")
    assert ok, report.to_text()


def test_11_counting():
    unary2 = generate_corpus(CorpusSpec(Family.UNARY, n_min=2, n_max=2))
    classes = classify(unary2, 1, 1)
    posets3 = generate_corpus(CorpusSpec(Family.POSETS, n_min=3, n_max=3))
    ok = len(classes) == 3 and len(posets3) == 5
    record(11, "toy counting", ok, f"{len(classes)} classes on unary size 2, {len(posets3)} posets of size 3")
    assert ok
