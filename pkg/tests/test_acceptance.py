"""Acceptance criteria at their stated scale and tolerance.

Each test runs one named verification suite with the full budget, prints a
single PASS/FAIL line with the measured values, and asserts the verdict.
Runtime limits are part of the verdict where one is stated.
"""

import json
import time

import pytest

from maxdist.cli import main
from maxdist.verify import run_suite, scorecard_json

pytestmark = pytest.mark.slow


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def check(log, number, title, suite, time_limit=None, **kwargs):
    t0 = time.perf_counter()
    card = run_suite(suite, **kwargs)
    elapsed = time.perf_counter() - t0
    ok = card["passed"] and (time_limit is None or elapsed < time_limit)
    parts = [f"{c['name']} = {_fmt(c['measured'])} ({c['threshold']}: {'ok' if c['passed'] else 'FAIL'})" for c in card["criteria"]]
    timing = f"{elapsed:.1f}s" + (f" (limit {time_limit}s)" if time_limit else "")
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {title}: " + "; ".join(parts) + f"; runtime {timing}"
    print(line)
    log(line)
    return ok, card, elapsed


def test_criterion_01_constant_identities(acceptance_log):
    ok, card, elapsed = check(acceptance_log, 1, "constant identities", "constants", time_limit=1.0)
    assert ok, card


def test_criterion_02_pruned_equals_naive(acceptance_log):
    ok, card, _ = check(acceptance_log, 2, "pruned vs naive diameter", "oracle", time_limit=30.0)
    assert ok, card


def test_criterion_03_closed_form_references(acceptance_log):
    ok, card, _ = check(acceptance_log, 3, "closed-form cross-checks", "closed_forms", time_limit=1.0)
    assert ok, card


def test_criterion_04_angle_tail(acceptance_log):
    ok, card, _ = check(acceptance_log, 4, "angle tail", "angle_tail", time_limit=60.0)
    assert ok, card


def test_criterion_05_sphere_pair(acceptance_log):
    ok, card, _ = check(acceptance_log, 5, "sphere pair probability", "sphere_pair", time_limit=60.0)
    assert ok, card


def test_criterion_06_pair_counts(acceptance_log):
    ok, card, _ = check(acceptance_log, 6, "pair counts, normal d=2 n=1e5", "poisson", n=100_000, reps=2000)
    assert ok, card


def test_criterion_07_gumbel_trend(acceptance_log):
    ok, card, _ = check(acceptance_log, 7, "Gumbel convergence trend", "gumbel", n=100_000, reps=1000)
    assert ok, card


def test_criterion_08_norm_gap(acceptance_log):
    ok, card, _ = check(acceptance_log, 8, "norm/diameter gap ratio", "norm_gap", n=100_000, reps=1000)
    assert ok, card


def test_criterion_09_weibull(acceptance_log):
    ok, card, _ = check(acceptance_log, 9, "bounded support (Weibull)", "weibull", time_limit=120.0, n=2000, reps=2000)
    assert ok, card


def test_criterion_10_frechet(acceptance_log):
    ok, card, _ = check(acceptance_log, 10, "power law (Frechet)", "frechet", n=10_000, reps=5000)
    assert ok, card


def test_criterion_11_one_dimension(acceptance_log):
    ok, card, _ = check(acceptance_log, 11, "d=1 Gumbel sum", "d1", n=100_000, reps=2000)
    assert ok, card


def _verify_via_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_criterion_12_determinism(capsys, acceptance_log):
    # every suite family rerun through the CLI with 1 and 3 threads
    runs = [
        ["verify", "constants"],
        ["verify", "oracle"],
        ["verify", "angle_tail", "--reps", "100000"],
        ["verify", "gumbel", "--n", "3000", "--reps", "200"],
        ["verify", "poisson", "--n", "3000", "--reps", "200"],
        ["verify", "weibull", "--n", "300", "--reps", "200"],
        ["verify", "d1", "--n", "3000", "--reps", "200"],
        ["verify", "determinism"],
    ]
    same = True
    for argv in runs:
        outs = []
        for threads in ("1", "3"):
            code, out = _verify_via_cli(capsys, argv + ["--seed", "17", "--threads", threads])
            json.loads(out)
            outs.append(out)
        same = same and outs[0] == outs[1]
    line = f"[{'PASS' if same else 'FAIL'}] criterion 12 determinism: byte-identical scorecards for 1 vs 3 threads over {len(runs)} suites = {same}"
    acceptance_log(line)
    assert same
