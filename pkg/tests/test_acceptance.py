"""Acceptance criteria, one test each, at the stated tolerances and budgets.

Each test records a ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary. Run on its own with ``pytest tests/test_acceptance.py -v``.
"""

import json
import time

from conftest import record_criterion

from uhardy.cli import main
from uhardy.montecarlo import orthogonality_matrix, pushforward_check, sphere_moment_check
from uhardy.partitions import BasisKey, enumerate_partitions, fock_weight, hardy_weight, jstar_ratio
from uhardy.suites import (
    SPHERE_PARTITIONS,
    SuiteConfig,
    coherent_rows,
    isomorphism_rows,
    multinomial_kernel_rows,
    polarization_rows,
    radial_rows,
    stream,
    suite_schur,
)

SEED = 42
CONFIG = SuiteConfig(seed=SEED)


def verdict(number, title, ok, detail=""):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
    record_criterion(line + (f"  ({detail})" if detail else ""))
    return ok


def failing(rows):
    return [r.line() for r in rows if r.asserted and not r.passed]


def test_criterion_01_exact_weight_identities():
    t0 = time.perf_counter()
    bad = [
        lam
        for n in range(13)
        for lam in enumerate_partitions(n)
        if hardy_weight(lam) * jstar_ratio(lam) != fock_weight(lam)
    ]
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 1
    assert verdict(1, "hardy_weight * jstar_ratio == fock_weight, |lambda| <= 12", ok,
                   f"{len(bad)} failures, {elapsed:.3f}s"), bad


def test_criterion_02_sphere_moments():
    t0 = time.perf_counter()
    rows = []
    for m in (2, 3, 4):
        for parts in SPHERE_PARTITIONS:
            key = BasisKey.from_partition(parts, range(1, len(parts) + 1))
            rows.append(sphere_moment_check(key, m, 200_000, stream(CONFIG, f"accept:2:{parts}:{m}"),
                                            rel_tol=0.02))
    elapsed = time.perf_counter() - t0
    bad = failing(rows)
    ok = not bad and elapsed < 60
    assert verdict(2, "sphere moments, 4 sigma and 2% relative", ok,
                   f"{len(rows)} checks, {elapsed:.1f}s"), bad


def test_criterion_03_schur_averaging():
    t0 = time.perf_counter()
    rows, _ = suite_schur(CONFIG)
    rows = [r for r in rows if "pair" in r.name]
    elapsed = time.perf_counter() - t0
    bad = failing(rows)
    ok = len(rows) == 30 and not bad and elapsed < 60
    assert verdict(3, "Schur averaging, m in {2,3}, n <= 3, 5 pairs", ok,
                   f"{len(rows)} checks, {elapsed:.1f}s"), bad


def test_criterion_04_livsic_pushforward():
    t0 = time.perf_counter()
    rows = []
    for m in (2, 3, 4):
        rows += pushforward_check(m, 100_000, stream(CONFIG, f"accept:4:{m}"))
    elapsed = time.perf_counter() - t0
    bad = failing(rows)
    ok = not bad and elapsed < 60
    assert verdict(4, "Livsic pushforward moment panel, m in {2,3,4}", ok,
                   f"{len(rows)} checks, {elapsed:.1f}s"), bad


def test_criterion_05_cross_degree_orthogonality():
    rep = orthogonality_matrix(3, 3, 4, 100_000, stream(CONFIG, "accept:5"))
    bad = failing(rep.offdiagonal)
    ok = len(rep.keys) == 20 and not bad
    assert verdict(5, "off-diagonal Gram entries vanish, n <= 3, d = 3, level 4", ok,
                   f"{len(rep.offdiagonal)} entries"), bad


def test_criterion_06_multinomial_kernel():
    t0 = time.perf_counter()
    rows = multinomial_kernel_rows(CONFIG, pairs=100, level=4, n_max=6)
    elapsed = time.perf_counter() - t0
    bad = failing(rows)
    worst = max(r.error for r in rows)
    ok = not bad and elapsed < 10
    assert verdict(6, "fock-sum kernel == <zeta(v)|zeta(u)>^n to 1e-10", ok,
                   f"max error {worst:.2e}, {elapsed:.2f}s"), bad


def test_criterion_07_coherent_state_tail():
    rows = coherent_rows(CONFIG, count=20, N=24)
    bad = failing(rows)
    assert verdict(7, "coherent-state norm within the exact tail bound, N = 24", not bad,
                   f"{len(rows)} rows"), bad


def test_criterion_08_isomorphism():
    rows = isomorphism_rows(CONFIG, degree=8, dim=6)
    bad = failing(rows)
    worst = max(r.error for r in rows)
    assert verdict(8, "isometry, inverse and extend-norm to 1e-12 (degree 8, dim 6)", not bad,
                   f"max error {worst:.2e}"), bad


def test_criterion_09_radial_transform():
    rows = radial_rows(CONFIG, count=20, degree=6)
    bad = failing(rows)
    assert verdict(9, "radial norm identity, monotone gap, bound for unit f", not bad), bad


def test_criterion_10_polarization_oracle():
    rows = polarization_rows(CONFIG, count=20)
    bad = failing(rows)
    worst = max(r.error for r in rows)
    assert verdict(10, "polarization == permutation averaging, n <= 4, to 1e-10", not bad,
                   f"max error {worst:.2e}"), bad


def test_criterion_11_diagnostics_present(tmp_path, capsys):
    out = tmp_path / "all.json"
    code = main(["verify", "--suite", "all", "--seed", str(SEED), "--samples", "20000",
                 "--out", str(out)])
    capsys.readouterr()
    diag = json.loads(out.read_text())["body"]["diagnostics"]
    compare = diag.get("kernel_compare", [])
    q_rows = [c for c in compare if c["q"] >= 2 and c["discrepancy_rows"]]
    ortho = diag.get("orthogonality_diagonal", [])
    levels = {r["level"] for r in ortho}
    by_key = {}
    for r in ortho:
        by_key.setdefault(r["key"], set()).add(r["level_value"])
    level_dependent = [k for k, vals in by_key.items() if len(vals) > 1]
    ok = bool(q_rows) and {4, 6} <= levels and bool(level_dependent) and code in (0, 1)
    assert verdict(11, "kernel_compare and orthogonality diagnostics present", ok,
                   f"{len(q_rows)} q>=2 tables, {len(level_dependent)} level-dependent keys")
