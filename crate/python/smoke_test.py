#!/usr/bin/env python3
"""Smoke test for the qdimtest_py extension module.

Build the module first, then run this script from the repository root:

    cargo build --release -p qdimtest-python
    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent


def import_extension():
    candidates = [
        REPO_ROOT / "target" / "release" / "libqdimtest_py.so",
        REPO_ROOT / "target" / "debug" / "libqdimtest_py.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("libqdimtest_py.so not found; run: cargo build --release -p qdimtest-python")
    stage = Path(tempfile.mkdtemp(prefix="qdimtest-py-"))
    shutil.copy2(built, stage / "qdimtest_py.so")
    sys.path.insert(0, str(stage))
    import qdimtest_py

    return qdimtest_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    q = import_extension()

    # Entropy kernels.
    approx(q.binary_entropy(0.5), 1.0, 0.0)
    approx(q.binary_entropy(0.0), 0.0, 0.0)
    m, log2_m = q.binomial_tail(4, 1)
    assert m == 5 and abs(log2_m - math.log2(5)) < 1e-12
    m200, _ = q.binomial_tail(200, 10)
    assert m200 == sum(math.comb(200, i) for i in range(11)), "exact big-int tail"
    approx(q.binomial_cdf(10, 0, 0.5), 2**-10, 1e-15)
    lo, hi = q.stirling_bracket(20, 0.25)
    assert lo <= sum(math.comb(20, i) for i in range(6)) <= hi
    assert q.threshold_from_alpha(10, 0.3) == 3

    # Bounds.
    r = q.bound_exact(90, 0, 1.0)
    assert r.log2_dim_lower == 90.0 and r.certified_qubits == 90.0
    r = q.bound_exact(1, 0, 0.5)
    approx(r.log2_dim_lower, -1.0, 1e-12)
    assert r.certified_qubits == 0.0
    exact = q.bound_exact(90, 9, 0.99)
    stirling = q.bound_stirling(90, 9, 0.99)
    assert exact.log2_dim_lower >= stirling.log2_dim_lower
    approx(exact.log2_dim_lower, 9.775858405283252, 1e-9)
    approx(q.bound_pairwise(1000, 0, 1.0, "bb84").log2_dim_lower, 500.0)
    approx(q.bound_mub_extractor(1000, 0, 1.0, 2).log2_dim_lower, 1000 * math.log2(1.5))
    approx(q.asymptotic_coefficient("six-state"), 2 / 3, 1e-12)
    vac = q.bound_exact(3, 3, 0.9)
    assert vac.vacuous and vac.certified_qubits == 0.0

    # Noise pipeline.
    p1, p2, p3, p4 = q.scale_noise(6.056e-3)
    approx(p1, 5e-3, 1e-15)
    approx(p4, 1e-3, 1e-15)
    approx(q.per_qubit_error((0.07, 0, 0, 0), "Z"), 0.07, 1e-14)
    approx(q.per_qubit_error((0, 0, 0.04, 0), "Z"), 0.0, 0.0)
    approx(q.per_qubit_error((0, 0, 0.04, 0), "X"), 0.04, 1e-14)
    pz, px, p = q.honest_pass_prob(50, 3, q.scale_noise(0.005))
    assert 0.99 < p <= 1.0 and abs(p - 0.5 * (pz + px)) < 1e-15

    rows = q.certified_sweep(5, 30, [0.001, 0.01])
    assert len(rows) == 52
    by_key = {(r.total, r.n): r.certified_qubits for r in rows}
    for n in range(5, 31):
        assert 0.0 <= by_key[(0.01, n)] <= by_key[(0.001, n)] <= n

    # Simulation.
    stats = q.run_trials(40, 0, trials=2000, seed=1)
    assert stats.passes == stats.trials == 2000
    again = q.run_trials(40, 0, trials=2000, seed=1)
    assert stats.p_lower == again.p_lower and stats.passes == again.passes
    guess = q.run_trials(10, 0, trials=200_000, seed=5, strategy="classical-guess")
    se = math.sqrt(2**-10 * (1 - 2**-10) / 200_000)
    assert abs(guess.p_hat - 2**-10) <= 4 * se
    approx(q.strategy_store_k(10, 5, 2), 0.5, 0.0)
    approx(q.confidence_lower(10_000, 10_000, 0.05), 0.05 ** (1 / 10_000), 1e-9)
    approx(
        q.confidence_lower_hoeffding(9000, 10_000, 0.05),
        0.9 - math.sqrt(math.log(20) / 2e4),
        1e-12,
    )

    # Quantum entropies.
    approx(q.von_neumann_entropy([[0.5, 0], [0, 0.5]]), 1.0, 1e-12)
    approx(q.von_neumann_entropy([[1, 0], [0, 0]]), 0.0, 1e-12)
    epr = [
        [0.5, 0, 0, 0.5],
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [0.5, 0, 0, 0.5],
    ]
    approx(q.conditional_entropy(2, 2, epr), -1.0, 1e-9)

    # Verification suites (reduced instance counts).
    checks, violations = q.verify_suite("uncertainty", seed=3, count=25)
    assert checks == 52 and violations == 0
    checks, violations = q.verify_suite("fano", seed=3, count=10)
    assert violations == 0

    print("qdimtest_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
