"""Acceptance gate for the whole artifact.

Each test certifies one release criterion at its stated tolerance and prints a
single PASS/FAIL line (run with ``pytest -s`` to see them).  The criteria are
property-based: randomized campaigns with fixed seeds, exhaustive small-case
enumerations, and independent brute-force oracles.
"""

import json
import time
from itertools import combinations

import numpy as np

from conftest import basis
from pqdist.checks import (
    check_convexity,
    check_generator_identity_w1,
    check_minorial,
    check_orthonormal_reduction,
    counterexample_p_lt_2,
)
from pqdist.cli import main
from pqdist.exterior import cross3, inner, wedge2
from pqdist.fuzz import TrialConfig, run_fuzz
from pqdist.metric import DistanceMatrix, DpMetric, d2, d_hs, d_p, dp_from_weights
from pqdist.optimize import minimize_defect_n3
from pqdist.sampling import (
    MATRIX_MODES,
    sample_distance_matrix,
    sample_orthonormal_triple,
    sample_pure_state,
    sample_symmetric_weights,
    trial_rng,
)

TRIANGLE_NS = (2, 3, 4, 6, 8)
TRIANGLE_PS = (2.0, 2.5, 3.0, 5.0, 10.0)


def _certify(num, name, ok, detail):
    print(f"ACCEPTANCE {num:>2} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def brute_dp(entries, p, x, y):
    """Scalar-loop evaluation of the induced distance, independent of numpy."""
    total = 0.0
    n = len(x)
    for i in range(n):
        for j in range(i + 1, n):
            total += entries[i][j] ** p * abs(x[i] * y[j] - x[j] * y[i]) ** 2
    return total ** (1.0 / p)


def test_criterion_1_triangle_inequality():
    start = time.perf_counter()
    worst = np.inf
    total_violations = 0
    seed = 100
    for n in TRIANGLE_NS:
        for p in TRIANGLE_PS:
            for mode in MATRIX_MODES:
                seed += 1
                rep = run_fuzz(
                    "triangle",
                    TrialConfig(n=n, p=p, trials=10_000, seed=seed, matrix_mode=mode, tolerance=1e-9),
                )
                total_violations += rep.violations
                worst = min(worst, rep.worst_defect)
    elapsed = time.perf_counter() - start
    _certify(
        1,
        "triangle inequality, p >= 2",
        total_violations == 0 and elapsed < 60.0,
        f"75 campaigns x 10^4 trials, violations={total_violations}, "
        f"worst scaled defect={worst:.3e}, elapsed={elapsed:.1f}s",
    )


def test_criterion_2_necessity_of_p_ge_2():
    ok = True
    details = []
    for p in (0.5, 1.0, 1.5, 1.9, 1.99):
        ce = counterexample_p_lt_2(p, 1.0)
        margin_oracle = (
            brute_dp([[0, 1.0], [1.0, 0]], p, ce.x, ce.y)
            - brute_dp([[0, 1.0], [1.0, 0]], p, ce.x, ce.z)
            - brute_dp([[0, 1.0], [1.0, 0]], p, ce.y, ce.z)
        )
        ok &= abs(margin_oracle - ce.margin) <= 1e-12
        ok &= ce.margin > (1e-6 if p <= 1.9 else 0.0)
        details.append(f"p={p}: {ce.margin:.2e}")
    _certify(2, "violations below p=2", ok, "; ".join(details))


def test_criterion_3_three_dimensional_criterion():
    start = time.perf_counter()
    rng = trial_rng(2024, 3)
    worst_restate = 0.0
    worst_sat = np.inf
    worst_witness = np.inf
    ok = True
    for case in range(100):
        p = float(rng.choice([2.0, 2.5, 3.0, 5.0]))

        # violating weights: one eigenvalue pushed past the sum of the others
        lam = rng.uniform(0.2, 2.0, 3)
        k = int(rng.integers(3))
        lam[k] = (lam.sum() - lam[k]) * (1.0 + rng.uniform(0.1, 1.0))
        entries = np.array(
            [[0, lam[2], lam[1]], [lam[2], 0, lam[0]], [lam[1], lam[0], 0]]
        )
        ds = sorted(
            dp_from_weights(entries, p, basis(3, i), basis(3, j))
            for i, j in ((0, 1), (0, 2), (1, 2))
        )
        restate = abs((2 * max(ds) - sum(ds)) - (2 * lam.max() - lam.sum()))
        worst_restate = max(worst_restate, restate)
        ok &= restate <= 1e-12
        if case < 5:
            res = minimize_defect_n3(lam, p, seed=case)
            worst_witness = min(worst_witness, res.min_defect)
            ok &= res.min_defect < -1e-3

        # satisfying weights: full 64-restart minimization stays above -1e-7
        lam = rng.uniform(0.2, 2.0, 3)
        while 2 * lam.max() > lam.sum():
            lam = rng.uniform(0.2, 2.0, 3)
        res = minimize_defect_n3(lam, p, restarts=64, seed=1000 + case)
        worst_sat = min(worst_sat, res.min_defect)
        ok &= res.min_defect >= -1e-7
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300.0
    _certify(
        3,
        "spectral criterion at n=3",
        ok,
        f"100+100 weight triples, restatement err<={worst_restate:.1e}, "
        f"min satisfied defect={worst_sat:.2e}, sample witness defect={worst_witness:.2f}, "
        f"elapsed={elapsed:.1f}s",
    )


def test_criterion_4_minorial_sandwich():
    rng = trial_rng(2024, 4)
    pairs = list(combinations(range(4), 2))
    worst = np.inf
    for _ in range(100):
        x, y, z = sample_orthonormal_triple(4, rng)
        for mask in range(64):
            a = np.zeros((4, 4))
            for b, (i, j) in enumerate(pairs):
                if mask >> b & 1:
                    a[i, j] = a[j, i] = 1.0
            d = check_minorial(a, x, y, z)
            worst = min(worst, d.lower, d.upper)
    rep = run_fuzz("minorial", TrialConfig(n=6, p=2.0, trials=10_000, seed=404, tolerance=1e-9))
    worst = min(worst, rep.worst_defect)
    _certify(
        4,
        "minorial sandwich",
        worst >= -1e-9 and rep.violations == 0,
        f"6400 exhaustive zero-one cases + 10^4 random n=6, worst defect={worst:.3e}",
    )


def test_criterion_5_projector_inequality():
    rep = run_fuzz("projector", TrialConfig(n=5, p=2.0, trials=10_000, seed=505, tolerance=1e-10))
    _certify(
        5,
        "masked wedge (projector) bound",
        rep.violations == 0 and rep.worst_defect >= -1e-10,
        f"10^4 non-simple bivectors in C^5, worst defect={rep.worst_defect:.3e}",
    )


def test_criterion_6_convexity_and_generators():
    worst = np.inf
    violations = 0
    for n in (4, 6):
        for p in (2.0, 3.0, 5.0):
            rep = run_fuzz(
                "convexity", TrialConfig(n=n, p=p, trials=10_000, seed=606, tolerance=1e-9)
            )
            violations += rep.violations
            worst = min(worst, rep.worst_defect)

    # max/min defects reproduce the two-sided minor bounds at the extremal pair
    rng = trial_rng(2024, 6)
    agreement = 0.0
    for _ in range(200):
        x, y, z = sample_orthonormal_triple(5, rng)
        a = sample_symmetric_weights(5, rng)
        uppers, lowers = [], []
        for triple in ((x, y, z), (x, z, y), (y, z, x)):
            d = check_minorial(a, *triple)
            lowers.append(d.lower)
            uppers.append(d.upper)
        agreement = max(agreement, abs(check_convexity("max", a, x, y, z) - min(uppers)))
        agreement = max(agreement, abs(check_convexity("min", a, x, y, z) - min(lowers)))

    w1 = run_fuzz("w1", TrialConfig(n=6, p=2.0, trials=10_000, seed=616, tolerance=1e-10))
    ok = violations == 0 and worst >= -1e-9 and agreement <= 1e-12 and w1.violations == 0
    _certify(
        6,
        "convexity/concavity bounds",
        ok,
        f"max/powersum(2,3,5) worst={worst:.3e}, minorial agreement<={agreement:.1e}, "
        f"w1 residual<= {-w1.worst_defect:.1e}",
    )


def test_criterion_7_orthonormal_reduction_pipeline():
    rng = trial_rng(2024, 7)
    worst_hodge = worst_mu = 0.0
    verdicts = 0
    trials = 1000
    for t in range(trials):
        p = 2.0 if t % 2 == 0 else 3.0
        mode = "euclidean-points" if t % 4 < 2 else "repaired-random"
        e = sample_distance_matrix(6, mode, rng)
        xs = [sample_pure_state(6, rng) for _ in range(3)]
        rep = check_orthonormal_reduction(e, p, *xs, inner_seed=7, inner_stream=t)
        worst_hodge = max(worst_hodge, rep.hodge_residual)
        worst_mu = max(worst_mu, rep.mu_residual)
        verdicts += rep.verdict
    ok = worst_hodge <= 1e-10 and worst_mu <= 1e-9 and verdicts == trials
    _certify(
        7,
        "orthonormal reduction pipeline",
        ok,
        f"10^3 triples in C^6, hodge residual<={worst_hodge:.1e}, "
        f"mu residual<={worst_mu:.1e}, verdicts={verdicts}/{trials}",
    )


def test_criterion_8_isometric_embedding():
    rng = trial_rng(2024, 8)
    worst = 0.0
    for case in range(50):
        n = int(rng.integers(2, 11))
        mode = MATRIX_MODES[case % 3]
        rho = sample_distance_matrix(n, mode, rng)
        for p in (2.0, 3.0):
            metric = DpMetric(rho, p)
            for i in range(n):
                for j in range(i + 1, n):
                    err = abs(d_p(metric, basis(n, i), basis(n, j)) - rho.entries[i, j])
                    worst = max(worst, err / rho.entries[i, j])
    _certify(
        8,
        "isometric embedding of finite metrics",
        worst <= 1e-12,
        f"50 metrics (n<=10), p in {{2,3}}, max relative error={worst:.2e}",
    )


def test_criterion_9_specializations_and_identities():
    rng = trial_rng(2024, 9)
    worst = 0.0

    n = 6
    e = sample_distance_matrix(n, "euclidean-points", rng)
    ones = DistanceMatrix.from_array(np.ones((n, n)) - np.eye(n))
    for _ in range(1000):
        x, y = sample_pure_state(n, rng), sample_pure_state(n, rng)
        a = d_p(DpMetric(e, 2.0), x, y)
        b = d2(e, x, y)
        worst = max(worst, abs(a - b) / max(1.0, a))
        c = d2(ones, x, y)
        h = d_hs(x, y)
        worst = max(worst, abs(c - h) / max(1.0, h))
    spec_ok = worst <= 1e-12

    lagrange = 0.0
    for _ in range(1000):
        x = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        y = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        lhs = wedge2(x, y).norm_sq() + abs(inner(x, y)) ** 2
        rhs = float(np.linalg.norm(x) ** 2 * np.linalg.norm(y) ** 2)
        lagrange = max(lagrange, abs(lhs - rhs) / rhs)

    cross_worst = 0.0

    def rel(a, b):
        scale = max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / scale

    for _ in range(1000):
        x, y, z, u = (rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(4))
        a_mat = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        cross_worst = max(cross_worst, rel(x @ cross3(y, z), z @ cross3(x, y)))
        cross_worst = max(
            cross_worst,
            rel(cross3(x, y) @ cross3(z, u), (x @ z) * (y @ u) - (x @ u) * (y @ z)),
        )
        cross_worst = max(cross_worst, rel(cross3(x, cross3(y, z)), (x @ z) * y - (x @ y) * z))
        cross_worst = max(
            cross_worst, rel(cross3(cross3(x, z), cross3(y, z)), (z @ cross3(x, y)) * z)
        )
        cof = np.linalg.det(a_mat) * np.linalg.inv(a_mat).T
        cross_worst = max(cross_worst, rel(cross3(a_mat @ x, a_mat @ y), cof @ cross3(x, y)))
        cross_worst = max(
            cross_worst,
            rel(
                np.linalg.norm(cross3(x, y)) ** 2,
                np.linalg.norm(x) ** 2 * np.linalg.norm(y) ** 2 - abs(np.vdot(x, y)) ** 2,
            ),
        )

    ok = spec_ok and lagrange <= 1e-12 and cross_worst <= 1e-12
    _certify(
        9,
        "specializations and identities",
        ok,
        f"d_p/d2/d_HS agreement<={worst:.1e}, lagrange<={lagrange:.1e}, "
        f"cross identities<={cross_worst:.1e} over 10^3 draws each",
    )


def test_criterion_10_reproducibility(tmp_path):
    runs = {}
    for prop, extra in (("triangle", ["--n", "4", "--p", "2"]), ("reduction", ["--n", "6", "--p", "3"])):
        docs = []
        for k in (0, 1):
            out = str(tmp_path / f"{prop}_{k}.json")
            argv = ["fuzz", "--property", prop, "--trials", "600", "--seed", "77", "--out", out] + extra
            assert main(argv) == 0
            with open(out) as fh:
                doc = json.load(fh)
            doc.pop("elapsed_ms")
            docs.append(json.dumps(doc, indent=2))
        runs[prop] = docs[0] == docs[1]
    _certify(
        10,
        "seeded reproducibility",
        all(runs.values()),
        f"byte-identical reports modulo elapsed time: {runs}",
    )
