"""Seeded fuzz campaigns over the metric and minor inequalities.

Trials are processed in fixed-size chunks; chunk c draws all its randomness
from an independent Philox stream keyed (seed, c), so campaigns are
bit-reproducible for a fixed seed regardless of how many worker threads run
the chunks.  Aggregation keeps the violation count and the worst defect with
the smallest trial index, both of which are order-independent reductions.

Defect conventions per property (nonnegative means the property held):

* triangle   (sum of the three distances - twice the largest) / max(1, largest)
* minorial   min(middle - lower bound, upper bound - middle)
* projector  min of the two masked-wedge gaps
* convexity  min of the signed defects for f = max, min, powersum(p)
* w1         minus the relative residual of the exact generator identity
* reduction  min of the normalized spectral margin and rescaled residual gates
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._version import __version__
from .checks import (
    HODGE_RESIDUAL_TOL,
    MU_CONSISTENCY_TOL,
    check_convexity,
    check_generator_identity_w1,
    check_minorial,
    check_orthonormal_reduction,
    check_projector_inequality,
    triangle_defect,
)
from .exterior import Bivector, pair_indices, triple_indices
from .metric import DistanceMatrix
from .sampling import (
    MATRIX_MODES,
    _orthonormalize_triples,
    distance_matrices_batch,
    pair_weights_batch,
    states_batch,
    trial_rng,
)

__all__ = [
    "CHUNK_TRIALS",
    "PROPERTIES",
    "TrialConfig",
    "VerificationReport",
    "run_fuzz",
    "reevaluate_witness",
    "thread_count",
]

CHUNK_TRIALS = 512
PROPERTIES = ("triangle", "minorial", "convexity", "projector", "reduction", "w1")

# Streams below this base index belong to chunk sampling; the reduction
# property derives one extra inner stream per trial above it.
_REDUCTION_STREAM_BASE = 1 << 32


@dataclass(frozen=True)
class TrialConfig:
    n: int
    p: float
    trials: int
    seed: int
    matrix_mode: str = "euclidean-points"
    tolerance: float = 1e-9

    def to_dict(self) -> dict:
        return {
            "n": int(self.n),
            "p": float(self.p),
            "trials": int(self.trials),
            "seed": int(self.seed),
            "matrix_mode": self.matrix_mode,
            "tolerance": float(self.tolerance),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrialConfig":
        return cls(
            n=int(d["n"]),
            p=float(d["p"]),
            trials=int(d["trials"]),
            seed=int(d["seed"]),
            matrix_mode=d.get("matrix_mode", "euclidean-points"),
            tolerance=float(d.get("tolerance", 1e-9)),
        )


@dataclass
class VerificationReport:
    property: str
    config: TrialConfig
    trials: int
    violations: int
    worst_defect: float
    witness: dict
    seed: int
    elapsed_ms: float
    version: str = __version__
    matrix: list | None = None  # echoed entries in user-supplied mode

    def to_dict(self) -> dict:
        cfg = self.config.to_dict()
        if self.matrix is not None:
            cfg["matrix"] = self.matrix
        return {
            "property": self.property,
            "config": cfg,
            "trials": int(self.trials),
            "violations": int(self.violations),
            "worst_defect": float(self.worst_defect),
            "witness": self.witness,
            "seed": int(self.seed),
            "elapsed_ms": float(self.elapsed_ms),
            "version": self.version,
        }


def thread_count(explicit: int | None = None) -> int:
    """Worker threads for chunk execution; PQDIST_THREADS caps the default."""
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("PQDIST_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _validate(prop: str, cfg: TrialConfig, matrix) -> None:
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    if cfg.trials < 1:
        raise ValueError("trials must be >= 1")
    if cfg.n < 2:
        raise ValueError("dimension must be >= 2")
    if not (cfg.tolerance > 0):
        raise ValueError("tolerance must be positive")
    if not (cfg.p > 0):
        raise ValueError("exponent p must be positive")
    if prop in ("minorial", "convexity", "projector", "reduction", "w1") and cfg.n < 3:
        raise ValueError(f"property {prop!r} needs dimension >= 3")
    if prop == "convexity" and cfg.p < 2:
        raise ValueError("convexity fuzzing uses powersum in its concave regime, p >= 2")
    if matrix is not None:
        if cfg.matrix_mode != "user-supplied":
            raise ValueError("a fixed matrix requires matrix_mode='user-supplied'")
        if matrix.n != cfg.n:
            raise ValueError(f"matrix size {matrix.n} does not match n={cfg.n}")
    elif cfg.matrix_mode == "user-supplied":
        raise ValueError("matrix_mode='user-supplied' needs a matrix")
    elif prop in ("triangle", "reduction") and cfg.matrix_mode not in MATRIX_MODES:
        raise ValueError(f"unknown matrix mode {cfg.matrix_mode!r}")


def _c2l(v: np.ndarray) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(v, dtype=complex)]


def _l2c(pairs) -> np.ndarray:
    a = np.asarray(pairs, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def _m2l(m: np.ndarray) -> list:
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def _weights_full(w_pairs: np.ndarray, n: int) -> np.ndarray:
    i, j = pair_indices(n)
    full = np.zeros((n, n))
    full[i, j] = w_pairs
    full[j, i] = w_pairs
    return full


@dataclass
class _ChunkOutcome:
    violations: int
    worst: float
    trial: int
    witness: dict = field(default_factory=dict)


def _pick_worst(defects: np.ndarray, chunk: int) -> tuple[int, float, int]:
    local = int(np.argmin(defects))
    return local, float(defects[local]), chunk * CHUNK_TRIALS + local


def _minors(a: np.ndarray, b: np.ndarray, pi, pj) -> np.ndarray:
    return a[:, pi] * b[:, pj] - a[:, pj] * b[:, pi]


def _chunk_triangle(cfg: TrialConfig, entries, chunk: int, count: int) -> _ChunkOutcome:
    rng = trial_rng(cfg.seed, chunk)
    n, p = cfg.n, cfg.p
    if entries is None:
        mats = distance_matrices_batch(rng, count, n, cfg.matrix_mode)
    else:
        mats = np.broadcast_to(entries, (count, n, n))
    x = states_batch(rng, count, n)
    y = states_batch(rng, count, n)
    z = states_batch(rng, count, n)

    pi, pj = pair_indices(n)
    wts = mats[:, pi, pj] ** p

    def dists(a, b):
        m = _minors(a, b, pi, pj)
        s = (wts * (m.real**2 + m.imag**2)).sum(axis=1)
        return np.maximum(s, 0.0) ** (1.0 / p)

    def norm_defect(a, b, c):
        d1, d2, d3 = dists(a, b), dists(a, c), dists(b, c)
        dmax = np.maximum(np.maximum(d1, d2), d3)
        return (d1 + d2 + d3 - 2.0 * dmax) / np.maximum(1.0, dmax), (d1, d2, d3)

    defect, raw_d = norm_defect(x, y, z)
    variant_ortho = np.zeros(count, dtype=bool)
    if n >= 3:
        u, v, w, ok = _orthonormalize_triples(x, y, z)
        defect_o, ortho_d = norm_defect(u, v, w)
        defect_o = np.where(ok, defect_o, np.inf)
        variant_ortho = defect_o < defect
        defect = np.minimum(defect, defect_o)

    violations = int(np.count_nonzero(defect < -cfg.tolerance))
    local, worst, trial = _pick_worst(defect, chunk)
    if variant_ortho[local]:
        triple = (u[local], v[local], w[local])
        dvals = tuple(float(d[local]) for d in ortho_d)
        variant = "orthonormal"
    else:
        triple = (x[local], y[local], z[local])
        dvals = tuple(float(d[local]) for d in raw_d)
        variant = "raw"
    witness = {
        "trial": trial,
        "variant": variant,
        "n": n,
        "p": float(p),
        "matrix": _m2l(mats[local]),
        "x": _c2l(triple[0]),
        "y": _c2l(triple[1]),
        "z": _c2l(triple[2]),
        "distances": list(dvals),
        "defect": worst,
    }
    return _ChunkOutcome(violations, worst, trial, witness)


def _ortho_weight_batch(cfg: TrialConfig, chunk: int, count: int):
    rng = trial_rng(cfg.seed, chunk)
    u, v, w, ok = (
        states_batch(rng, count, cfg.n),
        states_batch(rng, count, cfg.n),
        states_batch(rng, count, cfg.n),
        None,
    )
    u, v, w, ok = _orthonormalize_triples(u, v, w)
    mode = "zero-one" if cfg.matrix_mode == "zero-one" else "uniform"
    a = pair_weights_batch(rng, count, cfg.n, mode)
    return u, v, w, ok, a


def _gathered_weight_sums(a: np.ndarray, n: int):
    _, _, _, pij, pik, pjk = triple_indices(n)
    stacked = np.stack([a[:, pij], a[:, pik], a[:, pjk]])
    return stacked.min(axis=0), stacked.max(axis=0), stacked.sum(axis=0)


def _minor_data(u, v, w, n):
    pi, pj = pair_indices(n)
    ti, tj, tk, _, _, _ = triple_indices(n)
    m_uv = _minors(u, v, pi, pj)
    m_uw = _minors(u, w, pi, pj)
    m_vw = _minors(v, w, pi, pj)
    t = (
        u[:, ti] * (v[:, tj] * w[:, tk] - v[:, tk] * w[:, tj])
        - u[:, tj] * (v[:, ti] * w[:, tk] - v[:, tk] * w[:, ti])
        + u[:, tk] * (v[:, ti] * w[:, tj] - v[:, tj] * w[:, ti])
    )
    sq = lambda m: m.real**2 + m.imag**2
    return sq(m_uv), sq(m_uw), sq(m_vw), sq(t)


def _witness_triple(cfg, a_full, u, v, w, local, trial, extra) -> dict:
    return {
        "trial": trial,
        "n": cfg.n,
        "weights": _m2l(a_full),
        "x": _c2l(u[local]),
        "y": _c2l(v[local]),
        "z": _c2l(w[local]),
        **extra,
    }


def _chunk_minorial(cfg: TrialConfig, entries, chunk: int, count: int) -> _ChunkOutcome:
    u, v, w, ok, a = _ortho_weight_batch(cfg, chunk, count)
    q_uv, _, _, pt = _minor_data(u, v, w, cfg.n)
    mid = (a * q_uv).sum(axis=1)
    amin, amax, _ = _gathered_weight_sums(a, cfg.n)
    lower = mid - (amin * pt).sum(axis=1)
    upper = (amax * pt).sum(axis=1) - mid
    defect = np.where(ok, np.minimum(lower, upper), np.inf)
    violations = int(np.count_nonzero(defect < -cfg.tolerance))
    local, worst, trial = _pick_worst(defect, chunk)
    witness = _witness_triple(
        cfg,
        _weights_full(a[local], cfg.n),
        u,
        v,
        w,
        local,
        trial,
        {"lower": float(lower[local]), "upper": float(upper[local]), "defect": worst},
    )
    return _ChunkOutcome(violations, worst, trial, witness)


def _chunk_convexity(cfg: TrialConfig, entries, chunk: int, count: int) -> _ChunkOutcome:
    u, v, w, ok, a = _ortho_weight_batch(cfg, chunk, count)
    q_uv, q_uw, q_vw, pt = _minor_data(u, v, w, cfg.n)
    g = np.stack([(a * q_uv).sum(axis=1), (a * q_uw).sum(axis=1), (a * q_vw).sum(axis=1)])
    amin, amax, _ = _gathered_weight_sums(a, cfg.n)
    d_max = (amax * pt).sum(axis=1) - g.max(axis=0)
    d_min = g.min(axis=0) - (amin * pt).sum(axis=1)
    _, _, _, pij, pik, pjk = triple_indices(cfg.n)
    inv_p = 1.0 / cfg.p
    pow_t = (a[:, pij] ** inv_p + a[:, pik] ** inv_p + a[:, pjk] ** inv_p) ** cfg.p
    d_pow = (g**inv_p).sum(axis=0) ** cfg.p - (pow_t * pt).sum(axis=1)
    stacked = np.stack([d_max, d_min, d_pow])
    which = stacked.argmin(axis=0)
    defect = np.where(ok, stacked.min(axis=0), np.inf)
    violations = int(np.count_nonzero(defect < -cfg.tolerance))
    local, worst, trial = _pick_worst(defect, chunk)
    fname = ("max", "min", "powersum")[int(which[local])]
    witness = _witness_triple(
        cfg,
        _weights_full(a[local], cfg.n),
        u,
        v,
        w,
        local,
        trial,
        {"fname": fname, "p": float(cfg.p), "defect": worst},
    )
    return _ChunkOutcome(violations, worst, trial, witness)


def _chunk_w1(cfg: TrialConfig, entries, chunk: int, count: int) -> _ChunkOutcome:
    u, v, w, ok, a = _ortho_weight_batch(cfg, chunk, count)
    q_uv, q_uw, q_vw, pt = _minor_data(u, v, w, cfg.n)
    lhs = (a * q_uv).sum(axis=1) + (a * q_uw).sum(axis=1) + (a * q_vw).sum(axis=1)
    _, _, asum = _gathered_weight_sums(a, cfg.n)
    rhs = (asum * pt).sum(axis=1)
    denom = np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)
    residual = np.abs(lhs - rhs) / denom
    defect = np.where(ok, -residual, np.inf)
    violations = int(np.count_nonzero(defect < -cfg.tolerance))
    local, worst, trial = _pick_worst(defect, chunk)
    witness = _witness_triple(
        cfg,
        _weights_full(a[local], cfg.n),
        u,
        v,
        w,
        local,
        trial,
        {"lhs": float(lhs[local]), "rhs": float(rhs[local]), "residual": float(residual[local]), "defect": worst},
    )
    return _ChunkOutcome(violations, worst, trial, witness)


def _chunk_projector(cfg: TrialConfig, entries, chunk: int, count: int) -> _ChunkOutcome:
    rng = trial_rng(cfg.seed, chunk)
    n = cfg.n
    npairs = n * (n - 1) // 2
    b = rng.standard_normal((count, npairs)) + 1j * rng.standard_normal((count, npairs))
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    v = states_batch(rng, count, n)
    mask = rng.random((count, npairs)) < 0.5

    ti, tj, tk, pij, pik, pjk = triple_indices(n)
    t = b[:, pij] * v[:, tk] - b[:, pik] * v[:, tj] + b[:, pjk] * v[:, ti]
    qmask = mask[:, pij] & mask[:, pik] & mask[:, pjk]
    q_sq = np.where(qmask, t.real**2 + t.imag**2, 0.0).sum(axis=1)
    pb = np.where(mask, b, 0.0)
    pb_sq = (pb.real**2 + pb.imag**2).sum(axis=1)
    tp = pb[:, pij] * v[:, tk] - pb[:, pik] * v[:, tj] + pb[:, pjk] * v[:, ti]
    pbw_sq = (tp.real**2 + tp.imag**2).sum(axis=1)
    outer = pb_sq - q_sq  # |v| = 1
    inner = pbw_sq - q_sq
    defect = np.minimum(outer, inner)
    violations = int(np.count_nonzero(defect < -cfg.tolerance))
    local, worst, trial = _pick_worst(defect, chunk)
    pi_, pj_ = pair_indices(n)
    pairs = [[int(pi_[k]), int(pj_[k])] for k in range(npairs) if mask[local, k]]
    witness = {
        "trial": trial,
        "n": n,
        "pairs": pairs,
        "bivector": _c2l(b[local]),
        "v": _c2l(v[local]),
        "outer": float(outer[local]),
        "inner": float(inner[local]),
        "defect": worst,
    }
    return _ChunkOutcome(violations, worst, trial, witness)


def _reduction_defect(report, tol: float) -> float:
    d = min(
        report.spectral_margin,
        -tol * (report.hodge_residual / HODGE_RESIDUAL_TOL),
        -tol * (report.mu_residual / MU_CONSISTENCY_TOL),
    )
    if report.spectral_ok != report.subspace_fuzz_ok:
        d = min(d, -2.0 * tol)
    return float(d)


def _chunk_reduction(cfg: TrialConfig, entries, chunk: int, count: int) -> _ChunkOutcome:
    rng = trial_rng(cfg.seed, chunk)
    n = cfg.n
    if entries is None:
        mats = distance_matrices_batch(rng, count, n, cfg.matrix_mode)
    else:
        mats = np.broadcast_to(entries, (count, n, n))
    x = states_batch(rng, count, n)
    y = states_batch(rng, count, n)
    z = states_batch(rng, count, n)
    defects = np.empty(count)
    reports = []
    for t in range(count):
        trial = chunk * CHUNK_TRIALS + t
        rep = check_orthonormal_reduction(
            mats[t],
            cfg.p,
            x[t],
            y[t],
            z[t],
            inner_seed=cfg.seed,
            inner_stream=_REDUCTION_STREAM_BASE + trial,
            tol=cfg.tolerance,
        )
        defects[t] = _reduction_defect(rep, cfg.tolerance)
        reports.append(rep)
    violations = int(np.count_nonzero(defects < -cfg.tolerance))
    local, worst, trial = _pick_worst(defects, chunk)
    rep = reports[local]
    witness = {
        "trial": trial,
        "n": n,
        "p": float(cfg.p),
        "matrix": _m2l(mats[local]),
        "x": _c2l(x[local]),
        "y": _c2l(y[local]),
        "z": _c2l(z[local]),
        "inner_seed": int(cfg.seed),
        "inner_stream": _REDUCTION_STREAM_BASE + trial,
        "tolerance": float(cfg.tolerance),
        "hodge_residual": rep.hodge_residual,
        "mu_residual": rep.mu_residual,
        "spectral_margin": rep.spectral_margin,
        "verdict": bool(rep.verdict),
        "defect": worst,
    }
    return _ChunkOutcome(violations, worst, trial, witness)


_KERNELS = {
    "triangle": _chunk_triangle,
    "minorial": _chunk_minorial,
    "convexity": _chunk_convexity,
    "projector": _chunk_projector,
    "reduction": _chunk_reduction,
    "w1": _chunk_w1,
}


def run_fuzz(
    prop: str,
    cfg: TrialConfig,
    *,
    matrix: DistanceMatrix | None = None,
    threads: int | None = None,
) -> VerificationReport:
    """Run a fuzz campaign; identical (property, config) pairs give identical
    reports apart from the elapsed-time field."""
    _validate(prop, cfg, matrix)
    entries = matrix.entries if matrix is not None else None
    kernel = _KERNELS[prop]
    nchunks = (cfg.trials + CHUNK_TRIALS - 1) // CHUNK_TRIALS
    counts = [min(CHUNK_TRIALS, cfg.trials - c * CHUNK_TRIALS) for c in range(nchunks)]

    start = time.perf_counter()
    workers = min(thread_count(threads), nchunks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda c: kernel(cfg, entries, c, counts[c]), range(nchunks)))
    else:
        outcomes = [kernel(cfg, entries, c, counts[c]) for c in range(nchunks)]

    violations = sum(o.violations for o in outcomes)
    best = min(outcomes, key=lambda o: (o.worst, o.trial))
    elapsed_ms = (time.perf_counter() - start) * 1000.0

    return VerificationReport(
        property=prop,
        config=cfg,
        trials=cfg.trials,
        violations=violations,
        worst_defect=best.worst,
        witness=best.witness,
        seed=cfg.seed,
        elapsed_ms=elapsed_ms,
        matrix=_m2l(entries) if entries is not None else None,
    )


def reevaluate_witness(prop: str, witness: dict) -> float:
    """Recompute a witness defect from its serialized inputs alone."""
    if prop == "triangle":
        d, dmax = triangle_defect(
            np.asarray(witness["matrix"], dtype=float),
            float(witness["p"]),
            _l2c(witness["x"]),
            _l2c(witness["y"]),
            _l2c(witness["z"]),
        )
        return d / max(1.0, dmax)
    if prop == "minorial":
        d = check_minorial(
            np.asarray(witness["weights"], dtype=float),
            _l2c(witness["x"]),
            _l2c(witness["y"]),
            _l2c(witness["z"]),
        )
        return min(d.lower, d.upper)
    if prop == "convexity":
        return check_convexity(
            witness["fname"],
            np.asarray(witness["weights"], dtype=float),
            _l2c(witness["x"]),
            _l2c(witness["y"]),
            _l2c(witness["z"]),
            p=float(witness["p"]),
        )
    if prop == "w1":
        return -check_generator_identity_w1(
            np.asarray(witness["weights"], dtype=float),
            _l2c(witness["x"]),
            _l2c(witness["y"]),
            _l2c(witness["z"]),
        )
    if prop == "projector":
        coeffs = _l2c(witness["bivector"])
        b = Bivector(int(witness["n"]), coeffs)
        d = check_projector_inequality(
            [tuple(pr) for pr in witness["pairs"]], b, _l2c(witness["v"])
        )
        return min(d.outer, d.inner)
    if prop == "reduction":
        rep = check_orthonormal_reduction(
            np.asarray(witness["matrix"], dtype=float),
            float(witness["p"]),
            _l2c(witness["x"]),
            _l2c(witness["y"]),
            _l2c(witness["z"]),
            inner_seed=int(witness["inner_seed"]),
            inner_stream=int(witness["inner_stream"]),
            tol=float(witness["tolerance"]),
        )
        return _reduction_defect(rep, float(witness["tolerance"]))
    raise ValueError(f"unknown property {prop!r}")
