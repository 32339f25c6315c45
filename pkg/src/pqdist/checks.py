"""Single-instance verifiers for the inequalities behind the induced metrics.

Each function evaluates both sides of one inequality (or identity) on concrete
inputs and returns signed defects: a nonnegative defect means the inequality
held, so fuzz campaigns only have to watch for values below -tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exterior import (
    ORTHO_INPUT_TOL,
    Bivector,
    gram_deviation,
    hodge_basis,
    gram_schmidt,
    pair_indices,
    pair_positions,
    triple_indices,
    wedge2,
    wedge3,
    wedge_bv,
)
from .metric import (
    DistanceMatrix,
    apply_pair_weights,
    dp_from_weights,
    restricted_form_eigen,
)
from .sampling import trial_rng

__all__ = [
    "CONVEXITY_SHAPES",
    "MinorialDefects",
    "ProjectorDefects",
    "ReductionReport",
    "Counterexample",
    "ensure_orthonormal_triple",
    "check_symmetric_weights",
    "check_minorial",
    "check_projector_inequality",
    "check_convexity",
    "check_generator_identity_w1",
    "check_orthonormal_reduction",
    "counterexample_p_lt_2",
    "triangle_defect",
]

HODGE_RESIDUAL_TOL = 1e-10
MU_CONSISTENCY_TOL = 1e-9


class MinorialDefects(NamedTuple):
    lower: float
    upper: float


class ProjectorDefects(NamedTuple):
    outer: float  # |PB|^2 |v|^2 - |Q(B ^ v)|^2
    inner: float  # |P(B) ^ v|^2 - |Q(B ^ v)|^2


def ensure_orthonormal_triple(x, y, z, *, tol: float = ORTHO_INPUT_TOL):
    """Gate a triple on orthonormality, then apply one re-orthogonalization pass.

    Inputs beyond ``tol`` Gram deviation are rejected rather than repaired;
    accepted inputs get ~1e-16 polish so downstream checks see exact
    hypotheses.
    """
    vs = [np.asarray(v, dtype=complex) for v in (x, y, z)]
    if gram_deviation(vs) > tol:
        raise ValueError("triple is not orthonormal")
    u = vs[0] / np.linalg.norm(vs[0])
    v = vs[1] - np.vdot(u, vs[1]) * u
    v = v / np.linalg.norm(v)
    w = vs[2] - np.vdot(u, vs[2]) * u
    w = w - np.vdot(v, w) * v
    w = w / np.linalg.norm(w)
    return u, v, w


def check_symmetric_weights(a) -> np.ndarray:
    w = np.asarray(a, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValueError(f"expected a square weight matrix, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if np.any(w != w.T):
        raise ValueError("weights must be symmetric")
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    return w


def _pair_sum(a: np.ndarray, x, y) -> float:
    i, j = pair_indices(x.size)
    b = wedge2(x, y)
    return float(np.sum(a[i, j] * (b.coeffs.real**2 + b.coeffs.imag**2)))


def _triple_weight_sums(a: np.ndarray, n: int):
    ti, tj, tk, _, _, _ = triple_indices(n)
    stacked = np.stack([a[ti, tj], a[ti, tk], a[tj, tk]])
    return stacked.min(axis=0), stacked.max(axis=0), stacked.sum(axis=0), stacked


def check_minorial(a, x, y, z) -> MinorialDefects:
    """Two-sided sandwich of a weighted 2x2-minor sum by 3x3-minor sums.

    For orthonormal {x, y, z} and symmetric nonnegative weights a, the
    pair-weighted minor sum of (x, y) sits between the min-weighted and
    max-weighted squared 3x3 minors; returns (middle - lower, upper - middle).
    """
    w = check_symmetric_weights(a)
    x, y, z = ensure_orthonormal_triple(x, y, z)
    if w.shape[0] != x.size:
        raise ValueError("weight matrix does not match the state dimension")
    mid = _pair_sum(w, x, y)
    t = wedge3(x, y, z)
    pt = t.coeffs.real**2 + t.coeffs.imag**2
    amin, amax, _, _ = _triple_weight_sums(w, x.size)
    return MinorialDefects(mid - float(np.sum(amin * pt)), float(np.sum(amax * pt)) - mid)


def _normalize_pairs(s, n: int):
    pairs = []
    for pr in s:
        i, j = int(pr[0]), int(pr[1])
        if i == j:
            raise ValueError(f"pair ({i},{j}) repeats an index")
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"pair ({i},{j}) is out of range for dimension {n}")
        pairs.append((min(i, j), max(i, j)))
    return sorted(set(pairs))


def check_projector_inequality(s, b: Bivector, v) -> ProjectorDefects:
    """Masked wedge bound: |Q(B ^ v)|^2 <= |P(B) ^ v|^2 <= |PB|^2 |v|^2.

    P keeps the bivector coefficients of the pairs in ``s``; Q keeps the
    trivector coefficients whose three pairs all lie in ``s``.  Holds for all
    (also non-simple) bivectors B; returns both gaps.
    """
    n = b.n
    vv = np.asarray(v, dtype=complex)
    if vv.size != n:
        raise ValueError(f"dimension mismatch: {n} vs {vv.size}")
    pairs = _normalize_pairs(s, n)
    pos = pair_positions(n)
    mask = np.zeros(n * (n - 1) // 2, dtype=bool)
    for i, j in pairs:
        mask[pos[i, j]] = True

    pb = Bivector(n, np.where(mask, b.coeffs, 0.0))
    t_full = wedge_bv(b, vv)
    _, _, _, pij, pik, pjk = triple_indices(n)
    qmask = mask[pij] & mask[pik] & mask[pjk]
    q_normsq = float(np.sum(np.where(qmask, np.abs(t_full.coeffs) ** 2, 0.0)))
    pb_wedge = wedge_bv(pb, vv)
    vnormsq = float(np.linalg.norm(vv) ** 2)
    return ProjectorDefects(
        pb.norm_sq() * vnormsq - q_normsq,
        pb_wedge.norm_sq() - q_normsq,
    )


# fname -> (is_convex, evaluator on stacked weight triples / on the 3-vector g)
CONVEXITY_SHAPES = ("max", "min", "sum", "powersum")


def _fvalue(fname: str, u: np.ndarray, p: float | None) -> np.ndarray:
    if fname == "max":
        return u.max(axis=0)
    if fname == "min":
        return u.min(axis=0)
    if fname == "sum":
        return u.sum(axis=0)
    if fname == "powersum":
        return (u ** (1.0 / p)).sum(axis=0) ** p
    raise ValueError(f"unknown fname {fname!r}; expected one of {CONVEXITY_SHAPES}")


def check_convexity(fname: str, a, x, y, z, p: float | None = None) -> float:
    """Defect of the symmetric convexity bound for f in {max, min, sum, powersum}.

    Compares f of the three pair-weighted minor sums against the
    |T|^2-weighted average of f over the weight triples.  The sign is chosen
    so a nonnegative value means the bound held: average - f(g) for convex f
    (max), f(g) - average for concave f (min, sum, powersum with p >= 2).
    """
    if fname not in CONVEXITY_SHAPES:
        raise ValueError(f"unknown fname {fname!r}; expected one of {CONVEXITY_SHAPES}")
    if fname == "powersum":
        if p is None:
            raise ValueError("powersum needs the exponent p")
        if p < 2:
            raise ValueError("powersum is used in its concave regime, p >= 2")
    w = check_symmetric_weights(a)
    x, y, z = ensure_orthonormal_triple(x, y, z)
    if w.shape[0] != x.size:
        raise ValueError("weight matrix does not match the state dimension")

    g = np.array([_pair_sum(w, x, y), _pair_sum(w, x, z), _pair_sum(w, y, z)])
    t = wedge3(x, y, z)
    pt = t.coeffs.real**2 + t.coeffs.imag**2
    _, _, _, stacked = _triple_weight_sums(w, x.size)
    avg = float(np.sum(_fvalue(fname, stacked, p) * pt))
    fg = float(_fvalue(fname, g.reshape(3, 1), p)[0])
    if fname == "max":
        return avg - fg
    return fg - avg


def check_generator_identity_w1(a, x, y, z) -> float:
    """Relative residual of the exact identity: the three pair-weighted minor
    sums add up to the (a_ij + a_ik + a_jk)-weighted squared 3x3 minors."""
    w = check_symmetric_weights(a)
    x, y, z = ensure_orthonormal_triple(x, y, z)
    if w.shape[0] != x.size:
        raise ValueError("weight matrix does not match the state dimension")
    lhs = _pair_sum(w, x, y) + _pair_sum(w, x, z) + _pair_sum(w, y, z)
    t = wedge3(x, y, z)
    pt = t.coeffs.real**2 + t.coeffs.imag**2
    _, _, asum, _ = _triple_weight_sums(w, x.size)
    rhs = float(np.sum(asum * pt))
    denom = max(abs(lhs), abs(rhs))
    return 0.0 if denom == 0.0 else abs(lhs - rhs) / denom


def triangle_defect(entries, p: float, x, y, z) -> tuple[float, float]:
    """Signed triangle slack for one triple: (sum - 2 max of the three
    distances, the largest distance).  The first value is the minimum over
    the three cyclic defects."""
    dxy = dp_from_weights(entries, p, x, y)
    dxz = dp_from_weights(entries, p, x, z)
    dyz = dp_from_weights(entries, p, y, z)
    dmax = max(dxy, dxz, dyz)
    return dxy + dxz + dyz - 2.0 * dmax, dmax


@dataclass(frozen=True)
class ReductionReport:
    """Outcome of collapsing a triple to a 3-dim subspace and its wedge form."""

    mus: tuple[float, float, float]
    hodge_residual: float
    mu_residual: float
    spectral_margin: float  # (sum - 2 max) of mu^(2/p), relative to max(1, sum)
    mu_consistent: bool
    spectral_ok: bool
    subspace_fuzz_ok: bool

    @property
    def verdict(self) -> bool:
        return self.mu_consistent and (self.spectral_ok == self.subspace_fuzz_ok)


def check_orthonormal_reduction(
    e,
    p: float,
    x,
    y,
    z,
    *,
    subspace_samples: int = 16,
    inner_seed: int = 0,
    inner_stream: int = 0,
    tol: float = 1e-9,
) -> ReductionReport:
    """Cross-validate the reduction of arbitrary triples to orthonormal ones.

    Any three unit vectors are completed to an orthonormal basis of a 3-dim
    subspace V; the pair-weight form restricted to the wedge square of V is
    diagonalized, its eigen-bivectors are realized as wedges of an
    orthonormal frame, and the sqrt-eigenvalues mu are checked in two ways:

    * mu-consistency: the weighted norms of the frame wedges reproduce mu;
    * equivalence: 2 max mu^(2/p) <= sum mu^(2/p) agrees with direct triangle
      checks over random orthonormal triples drawn inside V.
    """
    entries = e.entries if isinstance(e, DistanceMatrix) else np.asarray(e, dtype=float)
    vs = [np.asarray(v, dtype=complex) for v in (x, y, z)]
    basis = gram_schmidt(vs, complete_to=3)
    mus, eigen_bs = restricted_form_eigen(entries, p, basis)
    frame = hodge_basis(*eigen_bs, basis)

    frame_wedges = [
        wedge2(frame[1], frame[2]),
        wedge2(frame[2], frame[0]),
        wedge2(frame[0], frame[1]),
    ]
    hodge_residual = max(
        float(np.abs(frame_wedges[0].coeffs - eigen_bs[0].coeffs).max()),
        float(np.abs(frame_wedges[1].coeffs - eigen_bs[1].coeffs).max()),
        float(np.abs(frame_wedges[2].coeffs - eigen_bs[2].coeffs).max()),
    )
    mu_residual = 0.0
    for mu, fw in zip(mus, frame_wedges):
        got = apply_pair_weights(entries, p / 2.0, fw).norm()
        mu_residual = max(mu_residual, abs(got - mu) / max(1.0, abs(mu)))

    vals = np.asarray(mus, dtype=float) ** (2.0 / p)
    total = float(vals.sum())
    spectral_margin = (total - 2.0 * float(vals.max())) / max(1.0, total)
    spectral_ok = spectral_margin >= -tol

    rng = trial_rng(inner_seed, inner_stream)
    vmat = np.stack(basis)
    subspace_fuzz_ok = True
    for _ in range(subspace_samples):
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        q, _ = np.linalg.qr(g)
        triple = q.T @ vmat
        defect, dmax = triangle_defect(entries, p, triple[0], triple[1], triple[2])
        if defect < -tol * max(1.0, dmax):
            subspace_fuzz_ok = False
            break

    return ReductionReport(
        mus=(mus.mu1, mus.mu2, mus.mu3),
        hodge_residual=hodge_residual,
        mu_residual=mu_residual,
        spectral_margin=spectral_margin,
        mu_consistent=(hodge_residual <= HODGE_RESIDUAL_TOL and mu_residual <= MU_CONSISTENCY_TOL),
        spectral_ok=spectral_ok,
        subspace_fuzz_ok=subspace_fuzz_ok,
    )


@dataclass(frozen=True)
class Counterexample:
    """A triple violating the triangle inequality for an exponent below 2."""

    p: float
    e12: float
    theta: float
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    d_xy: float
    d_xz: float
    d_yz: float

    @property
    def margin(self) -> float:
        return self.d_xy - self.d_xz - self.d_yz


def counterexample_p_lt_2(p: float, e12: float, theta: float | None = None) -> Counterexample:
    """Explicit triangle-inequality violation in C^2 for any exponent p < 2.

    With x = cos(t) e1 + sin(t) e2, y = cos(t) e1 - sin(t) e2 and z = e1, the
    induced distances are E12 sin(2t)^(2/p) and twice E12 sin(t)^(2/p); any t
    with cos(t) > 2^(p/2 - 1) violates the inequality.  By default t solves
    cos(t) = (1 + 2^(p/2-1)) / 2, the midpoint of the feasible interval.
    """
    if not (0.0 < p < 2.0):
        raise ValueError("the construction needs 0 < p < 2; for p >= 2 the map is a metric")
    if not (e12 > 0):
        raise ValueError("the off-diagonal entry must be positive")
    threshold = 2.0 ** (p / 2.0 - 1.0)
    if theta is None:
        theta = float(np.arccos((1.0 + threshold) / 2.0))
    else:
        theta = float(theta)
        if not (0.0 < theta < np.pi / 2.0) or not (np.cos(theta) > threshold):
            raise ValueError(
                f"theta must lie in (0, pi/2) with cos(theta) > {threshold!r} to violate the inequality"
            )
    c, s = np.cos(theta), np.sin(theta)
    x = np.array([c, s], dtype=complex)
    y = np.array([c, -s], dtype=complex)
    z = np.array([1.0, 0.0], dtype=complex)
    entries = np.array([[0.0, e12], [e12, 0.0]])
    return Counterexample(
        p=p,
        e12=float(e12),
        theta=theta,
        x=x,
        y=y,
        z=z,
        d_xy=dp_from_weights(entries, p, x, y),
        d_xz=dp_from_weights(entries, p, x, z),
        d_yz=dp_from_weights(entries, p, y, z),
    )
