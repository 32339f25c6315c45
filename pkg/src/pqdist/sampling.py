"""Random generators for states, orthonormal triples, and weight systems.

Randomness is organized as counter-based streams: ``trial_rng(seed, stream)``
builds an independent Philox generator keyed by the pair, so work can be
split across chunks/threads while staying bit-reproducible for a fixed seed.
"""

from __future__ import annotations

import numpy as np

from .metric import DistanceMatrix, shortest_path_closure

__all__ = [
    "MATRIX_MODES",
    "trial_rng",
    "sample_pure_state",
    "sample_orthonormal_triple",
    "sample_distance_matrix",
    "sample_symmetric_weights",
    "sample_unit_bivector_coeffs",
    "states_batch",
    "orthonormal_triples_batch",
    "distance_matrices_batch",
    "pair_weights_batch",
]

MATRIX_MODES = ("euclidean-points", "repaired-random", "zero-one")
_MASK64 = (1 << 64) - 1


def trial_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for (seed, stream); same pair, same bits."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_pure_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector with the unitarily invariant distribution on the sphere of C^n."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def sample_orthonormal_triple(n: int, rng: np.random.Generator):
    """Three Gaussian samples orthonormalized; Gram matrix is the identity to ~1e-12."""
    if n < 3:
        raise ValueError("orthonormal triples need dimension >= 3")
    from .exterior import gram_schmidt

    for _ in range(100):
        vs = [sample_pure_state(n, rng) for _ in range(3)]
        basis = gram_schmidt(vs)
        if len(basis) == 3:
            return basis[0], basis[1], basis[2]
    raise RuntimeError("failed to draw an independent triple")


def sample_distance_matrix(n: int, mode: str, rng: np.random.Generator) -> DistanceMatrix:
    """Random distance matrix in one of three modes.

    euclidean-points: pairwise distances of n uniform points in [0,1]^3.
    repaired-random:  symmetric uniform (0,1] weights repaired to a metric by
                      shortest-path closure.
    zero-one:         entries in {1, 2} from a random pair subset (two-valued
                      matrices always satisfy the triangle inequality).
    """
    return DistanceMatrix.from_array(distance_matrices_batch(rng, 1, n, mode)[0])


def distance_matrices_batch(rng: np.random.Generator, count: int, n: int, mode: str) -> np.ndarray:
    if n < 2:
        raise ValueError("distance matrices need size >= 2")
    if mode == "euclidean-points":
        pts = rng.random((count, n, 3))
        diff = pts[:, :, None, :] - pts[:, None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))
    if mode == "repaired-random":
        iu, ju = np.triu_indices(n, k=1)
        d = np.zeros((count, n, n))
        d[:, iu, ju] = 1.0 - rng.random((count, iu.size))  # uniform on (0, 1]
        d[:, ju, iu] = d[:, iu, ju]
        for k in range(n):
            np.minimum(d, d[:, :, k, None] + d[:, None, k, :], out=d)
        return d
    if mode == "zero-one":
        iu, ju = np.triu_indices(n, k=1)
        vals = np.where(rng.random((count, iu.size)) < 0.5, 1.0, 2.0)
        d = np.zeros((count, n, n))
        d[:, iu, ju] = vals
        d[:, ju, iu] = vals
        return d
    raise ValueError(f"unknown matrix mode {mode!r}; expected one of {MATRIX_MODES}")


def sample_symmetric_weights(n: int, rng: np.random.Generator, mode: str = "uniform") -> np.ndarray:
    """Symmetric nonnegative weight matrix with zero diagonal."""
    w = pair_weights_batch(rng, 1, n, mode)[0]
    iu, ju = np.triu_indices(n, k=1)
    full = np.zeros((n, n))
    full[iu, ju] = w
    full[ju, iu] = w
    return full


def pair_weights_batch(rng: np.random.Generator, count: int, n: int, mode: str) -> np.ndarray:
    """Weights over lexicographic pairs: uniform [0,1) or zero-one indicators."""
    npairs = n * (n - 1) // 2
    if mode == "zero-one":
        return (rng.random((count, npairs)) < 0.5).astype(float)
    if mode == "uniform":
        return rng.random((count, npairs))
    raise ValueError(f"unknown weight mode {mode!r}; expected 'uniform' or 'zero-one'")


def sample_unit_bivector_coeffs(n: int, rng: np.random.Generator) -> np.ndarray:
    """Unit-norm Gaussian coefficient vector over pairs (generically non-simple)."""
    npairs = n * (n - 1) // 2
    c = rng.standard_normal(npairs) + 1j * rng.standard_normal(npairs)
    return c / np.linalg.norm(c)


def states_batch(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def orthonormal_triples_batch(rng: np.random.Generator, count: int, n: int):
    """Batched two-pass Gram-Schmidt of three Gaussian samples.

    Returns (u, v, w, ok); rows with a residual below 1e-8 during
    orthonormalization (measure-zero for Gaussian draws) are flagged not-ok
    rather than repaired, keeping the draw count fixed.
    """
    if n < 3:
        raise ValueError("orthonormal triples need dimension >= 3")
    x = states_batch(rng, count, n)
    y = states_batch(rng, count, n)
    z = states_batch(rng, count, n)
    return _orthonormalize_triples(x, y, z)


def _orthonormalize_triples(x: np.ndarray, y: np.ndarray, z: np.ndarray):
    def proj_coeff(q, v):
        return (q.conj() * v).sum(axis=1, keepdims=True)

    ok = np.ones(x.shape[0], dtype=bool)

    nx = np.linalg.norm(x, axis=1, keepdims=True)
    ok &= nx[:, 0] > 1e-8
    u = x / np.where(nx == 0, 1.0, nx)

    yv = y.copy()
    for _ in range(2):
        yv = yv - proj_coeff(u, yv) * u
    ny = np.linalg.norm(yv, axis=1, keepdims=True)
    ok &= ny[:, 0] > 1e-8
    v = yv / np.where(ny == 0, 1.0, ny)

    zv = z.copy()
    for _ in range(2):
        zv = zv - proj_coeff(u, zv) * u
        zv = zv - proj_coeff(v, zv) * v
    nz = np.linalg.norm(zv, axis=1, keepdims=True)
    ok &= nz[:, 0] > 1e-8
    w = zv / np.where(nz == 0, 1.0, nz)
    return u, v, w, ok
