"""Complex exterior-algebra primitives.

Vectors are 1-D complex numpy arrays.  Bivectors and trivectors store one
complex coefficient per lexicographically ordered index pair / triple; the
coefficient attached to a wedge of vectors is the corresponding 2x2 or 3x3
minor of the stacked component matrix.  With this convention the squared
coefficient sums obey the Lagrange identity and, for orthonormal families,
the Cauchy-Binet normalization (the squared minors sum to 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "Bivector",
    "Trivector",
    "pair_indices",
    "pair_positions",
    "triple_indices",
    "inner",
    "minors2",
    "wedge2",
    "wedge3",
    "wedge_bv",
    "cross3",
    "gram_schmidt",
    "interior_product",
    "hodge_basis",
    "gram_matrix",
    "gram_deviation",
]

# Gate for orthonormality of *inputs*; outputs of the constructions below are
# tested against the tighter 1e-10 budget.
ORTHO_INPUT_TOL = 1e-8
DEFLATION_TOL = 1e-10


@lru_cache(maxsize=None)
def pair_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Index arrays (i, j) over pairs i < j in lexicographic order."""
    i, j = np.triu_indices(n, k=1)
    i.setflags(write=False)
    j.setflags(write=False)
    return i, j


@lru_cache(maxsize=None)
def pair_positions(n: int) -> np.ndarray:
    """n x n lookup table mapping an unordered pair to its flat coefficient slot."""
    pos = np.full((n, n), -1, dtype=np.intp)
    i, j = pair_indices(n)
    pos[i, j] = np.arange(i.size)
    pos[j, i] = pos[i, j]
    pos.setflags(write=False)
    return pos


@lru_cache(maxsize=None)
def triple_indices(n: int):
    """Index arrays over triples i < j < k, plus the flat slots of their pairs.

    Returns (ti, tj, tk, p_ij, p_ik, p_jk) where p_ab indexes into the
    lexicographic pair order of ``pair_indices(n)``.
    """
    combos = np.array(list(combinations(range(n), 3)), dtype=np.intp).reshape(-1, 3)
    ti, tj, tk = combos[:, 0].copy(), combos[:, 1].copy(), combos[:, 2].copy()
    pos = pair_positions(n)
    out = (ti, tj, tk, pos[ti, tj], pos[ti, tk], pos[tj, tk])
    for arr in out:
        arr.setflags(write=False)
    return out


def _vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    return v


def _pair_of_vectors(x, y) -> tuple[np.ndarray, np.ndarray]:
    xv, yv = _vector(x), _vector(y)
    if xv.size != yv.size:
        raise ValueError(f"dimension mismatch: {xv.size} vs {yv.size}")
    return xv, yv


@dataclass(frozen=True)
class Bivector:
    """Antisymmetric rank-2 coefficients over pairs i < j (Plucker order 2)."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.coeffs, dtype=complex))
        if c.shape != (self.n * (self.n - 1) // 2,):
            raise ValueError(
                f"bivector in dimension {self.n} needs {self.n*(self.n-1)//2} "
                f"coefficients, got shape {c.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def norm_sq(self) -> float:
        return float(np.sum(self.coeffs.real**2 + self.coeffs.imag**2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))

    def as_matrix(self) -> np.ndarray:
        """Full antisymmetric n x n coefficient matrix."""
        i, j = pair_indices(self.n)
        m = np.zeros((self.n, self.n), dtype=complex)
        m[i, j] = self.coeffs
        m[j, i] = -self.coeffs
        return m


@dataclass(frozen=True)
class Trivector:
    """Antisymmetric rank-3 coefficients over triples i < j < k."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.coeffs, dtype=complex))
        want = self.n * (self.n - 1) * (self.n - 2) // 6
        if c.shape != (want,):
            raise ValueError(
                f"trivector in dimension {self.n} needs {want} coefficients, "
                f"got shape {c.shape}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def norm_sq(self) -> float:
        return float(np.sum(self.coeffs.real**2 + self.coeffs.imag**2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_sq()))


def inner(x, y) -> complex:
    """Hermitian inner product, conjugate-linear in the first argument."""
    xv, yv = _pair_of_vectors(x, y)
    return complex(np.vdot(xv, yv))


def minors2(x: np.ndarray, y: np.ndarray, i, j) -> np.ndarray:
    """2x2 minors x_i y_j - x_j y_i over the index arrays (i, j).

    Evaluated from standalone real-part products so that swapping x and y
    negates every coefficient *bitwise* (complex a*b is not bit-commutative
    under FMA contraction); in particular minors2(x, x, ...) is exactly zero.
    """
    xr, xi = x.real, x.imag
    yr, yi = y.real, y.imag
    re = (xr[i] * yr[j] - xr[j] * yr[i]) - (xi[i] * yi[j] - xi[j] * yi[i])
    im = (xr[i] * yi[j] + xi[i] * yr[j]) - (xr[j] * yi[i] + xi[j] * yr[i])
    return re + 1j * im


def wedge2(x, y) -> Bivector:
    """Wedge of two vectors: coefficients are the 2x2 minors x_i y_j - x_j y_i."""
    xv, yv = _pair_of_vectors(x, y)
    n = xv.size
    if n < 2:
        raise ValueError("wedge2 needs dimension >= 2")
    i, j = pair_indices(n)
    return Bivector(n, minors2(xv, yv, i, j))


def wedge3(x, y, z) -> Trivector:
    """Wedge of three vectors: coefficients are the 3x3 minors of the stacked rows."""
    xv, yv = _pair_of_vectors(x, y)
    zv = _vector(z)
    if zv.size != xv.size:
        raise ValueError(f"dimension mismatch: {xv.size} vs {zv.size}")
    n = xv.size
    if n < 3:
        raise ValueError("wedge3 needs dimension >= 3")
    ti, tj, tk, _, _, _ = triple_indices(n)
    t = (
        xv[ti] * (yv[tj] * zv[tk] - yv[tk] * zv[tj])
        - xv[tj] * (yv[ti] * zv[tk] - yv[tk] * zv[ti])
        + xv[tk] * (yv[ti] * zv[tj] - yv[tj] * zv[ti])
    )
    return Trivector(n, t)


def wedge_bv(b: Bivector, v) -> Trivector:
    """Wedge of a (possibly non-simple) bivector with a vector.

    Coefficient on (i, j, k):  B_ij v_k - B_ik v_j + B_jk v_i.
    """
    vv = _vector(v)
    if vv.size != b.n:
        raise ValueError(f"dimension mismatch: {b.n} vs {vv.size}")
    if b.n < 3:
        raise ValueError("wedge_bv needs dimension >= 3")
    ti, tj, tk, pij, pik, pjk = triple_indices(b.n)
    c = b.coeffs
    return Trivector(b.n, c[pij] * vv[tk] - c[pik] * vv[tj] + c[pjk] * vv[ti])


def cross3(x, y) -> np.ndarray:
    """Bilinear cross product on C^3 (no conjugation)."""
    xv, yv = _pair_of_vectors(x, y)
    if xv.size != 3:
        raise ValueError("cross3 is defined on C^3 only")
    return np.array(
        [
            xv[1] * yv[2] - xv[2] * yv[1],
            xv[2] * yv[0] - xv[0] * yv[2],
            xv[0] * yv[1] - xv[1] * yv[0],
        ]
    )


def gram_matrix(vectors) -> np.ndarray:
    vs = [_vector(v) for v in vectors]
    m = len(vs)
    g = np.empty((m, m), dtype=complex)
    for a in range(m):
        for b in range(m):
            g[a, b] = np.vdot(vs[a], vs[b])
    return g


def gram_deviation(vectors) -> float:
    """Max absolute deviation of the Gram matrix from the identity."""
    g = gram_matrix(vectors)
    return float(np.abs(g - np.eye(g.shape[0])).max())


def _project_out(u: np.ndarray, basis: list[np.ndarray]) -> np.ndarray:
    # Two sequential re-projection passes for stability near dependence.
    for _ in range(2):
        for q in basis:
            u = u - np.vdot(q, u) * q
    return u


def gram_schmidt(vectors, complete_to: int | None = None, *, drop_tol: float = DEFLATION_TOL):
    """Orthonormalize a list of vectors (modified Gram-Schmidt, two passes).

    Vectors whose residual after projection falls below ``drop_tol`` are
    dropped, so dependent inputs yield a smaller output.  With
    ``complete_to=k`` the basis is padded using whichever canonical basis
    vectors have the largest residual, until it has k elements.
    """
    vs = [_vector(v) for v in vectors]
    if not vs:
        raise ValueError("gram_schmidt needs at least one vector")
    n = vs[0].size
    for v in vs:
        if v.size != n:
            raise ValueError("gram_schmidt inputs must share one dimension")

    basis: list[np.ndarray] = []
    for v in vs:
        u = _project_out(v.copy(), basis)
        nrm = np.linalg.norm(u)
        if nrm >= drop_tol:
            basis.append(u / nrm)

    if complete_to is not None:
        if complete_to > n:
            raise ValueError(f"cannot span {complete_to} dimensions inside C^{n}")
        while len(basis) < complete_to:
            best, best_norm = None, -1.0
            for k in range(n):
                e = np.zeros(n, dtype=complex)
                e[k] = 1.0
                u = _project_out(e, basis)
                nrm = np.linalg.norm(u)
                if nrm > best_norm:
                    best, best_norm = u, nrm
            if best is None or best_norm < drop_tol:
                raise ValueError("basis completion failed")
            basis.append(best / best_norm)
    return basis


def interior_product(w, omega):
    """Contraction of a multivector by a vector, lowering the grade by one.

    On a simple product the contraction expands as the alternating sum of
    <w|v_i> times the product with v_i removed; in coefficients this is
    u_j = sum_i conj(w_i) B_ij for a bivector and C_jk = sum_i conj(w_i) T_ijk
    for a trivector.  Satisfies |w ^ O|^2 = |w|^2 |O|^2 - |w . O|^2.
    """
    wv = _vector(w)
    cw = np.conj(wv)
    if isinstance(omega, Bivector):
        if omega.n != wv.size:
            raise ValueError(f"dimension mismatch: {omega.n} vs {wv.size}")
        return cw @ omega.as_matrix()
    if isinstance(omega, Trivector):
        n = omega.n
        if n != wv.size:
            raise ValueError(f"dimension mismatch: {n} vs {wv.size}")
        ti, tj, tk, pij, pik, pjk = triple_indices(n)
        out = np.zeros(n * (n - 1) // 2, dtype=complex)
        t = omega.coeffs
        np.add.at(out, pjk, cw[ti] * t)
        np.add.at(out, pik, -cw[tj] * t)
        np.add.at(out, pij, cw[tk] * t)
        return Bivector(n, out)
    raise TypeError("interior_product expects a Bivector or Trivector")


def hodge_basis(b1: Bivector, b2: Bivector, b3: Bivector, v_basis, *, tol: float = ORTHO_INPUT_TOL):
    """Realize an orthonormal bivector triple as wedges of an orthonormal frame.

    Given an orthonormal basis {v1, v2, v3} of a 3-dimensional subspace V and
    an orthonormal triple {b1, b2, b3} inside the wedge square of V, returns
    orthonormal vectors {f1, f2, f3} in V with

        f2 ^ f3 = b1,   f3 ^ f1 = b2,   f1 ^ f2 = b3.

    The triple {b_l} expands over the wedge basis {v2^v3, v3^v1, v1^v2} with a
    unitary coefficient matrix U; the frame f_l = sum_m conj(U_lm) v_m works
    exactly when det U = 1, which is arranged by multiplying v1 with a square
    root of det U (that phase enters columns 2 and 3 of U conjugated, so the
    determinant picks up |det U|^2 = 1).
    """
    vs = [_vector(v) for v in v_basis]
    if len(vs) != 3:
        raise ValueError("hodge_basis needs exactly three basis vectors")
    n = vs[0].size
    for b in (b1, b2, b3):
        if b.n != n:
            raise ValueError("bivector dimension does not match the basis")
    if gram_deviation(vs) > tol:
        raise ValueError("basis vectors are not orthonormal")

    v1, v2, v3 = vs
    wedges = [wedge2(v2, v3), wedge2(v3, v1), wedge2(v1, v2)]
    bs = (b1, b2, b3)
    u = np.empty((3, 3), dtype=complex)
    for l in range(3):
        for m in range(3):
            u[l, m] = np.vdot(wedges[m].coeffs, bs[l].coeffs)
        resid = bs[l].coeffs - sum(u[l, m] * wedges[m].coeffs for m in range(3))
        if np.abs(resid).max() > tol:
            raise ValueError("bivector is not contained in the wedge square of the basis span")
    if np.abs(u @ u.conj().T - np.eye(3)).max() > tol:
        raise ValueError("bivector triple is not orthonormal")

    phase = np.sqrt(np.linalg.det(u))
    v1 = phase * v1
    u[:, 1] *= np.conj(phase)
    u[:, 2] *= np.conj(phase)
    frame = np.conj(u) @ np.stack([v1, v2, v3])
    return [frame[0], frame[1], frame[2]]
