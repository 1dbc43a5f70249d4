"""Small dense linear-algebra helpers shared across modules.

Everything here is a thin, tolerance-aware wrapper around numpy's SVD; the
callers only ever deal with 3-vectors, 3x3 matrices and stacks thereof.
"""
from __future__ import annotations

import numpy as np

from .tolerances import TAU_RANK


def rank_and_rowspace(rows: np.ndarray, rtol: float = TAU_RANK) -> tuple[int, np.ndarray]:
    """Numerical rank and an orthonormal basis (rows) of the row space."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size == 0:
        return 0, np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0))
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, np.zeros((0, rows.shape[1]))
    cut = rtol * max(1.0, s[0])
    r = int(np.sum(s > cut))
    return r, vh[:r]


def nullspace(mat: np.ndarray, rtol: float = TAU_RANK) -> np.ndarray:
    """Orthonormal basis (rows) of the right nullspace of ``mat``."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    u, s, vh = np.linalg.svd(mat, full_matrices=True)
    n = mat.shape[1]
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n)
    cut = rtol * max(1.0, s[0])
    nz = int(np.sum(s > cut))
    return vh[nz:]


def orthonormal_complement(basis_rows: np.ndarray, dim: int = 3) -> np.ndarray:
    """Orthonormal basis (rows) of the orthogonal complement in R^dim."""
    basis_rows = np.atleast_2d(np.asarray(basis_rows, dtype=float))
    if basis_rows.size == 0:
        return np.eye(dim)
    return nullspace(basis_rows)


def project_onto(rows: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Orthogonal projection of v onto the row space of an orthonormal basis."""
    if rows.size == 0:
        return np.zeros_like(v)
    return rows.T @ (rows @ v)


def contains_vector(rows: np.ndarray, v: np.ndarray, rtol: float = 1e-7) -> bool:
    """Whether v lies in the span of the orthonormal rows, up to rtol * |v|."""
    v = np.asarray(v, dtype=float)
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        return True
    return float(np.linalg.norm(v - project_onto(rows, v))) <= rtol * max(1.0, nv)


def unit(v: np.ndarray) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def sign_canonical(v: np.ndarray) -> np.ndarray:
    """Flip v so its largest-magnitude entry is positive (stable line label)."""
    idx = int(np.argmax(np.abs(v)))
    return -v if v[idx] < 0 else v.copy()


def sign_canonical_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise sign_canonical for a stack of vectors."""
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size == 0:
        return rows.copy()
    idx = np.argmax(np.abs(rows), axis=1)
    lead = rows[np.arange(rows.shape[0]), idx]
    return rows * np.where(lead < 0.0, -1.0, 1.0)[:, None]


def fibonacci_sphere(n: int) -> np.ndarray:
    """n roughly equidistributed unit vectors on S^2 (deterministic)."""
    i = np.arange(n, dtype=float) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / n)
    golden = np.pi * (1.0 + 5.0 ** 0.5)
    theta = golden * i
    return np.stack(
        [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)],
        axis=1,
    )


def random_well_conditioned(rng: np.random.Generator, cond_cap: float = 100.0) -> np.ndarray:
    """Random invertible 3x3 with condition number below cond_cap."""
    while True:
        q1, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        q2, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        sv = np.exp(rng.uniform(np.log(0.25), np.log(4.0), size=3))
        m = q1 @ np.diag(sv) @ q2
        if np.linalg.cond(m) < cond_cap:
            return m
