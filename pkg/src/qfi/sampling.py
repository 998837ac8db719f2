"""Random constructions of Real skew-adjoint unitaries and pairs.

Used by the self-check command of the CLI and throughout the test suite.
Everything takes an explicit ``numpy.random.Generator`` so runs are
reproducible from a single seed.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .core_linalg import RealSkewUnitary, RealStructure


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random orthogonal matrix (QR with sign-fixed diagonal)."""
    a = rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    return q * np.sign(np.diag(r))


def random_antisymmetric(n: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    """Random real antisymmetric matrix rescaled to the given operator norm."""
    k = rng.standard_normal((n, n))
    k = k - k.T
    s = np.linalg.norm(k, 2)
    if s > 0:
        k *= norm / s
    return k


def _standard_j(n: int) -> np.ndarray:
    """Block-diagonal rotation generator: n/2 copies of [[0, -1], [1, 0]]."""
    j = np.zeros((n, n))
    for b in range(0, n, 2):
        j[b, b + 1] = -1.0
        j[b + 1, b] = 1.0
    return j


def random_real_skew_unitary(g: RealStructure, rng: np.random.Generator) -> RealSkewUnitary:
    """Random Real skew-adjoint unitary on the space carrying ``g``.

    Drawn as an orthogonal conjugate of the standard block rotation in the
    fixed real form of Gamma, then mapped back; the dimension must be even.
    """
    n = g.dim
    if n % 2:
        raise ValueError("Real skew-adjoint unitaries need even dimension")
    q = random_orthogonal(n, rng)
    jr = q @ _standard_j(n) @ q.T
    b = g.real_basis
    return RealSkewUnitary(b @ jr @ b.conj().T)


def conjugated_pair(
    g: RealStructure,
    rng: np.random.Generator,
    strength: float = 0.7,
):
    """Pair ``(J0, J1)`` with ``J1 = e^K J0 e^-K`` for a Real generator ``K``.

    ``strength`` bounds the operator norm of ``K``; for ``strength < pi/2``
    this guarantees ``||J0 - J1|| <= 2 sin(strength) < 2``, so the pair has
    empty kernel and trivial indices by construction.
    """
    if not 0 <= strength < np.pi / 2:
        raise ValueError("strength must lie in [0, pi/2) to keep ||J0-J1|| < 2")
    n = g.dim
    b = g.real_basis
    j0 = random_real_skew_unitary(g, rng)
    kr = random_antisymmetric(n, rng, norm=strength * rng.uniform(0.3, 1.0))
    r = b @ expm(kr) @ b.conj().T
    j1 = RealSkewUnitary(r @ j0.matrix @ r.conj().T)
    return j0, j1


def planted_kernel_pair(
    g: RealStructure,
    rng: np.random.Generator,
    kernel_dim: int,
    scramble: float = 0.5,
):
    """Pair ``(J0, J1)`` with ``dim ker(J0 + J1)`` exactly ``kernel_dim``.

    ``J1`` equals ``-J0`` on a planted ``J0``-invariant subspace of the given
    (even) dimension and is a mild orthogonal scramble of ``J0`` on the
    complement, so the kernel is exact rather than approximate.
    """
    n = g.dim
    if kernel_dim % 2 or not 0 <= kernel_dim <= n:
        raise ValueError("kernel_dim must be even and within the space dimension")
    b = g.real_basis

    for _ in range(20):
        q = random_orthogonal(n, rng)
        j0r = q @ _standard_j(n) @ q.T

        cols: list[np.ndarray] = []

        def _gs(v):
            for u in cols:
                v = v - u * (u @ v)
            nv = np.linalg.norm(v)
            return v / nv if nv > 1e-6 else None

        while len(cols) < kernel_dim:
            v = _gs(rng.standard_normal(n))
            if v is None:
                continue
            w = _gs(j0r @ v)
            if w is None:
                continue
            cols.extend([v, w])

        if kernel_dim:
            vmat = np.column_stack(cols)
            p = vmat @ vmat.T
        else:
            p = np.zeros((n, n))
        j1r = j0r - 2.0 * p @ j0r @ p
        comp = np.eye(n) - p
        kr = comp @ random_antisymmetric(n, rng, norm=scramble) @ comp
        r = expm(kr)
        j1r = r @ j1r @ r.T

        s = np.linalg.svd(j0r + j1r, compute_uv=False)
        n_small = int(np.sum(s < 1e-10))
        n_large = int(np.sum(s > 0.5))
        if n_small == kernel_dim and n_small + n_large == n:
            j0 = RealSkewUnitary(b @ j0r @ b.conj().T)
            j1 = RealSkewUnitary(b @ j1r @ b.conj().T)
            return j0, j1
    raise RuntimeError("failed to plant a clean kernel after 20 draws")
