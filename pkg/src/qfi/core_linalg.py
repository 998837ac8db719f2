r"""Real-structure-aware dense linear algebra.

Everything in this package lives on a finite-dimensional complex Hilbert space
carrying an antiunitary involution :math:`\Gamma` ("Real structure").  We store
:math:`\Gamma` through its unitary factor only, :math:`\Gamma v = c\,\overline{v}`,
so that every object held in memory is a plain complex matrix and all antiunitary
arithmetic happens through explicit ``conj()`` calls.

The module provides:

* :class:`RealStructure`, :class:`Operator`, :class:`RealSkewUnitary` containers;
* ``nambu_involution`` — the particle/hole involution :math:`\mathfrak{c}\,(1\otimes\sigma_1)`;
* ``is_real`` / ``realify`` — detecting and exploiting :math:`\Gamma a \Gamma = a`;
* ``flatten`` — spectral flattening :math:`J = i\,\mathrm{sgn}(H)` of a gapped
  particle-hole-symmetric Hamiltonian;
* ``pfaffian`` — a Parlett–Reid elimination for real antisymmetric matrices;
* ``kernel`` — SVD null spaces with an explicit ambiguity-band policy.

All functions are pure; none mutate their arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import (
    AmbiguousKernelError,
    DimensionMismatchError,
    GapClosedError,
    NotAntisymmetricError,
    NotHermitianError,
    NotParticleHoleSymmetricError,
    NotRealOperatorError,
)

#: Default tolerance for structural checks (unitarity, symmetry, reality).
STRUCTURAL_TOL = 1e-8

#: Default relative threshold below which singular values count as kernel.
KERNEL_TOL = 1e-7


def _as_matrix(a):
    """Accept an ndarray or any object with a ``.matrix`` attribute."""
    m = getattr(a, "matrix", a)
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def _scale(a):
    """Size scale used to make structural tolerances meaningful."""
    return max(1.0, _opnorm(a))


def _opnorm(a):
    """Operator 2-norm, defined as 0 on empty matrices."""
    return 0.0 if a.size == 0 else float(np.linalg.norm(a, 2))


@dataclass(frozen=True)
class RealStructure:
    """Antiunitary involution :math:`\\Gamma v = c\\,\\overline{v}` on ``C^dim``.

    Parameters
    ----------
    dim : int
        Dimension of the ambient complex space.
    c_matrix : ndarray
        Unitary ``dim x dim`` matrix with ``c @ conj(c) = 1`` (so that
        :math:`\\Gamma^2 = 1`).
    """

    dim: int
    c_matrix: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c_matrix, dtype=complex)
        if c.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"c_matrix shape {c.shape} does not match dim {self.dim}"
            )
        object.__setattr__(self, "c_matrix", c)
        eye = np.eye(self.dim)
        if _opnorm(c.conj().T @ c - eye) > STRUCTURAL_TOL:
            raise NotRealOperatorError("c_matrix is not unitary")
        if _opnorm(c @ np.conj(c) - eye) > STRUCTURAL_TOL:
            raise NotRealOperatorError("c_matrix @ conj(c_matrix) != 1 (Gamma^2 != 1)")

    def apply(self, v):
        """Apply :math:`\\Gamma` to vectors (columns of ``v``)."""
        return self.c_matrix @ np.conj(v)

    def conjugate_operator(self, a):
        """Return :math:`\\Gamma A \\Gamma` for a linear operator ``A``."""
        a = _as_matrix(a)
        return self.c_matrix @ np.conj(a) @ self.c_matrix.conj().T

    @cached_property
    def real_basis(self):
        """Orthonormal basis of the fixed subspace ``{v : Gamma v = v}``.

        Built by Gram–Schmidt over the deterministic candidate sequence
        ``e_0 + Γe_0, i e_0 + Γ(i e_0), e_1 + Γe_1, ...`` in that fixed order,
        so every run of the interpreter produces the identical basis.  The
        result is a ``dim x dim`` unitary whose columns are Γ-fixed; inner
        products of Γ-fixed vectors are automatically real.
        """
        n = self.dim
        if n == 0:
            return np.zeros((0, 0), dtype=complex)
        cols = []

        def _accept(v):
            for _ in range(2):  # two passes of classical Gram-Schmidt
                for u in cols:
                    v = v - u * (np.conj(u) @ v)
            nv = np.linalg.norm(v)
            if nv > 1e-8:
                cols.append(v / nv)

        for j in range(n):
            if len(cols) == n:
                break
            e = np.zeros(n, dtype=complex)
            e[j] = 1.0
            _accept(e + self.apply(e))
            if len(cols) == n:
                break
            _accept(1j * e + self.apply(1j * e))
        if len(cols) != n:
            raise NotRealOperatorError(
                "fixed subspace of Gamma is defective; c_matrix invalid"
            )
        return np.column_stack(cols)


@dataclass(frozen=True)
class Operator:
    """A dense complex operator, optionally tagged with a grading parity."""

    matrix: np.ndarray
    parity: Optional[str] = None  # 'even' | 'odd' | None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got {m.shape}")
        if self.parity not in (None, "even", "odd"):
            raise ValueError(f"parity must be 'even', 'odd' or None, got {self.parity!r}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class RealSkewUnitary:
    """A Real skew-adjoint unitary ``J`` (so ``J* = -J``, ``J^2 = -1``).

    Use :meth:`from_matrix` to validate a candidate against its
    :class:`RealStructure`; the raw constructor trusts its input.
    """

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @classmethod
    def from_matrix(cls, matrix, g: RealStructure, tol: float = STRUCTURAL_TOL):
        """Validate skew-adjointness, unitarity and reality, then wrap."""
        m = _as_matrix(matrix).astype(complex)
        if m.shape[0] != g.dim:
            raise DimensionMismatchError(
                f"matrix dim {m.shape[0]} does not match real structure dim {g.dim}"
            )
        s = _scale(m)
        if _opnorm(m + m.conj().T) > tol * s:
            raise NotRealOperatorError("matrix is not skew-adjoint")
        if _opnorm(m.conj().T @ m - np.eye(g.dim)) > tol * s:
            raise NotRealOperatorError("matrix is not unitary")
        if not is_real(m, g, tol):
            raise NotRealOperatorError("matrix does not commute with Gamma")
        return cls(m)


def nambu_involution(half_dim: int) -> RealStructure:
    """Particle-hole involution on ``C^{2*half_dim}``.

    Block ordering is (all particle components, all hole components); the
    unitary factor is the block anti-diagonal ``[[0, 1], [1, 0]]`` with
    identity blocks, i.e. :math:`1 \\otimes \\sigma_1` acting across the two
    blocks.
    """
    if half_dim < 1:
        raise ValueError("half_dim must be >= 1")
    eye = np.eye(half_dim)
    zero = np.zeros((half_dim, half_dim))
    c = np.block([[zero, eye], [eye, zero]]).astype(complex)
    return RealStructure(dim=2 * half_dim, c_matrix=c)


def is_real(a, g: RealStructure, tol: float = STRUCTURAL_TOL) -> bool:
    """True iff :math:`\\|\\Gamma A \\Gamma - A\\| \\le` ``tol`` (operator norm)."""
    m = _as_matrix(a)
    if m.shape[0] != g.dim:
        raise DimensionMismatchError(
            f"operator dim {m.shape[0]} does not match real structure dim {g.dim}"
        )
    return _opnorm(g.conjugate_operator(m) - m) <= tol


def realify(a, g: RealStructure, tol: float = STRUCTURAL_TOL) -> np.ndarray:
    """Matrix of a Real operator on the fixed real form of :math:`\\Gamma`.

    Parameters
    ----------
    a : ndarray or Operator
        Operator with :math:`\\Gamma A \\Gamma = A` (checked).
    g : RealStructure
    tol : float
        Reality tolerance.

    Returns
    -------
    ndarray
        Real ``dim x dim`` matrix ``B† A B`` where ``B`` is the deterministic
        Γ-fixed basis.  This map is an algebra homomorphism on Real operators
        and preserves spectra; Real skew-adjoint unitaries land on real
        antisymmetric orthogonal matrices.

    Notes
    -----
    The basis is deterministic (see :attr:`RealStructure.real_basis`), so signs
    of Pfaffians of realified operators are reproducible run to run.  Only
    *products* of two Pfaffian signs realified in the same basis are
    basis-independent invariants; a single sign is a convention.
    """
    m = _as_matrix(a)
    if not is_real(m, g, tol):
        raise NotRealOperatorError("operator is not Real; cannot realify")
    b = g.real_basis
    out = b.conj().T @ m @ b
    imag_max = np.max(np.abs(out.imag)) if out.size else 0.0
    if imag_max > 10 * tol * _scale(m):
        raise NotRealOperatorError(
            f"realified matrix has imaginary residue {imag_max:.2e}"
        )
    return np.ascontiguousarray(out.real)


def flatten(h, g: RealStructure, gap_tol: float) -> RealSkewUnitary:
    """Spectral flattening :math:`J = i\\,\\mathrm{sgn}(H)` of a gapped BdG Hamiltonian.

    Parameters
    ----------
    h : ndarray or Operator
        Hermitian matrix with particle-hole symmetry
        :math:`\\Gamma H \\Gamma = -H`.
    g : RealStructure
    gap_tol : float
        Every eigenvalue must satisfy ``|eig| > gap_tol``.

    Returns
    -------
    RealSkewUnitary
        ``J`` commuting with ``H``, encoding the ground state of ``H``.

    Raises
    ------
    NotHermitianError, NotParticleHoleSymmetricError, GapClosedError
    """
    m = _as_matrix(h)
    if m.shape[0] != g.dim:
        raise DimensionMismatchError("Hamiltonian does not match the real structure")
    s = _scale(m)
    if _opnorm(m - m.conj().T) > STRUCTURAL_TOL * s:
        raise NotHermitianError("H is not Hermitian")
    if _opnorm(g.conjugate_operator(m) + m) > STRUCTURAL_TOL * s:
        raise NotParticleHoleSymmetricError("Gamma H Gamma != -H")
    w, v = np.linalg.eigh(m)
    amin = float(np.min(np.abs(w)))
    if amin <= gap_tol:
        raise GapClosedError(
            f"eigenvalue {amin:.3e} within gap_tol {gap_tol:.3e} of zero",
            offending_value=amin,
        )
    j = 1j * (v * np.sign(w)) @ v.conj().T
    return RealSkewUnitary(j)


def pfaffian(a) -> float:
    """Pfaffian of a real antisymmetric matrix by Parlett–Reid elimination.

    Skew-symmetric tridiagonalization with partial pivoting; ``O(n^3)``.
    Odd-dimensional input returns exactly ``0.0`` (the Pfaffian of an odd
    antisymmetric matrix vanishes identically).

    Raises
    ------
    NotAntisymmetricError
        If ``a`` is not real antisymmetric to structural tolerance.
    """
    m = _as_matrix(a)
    if np.iscomplexobj(m):
        if np.max(np.abs(m.imag)) > STRUCTURAL_TOL * _scale(np.abs(m)):
            raise NotAntisymmetricError("pfaffian requires a real matrix")
        m = m.real
    m = np.array(m, dtype=float, copy=True)
    n = m.shape[0]
    if _opnorm(m + m.T) > STRUCTURAL_TOL * _scale(m):
        raise NotAntisymmetricError("matrix is not antisymmetric")
    if n % 2 == 1:
        return 0.0
    if n == 0:
        return 1.0
    pf = 1.0
    for k in range(0, n - 2, 2):
        kp = k + 1 + int(np.argmax(np.abs(m[k + 1:, k])))
        if kp != k + 1:
            m[[k + 1, kp], :] = m[[kp, k + 1], :]
            m[:, [k + 1, kp]] = m[:, [kp, k + 1]]
            pf = -pf
        pivot = m[k, k + 1]
        if pivot == 0.0:
            return 0.0
        pf *= pivot
        tau = m[k, k + 2:] / pivot
        col = m[k + 2:, k + 1]
        m[k + 2:, k + 2:] += np.outer(tau, col)
        m[k + 2:, k + 2:] -= np.outer(col, tau)
    return pf * m[n - 2, n - 1]


def pfaffian_sign_logabs(a):
    """``(sign, log|Pf|)`` by the same elimination as :func:`pfaffian`.

    Useful when the plain product would under- or overflow (large matrices
    whose entries are not of unit scale).  ``sign`` is ``0.0`` when the
    Pfaffian vanishes exactly; ``log|Pf|`` is ``-inf`` there.
    """
    m = _as_matrix(a)
    if np.iscomplexobj(m):
        m = m.real
    m = np.array(m, dtype=float, copy=True)
    n = m.shape[0]
    if _opnorm(m + m.T) > STRUCTURAL_TOL * _scale(m):
        raise NotAntisymmetricError("matrix is not antisymmetric")
    if n % 2 == 1:
        return 0.0, -np.inf
    if n == 0:
        return 1.0, 0.0
    sign = 1.0
    logabs = 0.0
    for k in range(0, n - 2, 2):
        kp = k + 1 + int(np.argmax(np.abs(m[k + 1:, k])))
        if kp != k + 1:
            m[[k + 1, kp], :] = m[[kp, k + 1], :]
            m[:, [k + 1, kp]] = m[:, [kp, k + 1]]
            sign = -sign
        pivot = m[k, k + 1]
        if pivot == 0.0:
            return 0.0, -np.inf
        sign *= 1.0 if pivot > 0 else -1.0
        logabs += np.log(abs(pivot))
        tau = m[k, k + 2:] / pivot
        col = m[k + 2:, k + 1]
        m[k + 2:, k + 2:] += np.outer(tau, col)
        m[k + 2:, k + 2:] -= np.outer(col, tau)
    last = m[n - 2, n - 1]
    if last == 0.0:
        return 0.0, -np.inf
    sign *= 1.0 if last > 0 else -1.0
    return sign, logabs + np.log(abs(last))


def basis_projection(j) -> np.ndarray:
    """Projection ``P = (1 - iJ)/2`` satisfying ``P + Gamma P Gamma = 1``.

    Inverse of the encoding ``J = i(2P - 1)``; for ``J = flatten(H)`` this is
    the spectral projection onto the positive-energy states.
    """
    m = _as_matrix(j)
    return (np.eye(m.shape[0]) - 1j * m) / 2.0


def kernel(a, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis of the numerical kernel of ``a``.

    Columns span ``{v : ||A v|| <= tol * ||A|| * ||v||}``, computed from the
    SVD with the threshold applied to singular values relative to the largest.
    Columns are ordered by increasing singular value (most singular first).

    Raises
    ------
    AmbiguousKernelError
        If any singular value falls strictly inside ``(tol, 10*tol)``
        relative to the largest — the kernel dimension would depend on the
        exact threshold, which is reported rather than guessed.
    """
    m = _as_matrix(a)
    n = m.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    _, s, vh = np.linalg.svd(m)
    smax = s[0]
    if smax == 0.0:
        return np.eye(n, dtype=complex)
    rel = s / smax
    in_band = (rel > tol) & (rel < 10 * tol)
    if np.any(in_band):
        bad = s[in_band][0]
        raise AmbiguousKernelError(
            f"singular value {bad:.3e} lies in the ambiguity band "
            f"({tol:.1e}, {10 * tol:.1e}) relative to {smax:.3e}"
        )
    mask = rel <= tol
    rows = vh[mask]
    return rows[::-1].conj().T  # increasing singular value, as columns
