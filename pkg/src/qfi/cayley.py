r"""Relative Cayley transforms of pairs of flattened ground states.

For two Real skew-adjoint unitaries :math:`J_0, J_1` the product
:math:`U = J_1 J_0` is a Real normal unitary whose spectrum encodes the entire
relative geometry of the pair:

* singular values of :math:`J_1 - J_0` are :math:`|z + 1|` over eigenvalues
  ``z`` of ``U`` — the pair *agrees* exactly on the ``z = -1`` eigenspace;
* singular values of :math:`J_0 + J_1` are :math:`|z - 1|` — the norm
  condition :math:`\|J_0 - J_1\| < 2` holds iff ``+1`` is not an eigenvalue.

The relative Cayley transform

.. math:: C = J_0 (J_1 + J_0)\,\mathrm{pinv}(J_1 - J_0)

is Real, skew-adjoint, anticommutes with :math:`J_0` and all background
generators, and acts spectrally as :math:`J_0 \cdot i\tan(\theta/2)`.  Its
bounded transform

.. math:: F = C (1 - C^2)^{-1/2} = J_0\, g(U),\qquad
          g(e^{i\theta}) = i \sin(\theta/2)\ \ (\theta \in (-\pi, \pi)),\quad
          g(-1) := 1

satisfies two exact closed-form identities used as the package's primary
self-verification:

.. math:: F^2 = \tfrac14(-2 + J_1 J_0 + J_0 J_1), \qquad
          1 + F^2 = -\tfrac14 (J_0 - J_1)^2 .

On the agreement eigenspace both identities force :math:`F^2 = -1`; the
convention here is :math:`F = J_0` there, so anticommutation with
:math:`J_0` is a property of the range component only.

The graded variant ``cayley_osu`` applies the same formula to odd self-adjoint
unitaries; the two pictures are intertwined by tensoring with the
:math:`2\times 2` rotation ``[[0, -1], [1, 0]]``.

All spectral computations run through a complex Schur factorization of the
(normal) unitary ``U``, which provides an exactly unitary eigenbasis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .core_linalg import (
    Operator,
    RealSkewUnitary,
    RealStructure,
    _as_matrix,
    _opnorm,
    is_real,
)
from .errors import (
    AmbiguousKernelError,
    DimensionMismatchError,
    NormConditionError,
    NotRealOperatorError,
)

#: Relative cut below which singular values of J1 - J0 count as exact zeros.
PINV_CUT = 1e-10


def _unitary_eigensystem(u: np.ndarray):
    """Eigenvalues and an exactly unitary eigenbasis of a normal unitary."""
    t, zq = scipy.linalg.schur(u, output="complex")
    return np.diag(t), zq


def _check_band(values: np.ndarray, cut: float, what: str):
    """Enforce the ambiguity-band policy on a set of singular values."""
    in_band = (values > cut) & (values < 10 * cut)
    if np.any(in_band):
        v = float(values[in_band][0])
        raise AmbiguousKernelError(
            f"{what}: singular value {v:.3e} lies in the ambiguity band "
            f"({cut:.1e}, {10 * cut:.1e})"
        )


@dataclass(frozen=True)
class CayleyPair:
    """A validated pair of Real skew-adjoint unitaries with its range data.

    Fields
    ------
    j0, j1 : RealSkewUnitary
        The pair, sharing ``real_structure``.
    real_structure : RealStructure
    kappas : tuple of ndarray
        Background generators: Real skew-adjoint unitaries anticommuting
        with both ``j0`` and ``j1``.
    range_basis : ndarray
        Orthonormal columns spanning ``range(J1 - J0)`` — the complement of
        the subspace where the pair agrees.
    calkin_gap : float
        Smallest nonzero singular value of ``J0 - J1`` (``inf`` when the
        pair agrees identically); measures invertibility on the range.

    Use :meth:`build`, which validates the structural requirements and the
    norm condition ``||J0 - J1|| < 2``.
    """

    j0: RealSkewUnitary
    j1: RealSkewUnitary
    real_structure: RealStructure
    kappas: tuple
    range_basis: np.ndarray
    calkin_gap: float

    @classmethod
    def build(cls, j0, j1, g: RealStructure, kappas=(), tol: float = 1e-9,
              cut: float = PINV_CUT) -> "CayleyPair":
        j0 = j0 if isinstance(j0, RealSkewUnitary) else RealSkewUnitary.from_matrix(j0, g)
        j1 = j1 if isinstance(j1, RealSkewUnitary) else RealSkewUnitary.from_matrix(j1, g)
        if j0.dim != g.dim or j1.dim != g.dim:
            raise DimensionMismatchError("pair does not match the real structure")
        kap = tuple(np.asarray(_as_matrix(k), dtype=complex) for k in kappas)
        for k in kap:
            s = max(1.0, _opnorm(k))
            if _opnorm(k + k.conj().T) > tol * s or \
               _opnorm(k.conj().T @ k - np.eye(g.dim)) > tol * s:
                raise NotRealOperatorError("kappa is not a skew-adjoint unitary")
            if not is_real(k, g, tol):
                raise NotRealOperatorError("kappa is not Real")
            for j in (j0.matrix, j1.matrix):
                if _opnorm(k @ j + j @ k) > tol:
                    raise NotRealOperatorError(
                        "kappa does not anticommute with the pair"
                    )

        z, zq = _unitary_eigensystem(j1.matrix @ j0.matrix)
        sv_sum = np.abs(z - 1.0)        # singular values of J0 + J1
        sv_diff = np.abs(z + 1.0)       # singular values of J1 - J0
        abs_cut = 2.0 * cut
        if np.any(sv_sum <= abs_cut):
            raise NormConditionError(
                "||J0 - J1|| = 2: the pair has a nonempty kernel and no "
                "Cayley transform; use the index operations instead"
            )
        _check_band(sv_sum, abs_cut, "norm condition")
        _check_band(sv_diff, abs_cut, "range of J1 - J0")
        keep = sv_diff > abs_cut
        range_basis = zq[:, keep]
        calkin_gap = float(sv_diff[keep].min()) if keep.any() else np.inf
        return cls(j0=j0, j1=j1, real_structure=g, kappas=kap,
                   range_basis=range_basis, calkin_gap=calkin_gap)

    @property
    def dim(self) -> int:
        return self.j0.dim

    @property
    def range_dim(self) -> int:
        return self.range_basis.shape[1]

    def compress(self, a) -> np.ndarray:
        """Compress an ambient operator to range_basis coordinates."""
        b = self.range_basis
        return b.conj().T @ _as_matrix(a) @ b

    def compressed_real_structure(self) -> RealStructure:
        """The real structure induced on the range subspace."""
        b = self.range_basis
        c = b.conj().T @ self.real_structure.c_matrix @ np.conj(b)
        return RealStructure(dim=self.range_dim, c_matrix=c)


def _relative_cayley_engine(a0: np.ndarray, a1: np.ndarray, flip: float,
                            cut: float):
    """Shared spectral engine for both flavours of the relative transform.

    Computes ``a0 (a1 + a0) pinv(a1 - a0)`` through the eigensystem of
    ``w = a1 a0``: the transform is ``a0 * f(w)`` with
    ``f(z) = (z + flip) / (z - flip)``, so ``flip=-1`` gives the skew-adjoint
    case (``pinv`` cuts ``z = -1``, where the pair agrees) and ``flip=+1``
    the odd self-adjoint case (cutting ``z = +1``).
    """
    w = a1 @ a0
    z, zq = _unitary_eigensystem(w)
    sv_cutside = np.abs(z - flip)
    abs_cut = 2.0 * cut
    _check_band(sv_cutside, abs_cut, "pseudo-inverse threshold")
    keep = sv_cutside > abs_cut
    vals = np.zeros_like(z)
    vals[keep] = (z[keep] + flip) / (z[keep] - flip)
    m = a0 @ (zq @ (vals[:, None] * zq.conj().T))
    basis = zq[:, keep]
    return m, basis


def relative_cayley(p: CayleyPair, full: bool = False) -> Operator:
    """Relative Cayley transform ``J0 (J1 + J0) pinv(J1 - J0)``.

    Returns the matrix compressed to ``p.range_basis`` (skew-adjoint, Real
    with respect to ``p.compressed_real_structure()``, anticommuting with the
    compressed ``J0`` and kappas).  With ``full=True`` the ambient-space
    matrix is returned instead, which vanishes on the agreement subspace.

    An identical pair yields a zero-dimensional operator.
    """
    m, _ = _relative_cayley_engine(p.j0.matrix, p.j1.matrix, flip=-1.0,
                                   cut=PINV_CUT)
    if full:
        return Operator(m)
    return Operator(p.compress(m))


def bounded_transform(p: CayleyPair) -> Operator:
    """Bounded transform ``F`` of the relative Cayley operator (full space).

    ``F = J0 g(J1 J0)`` with ``g(exp(i theta)) = i sin(theta/2)`` and
    ``g(-1) = 1``, so ``F`` equals ``J0`` on the agreement subspace.  ``F`` is
    Real and skew-adjoint, anticommutes with ``J0`` and every kappa on the
    range component, and satisfies exactly (to roundoff)::

        F^2     = (-2 + J1 J0 + J0 J1) / 4
        1 + F^2 = -(J0 - J1)^2 / 4

    Raises :class:`NormConditionError` if ``2 + J1 J0 + J0 J1`` fails to be
    positive semi-definite beyond roundoff — impossible for a valid pair and
    therefore a signal of corrupted inputs.
    """
    j0 = p.j0.matrix
    u = p.j1.matrix @ j0
    # defensive positivity check of |J0 - J1|^2 = 2 + U + U*
    evals = np.linalg.eigvalsh(u + u.conj().T + 2.0 * np.eye(p.dim))
    if evals.size and evals.min() < -1e-10:
        raise NormConditionError(
            f"2 + J1 J0 + J0 J1 has negative eigenvalue {evals.min():.3e}; "
            "the pair is not a valid pair of skew-adjoint unitaries"
        )
    z, zq = _unitary_eigensystem(u)
    theta = np.angle(z)
    vals = 1j * np.sin(theta / 2.0)
    vals[np.abs(z + 1.0) <= 2.0 * PINV_CUT] = 1.0
    f = j0 @ (zq @ (vals[:, None] * zq.conj().T))
    return Operator(f)


def cayley_osu(v0, v1, gammas=(), grading=None, g: Optional[RealStructure] = None,
               tol: float = 1e-9, full: bool = False) -> Operator:
    """Relative Cayley transform of two odd self-adjoint Real unitaries.

    ``v0, v1`` must be self-adjoint unitaries anticommuting with ``grading``
    (a self-adjoint unitary) and with every generator in ``gammas``; the norm
    condition ``||v0 - v1|| < 2`` is enforced.  Reality is checked only when
    a :class:`RealStructure` is supplied.

    Returns ``v0 (v1 + v0) pinv(v1 - v0)`` compressed to the closure of
    ``range(v1 - v0)`` (or the ambient matrix with ``full=True``): an odd,
    self-adjoint operator anticommuting with ``v0`` and the gammas on the
    range.  Tensoring a skew pair with ``[[0, -1], [1, 0]]`` intertwines this
    construction with :func:`relative_cayley`.
    """
    v0 = np.asarray(_as_matrix(v0), dtype=complex)
    v1 = np.asarray(_as_matrix(v1), dtype=complex)
    if v0.shape != v1.shape:
        raise DimensionMismatchError("v0 and v1 must share a space")
    n = v0.shape[0]
    eye = np.eye(n)
    for name, v in (("v0", v0), ("v1", v1)):
        if _opnorm(v - v.conj().T) > tol or _opnorm(v.conj().T @ v - eye) > tol:
            raise NotRealOperatorError(f"{name} is not a self-adjoint unitary")
        if g is not None and not is_real(v, g, tol):
            raise NotRealOperatorError(f"{name} is not Real")
    if grading is not None:
        s = np.asarray(_as_matrix(grading), dtype=complex)
        if _opnorm(s - s.conj().T) > tol or _opnorm(s @ s - eye) > tol:
            raise NotRealOperatorError("grading is not a self-adjoint involution")
        for name, v in (("v0", v0), ("v1", v1)):
            if _opnorm(s @ v + v @ s) > tol:
                raise NotRealOperatorError(f"{name} is not odd for the grading")
    for k in gammas:
        km = np.asarray(_as_matrix(k), dtype=complex)
        for name, v in (("v0", v0), ("v1", v1)):
            if _opnorm(km @ v + v @ km) > tol:
                raise NotRealOperatorError(
                    f"{name} does not anticommute with a gamma"
                )

    w = v1 @ v0
    z, _ = _unitary_eigensystem(w)
    if np.any(np.abs(z + 1.0) <= 2.0 * PINV_CUT):
        raise NormConditionError("||v0 - v1|| = 2; no graded Cayley transform")
    _check_band(np.abs(z + 1.0), 2.0 * PINV_CUT, "norm condition")

    m, basis = _relative_cayley_engine(v0, v1, flip=+1.0, cut=PINV_CUT)
    if full:
        return Operator(m)
    return Operator(basis.conj().T @ m @ basis)
