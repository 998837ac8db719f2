r"""Real Clifford modules and their KO-valued classification.

A module here is a finite-dimensional Real representation of the Clifford
algebra ``Cl_{r,s}``: ``r`` generators squaring to ``+1`` (self-adjoint) and
``s`` squaring to ``-1`` (skew-adjoint), all pairwise anticommuting, all
commuting with the antiunitary involution of a :class:`RealStructure`.

The classifier ``abs_class`` sends a module with ``k`` skew generators to a
class in the real K-theory group of degree ``k + 1`` (mod 8, Bott periodicity):
the obstruction to extending the module by one more skew generator.  A module
extends if and only if its class is the identity, which ``try_extend``
verifies constructively by solving the extension problem as a linear algebra
question.

Generator conventions used throughout (real ``2x2`` blocks)::

    X = [[0, 1], [1, 0]]   Z = [[1, 0], [0, -1]]   E = [[0, 1], [-1, 0]]

so ``X, Z`` square to ``+1``, ``E`` to ``-1``, and all three anticommute.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core_linalg import RealStructure, realify
from .errors import DimensionMismatchError, InvalidModuleError

X = np.array([[0.0, 1.0], [1.0, 0.0]])
Z = np.array([[1.0, 0.0], [0.0, -1.0]])
E = np.array([[0.0, 1.0], [-1.0, 0.0]])

#: Minimal real dimension of an irreducible Cl_{0,k} module, k = 0..10.
_MIN_DIM_NEG = (1, 2, 4, 4, 8, 8, 8, 8, 16, 32, 64)

#: Minimal real dimension of an irreducible Cl_{r,0} module, r = 0..10.
_MIN_DIM_POS = (1, 1, 2, 4, 8, 8, 16, 16, 16, 16, 32)


class KOGroup(enum.Enum):
    """Which abelian group a KO degree carries."""

    Z = "Z"
    Z2 = "Z2"
    ZERO = "0"


#: Bott table: KO_n for n = 0..7.
BOTT_GROUPS = (
    KOGroup.Z,
    KOGroup.Z2,
    KOGroup.Z2,
    KOGroup.ZERO,
    KOGroup.Z,
    KOGroup.ZERO,
    KOGroup.ZERO,
    KOGroup.ZERO,
)


@dataclass(frozen=True)
class KOClass:
    """An element of the real K-theory group ``KO_degree``.

    ``group`` is redundant with ``degree`` (Bott table) and is validated
    against it; ``value`` is an integer for Z, a bit for Z2, and 0 for the
    trivial group.
    """

    degree: int
    group: KOGroup
    value: int

    def __post_init__(self):
        if not 0 <= self.degree <= 7:
            raise ValueError(f"degree must be reduced mod 8, got {self.degree}")
        expected = BOTT_GROUPS[self.degree]
        if self.group is not expected:
            raise ValueError(
                f"KO_{self.degree} is {expected.value}, not {self.group.value}"
            )
        if self.group is KOGroup.ZERO and self.value != 0:
            raise ValueError("the trivial group has only the value 0")
        if self.group is KOGroup.Z2 and self.value not in (0, 1):
            raise ValueError("a Z2 value must be 0 or 1")
        if not isinstance(self.value, (int, np.integer)):
            raise ValueError("value must be an integer")
        object.__setattr__(self, "value", int(self.value))

    @classmethod
    def identity(cls, degree: int) -> "KOClass":
        return cls(degree % 8, BOTT_GROUPS[degree % 8], 0)

    @property
    def is_trivial(self) -> bool:
        return self.value == 0

    def __str__(self):
        return f"KO_{self.degree}({self.group.value}) = {self.value}"


@dataclass(frozen=True)
class CliffordSignature:
    """Signature ``(r, s)``: r positive-square and s negative-square generators."""

    r: int
    s: int

    def __post_init__(self):
        if self.r < 0 or self.s < 0:
            raise ValueError("signature entries must be non-negative")
        if self.r + self.s > 10:
            raise ValueError("signatures with r + s > 10 are not supported")

    @property
    def count(self) -> int:
        return self.r + self.s


@dataclass(frozen=True)
class CliffordModule:
    """A Real representation of ``Cl_{r,s}``.

    ``generators`` holds the ``r`` positive-square generators first, then the
    ``s`` negative-square ones.  All matrices act on ``C^dim`` and are Real
    with respect to ``real_structure``.  A graded module additionally carries
    a Real self-adjoint ``grading_op`` squaring to 1 that anticommutes with
    every generator.

    Construction checks only shapes; use :func:`check_relations` for the
    numerical algebra relations.
    """

    dim: int
    generators: tuple
    signature: CliffordSignature
    graded: bool = False
    grading_op: Optional[np.ndarray] = None
    real_structure: Optional[RealStructure] = None

    def __post_init__(self):
        gens = tuple(np.asarray(g, dtype=complex) for g in self.generators)
        if len(gens) != self.signature.count:
            raise InvalidModuleError(
                f"{len(gens)} generators for signature "
                f"({self.signature.r},{self.signature.s})"
            )
        for g in gens:
            if g.shape != (self.dim, self.dim):
                raise DimensionMismatchError(
                    f"generator shape {g.shape} does not match dim {self.dim}"
                )
        object.__setattr__(self, "generators", gens)
        if self.graded:
            if self.grading_op is None:
                raise InvalidModuleError("graded module needs a grading_op")
            s = np.asarray(self.grading_op, dtype=complex)
            if s.shape != (self.dim, self.dim):
                raise DimensionMismatchError("grading_op has the wrong shape")
            object.__setattr__(self, "grading_op", s)
        elif self.grading_op is not None:
            raise InvalidModuleError("grading_op given but graded=False")
        g = self.real_structure
        if g is None:
            g = RealStructure(self.dim, np.eye(self.dim, dtype=complex))
            object.__setattr__(self, "real_structure", g)
        elif g.dim != self.dim:
            raise DimensionMismatchError("real_structure dim mismatch")

    @property
    def positive_generators(self) -> tuple:
        return self.generators[: self.signature.r]

    @property
    def negative_generators(self) -> tuple:
        return self.generators[self.signature.r:]


@dataclass(frozen=True)
class RelationReport:
    """Max residual per relation class, and whether all pass a tolerance."""

    residuals: dict
    passed: bool
    tol: float


def _norm2(a):
    return 0.0 if a.size == 0 else float(np.linalg.norm(a, 2))


def check_relations(m: CliffordModule, tol: float = 1e-9) -> RelationReport:
    """Verify the Clifford algebra relations of a module numerically.

    Residual classes reported (operator norms):

    * ``square``      — ``|| g_i^2 - eta_i ||`` with ``eta_i = +/-1``;
    * ``anticommute`` — ``|| g_i g_j + g_j g_i ||`` over pairs ``i < j``;
    * ``adjoint``     — ``|| g_i^* - eta_i g_i ||``;
    * ``reality``     — ``|| Gamma g_i Gamma - g_i ||``;
    * ``grading``     — grading-operator relations (0 for ungraded modules).
    """
    n = m.dim
    eye = np.eye(n)
    signs = [1.0] * m.signature.r + [-1.0] * m.signature.s
    res = {"square": 0.0, "anticommute": 0.0, "adjoint": 0.0, "reality": 0.0,
           "grading": 0.0}
    for g, eta in zip(m.generators, signs):
        res["square"] = max(res["square"], _norm2(g @ g - eta * eye))
        res["adjoint"] = max(res["adjoint"], _norm2(g.conj().T - eta * g))
        res["reality"] = max(
            res["reality"], _norm2(m.real_structure.conjugate_operator(g) - g)
        )
    gens = m.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            res["anticommute"] = max(
                res["anticommute"], _norm2(gens[i] @ gens[j] + gens[j] @ gens[i])
            )
    if m.graded:
        s = m.grading_op
        r = max(
            _norm2(s @ s - eye),
            _norm2(s.conj().T - s),
            _norm2(m.real_structure.conjugate_operator(s) - s),
        )
        for g in gens:
            r = max(r, _norm2(s @ g + g @ s))
        res["grading"] = r
    passed = all(v <= tol for v in res.values())
    return RelationReport(residuals=res, passed=passed, tol=tol)


# ---------------------------------------------------------------------------
# standard generators
# ---------------------------------------------------------------------------


def _cd_conj(x):
    out = -x
    out = out.copy()
    out[0] = x[0]
    return out


def _cd_mul(x, y):
    """Cayley-Dickson product on R^(2^m): reals -> complexes -> quaternions -> ..."""
    n = len(x)
    if n == 1:
        return x * y
    h = n // 2
    a, b = x[:h], x[h:]
    c, d = y[:h], y[h:]
    return np.concatenate(
        [
            _cd_mul(a, c) - _cd_mul(_cd_conj(d), b),
            _cd_mul(d, a) + _cd_mul(b, _cd_conj(c)),
        ]
    )


def _left_mult(dim: int, unit: int) -> np.ndarray:
    """Matrix of left multiplication by basis unit ``e_unit`` on R^dim."""
    out = np.zeros((dim, dim))
    e = np.zeros(dim)
    e[unit] = 1.0
    for j in range(dim):
        f = np.zeros(dim)
        f[j] = 1.0
        out[:, j] = _cd_mul(e, f)
    return out


def _normalize_volume(rhos: list) -> list:
    """For s = 3 mod 4 skew families, flip the last sign so the product is +1."""
    s = len(rhos)
    if s % 4 != 3 or not rhos:
        return rhos
    omega = rhos[0]
    for r in rhos[1:]:
        omega = omega @ r
    if np.trace(omega) < 0:
        rhos = rhos[:-1] + [-rhos[-1]]
    return rhos


def _negative_generators(s: int) -> list:
    """Minimal real irreducible family of s anticommuting skew roots of -1."""
    if s == 0:
        return []
    if s == 1:
        return [E.copy()]
    if s in (2, 3):
        units = [_left_mult(4, u) for u in (1, 2, 3)]
        rhos = units[:s] if s == 2 else [units[0], units[1], -units[2]]
        return _normalize_volume(rhos)
    if s <= 7:
        rhos = [_left_mult(8, u) for u in range(1, s + 1)]
        return _normalize_volume(rhos)
    prev = _negative_generators(s - 1)
    d = prev[0].shape[0]
    rhos = [np.kron(g, Z) for g in prev] + [np.kron(np.eye(d), E)]
    return _normalize_volume(rhos)


def _positive_generators(r: int) -> list:
    """Minimal real irreducible family of r anticommuting symmetric roots of +1."""
    if r == 0:
        return []
    if r == 1:
        return [np.array([[1.0]])]
    if r == 2:
        return [X.copy(), Z.copy()]
    core = _negative_generators(r - 2)
    d = core[0].shape[0] if core else 1
    eye = np.eye(d)
    return [np.kron(g, E) for g in core] + [np.kron(eye, X), np.kron(eye, Z)]


def standard_generators(sig: CliffordSignature) -> CliffordModule:
    """Deterministic minimal irreducible Real ``Cl_{r,s}`` module.

    All generator matrices are real orthogonal and the real structure is plain
    complex conjugation.  The dimension is the minimal one admitted by the
    algebra's type.  For pure skew signatures with ``s = 3 (mod 4)`` — where
    two inequivalent irreducibles exist — the one whose generator product is
    ``+1`` is returned.

    Examples: ``(0,1)`` yields ``[[0,1],[-1,0]]``; ``(1,1)`` yields
    ``[[0,1],[1,0]]`` and ``[[0,-1],[1,0]]``.
    """
    r, s = sig.r, sig.s
    d = min(r, s)
    if s >= r:
        pos: list = []
        neg = _negative_generators(s - r)
    else:
        pos = _positive_generators(r - s)
        neg = []
    for _ in range(d):
        dim = pos[0].shape[0] if pos else (neg[0].shape[0] if neg else 1)
        eye = np.eye(dim)
        pos = [np.kron(g, Z) for g in pos] + [np.kron(eye, X)]
        neg = [np.kron(g, Z) for g in neg] + [np.kron(eye, -E)]
    gens = pos + neg
    dim = gens[0].shape[0] if gens else 1
    mod = CliffordModule(
        dim=dim,
        generators=tuple(np.asarray(g, dtype=complex) for g in gens),
        signature=sig,
    )
    report = check_relations(mod, tol=1e-12)
    if not report.passed:
        raise InvalidModuleError(
            f"internal error: standard generators fail relations: {report.residuals}"
        )
    return mod


def minimal_dimension(sig: CliffordSignature) -> int:
    """Real dimension of an irreducible ``Cl_{r,s}`` module."""
    d = min(sig.r, sig.s)
    base = _MIN_DIM_NEG[sig.s - sig.r] if sig.s >= sig.r else _MIN_DIM_POS[sig.r - sig.s]
    return (2 ** d) * base


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def _realified_skew(m: CliffordModule, k: int) -> list:
    if k < 0 or k > m.signature.s:
        raise InvalidModuleError(
            f"asked to classify against {k} skew generators, module has "
            f"{m.signature.s}"
        )
    return [realify(g, m.real_structure) for g in m.negative_generators[:k]]


def abs_class(m: CliffordModule, k: int) -> KOClass:
    """KO class of a module over its first ``k`` skew generators.

    The result lives in ``KO_{k+1 mod 8}`` and is the obstruction to
    extending the ``Cl_{0,k}``-module structure by one further anticommuting
    skew generator on the same space:

    * degree with group Z (``k = 3 mod 4``): the signed multiplicity
      difference of the two irreducibles, read off the normalized trace of
      the generator product;
    * degree with group Z2 (``k = 0, 1 mod 8``): the parity of the number of
      irreducible summands, read off the dimension;
    * trivial degrees: always 0.

    Raises :class:`InvalidModuleError` if the dimension is incompatible with
    the irreducible dimension or the volume trace is not an integer multiple.
    """
    degree = (k + 1) % 8
    group = BOTT_GROUPS[degree]
    if m.dim == 0:
        return KOClass(degree, group, 0)
    if k > 10:
        raise InvalidModuleError("k > 10 is not supported")
    rhos = _realified_skew(m, k)
    d_irr = _MIN_DIM_NEG[k]
    if m.dim % d_irr:
        raise InvalidModuleError(
            f"dimension {m.dim} is not a multiple of the irreducible "
            f"dimension {d_irr} for k={k}"
        )
    if group is KOGroup.ZERO:
        return KOClass(degree, group, 0)
    if k % 4 == 3:
        omega = rhos[0]
        for r in rhos[1:]:
            omega = omega @ r
        if _norm2(omega @ omega - np.eye(m.dim)) > 1e-8:
            raise InvalidModuleError("generator product does not square to 1")
        for r in rhos:
            if _norm2(omega @ r - r @ omega) > 1e-8:
                raise InvalidModuleError("generator product is not central")
        raw = float(np.trace(omega)) / d_irr
        value = int(round(raw))
        if abs(raw - value) > 1e-6:
            raise InvalidModuleError(
                f"volume trace {raw} is not integral; module is not a clean "
                "sum of irreducibles"
            )
        return KOClass(degree, group, value)
    # remaining degrees are Z2: parity of the number of irreducible summands
    return KOClass(degree, group, (m.dim // d_irr) % 2)


# ---------------------------------------------------------------------------
# extension
# ---------------------------------------------------------------------------


def _transpose_permutation(n: int) -> np.ndarray:
    p = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            p[i * n + j, j * n + i] = 1.0
    return p


def try_extend(m: CliffordModule, tol: float = 1e-6) -> Optional[CliffordModule]:
    """Extend a module by one further skew generator, if possible.

    Solves the linear constraints (antisymmetry in the real form,
    anticommutation with every existing generator and, for graded modules,
    with the grading operator) for the new generator, then searches the
    constraint null space for an invertible element; its orthogonal polar
    factor is the new generator.  Returns the extended module with signature
    ``(r, s+1)`` or ``None`` when no extension exists — which happens exactly
    when the module's class is non-trivial.

    The search is deterministic: a fixed internal seed drives 32 candidate
    draws from the null space.
    """
    n = m.dim
    r, s = m.signature.r, m.signature.s
    new_sig = CliffordSignature(r, s + 1)
    if n == 0:
        return CliffordModule(
            dim=0,
            generators=m.generators + (np.zeros((0, 0), dtype=complex),),
            signature=new_sig,
            graded=m.graded,
            grading_op=m.grading_op,
            real_structure=m.real_structure,
        )

    basis = m.real_structure.real_basis
    ops = [realify(g, m.real_structure) for g in m.generators]
    if m.graded:
        ops.append(realify(m.grading_op, m.real_structure))

    eye_n = np.eye(n)
    mats = [np.eye(n * n) + _transpose_permutation(n)]
    for g in ops:
        mats.append(np.kron(g, eye_n) + np.kron(eye_n, g.T))

    # intersect the null spaces one constraint at a time; after the first
    # constraint the candidate space shrinks fast, so the later SVDs are
    # cheap compared to one stacked decomposition
    null_basis = np.eye(n * n)
    for mat in mats:
        restricted = mat @ null_basis
        _, sv, vh = np.linalg.svd(restricted)
        smax = sv[0] if sv.size else 0.0
        null_basis = null_basis @ vh[sv <= 1e-10 * max(smax, 1.0)].T
        if null_basis.shape[1] == 0:
            return None
    null_rows = null_basis.T

    rng = np.random.default_rng(7)
    for _ in range(32):
        coeff = rng.standard_normal(null_rows.shape[0])
        b = (coeff @ null_rows).reshape(n, n)
        svals = np.linalg.svd(b, compute_uv=False)
        if svals[-1] / svals[0] <= 1e-8:
            continue
        w, _, vt = np.linalg.svd(b)
        q = w @ vt
        ok = _norm2(q + q.T) <= tol and all(
            _norm2(g @ q + q @ g) <= tol for g in ops
        )
        if not ok:
            continue
        new_gen = basis @ q.astype(complex) @ basis.conj().T
        return CliffordModule(
            dim=n,
            generators=m.generators + (new_gen,),
            signature=new_sig,
            graded=m.graded,
            grading_op=m.grading_op,
            real_structure=m.real_structure,
        )
    return None
