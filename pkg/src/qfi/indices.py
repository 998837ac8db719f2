"""Topological indices for pairs of gapped quasifree ground states.

All operators act on one complex space carrying a shared real structure
``Gamma``.  The inputs ``j0, j1`` are Real skew-adjoint unitaries (flattened
gapped Hamiltonians, ``J = i sgn(H)``); the pair kernel ``ker(J0 + J1)`` is
where the two ground states fail to be deformable into each other, and every
index here is a way of measuring that kernel:

* its half-dimension mod 2 (:func:`pair_index_z2`),
* the class of its Clifford module when background symmetries survive on it
  (:func:`pair_index_ko`),
* the sign disagreement of two Pfaffians (:func:`pfaffian_pair_index`), which
  equals the first and is computable without diagonalizing the pair,
* the spectral flow of the Pfaffian sign along a path of gapped Hamiltonians
  (:func:`z2_spectral_flow`),
* interpolation certificates and obstruction witnesses
  (:func:`homotopy_obstruction_test`),
* characters of a symmetry group represented on the kernel
  (:func:`equivariant_kernel_character`), and
* the boundary-mode census of a half-space restriction
  (:func:`half_space_boundary`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from .clifford import (CliffordModule, CliffordSignature, KOClass, abs_class,
                       check_relations)
from .core_linalg import (RealSkewUnitary, RealStructure, _as_matrix, _opnorm,
                          kernel, pfaffian, pfaffian_sign_logabs, realify)
from .errors import (ComputationError, GapClosedError, InvalidModuleError,
                     PfaffianConditioningError, UnresolvedDegeneracyError)
from .models import BdgSystem
from .sampling import random_real_skew_unitary

__all__ = [
    "PairIndexResult",
    "SymmetryData",
    "GroupElement",
    "FlowResult",
    "ObstructionReport",
    "CharacterEntry",
    "CharacterTable",
    "EdgeModes",
    "HalfSpaceReport",
    "pair_index_z2",
    "pair_index_ko",
    "pair_index",
    "pfaffian_pair_index",
    "z2_spectral_flow",
    "homotopy_obstruction_test",
    "equivariant_kernel_character",
    "half_space_boundary",
]


def _mat(j) -> np.ndarray:
    return np.asarray(_as_matrix(j), dtype=complex)


# ---------------------------------------------------------------------------
# results and symmetry payloads


@dataclass(frozen=True)
class PairIndexResult:
    """Index data of one pair of Real skew-adjoint unitaries.

    Attributes
    ----------
    kernel_dim : int
        Complex dimension of ``ker(J0 + J1)``; always even.
    z2 : int
        ``(kernel_dim / 2) mod 2``.
    ko : KOClass, optional
        Clifford-module class of the kernel, when symmetry data was supplied.
    pfaffian_signs : tuple, optional
        ``(sign Pf(J0), sign Pf(J1))`` in the shared Real basis.
    diagnostics : dict
        Tolerances, spectral gaps and residuals of the run.
    """

    kernel_dim: int
    z2: int
    ko: Optional[KOClass] = None
    pfaffian_signs: Optional[tuple] = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kernel_dim % 2:
            raise ComputationError(
                f"pair kernel has odd dimension {self.kernel_dim}"
            )
        if self.z2 != (self.kernel_dim // 2) % 2:
            raise ComputationError(
                f"z2 = {self.z2} inconsistent with kernel_dim = {self.kernel_dim}"
            )


@dataclass(frozen=True)
class GroupElement:
    """One represented symmetry: a unitary matrix, possibly composed with
    complex conjugation (``antiunitary=True``)."""

    label: str
    matrix: np.ndarray
    antiunitary: bool = False


@dataclass(frozen=True)
class SymmetryData:
    """Background symmetries shared by both states of a pair.

    Parameters
    ----------
    kappas : tuple
        Real skew-adjoint unitaries that anticommute with each other and with
        both ``J``'s — background Clifford generators.
    group_reps : tuple
        :class:`GroupElement` entries (or ``(label, matrix, antiunitary)``
        tuples) commuting with ``Gamma`` and with both ``J``'s.
    """

    kappas: tuple = ()
    group_reps: tuple = ()

    def __post_init__(self):
        reps = []
        for r in self.group_reps:
            if not isinstance(r, GroupElement):
                r = GroupElement(label=str(r[0]), matrix=np.asarray(r[1]),
                                 antiunitary=bool(r[2]))
            reps.append(r)
        object.__setattr__(self, "group_reps", tuple(reps))
        object.__setattr__(
            self, "kappas", tuple(np.asarray(_as_matrix(k), dtype=complex)
                                  for k in self.kappas)
        )

    def validate(self, j0, j1, g: RealStructure, tol: float = 1e-9) -> None:
        """Check every structural relation; raise :class:`ComputationError`
        naming the first violated one."""
        a0, a1 = _mat(j0), _mat(j1)
        n = a0.shape[0]
        eye = np.eye(n)
        for i, k in enumerate(self.kappas):
            if k.shape != (n, n):
                raise ComputationError(f"kappa_{i} has wrong shape {k.shape}")
            RealSkewUnitary.from_matrix(k, g)  # Real + skew-adjoint + unitary
            for name, a in (("j0", a0), ("j1", a1)):
                if _opnorm(k @ a + a @ k) > tol * n:
                    raise ComputationError(
                        f"kappa_{i} does not anticommute with {name}"
                    )
            for m in range(i):
                if _opnorm(k @ self.kappas[m] + self.kappas[m] @ k) > tol * n:
                    raise ComputationError(
                        f"kappa_{i} and kappa_{m} do not anticommute"
                    )
        c = g.c_matrix
        for r in self.group_reps:
            w = np.asarray(r.matrix, dtype=complex)
            if w.shape != (n, n):
                raise ComputationError(f"rep {r.label!r} has wrong shape")
            if _opnorm(w.conj().T @ w - eye) > tol * n:
                raise ComputationError(f"rep {r.label!r} is not unitary")
            if r.antiunitary:
                gamma_comm = w @ np.conj(c) - c @ np.conj(w)
            else:
                gamma_comm = w @ c - c @ np.conj(w)
            if _opnorm(gamma_comm) > tol * n:
                raise ComputationError(
                    f"rep {r.label!r} does not commute with Gamma"
                )
            for name, a in (("j0", a0), ("j1", a1)):
                comm = (w @ np.conj(a) - a @ w) if r.antiunitary \
                    else (w @ a - a @ w)
                if _opnorm(comm) > tol * n:
                    raise ComputationError(
                        f"rep {r.label!r} does not commute with {name}"
                    )


# ---------------------------------------------------------------------------
# kernel-parity indices


def _pair_kernel(j0, j1, tol: float):
    """Kernel basis of ``J0 + J1`` plus the spectral gap above it."""
    a = _mat(j0) + _mat(j1)
    k = kernel(a, tol)  # AmbiguousKernelError when the cut is unsafe
    sv = np.linalg.svd(a, compute_uv=False)
    retained = sv[sv > (tol * sv[0] if sv.size else 0.0)]
    gap = float(retained[-1]) if retained.size else float("inf")
    return k, gap


def pair_index_z2(j0, j1, tol: float = 1e-7) -> PairIndexResult:
    """Z2 index of a pair: half the pair-kernel dimension, mod 2.

    ``ker(J0 + J1)`` is even-dimensional for any two Real skew-adjoint
    unitaries (it is Gamma-invariant and carries the restriction of ``J0``,
    a complex structure on a real subspace); an odd kernel therefore raises
    :class:`ComputationError` as an input diagnosis rather than an answer.

    Raises
    ------
    AmbiguousKernelError
        When a singular value of ``J0 + J1`` sits in the band where the
        kernel dimension depends on the cut.
    """
    k, gap = _pair_kernel(j0, j1, tol)
    kd = k.shape[1]
    if kd % 2:
        raise ComputationError(
            f"odd pair-kernel dimension {kd}: inputs are not a Real "
            "skew-adjoint unitary pair at this tolerance"
        )
    return PairIndexResult(
        kernel_dim=kd,
        z2=(kd // 2) % 2,
        diagnostics={"tol": tol, "kernel_gap": gap},
    )


def pair_index_ko(j0, j1, sym: SymmetryData, g: RealStructure,
                  tol: float = 1e-7) -> PairIndexResult:
    """Clifford-module index of a pair with background symmetries.

    The pair kernel is invariant under ``J0`` and under each ``kappa``; the
    restrictions, in the order ``(J0, kappa_1, ..., kappa_n)``, are ``n + 1``
    anticommuting Real skew-adjoint unitaries making the kernel a module over
    a negative-definite Clifford algebra.  The result's ``ko`` is that
    module's class (degree ``n + 2`` mod 8).  With no kappas the class
    reduces to the Z2 index.

    Raises
    ------
    ComputationError
        If a symmetry relation fails or the kernel is not invariant under a
        generator beyond tolerance.
    InvalidModuleError
        If the restricted generators fail the Clifford relations.
    """
    sym.validate(j0, j1, g)
    a0 = _mat(j0)
    k, gap = _pair_kernel(j0, j1, tol)
    kd = k.shape[1]
    if kd % 2:
        raise ComputationError(f"odd pair-kernel dimension {kd}")

    gens_full = (a0,) + sym.kappas
    names = ("j0",) + tuple(f"kappa_{i}" for i in range(len(sym.kappas)))
    proj_out = np.eye(a0.shape[0]) - k @ k.conj().T
    restricted = []
    inv_residuals = {}
    for name, gen in zip(names, gens_full):
        res = _opnorm(proj_out @ (gen @ k))
        inv_residuals[name] = res
        if res > 100 * tol:
            raise ComputationError(
                f"pair kernel is not invariant under {name} "
                f"(residual {res:.3e})"
            )
        restricted.append(k.conj().T @ gen @ k)

    c_ker = k.conj().T @ g.c_matrix @ np.conj(k)
    module = CliffordModule(
        dim=kd,
        generators=tuple(restricted),
        signature=CliffordSignature(0, len(gens_full)),
        real_structure=RealStructure(kd, c_ker) if kd else None,
    )
    report = check_relations(module, tol=1e-7)
    if not report.passed:
        raise InvalidModuleError(
            f"restricted generators violate the Clifford relations: "
            f"worst residual {max(report.residuals.values()):.3e}"
        )
    ko = abs_class(module, len(gens_full))
    diag = {"tol": tol, "kernel_gap": gap}
    diag.update({f"invariance_{n}": v for n, v in inv_residuals.items()})
    if report.residuals:
        diag["relation_residual"] = max(report.residuals.values())
    return PairIndexResult(kernel_dim=kd, z2=(kd // 2) % 2, ko=ko,
                           diagnostics=diag)


def pfaffian_pair_index(j0, j1, g: RealStructure) -> int:
    """Z2 index of a pair from two Pfaffian signs, no pair kernel needed.

    Both operators are rewritten as real antisymmetric matrices in the one
    deterministic basis of Gamma-fixed vectors; each individual Pfaffian sign
    depends on that basis, their disagreement does not.  Equals
    ``pair_index_z2(j0, j1).z2`` whenever the pair kernel is unambiguous.

    Raises
    ------
    PfaffianConditioningError
        If either Pfaffian is too small to carry a trustworthy sign — for
        genuine skew-adjoint unitaries ``|Pf| = 1``, so this fires only on
        invalid input.
    """
    signs = []
    for name, j in (("j0", j0), ("j1", j1)):
        p = pfaffian(realify(j, g))
        if abs(p) < 1e-10:
            raise PfaffianConditioningError(
                f"|Pf({name})| = {abs(p):.3e} is numerically zero"
            )
        signs.append(1 if p > 0 else -1)
    return int(signs[0] != signs[1])


def pair_index(j0, j1, g: RealStructure, sym: Optional[SymmetryData] = None,
               tol: float = 1e-7) -> PairIndexResult:
    """Full index record: kernel parity, Pfaffian signs, optional KO class.

    The Pfaffian route and the kernel route compute the same Z2 bit by
    different means; a disagreement would mean the numerics broke, and is
    raised as :class:`ComputationError` rather than silently reported.
    """
    if sym is not None and sym.kappas:
        result = pair_index_ko(j0, j1, sym, g, tol=tol)
    else:
        if sym is not None:
            sym.validate(j0, j1, g)
        result = pair_index_z2(j0, j1, tol=tol)
    signs = []
    for j in (j0, j1):
        p = pfaffian(realify(j, g))
        if abs(p) < 1e-10:
            raise PfaffianConditioningError(f"|Pf| = {abs(p):.3e}")
        signs.append(1 if p > 0 else -1)
    bit = int(signs[0] != signs[1])
    if bit != result.z2:
        raise ComputationError(
            f"Pfaffian bit {bit} disagrees with kernel parity {result.z2}"
        )
    diag = dict(result.diagnostics)
    diag["pfaffian_bit"] = bit
    return PairIndexResult(kernel_dim=result.kernel_dim, z2=result.z2,
                           ko=result.ko, pfaffian_signs=tuple(signs),
                           diagnostics=diag)


# ---------------------------------------------------------------------------
# spectral flow


@dataclass(frozen=True)
class FlowResult:
    """Outcome of tracking the Pfaffian sign along a Hamiltonian path.

    ``bit`` compares the endpoint signs (the invariant); ``crossings`` are
    the localized parameters in ``[0, 1]`` where the sign flips, refined to
    ``refine_width`` or to the width of the degenerate pocket around the
    crossing, whichever is larger.  An even number of flips inside one
    unresolvable pocket cancels and is not listed.
    """

    bit: int
    endpoint_signs: tuple
    crossings: tuple
    evaluations: int


def z2_spectral_flow(path, g: RealStructure, gap_tol: float = 1e-6,
                     refine_width: float = 1e-6,
                     degeneracy_floor: float = 1e-3) -> FlowResult:
    """Z2 spectral flow of a path of particle-hole symmetric Hamiltonians.

    Each sample must be Hermitian and satisfy ``Gamma H Gamma = -H``; the
    path between consecutive samples is the linear interpolant (which keeps
    both properties exactly).  At a parameter where the relative spectral
    gap of ``H`` exceeds ``gap_tol``, the sign of ``Pf(realify(iH/||H||))``
    is defined; the flow bit compares this sign at the two endpoints.
    Degenerate interior samples and sign flips are refined by adaptive
    bisection down to ``refine_width``.

    Parameters
    ----------
    path : sequence of array_like
        At least two Hamiltonian samples of equal shape.
    g : RealStructure

    Raises
    ------
    GapClosedError
        If an endpoint is degenerate — the flow starts or ends undefined.
    UnresolvedDegeneracyError
        If the sign cannot be resolved anywhere on a window wider than
        ``degeneracy_floor`` — the path is gapless on a whole stretch, not
        just at isolated crossings.
    """
    samples = [np.asarray(_as_matrix(h), dtype=complex) for h in path]
    if len(samples) < 2:
        raise ComputationError("a path needs at least two samples")
    n = samples[0].shape[0]
    for i, h in enumerate(samples):
        if h.shape != (n, n):
            raise ComputationError(f"sample {i} has shape {h.shape}")
        if _opnorm(h - h.conj().T) > 1e-8 * max(1.0, _opnorm(h)):
            raise ComputationError(f"sample {i} is not Hermitian")
        if _opnorm(g.conjugate_operator(h) + h) > 1e-8 * max(1.0, _opnorm(h)):
            raise ComputationError(
                f"sample {i} is not particle-hole symmetric"
            )

    counter = [0]

    def sign_at(h: np.ndarray):
        counter[0] += 1
        scale = _opnorm(h)
        if scale == 0.0:
            return None
        if np.min(np.abs(np.linalg.eigvalsh(h))) < gap_tol * scale:
            return None
        s, logabs = pfaffian_sign_logabs(realify(1j * h / scale, g))
        if s == 0.0 or not np.isfinite(logabs):
            return None
        return int(s)

    params = np.linspace(0.0, 1.0, len(samples))

    def interp(t: float) -> np.ndarray:
        i = min(int(np.searchsorted(params, t, side="right")) - 1,
                len(samples) - 2)
        i = max(i, 0)
        u = (t - params[i]) / (params[i + 1] - params[i])
        return (1.0 - u) * samples[i] + u * samples[i + 1]

    signs = [sign_at(h) for h in samples]
    if signs[0] is None:
        raise GapClosedError("path start is degenerate at gap_tol")
    if signs[-1] is None:
        raise GapClosedError("path end is degenerate at gap_tol")

    _FRACS = (0.5, 0.375, 0.625, 0.25, 0.75, 0.4375, 0.5625)

    def refine(t0, s0, t1, s1, hidden, out):
        width = t1 - t0
        if s0 == s1 and not hidden:
            return
        if width <= refine_width:
            if s0 != s1:
                out.append(0.5 * (t0 + t1))
            return
        for frac in _FRACS:
            tm = t0 + width * frac
            sm = sign_at(interp(tm))
            if sm is not None:
                refine(t0, s0, tm, sm, [t for t in hidden if t < tm], out)
                refine(tm, sm, t1, s1, [t for t in hidden if t > tm], out)
                return
        # every probe inside is degenerate at gap_tol.  A narrow pocket is a
        # localized crossing region; a wide one means the path is genuinely
        # gapless on a stretch and interior structure cannot be resolved.
        if width <= degeneracy_floor:
            if s0 != s1:
                out.append(0.5 * (t0 + t1))
            return
        raise UnresolvedDegeneracyError(
            f"Pfaffian sign unresolvable anywhere in ({t0:.6g}, {t1:.6g}); "
            f"the path is degenerate (at gap_tol={gap_tol:g}) on a window "
            f"wider than {degeneracy_floor:g}"
        )

    crossings = []
    resolved = [i for i, s in enumerate(signs) if s is not None]
    for a, b in zip(resolved, resolved[1:]):
        hidden = [params[m] for m in range(a + 1, b)]
        refine(params[a], signs[a], params[b], signs[b], hidden, crossings)

    return FlowResult(
        bit=int(signs[0] != signs[-1]),
        endpoint_signs=(signs[0], signs[-1]),
        crossings=tuple(sorted(crossings)),
        evaluations=counter[0],
    )


# ---------------------------------------------------------------------------
# homotopy certificates and obstruction witnesses


@dataclass(frozen=True)
class ObstructionReport:
    """Outcome of searching for a gapped interpolation between two states.

    ``verdict`` is one of

    ``"path_certified"``
        A piecewise-linear path (after pointwise polar re-unitarization)
        stays uniformly invertible: the two states are connected and the
        index is 0.
    ``"obstruction_witnessed"``
        Every attempted path passed within ``gap_tol`` of a singular
        operator, as the nonzero index demands.
    ``"inconclusive"``
        Neither certificate was established within the trial budget.
    """

    z2: int
    kernel_dim: int
    verdict: str
    direct_path_min: float
    attempt_minima: tuple
    certified_margin: Optional[float]
    gap_tol: float


def _segment_min_sv(a: np.ndarray, b: np.ndarray, ts: np.ndarray) -> float:
    out = np.inf
    for t in ts:
        sv = np.linalg.svd((1.0 - t) * a + t * b, compute_uv=False)
        out = min(out, float(sv[-1]))
    return out


def homotopy_obstruction_test(j0, j1, g: RealStructure, trials: int = 12,
                              grid_points: int = 41, seed: int = 0,
                              gap_tol: float = 1e-6,
                              cert_tol: float = 1e-3) -> ObstructionReport:
    """Try to connect two states, or watch every attempt hit a wall.

    A pair with index 0 should admit a path of Real skew-adjoint unitaries
    joining ``J0`` to ``J1``; a pair with index 1 cannot.  This op makes the
    dichotomy operational: piecewise-linear candidate paths through random
    Real skew-unitary midpoints are scanned for their minimal singular
    value on a ``grid_points`` grid per leg (the grid contains the exact
    midpoint ``t = 1/2`` where a linear leg between skew unitaries can be
    singular).  A path whose minimum stays above ``cert_tol`` certifies
    connectedness — its pointwise polar phases form the actual unitary path.
    For index-1 pairs every leg split has odd total parity, which forces one
    leg through an exactly singular midpoint; all attempts reporting minima
    below ``gap_tol`` is recorded as a witness of the obstruction.
    """
    if grid_points < 3 or grid_points % 2 == 0:
        raise ValueError("grid_points must be odd and at least 3")
    a0, a1 = _mat(j0), _mat(j1)
    base = pair_index_z2(j0, j1)
    rng = np.random.default_rng(seed)
    ts = np.linspace(0.0, 1.0, grid_points)

    direct_min = _segment_min_sv(a0, a1, ts)

    if base.z2 == 0:
        candidates = [[(a0, a1)]]
        for _ in range(max(0, trials - 1)):
            m = random_real_skew_unitary(g, rng).matrix
            candidates.append([(a0, m), (m, a1)])
        minima = []
        for legs in candidates:
            margin = min(_segment_min_sv(a, b, ts) for a, b in legs)
            minima.append(margin)
            if margin > cert_tol:
                _check_polar_path(legs, g, ts)
                return ObstructionReport(
                    z2=0, kernel_dim=base.kernel_dim,
                    verdict="path_certified", direct_path_min=direct_min,
                    attempt_minima=tuple(minima), certified_margin=margin,
                    gap_tol=gap_tol,
                )
        return ObstructionReport(
            z2=0, kernel_dim=base.kernel_dim, verdict="inconclusive",
            direct_path_min=direct_min, attempt_minima=tuple(minima),
            certified_margin=None, gap_tol=gap_tol,
        )

    minima = [direct_min]
    for _ in range(max(0, trials - 1)):
        m = random_real_skew_unitary(g, rng).matrix
        margin = min(_segment_min_sv(a0, m, ts),
                     _segment_min_sv(m, a1, ts))
        minima.append(margin)
    witnessed = all(v < gap_tol for v in minima)
    return ObstructionReport(
        z2=1, kernel_dim=base.kernel_dim,
        verdict="obstruction_witnessed" if witnessed else "inconclusive",
        direct_path_min=direct_min, attempt_minima=tuple(minima),
        certified_margin=None, gap_tol=gap_tol,
    )


def _check_polar_path(legs, g: RealStructure, ts: np.ndarray) -> None:
    """Re-unitarize a few points of a certified path and verify they are
    Real skew-adjoint unitaries (the polar phase of an invertible Real
    skew-adjoint operator is one)."""
    for a, b in legs:
        for t in ts[:: max(1, len(ts) // 4)]:
            x = (1.0 - t) * a + t * b
            u, _, vh = np.linalg.svd(x)
            RealSkewUnitary.from_matrix(u @ vh, g, tol=1e-6)


# ---------------------------------------------------------------------------
# equivariant characters


@dataclass(frozen=True)
class CharacterEntry:
    label: str
    antiunitary: bool
    value: float
    invariance_residual: float


@dataclass(frozen=True)
class CharacterTable:
    """Characters of represented symmetries on one pair kernel.

    Unitary characters are complex traces (real by Gamma-invariance, and
    asserted so); antiunitary entries are traces of the real-linear action
    on the Gamma-fixed real form of the kernel — over the full complex
    kernel an antilinear map has identically vanishing real trace, so that
    restriction is the only informative normalization, and the two kinds of
    entry are reported on the same footing.
    """

    kernel_dim: int
    entries: tuple
    j0_invariance_residual: float
    cl01_module: bool


def equivariant_kernel_character(j0, j1, sym: SymmetryData, g: RealStructure,
                                 tol: float = 1e-8,
                                 kernel_tol: float = 1e-7) -> CharacterTable:
    """Character table of a symmetry group acting on a pair kernel.

    Every represented element must commute with ``Gamma`` and with both
    ``J``'s (checked by ``sym.validate``); the pair kernel is then invariant
    and each element restricts.  Kernel invariance is nevertheless verified
    per element and a violation beyond ``tol`` raises
    :class:`ComputationError` — it means the inputs were not what they
    claimed.

    The ``cl01_module`` flag records that ``J0`` itself restricts to the
    kernel (with its residual), making the kernel a module over one negative
    Clifford generator — the structure underlying the Z2 index.
    """
    sym.validate(j0, j1, g, tol=max(tol, 1e-9))
    a0 = _mat(j0)
    k, _ = _pair_kernel(j0, j1, kernel_tol)
    kd = k.shape[1]
    proj_out = np.eye(a0.shape[0]) - k @ k.conj().T

    entries = []
    real_form = None
    for r in sym.group_reps:
        w = np.asarray(r.matrix, dtype=complex)
        wk = w @ np.conj(k) if r.antiunitary else w @ k
        res = _opnorm(proj_out @ wk)
        if res > tol * max(1.0, kd):
            raise ComputationError(
                f"pair kernel is not invariant under rep {r.label!r} "
                f"(residual {res:.3e})"
            )
        if r.antiunitary:
            if real_form is None:
                c_ker = k.conj().T @ g.c_matrix @ np.conj(k)
                real_form = k @ RealStructure(kd, c_ker).real_basis \
                    if kd else k
            chi = 0.0
            for i in range(real_form.shape[1]):
                b = real_form[:, i]
                chi += float(np.real(b.conj() @ (w @ np.conj(b))))
        else:
            trace = complex(np.trace(k.conj().T @ w @ k))
            if abs(trace.imag) > 1e-8 * max(1.0, abs(trace)):
                raise ComputationError(
                    f"unitary character of {r.label!r} has imaginary part "
                    f"{trace.imag:.3e}; Gamma-invariance broken"
                )
            chi = float(trace.real)
        entries.append(CharacterEntry(label=r.label, antiunitary=r.antiunitary,
                                      value=chi, invariance_residual=res))

    res_j0 = _opnorm(proj_out @ (a0 @ k))
    return CharacterTable(
        kernel_dim=kd,
        entries=tuple(entries),
        j0_invariance_residual=res_j0,
        cl01_module=bool(res_j0 <= tol * max(1.0, kd)),
    )


# ---------------------------------------------------------------------------
# half-space restriction


@dataclass(frozen=True)
class EdgeModes:
    """Near-zero weight attributed to one connected boundary component."""

    sites: tuple
    weight: float
    count: int
    parity: int


@dataclass(frozen=True)
class HalfSpaceReport:
    """Boundary-mode census of a Hamiltonian restricted to a half space.

    ``rotation_residual`` is ``||exp(pi * Jt) + 1||`` for the polar phase
    ``Jt`` of the compressed flattening — identically zero whenever that
    compression is invertible, hence only a consistency diagnostic; the
    actual topological signal is ``compressed_flattening_gap`` collapsing
    (the compression approaching a kernel), reported by
    ``flattening_singular``.
    """

    cut_sites: tuple
    tol_edge: float
    bulk_gap: float
    near_zero: tuple
    total_count: int
    splitting: float
    ph_asymmetry: float
    edges: tuple
    compressed_flattening_gap: float
    flattening_singular: bool
    rotation_residual: Optional[float]


def half_space_boundary(system: BdgSystem, cut, tol: Optional[float] = None,
                        singular_tol: float = 1e-6) -> HalfSpaceReport:
    """Restrict a gapped system to a set of sites and take a mode census.

    The Hamiltonian is compressed to the Nambu components of ``cut`` (an
    iterable of site indices, or a predicate on them) with open boundary
    conditions — matrix truncation, nothing re-glued.  Eigenvalues with
    ``|E| < tol_edge`` (``tol`` if given, else a tenth of the bulk gap) are
    the near-zero modes; their weight is attributed to connected components
    of the boundary (cut sites adjacent to the complement), giving a mode
    count and a parity per edge.  The parity per edge is the boundary
    shadow of the bulk pair index against the atomic reference.
    """
    geom = system.geometry
    if callable(cut):
        sites = [i for i in range(geom.n_sites) if cut(i)]
    else:
        sites = sorted(set(int(i) for i in cut))
    if not sites or len(sites) >= geom.n_sites:
        raise ComputationError("cut must be a proper nonempty subset of sites")
    if sites[0] < 0 or sites[-1] >= geom.n_sites:
        raise ComputationError("cut site index out of range")

    d = geom.internal_dim
    m = geom.one_particle_dim
    part = np.concatenate([np.arange(s * d, (s + 1) * d) for s in sites])
    idx = np.concatenate([part, m + part])
    hc = system.h[np.ix_(idx, idx)]

    tol_edge = float(tol) if tol is not None else 0.1 * system.gap
    evals, evecs = np.linalg.eigh(hc)
    near = np.abs(evals) < tol_edge
    near_vals = evals[near]

    # boundary components
    dist = geom.distance_matrix
    in_cut = np.zeros(geom.n_sites, dtype=bool)
    in_cut[sites] = True
    adj_eps = 1.0 + 1e-9
    boundary = [s for s in sites
                if np.any(dist[s][~in_cut] <= adj_eps)]
    components = []
    unseen = set(boundary)
    while unseen:
        seed_site = unseen.pop()
        comp = {seed_site}
        frontier = [seed_site]
        while frontier:
            x = frontier.pop()
            nbrs = [y for y in unseen if dist[x, y] <= adj_eps]
            for y in nbrs:
                unseen.discard(y)
                comp.add(y)
                frontier.append(y)
        components.append(tuple(sorted(comp)))
    components.sort()

    # attribution shares: each cut site splits its weight among the nearest
    # boundary components (ties split equally)
    n_cut = len(sites)
    shares = np.zeros((n_cut, len(components)))
    if components:
        for a, s in enumerate(sites):
            dc = np.array([min(dist[s, b] for b in comp)
                           for comp in components])
            nearest = dc <= dc.min() + 1e-9
            shares[a, nearest] = 1.0 / np.count_nonzero(nearest)

    # per-eigenvector site weights on the compressed lattice
    weights = np.zeros(len(components))
    nc = len(sites) * d
    for v in evecs[:, near].T:
        w_site = np.abs(v[:nc].reshape(n_cut, d)) ** 2
        w_site = w_site.sum(axis=1)
        w_site += (np.abs(v[nc:].reshape(n_cut, d)) ** 2).sum(axis=1)
        weights += w_site @ shares

    edges = []
    for comp, w in zip(components, weights):
        count = int(round(w))
        edges.append(EdgeModes(sites=comp, weight=float(w), count=count,
                               parity=count % 2))

    splitting = float(near_vals.max() - near_vals.min()) \
        if near_vals.size >= 2 else 0.0
    srt = np.sort(near_vals)
    ph_asym = float(np.max(np.abs(srt + srt[::-1]))) if srt.size else 0.0

    # compressed flattening and its polar phase
    jc = system.j.matrix[np.ix_(idx, idx)]
    mu, v = np.linalg.eigh(-1j * jc)
    mu_max = float(np.max(np.abs(mu))) if mu.size else 0.0
    gap_rel = float(np.min(np.abs(mu)) / mu_max) if mu_max > 0 else 0.0
    singular = gap_rel < singular_tol
    residual = None
    if not singular:
        w_phase = (v * (1j * np.sign(mu))) @ v.conj().T
        residual = float(_opnorm(
            scipy.linalg.expm(np.pi * w_phase) + np.eye(len(mu))
        ))

    return HalfSpaceReport(
        cut_sites=tuple(sites),
        tol_edge=tol_edge,
        bulk_gap=float(system.gap),
        near_zero=tuple(float(x) for x in near_vals),
        total_count=int(np.count_nonzero(near)),
        splitting=splitting,
        ph_asymmetry=ph_asym,
        edges=tuple(edges),
        compressed_flattening_gap=gap_rel,
        flattening_singular=bool(singular),
        rotation_residual=residual,
    )
