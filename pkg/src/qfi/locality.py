"""Coarse-geometry diagnostics for lattice operators.

Every operator here lives on the Nambu space of a :class:`LatticeGeometry`
(dimension ``2 * n_sites * internal_dim``).  The questions asked are metric,
not spectral: how far does an operator propagate, how badly does it fail to
commute with site windows, and how fast does the difference of two ground
state projections decay away from a center.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_linalg import _as_matrix, _opnorm
from .errors import ComputationError, DimensionMismatchError
from .models import LatticeGeometry, site_projection

__all__ = [
    "LocalityReport",
    "WindowCommutator",
    "propagation",
    "pseudolocality_profile",
    "local_equivalence_curve",
    "roe_membership_score",
    "locality_report",
]


def _check_dim(m: np.ndarray, geom: LatticeGeometry, what: str) -> None:
    if m.shape != (geom.bdg_dim, geom.bdg_dim):
        raise DimensionMismatchError(
            f"{what} has shape {m.shape}, geometry wants "
            f"({geom.bdg_dim}, {geom.bdg_dim})"
        )


def _site_indices(geom: LatticeGeometry) -> list:
    """Per site, the Nambu row/column indices (particle block + hole block)."""
    m = geom.one_particle_dim
    d = geom.internal_dim
    out = []
    for i in range(geom.n_sites):
        p = np.arange(i * d, (i + 1) * d)
        out.append(np.concatenate([p, m + p]))
    return out


def _index_to_site(geom: LatticeGeometry) -> np.ndarray:
    m = geom.one_particle_dim
    sites = np.repeat(np.arange(geom.n_sites), geom.internal_dim)
    return np.concatenate([sites, sites])


@dataclass(frozen=True)
class WindowCommutator:
    """Commutator data of one site window against an operator."""

    label: str
    sites: tuple
    commutator_norm: float
    rank_above_tol: int


@dataclass(frozen=True)
class LocalityReport:
    """Aggregated locality diagnostics for one operator (or pair).

    Attributes
    ----------
    propagation_radius : float
        Largest distance between sites coupled above tolerance.
    commutator_profile : tuple
        ``(window label, commutator norm)`` pairs.
    hs_curve : tuple
        ``(radius, Hilbert-Schmidt norm)`` pairs with strictly increasing
        radii; empty when no projection pair was supplied.
    verdicts : dict
        Named boolean membership verdicts.
    """

    propagation_radius: float
    commutator_profile: tuple = ()
    hs_curve: tuple = ()
    verdicts: dict = field(default_factory=dict)

    def __post_init__(self):
        radii = [r for r, _ in self.hs_curve]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("hs_curve radii must be strictly increasing")


def propagation(t, geom: LatticeGeometry, tol: float = 1e-12) -> float:
    """Propagation radius of an operator over the lattice metric.

    Returns the maximum of ``d(x, y)`` over site pairs whose coupling block
    ``p_y T p_x`` has operator norm above ``tol``.  A diagonal operator (in
    the site sense) has propagation 0.

    Parameters
    ----------
    t : array_like
        Operator on the Nambu space of ``geom``.
    geom : LatticeGeometry
    tol : float
        Couplings at or below this operator norm are treated as absent.
    """
    m = _as_matrix(t)
    _check_dim(m, geom, "operator")
    blocks = _site_indices(geom)
    dist = geom.distance_matrix
    radius = 0.0
    for x in range(geom.n_sites):
        for y in range(geom.n_sites):
            if dist[y, x] <= radius:
                continue
            sub = m[np.ix_(blocks[y], blocks[x])]
            if _opnorm(sub) > tol:
                radius = float(dist[y, x])
    return radius


def pseudolocality_profile(t, geom: LatticeGeometry, windows,
                           tol: float = 1e-8) -> tuple:
    """Commutators of an operator with a family of site windows.

    For each window ``W`` the commutator ``[p_W, T]`` is formed with the
    diagonal site projection ``p_W``; its operator norm and the number of its
    singular values above ``tol`` are reported.  A small count flags the
    commutator as close to finite rank (compact, in the large-lattice
    reading) even when its norm is order one.

    Parameters
    ----------
    windows : iterable
        Either site iterables, or ``(label, sites)`` pairs.

    Returns
    -------
    tuple of WindowCommutator
    """
    m = _as_matrix(t)
    _check_dim(m, geom, "operator")
    out = []
    for k, w in enumerate(windows):
        if isinstance(w, tuple) and len(w) == 2 and isinstance(w[0], str):
            label, sites = w
        else:
            label, sites = f"window_{k}", w
        sites = tuple(sorted(set(int(i) for i in sites)))
        p = site_projection(geom, sites)
        comm = p @ m - m @ p
        sv = np.linalg.svd(comm, compute_uv=False)
        norm = float(sv[0]) if sv.size else 0.0
        rank = int(np.count_nonzero(sv > tol))
        out.append(WindowCommutator(label=label, sites=sites,
                                    commutator_norm=norm, rank_above_tol=rank))
    return tuple(out)


def local_equivalence_curve(p0, p1, geom: LatticeGeometry, center: int,
                            radii) -> tuple:
    """Hilbert-Schmidt weight of ``P0 - P1`` inside growing balls.

    For each radius ``R`` reports ``||Pi_R (P0 - P1) Pi_R||_HS`` where
    ``Pi_R`` projects onto the closed metric ball around ``center``.  The
    curve is nondecreasing in ``R`` by construction (the squared weight is a
    prefix sum of nonnegative entries, accumulated once in increasing
    distance order).

    Both inputs are validated as basis projections: ``P^2 = P = P*`` and
    ``Gamma P Gamma = 1 - P`` with the Nambu involution of ``geom``, each to
    1e-8, else :class:`ComputationError`.

    Returns
    -------
    tuple of (radius, float)
        Sorted by radius, duplicates removed.
    """
    from .core_linalg import nambu_involution

    a0 = _as_matrix(p0)
    a1 = _as_matrix(p1)
    _check_dim(a0, geom, "projection")
    _check_dim(a1, geom, "projection")
    g = nambu_involution(geom.one_particle_dim)
    eye = np.eye(geom.bdg_dim)
    for name, a in (("p0", a0), ("p1", a1)):
        if _opnorm(a @ a - a) > 1e-8 or _opnorm(a - a.conj().T) > 1e-8:
            raise ComputationError(f"{name} is not a projection")
        if _opnorm(g.conjugate_operator(a) - (eye - a)) > 1e-8:
            raise ComputationError(
                f"{name} is not a basis projection (Gamma p Gamma != 1 - p)"
            )
    if not (0 <= int(center) < geom.n_sites):
        raise ValueError("center site out of range")

    diff = a0 - a1
    idx_site = _index_to_site(geom)
    d_center = geom.distance_matrix[int(center)][idx_site]
    # Entry (r, c) becomes visible once the ball swallows both indices.
    key = np.maximum(d_center[:, None], d_center[None, :])
    w = np.abs(diff) ** 2

    order = np.argsort(key, axis=None, kind="stable")
    key_flat = key.ravel()[order]
    w_flat = w.ravel()[order]
    cum = np.cumsum(w_flat)

    radii = sorted(set(float(r) for r in radii))
    if not radii:
        return ()
    out = []
    for r in radii:
        # last flattened entry with key <= r (+ metric slack)
        pos = int(np.searchsorted(key_flat, r + 1e-9, side="right"))
        val = float(np.sqrt(cum[pos - 1])) if pos > 0 else 0.0
        out.append((r, val))
    return tuple(out)


def roe_membership_score(t, geom: LatticeGeometry, tols: dict = None) -> dict:
    """Named membership verdicts for the coarse-geometry operator classes.

    Two verdicts are produced, keyed by the tolerance that defines them:

    ``finite_propagation@<tol>``
        True when :func:`propagation` at ``propagation_tol`` is at most
        ``max_radius`` (default: half the lattice diameter, floored).  On a
        fixed finite lattice every operator has finite propagation; the
        radius bound is what separates genuinely short-range operators from
        ones that couple across the sample.

    ``locally_compact@<tol>``
        True when the fraction of sites ``x`` with
        ``max(||T p_x||, ||p_x T||) > compact_tol`` is at most
        ``site_fraction`` (default 0.5) -- the finite-size proxy for ``T p_x``
        and ``p_x T`` being compact for every site.

    Parameters
    ----------
    tols : dict, optional
        Keys ``propagation_tol`` (default 1e-8), ``compact_tol`` (1e-8),
        ``max_radius``, ``site_fraction``.
    """
    tols = dict(tols or {})
    ptol = float(tols.pop("propagation_tol", 1e-8))
    ctol = float(tols.pop("compact_tol", 1e-8))
    max_radius = tols.pop("max_radius", None)
    frac_cap = float(tols.pop("site_fraction", 0.5))
    if tols:
        raise ValueError(f"unknown tolerance keys: {sorted(tols)}")
    if max_radius is None:
        max_radius = float(np.floor(geom.diameter() / 2.0))

    m = _as_matrix(t)
    _check_dim(m, geom, "operator")
    radius = propagation(m, geom, tol=ptol)

    blocks = _site_indices(geom)
    heavy = 0
    for b in blocks:
        col = _opnorm(m[:, b])
        row = _opnorm(m[b, :])
        if max(col, row) > ctol:
            heavy += 1
    frac = heavy / geom.n_sites

    return {
        f"finite_propagation@{ptol:g}": bool(radius <= max_radius + 1e-9),
        f"locally_compact@{ctol:g}": bool(frac <= frac_cap),
    }


def locality_report(t, geom: LatticeGeometry, windows=(), tol: float = 1e-8,
                    projection_pair=None, center: int = 0,
                    radii=None, tols: dict = None) -> LocalityReport:
    """One-stop locality summary used by the command line ``locality`` path.

    Combines :func:`propagation`, :func:`pseudolocality_profile` over
    ``windows``, an optional :func:`local_equivalence_curve` for a pair of
    basis projections, and the :func:`roe_membership_score` verdicts.
    """
    profile = pseudolocality_profile(t, geom, windows, tol=tol)
    curve = ()
    if projection_pair is not None:
        p0, p1 = projection_pair
        if radii is None:
            radii = sorted(set(np.unique(geom.distance_matrix[int(center)])))
        curve = local_equivalence_curve(p0, p1, geom, center, radii)
    verdicts = roe_membership_score(t, geom, tols=tols)
    return LocalityReport(
        propagation_radius=propagation(t, geom, tol=max(tol, 1e-12)),
        commutator_profile=tuple((w.label, w.commutator_norm) for w in profile),
        hs_curve=curve,
        verdicts=verdicts,
    )
