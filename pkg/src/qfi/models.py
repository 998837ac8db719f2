"""Finite lattice models of gapped quasifree (BdG) ground states.

A one-particle space ``C^M`` with ``M = n_sites * internal_dim`` is doubled to
the Nambu space ``C^{2M}`` (all particle components first, then all hole
components; sites are enumerated site-major, orbitals within a site).  A
Hamiltonian is assembled from a hopping block ``h`` and a pairing block
``delta`` with ``delta.T = -delta``::

    H = [[h, delta], [delta^*, -conj(h)]]

and automatically anticommutes with the particle-hole involution
``nambu_involution(M)``.  The ground state is encoded by the spectral
flattening ``J = i sgn(H)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .core_linalg import RealSkewUnitary, RealStructure, flatten, nambu_involution, pfaffian
from .errors import DimensionMismatchError, GapClosedError, NotParticleHoleSymmetricError

_METRICS = ("euclidean", "manhattan")
_BOUNDARIES = ("open", "periodic", "antiperiodic")
_KINDS = ("kitaev_chain", "pwave_2d", "swave_trivial", "atomic_trivial", "random_local")

_ALLOWED_PARAMS = {
    "kitaev_chain": {"t", "mu", "delta"},
    "pwave_2d": {"t", "mu", "delta"},
    "swave_trivial": {"t", "mu", "delta"},
    "atomic_trivial": {"e"},
    "random_local": {"seed", "hop_range", "scale", "gap_min"},
}


@dataclass(frozen=True)
class LatticeGeometry:
    """Finite lattice with integer coordinates and an optional torus wrap.

    Parameters
    ----------
    sites : tuple of coordinate tuples
    metric : 'euclidean' or 'manhattan'
    internal_dim : int
        Orbitals per site in the one-particle space.
    periods : tuple or None
        Per-axis period for wrapped directions (minimal-image distance);
        ``None`` for fully open geometry.
    """

    sites: tuple
    metric: str = "euclidean"
    internal_dim: int = 1
    periods: Optional[tuple] = None

    def __post_init__(self):
        sites = tuple(tuple(int(c) for c in s) for s in self.sites)
        if not sites:
            raise ValueError("geometry needs at least one site")
        ndim = len(sites[0])
        if any(len(s) != ndim for s in sites):
            raise ValueError("all sites must share one coordinate dimension")
        object.__setattr__(self, "sites", sites)
        if self.metric not in _METRICS:
            raise ValueError(f"metric must be one of {_METRICS}")
        if self.internal_dim < 1:
            raise ValueError("internal_dim must be >= 1")
        if self.periods is not None:
            p = tuple(int(x) for x in self.periods)
            if len(p) != ndim or any(x < 1 for x in p):
                raise ValueError("periods must be positive, one per axis")
            object.__setattr__(self, "periods", p)

    @classmethod
    def chain(cls, n: int, internal_dim: int = 1, periodic: bool = False,
              metric: str = "euclidean") -> "LatticeGeometry":
        return cls(
            sites=tuple((j,) for j in range(n)),
            metric=metric,
            internal_dim=internal_dim,
            periods=(n,) if periodic else None,
        )

    @classmethod
    def grid(cls, lx: int, ly: int, internal_dim: int = 1, periodic: bool = False,
             metric: str = "euclidean") -> "LatticeGeometry":
        return cls(
            sites=tuple((x, y) for x in range(lx) for y in range(ly)),
            metric=metric,
            internal_dim=internal_dim,
            periods=(lx, ly) if periodic else None,
        )

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def one_particle_dim(self) -> int:
        return self.n_sites * self.internal_dim

    @property
    def bdg_dim(self) -> int:
        return 2 * self.one_particle_dim

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        coords = np.asarray(self.sites, dtype=float)
        diff = np.abs(coords[:, None, :] - coords[None, :, :])
        if self.periods is not None:
            p = np.asarray(self.periods, dtype=float)
            diff = np.minimum(diff % p, p - diff % p)
        if self.metric == "manhattan":
            return diff.sum(axis=2)
        return np.sqrt((diff ** 2).sum(axis=2))

    def distance(self, i: int, j: int) -> float:
        return float(self.distance_matrix[i, j])

    def ball(self, center: int, radius: float) -> tuple:
        """Indices of the closed ball around a site (``d <= radius``)."""
        d = self.distance_matrix[center]
        return tuple(int(i) for i in np.nonzero(d <= radius + 1e-9)[0])

    def diameter(self) -> float:
        return float(self.distance_matrix.max())


@dataclass(frozen=True)
class ModelSpec:
    """What to build: a model kind, its parameters, a size, and a boundary."""

    kind: str
    params: dict = field(default_factory=dict)
    size: object = 8
    boundary: str = "open"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; choose from {_KINDS}")
        if self.boundary not in _BOUNDARIES:
            raise ValueError(f"boundary must be one of {_BOUNDARIES}")
        allowed = _ALLOWED_PARAMS[self.kind]
        unknown = set(self.params) - allowed
        if unknown:
            raise ValueError(
                f"unknown parameters for {self.kind}: {sorted(unknown)}; "
                f"allowed: {sorted(allowed)}"
            )


@dataclass(frozen=True)
class BdgSystem:
    """A BdG Hamiltonian with its particle-hole structure and geometry."""

    h: np.ndarray
    gamma: RealStructure
    geometry: LatticeGeometry
    j: Optional[RealSkewUnitary]
    gap: float

    @classmethod
    def from_hamiltonian(cls, h, gamma: RealStructure, geometry: LatticeGeometry,
                         gap_tol: float = 1e-8) -> "BdgSystem":
        h = np.asarray(h, dtype=complex)
        if h.shape != (geometry.bdg_dim, geometry.bdg_dim):
            raise DimensionMismatchError(
                f"Hamiltonian shape {h.shape} does not match geometry "
                f"(expected {geometry.bdg_dim})"
            )
        evals = np.linalg.eigvalsh(h)
        gap = float(np.min(np.abs(evals)))
        j = flatten(h, gamma, gap_tol)  # raises GapClosedError when gapless
        return cls(h=h, gamma=gamma, geometry=geometry, j=j, gap=gap)


def assemble_bdg(hop, delta) -> np.ndarray:
    """Assemble ``[[h, d], [d^*, -conj(h)]]``, validating both blocks."""
    hop = np.asarray(hop, dtype=complex)
    delta = np.asarray(delta, dtype=complex)
    if hop.shape != delta.shape or hop.ndim != 2 or hop.shape[0] != hop.shape[1]:
        raise DimensionMismatchError("hop and delta must be square and equal shape")
    scale = max(1.0, np.linalg.norm(hop, 2), np.linalg.norm(delta, 2))
    if np.linalg.norm(hop - hop.conj().T, 2) > 1e-10 * scale:
        raise NotParticleHoleSymmetricError("hopping block is not Hermitian")
    if np.linalg.norm(delta + delta.T, 2) > 1e-10 * scale:
        raise NotParticleHoleSymmetricError("pairing block is not antisymmetric")
    return np.block([[hop, delta], [delta.conj().T, -hop.conj()]])


def _shift(n: int, boundary: str) -> np.ndarray:
    """Forward shift S[j+1, j] = 1 with the boundary's wrap factor."""
    s = np.zeros((n, n))
    for j in range(n - 1):
        s[j + 1, j] = 1.0
    if boundary == "periodic" and n > 1:
        s[0, n - 1] = 1.0
    elif boundary == "antiperiodic" and n > 1:
        s[0, n - 1] = -1.0
    return s


def _kitaev_blocks(n, t, mu, delta, boundary):
    s = _shift(n, boundary)
    hop = -t * (s + s.T) - mu * np.eye(n)
    pair = delta * (s - s.T)
    return hop, pair


def _pwave_blocks(lx, ly, t, mu, delta, boundary):
    n = lx * ly
    sx = np.zeros((n, n))
    sy = np.zeros((n, n))
    wrap = {"open": 0.0, "periodic": 1.0, "antiperiodic": -1.0}[boundary]

    def idx(x, y):
        return x * ly + y

    for x in range(lx):
        for y in range(ly):
            if x + 1 < lx:
                sx[idx(x + 1, y), idx(x, y)] = 1.0
            elif wrap and lx > 1:
                sx[idx(0, y), idx(x, y)] = wrap
            if y + 1 < ly:
                sy[idx(x, y + 1), idx(x, y)] = 1.0
            elif wrap and ly > 1:
                sy[idx(x, 0), idx(x, y)] = wrap
    hop = -t * (sx + sx.T + sy + sy.T) - mu * np.eye(n)
    pair = delta * ((sx - sx.T) + 1j * (sy - sy.T))
    return hop, pair


def build_bdg(spec: ModelSpec, gap_tol: float = 1e-8) -> BdgSystem:
    """Build a finite BdG system from a model specification.

    Kinds
    -----
    ``kitaev_chain``
        1d chain, params ``t, mu, delta`` (defaults 1, 0, 1); size ``N``.
    ``pwave_2d``
        2d grid with chiral pairing, params ``t, mu, delta``; size ``(Lx, Ly)``.
    ``swave_trivial``
        spinful chain with on-site singlet pairing, params ``t, mu, delta``;
        gapped for every ``delta != 0``.
    ``atomic_trivial``
        uncoupled sites at energy ``e`` (default 1).
    ``random_local``
        banded random Hermitian/antisymmetric blocks, params ``seed,
        hop_range, scale, gap_min``; reseeds up to 32 times until the gap
        clears ``gap_min``.

    Raises
    ------
    GapClosedError
        If the assembled Hamiltonian is not gapped beyond ``gap_tol``.
    """
    p = dict(spec.params)
    boundary = spec.boundary
    periodic_like = boundary in ("periodic", "antiperiodic")

    if spec.kind == "kitaev_chain":
        n = int(spec.size)
        hop, pair = _kitaev_blocks(
            n, p.get("t", 1.0), p.get("mu", 0.0), p.get("delta", 1.0), boundary
        )
        geom = LatticeGeometry.chain(n, periodic=periodic_like)

    elif spec.kind == "pwave_2d":
        lx, ly = (int(spec.size[0]), int(spec.size[1])) if not np.isscalar(spec.size) \
            else (int(spec.size), int(spec.size))
        hop, pair = _pwave_blocks(
            lx, ly, p.get("t", 1.0), p.get("mu", 0.0), p.get("delta", 1.0), boundary
        )
        geom = LatticeGeometry.grid(lx, ly, periodic=periodic_like)

    elif spec.kind == "swave_trivial":
        n = int(spec.size)
        s = _shift(n, boundary)
        hop1 = -p.get("t", 1.0) * (s + s.T) - p.get("mu", 0.0) * np.eye(n)
        hop = np.kron(hop1, np.eye(2))
        pair = p.get("delta", 1.0) * np.kron(
            np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]])
        )
        geom = LatticeGeometry.chain(n, internal_dim=2, periodic=periodic_like)

    elif spec.kind == "atomic_trivial":
        n = int(spec.size)
        e = p.get("e", 1.0)
        if e == 0:
            raise GapClosedError("atomic model with e = 0 is gapless", offending_value=0.0)
        hop = e * np.eye(n)
        pair = np.zeros((n, n))
        geom = LatticeGeometry.chain(n, periodic=False)

    elif spec.kind == "random_local":
        n = int(spec.size)
        seed = int(p.get("seed", 0))
        rng_range = int(p.get("hop_range", 2))
        scale = float(p.get("scale", 1.0))
        gap_min = float(p.get("gap_min", 0.05))
        geom = LatticeGeometry.chain(n, periodic=periodic_like)
        band = geom.distance_matrix <= rng_range + 1e-9
        for attempt in range(32):
            rng = np.random.default_rng(seed + attempt)
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            hop = (a + a.conj().T) / 2 * band * scale
            b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            pair = (b - b.T) / 2 * band * scale
            h = assemble_bdg(hop, pair)
            if np.min(np.abs(np.linalg.eigvalsh(h))) > gap_min:
                break
        else:
            raise GapClosedError(
                f"no gapped random draw after 32 reseeds (gap_min={gap_min})"
            )
    else:  # pragma: no cover - ModelSpec already validates
        raise ValueError(f"unknown kind {spec.kind!r}")

    h = assemble_bdg(hop, pair)
    gamma = nambu_involution(geom.one_particle_dim)
    return BdgSystem.from_hamiltonian(h, gamma, geom, gap_tol=gap_tol)


def site_projection(geom: LatticeGeometry, subset) -> np.ndarray:
    """Diagonal projector onto the Nambu components of a set of sites."""
    subset = sorted(set(int(i) for i in subset))
    if subset and (subset[0] < 0 or subset[-1] >= geom.n_sites):
        raise ValueError("site index out of range")
    m = geom.one_particle_dim
    d = geom.internal_dim
    diag = np.zeros(2 * m)
    for i in subset:
        diag[i * d:(i + 1) * d] = 1.0
        diag[m + i * d:m + (i + 1) * d] = 1.0
    return np.diag(diag)


def kitaev_bloch_invariant(t: float, mu: float, delta: float,
                           tol: float = 1e-9) -> int:
    """Bulk Z2 invariant of the translation-invariant chain.

    Works from the momentum-space Hamiltonian at the two particle-hole
    symmetric momenta: rotated to a Real basis there, it is antisymmetric
    and the invariant is the sign disagreement of the two Pfaffians.

    Raises
    ------
    GapClosedError
        At the critical lines ``|mu| = 2|t|`` (within ``tol``) or ``delta = 0``
        where the bulk gap closes and the invariant is undefined.
    """
    if abs(delta) <= tol:
        raise GapClosedError("delta = 0 closes the bulk gap", offending_value=0.0)
    scale = max(1.0, abs(t), abs(mu))
    if abs(abs(mu) - 2 * abs(t)) <= tol * scale:
        raise GapClosedError(
            f"|mu| = 2|t| closes the bulk gap (mu={mu}, t={t})", offending_value=mu
        )
    tmat = np.array([[1.0, 1.0], [-1.0j, 1.0j]]) / np.sqrt(2.0)
    pf = []
    for k in (0.0, np.pi):
        hk = np.array(
            [
                [-2 * t * np.cos(k) - mu, 2j * delta * np.sin(k)],
                [-2j * delta * np.sin(k), 2 * t * np.cos(k) + mu],
            ]
        )
        a = -1j * tmat @ hk @ tmat.conj().T
        pf.append(pfaffian(a))
    return int(np.sign(pf[0]) != np.sign(pf[1]))
