"""Shared test helpers: oracle-labelled Clifford sums and local rotations."""

import numpy as np
from scipy.linalg import block_diag, expm

from qfi.clifford import CliffordModule, CliffordSignature, standard_generators
from qfi.core_linalg import basis_projection
from qfi.models import ModelSpec, build_bdg


def clifford_sum(k, n_plus, n_minus=0):
    """Direct sum of copies of the standard Cl_{0,k} irreducible.

    ``n_plus`` copies keep the standard orientation, ``n_minus`` copies flip
    the sign of the last generator (the inequivalent irreducible when
    k = 3 mod 4; an equivalent one otherwise).
    """
    base = standard_generators(CliffordSignature(0, k))
    plus = [np.asarray(g) for g in base.generators]
    minus = [g.copy() for g in plus]
    if minus:
        minus[-1] = -minus[-1]
    summands = [plus] * n_plus + [minus] * n_minus
    gens = tuple(
        block_diag(*[s[i] for s in summands]) for i in range(len(plus))
    )
    return CliffordModule(
        dim=base.dim * len(summands),
        generators=gens,
        signature=CliffordSignature(0, k),
    )


def clifford_label(k, n_plus, n_minus=0):
    """Known class value of ``clifford_sum(k, n_plus, n_minus)``.

    Degree k+1 mod 8: Z2 parity of the summand count at degrees 1 and 2,
    signed multiplicity difference at degree 4, zero otherwise (k <= 5).
    """
    degree = (k + 1) % 8
    if degree in (1, 2):
        return (n_plus + n_minus) % 2
    if degree == 4:
        return n_plus - n_minus
    return 0


def rotated_projection_pair(n, center, radius, seed):
    """A site-diagonal reference projection and a locally rotated partner.

    The rotation is generated by a particle-hole-compatible anti-Hermitian
    matrix supported exactly on the Nambu indices of the metric ball around
    ``center``, so the difference of the two projections is exactly zero
    outside that ball.
    """
    system = build_bdg(ModelSpec(kind="atomic_trivial", size=n))
    geom = system.geometry
    p0 = basis_projection(system.j)
    ball = np.asarray(geom.ball(center, radius), dtype=int)
    m = geom.one_particle_dim
    idx = np.concatenate([ball, m + ball])
    rng = np.random.default_rng(seed)
    loc = rng.standard_normal((idx.size, idx.size))
    loc = loc + 1j * rng.standard_normal(loc.shape)
    k = np.zeros((2 * m, 2 * m), dtype=complex)
    k[np.ix_(idx, idx)] = loc
    k = 0.5 * (k - k.conj().T)
    k = 0.5 * (k + system.gamma.conjugate_operator(k))
    v = expm(k)
    p1 = v @ p0 @ v.conj().T
    return p0, p1, geom, ball
