"""Relative Cayley transform: exact rotation oracles and operator identities."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import block_diag, expm

from qfi.cayley import CayleyPair, bounded_transform, cayley_osu, relative_cayley
from qfi.core_linalg import nambu_involution, realify
from qfi.errors import (
    AmbiguousKernelError,
    ComputationError,
    DimensionMismatchError,
    NormConditionError,
)
from qfi.sampling import conjugated_pair, planted_kernel_pair

E2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
X2 = np.array([[0.0, 1.0], [1.0, 0.0]])
Z2 = np.array([[1.0, 0.0], [0.0, -1.0]])


def _to_complex(g, real_mat):
    b = g.real_basis
    out = b @ real_mat @ b.conj().T
    assert np.allclose(realify(out, g), real_mat)
    return out


def _rotation_pair(angles, with_kappa=False):
    """Block pairs ``(J0, e^{2 phi K} J0)`` with ``K`` anticommuting with J0.

    Per 4-dim real block the difference ``J1 - J0`` has all singular values
    ``2 sin(phi)`` and the relative Cayley transform has eigenvalues
    ``+/- i cot(phi)`` (twice each); angle 0 blocks sit entirely in the
    agreement subspace and drop out of the compression.
    """
    width = 8 if with_kappa else 4
    blocks0, blocks1, blocksk = [], [], []
    for phi in angles:
        if with_kappa:
            j0r = np.kron(E2, np.eye(4))
            kr = np.kron(X2, np.kron(E2, np.eye(2)))
            blocksk.append(np.kron(Z2, np.kron(X2, E2)))
        else:
            j0r = np.kron(E2, np.eye(2))
            kr = np.kron(X2, E2)
        blocks0.append(j0r)
        blocks1.append(expm(2.0 * phi * kr) @ j0r)
    g = nambu_involution(len(angles) * width // 2)
    j0 = _to_complex(g, block_diag(*blocks0))
    j1 = _to_complex(g, block_diag(*blocks1))
    if with_kappa:
        kappa = _to_complex(g, block_diag(*blocksk))
        return j0, j1, kappa, g
    return j0, j1, g


# ---------------------------------------------------------------------------
# closed-form oracle
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("phi", [0.3, 0.7, 1.2])
def test_relative_cayley_rotation_eigenvalues(phi):
    j0, j1, g = _rotation_pair([phi])
    pair = CayleyPair.build(j0, j1, g)
    assert pair.range_dim == 4
    assert pair.calkin_gap == pytest.approx(2.0 * np.sin(phi), rel=1e-12)
    c = relative_cayley(pair).matrix
    assert np.allclose(c.conj().T, -c, atol=1e-12)
    cot = np.cos(phi) / np.sin(phi)
    ev = np.sort(np.linalg.eigvals(c).imag)
    assert np.allclose(ev, [-cot, -cot, cot, cot], atol=1e-10)


def test_agreement_blocks_are_compressed_away():
    j0, j1, g = _rotation_pair([0.0, 0.8])
    pair = CayleyPair.build(j0, j1, g)
    assert pair.dim == 8
    assert pair.range_dim == 4
    assert pair.calkin_gap == pytest.approx(2.0 * np.sin(0.8), rel=1e-12)
    ev = np.sort(np.linalg.eigvals(relative_cayley(pair).matrix).imag)
    cot = np.cos(0.8) / np.sin(0.8)
    assert np.allclose(ev, [-cot, -cot, cot, cot], atol=1e-10)
    # the bounded transform acts as J0 itself on the agreement block
    f = bounded_transform(pair).matrix
    agree = g.real_basis[:, :4]
    assert np.allclose(f @ agree, j0 @ agree, atol=1e-10)


def test_identical_pair_has_empty_range():
    j0, j1, g = _rotation_pair([0.9])
    pair = CayleyPair.build(j0, j0, g)
    assert pair.range_dim == 0
    assert relative_cayley(pair).matrix.shape == (0, 0)
    assert pair.calkin_gap == np.inf
    assert np.allclose(bounded_transform(pair).matrix, j0)


# ---------------------------------------------------------------------------
# operator identities
# ---------------------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=9), st.integers(min_value=0, max_value=2**32 - 1))
def test_bounded_transform_identities(half, seed):
    g = nambu_involution(half)
    j0, j1 = conjugated_pair(g, np.random.default_rng(seed))
    pair = CayleyPair.build(j0, j1, g)
    f = bounded_transform(pair).matrix
    m0, m1 = j0.matrix, j1.matrix
    eye = np.eye(2 * half)
    sq = f @ f - 0.25 * (-2.0 * eye + m1 @ m0 + m0 @ m1)
    assert np.linalg.norm(sq, 2) <= 1e-10
    diff = eye + f @ f + 0.25 * (m0 - m1) @ (m0 - m1)
    assert np.linalg.norm(diff, 2) <= 1e-10
    # F is Real, skew-adjoint, and a contraction
    assert np.linalg.norm(f.conj().T + f, 2) <= 1e-10
    assert np.linalg.norm(g.conjugate_operator(f) - f, 2) <= 1e-10
    assert np.linalg.norm(f, 2) <= 1.0 + 1e-10


def test_inverse_modulus_identity():
    # (1 + C*C)^(-1/2) equals half the compressed |J0 - J1|
    for seed in range(5):
        g = nambu_involution(6)
        j0, j1 = conjugated_pair(g, np.random.default_rng(seed), strength=0.9)
        pair = CayleyPair.build(j0, j1, g)
        c = relative_cayley(pair).matrix
        w, v = np.linalg.eigh(np.eye(c.shape[0]) + c.conj().T @ c)
        lhs = v @ np.diag(w ** -0.5) @ v.conj().T
        d = j0.matrix - j1.matrix
        w2, v2 = np.linalg.eigh(d.conj().T @ d)
        absd = v2 @ np.diag(np.sqrt(np.clip(w2, 0.0, None))) @ v2.conj().T
        rhs = 0.5 * pair.compress(absd)
        assert np.linalg.norm(lhs - rhs, 2) <= 1e-9


def test_relative_cayley_anticommutes_with_compressed_j0():
    g = nambu_involution(5)
    j0, j1 = conjugated_pair(g, np.random.default_rng(17))
    pair = CayleyPair.build(j0, j1, g)
    c = relative_cayley(pair).matrix
    c0 = pair.compress(j0.matrix)
    assert np.linalg.norm(c @ c0 + c0 @ c, 2) <= 1e-9


def test_swap_negates_the_spectrum():
    g = nambu_involution(4)
    j0, j1 = conjugated_pair(g, np.random.default_rng(23))
    c01 = relative_cayley(CayleyPair.build(j0, j1, g)).matrix
    c10 = relative_cayley(CayleyPair.build(j1, j0, g)).matrix
    ev01 = np.sort(np.linalg.eigvals(c01).imag)
    ev10 = np.sort(-np.linalg.eigvals(c10).imag)
    assert np.allclose(ev01, ev10, atol=1e-9)


def test_kappa_compatible_pair():
    j0, j1, kappa, g = _rotation_pair([0.6], with_kappa=True)
    pair = CayleyPair.build(j0, j1, g, kappas=(kappa,))
    c = relative_cayley(pair).matrix
    ck = pair.compress(kappa)
    assert np.linalg.norm(c @ ck + ck @ c, 2) <= 1e-9


# ---------------------------------------------------------------------------
# symmetric-picture dictionary
# ---------------------------------------------------------------------------


def test_osu_dictionary_matches_tensored_relative_cayley():
    rho = np.array([[0.0, -1.0], [1.0, 0.0]])
    g = nambu_involution(4)
    j0, j1 = conjugated_pair(g, np.random.default_rng(3))
    v0 = np.kron(j0.matrix, rho)
    v1 = np.kron(j1.matrix, rho)
    assert np.allclose(v0 @ v0, np.eye(16))
    assert np.allclose(v0, v0.conj().T)
    pair = CayleyPair.build(j0, j1, g)
    c_full = relative_cayley(pair, full=True).matrix
    osu_full = cayley_osu(v0, v1, full=True).matrix
    assert np.linalg.norm(osu_full - np.kron(c_full, rho), 2) <= 1e-9


def test_osu_norm_condition():
    v0 = np.diag([1.0, -1.0, 1.0, -1.0])
    with pytest.raises(NormConditionError):
        cayley_osu(v0, -v0)


# ---------------------------------------------------------------------------
# refusal paths
# ---------------------------------------------------------------------------


def test_norm_condition_error_on_planted_kernel():
    g = nambu_involution(5)
    j0, j1 = planted_kernel_pair(g, np.random.default_rng(0), kernel_dim=2)
    with pytest.raises(NormConditionError):
        CayleyPair.build(j0, j1, g)


def test_ambiguous_band_between_kernel_and_bulk():
    # one clean block and one block a few 1e-10 shy of the norm bound: the
    # smallest singular value of J0 + J1 falls in the undecidable band
    eps = 2.2e-10
    j0, j1, g = _rotation_pair([0.5, np.pi / 2 - eps])
    with pytest.raises(AmbiguousKernelError):
        CayleyPair.build(j0, j1, g)
    # exactly at the bound: a genuine kernel, refused as such
    j0, j1, g = _rotation_pair([0.5, np.pi / 2])
    with pytest.raises(NormConditionError):
        CayleyPair.build(j0, j1, g)


def test_build_validations():
    g = nambu_involution(4)
    j0, j1 = conjugated_pair(g, np.random.default_rng(1))
    with pytest.raises(DimensionMismatchError):
        CayleyPair.build(j0.matrix[:4, :4], j1, g)
    with pytest.raises(ComputationError):
        CayleyPair.build(1j * np.eye(8), j1, g)  # not Real for this structure
    bad_kappa = conjugated_pair(g, np.random.default_rng(2))[0]
    with pytest.raises(ComputationError):
        CayleyPair.build(j0, j1, g, kappas=(bad_kappa,))
