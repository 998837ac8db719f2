"""Pair indices, spectral flow, obstructions, characters, half-space census."""

import numpy as np
import pytest
from scipy.linalg import block_diag, expm

from qfi.clifford import KOGroup
from qfi.core_linalg import RealStructure, flatten, nambu_involution
from qfi.errors import (
    ComputationError,
    GapClosedError,
    UnresolvedDegeneracyError,
)
from qfi.indices import (
    FlowResult,
    GroupElement,
    PairIndexResult,
    SymmetryData,
    equivariant_kernel_character,
    half_space_boundary,
    homotopy_obstruction_test,
    pair_index,
    pair_index_ko,
    pair_index_z2,
    pfaffian_pair_index,
    z2_spectral_flow,
)
from qfi.models import ModelSpec, build_bdg
from qfi.sampling import conjugated_pair, planted_kernel_pair

# left multiplications by i, j, k on the quaternions (basis 1, i, j, k):
# real, antisymmetric, orthogonal, mutually anticommuting, L_i L_j = L_k
L_I = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])
L_J = np.array([
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
])
L_K = np.array([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
])


def _kitaev(n, mu, boundary="periodic"):
    return build_bdg(
        ModelSpec(kind="kitaev_chain", params={"mu": mu}, size=n, boundary=boundary)
    )


# ---------------------------------------------------------------------------
# kernel parity against the Pfaffian route
# ---------------------------------------------------------------------------


def test_planted_kernels_have_exact_dimension_and_parity():
    g = nambu_involution(6)
    for kd in (0, 2, 4, 6):
        j0, j1 = planted_kernel_pair(g, np.random.default_rng(kd), kernel_dim=kd)
        res = pair_index_z2(j0, j1)
        assert res.kernel_dim == kd
        assert res.z2 == (kd // 2) % 2
        assert pfaffian_pair_index(j0, j1, g) == res.z2


def test_parity_routes_agree_on_random_pairs():
    for seed in range(12):
        g = nambu_involution(4 + (seed % 3) * 2)
        rng = np.random.default_rng(seed)
        j0, j1 = conjugated_pair(g, rng)
        res = pair_index_z2(j0, j1)
        assert res.kernel_dim == 0
        assert res.z2 == 0
        assert pfaffian_pair_index(j0, j1, g) == 0


def test_pfaffian_index_is_conjugation_invariant():
    g = nambu_involution(5)
    rng = np.random.default_rng(42)
    j0, j1 = planted_kernel_pair(g, rng, kernel_dim=2)
    base = pfaffian_pair_index(j0, j1, g)
    assert base == 1
    x = rng.standard_normal((10, 10)) + 1j * rng.standard_normal((10, 10))
    k = 0.5 * (x - x.conj().T)
    k = 0.5 * (k + g.conjugate_operator(k))
    v = expm(k)
    m0 = v @ j0.matrix @ v.conj().T
    m1 = v @ j1.matrix @ v.conj().T
    assert pfaffian_pair_index(m0, m1, g) == base


def test_odd_kernel_is_rejected():
    # a forged non-Real pair with a one-dimensional kernel must be refused
    j0 = 1j * np.diag([1.0, -1.0])
    j1 = -1j * np.eye(2)
    with pytest.raises(ComputationError):
        pair_index_z2(j0, j1)


def test_pair_index_result_invariants():
    with pytest.raises(ComputationError):
        PairIndexResult(kernel_dim=3, z2=1)
    with pytest.raises(ComputationError):
        PairIndexResult(kernel_dim=2, z2=0)
    ok = PairIndexResult(kernel_dim=2, z2=1)
    assert ok.ko is None


def test_pair_index_cross_checks_both_routes():
    g = nambu_involution(5)
    j0, j1 = planted_kernel_pair(g, np.random.default_rng(3), kernel_dim=2)
    res = pair_index(j0, j1, g)
    assert res.z2 == 1
    assert res.pfaffian_signs is not None
    s0, s1 = res.pfaffian_signs
    assert {s0, s1} <= {-1.0, 1.0}
    assert int(s0 != s1) == res.z2
    assert res.diagnostics["pfaffian_bit"] == res.z2


# ---------------------------------------------------------------------------
# KO refinement with anticommuting symmetries
# ---------------------------------------------------------------------------


def test_quaternion_generators_are_what_they_claim():
    assert np.allclose(L_I @ L_J, L_K)
    for m in (L_I, L_J, L_K):
        assert np.allclose(m.T, -m)
        assert np.allclose(m @ m, -np.eye(4))
    assert np.allclose(L_I @ L_J + L_J @ L_I, 0.0)


def test_ko_class_of_quaternionic_kernel_is_signed_unit():
    # J1 = -J0 makes the whole space the kernel; the two kappas turn it into
    # an irreducible quaternionic module whose class generates KO_4 = Z.
    g = RealStructure(4, np.eye(4, dtype=complex))
    sym = SymmetryData(kappas=(L_J.astype(complex), L_K.astype(complex)))
    res = pair_index_ko(L_I.astype(complex), -L_I.astype(complex), sym, g)
    assert res.kernel_dim == 4
    assert res.z2 == 0           # the coarse parity misses this class
    assert res.ko is not None
    assert res.ko.degree == 4
    assert res.ko.group is KOGroup.Z
    assert res.ko.value == -1    # L_i L_j L_k = -1 on the quaternions

    # reversing the kappa order flips the orientation, hence the sign
    sym_flip = SymmetryData(kappas=(L_K.astype(complex), L_J.astype(complex)))
    res_flip = pair_index_ko(L_I.astype(complex), -L_I.astype(complex), sym_flip, g)
    assert res_flip.ko.value == 1


def test_ko_class_is_additive_and_cancels():
    g = RealStructure(8, np.eye(8, dtype=complex))
    j0 = block_diag(L_I, L_I).astype(complex)
    same = SymmetryData(kappas=(
        block_diag(L_J, L_J).astype(complex), block_diag(L_K, L_K).astype(complex),
    ))
    res = pair_index_ko(j0, -j0, same, g)
    assert res.ko.value == -2

    # one copy of each orientation: the classes cancel
    mixed = SymmetryData(kappas=(
        block_diag(L_J, L_K).astype(complex), block_diag(L_K, L_J).astype(complex),
    ))
    res = pair_index_ko(j0, -j0, mixed, g)
    assert res.ko.value == 0
    assert res.z2 == 0


def test_ko_without_kappas_reduces_to_kernel_parity():
    g = nambu_involution(6)
    for kd in (0, 2, 4):
        j0, j1 = planted_kernel_pair(g, np.random.default_rng(kd + 10), kernel_dim=kd)
        res = pair_index_ko(j0, j1, SymmetryData(), g)
        assert res.ko.degree == 2
        assert res.ko.value == res.z2 == (kd // 2) % 2


def test_symmetry_data_validation():
    g = nambu_involution(4)
    j0, j1 = conjugated_pair(g, np.random.default_rng(0))
    # a kappa that does not anticommute with the pair
    bad = conjugated_pair(g, np.random.default_rng(1))[0]
    with pytest.raises(ComputationError):
        SymmetryData(kappas=(bad.matrix,)).validate(j0, j1, g)
    # a group element that does not commute with J0
    rng = np.random.default_rng(2)
    perm = np.eye(8)[rng.permutation(8)].astype(complex)
    sym = SymmetryData(group_reps=(GroupElement("p", perm),))
    with pytest.raises(ComputationError):
        sym.validate(j0, j1, g)
    # the trivial symmetry passes
    SymmetryData().validate(j0, j1, g)


# ---------------------------------------------------------------------------
# spectral flow
# ---------------------------------------------------------------------------


def test_flow_constant_path_is_flat():
    g = nambu_involution(6)
    h = _kitaev(6, 0.5).h
    res = z2_spectral_flow([h, h, h], g)
    assert isinstance(res, FlowResult)
    assert res.bit == 0
    assert res.crossings == ()
    assert res.endpoint_signs[0] == res.endpoint_signs[1]


def test_flow_locates_the_bulk_transition():
    # the interpolation between mu=1 and mu=3 is the chain at mu = 1 + 2t,
    # so the gap closes exactly at parameter 1/2
    g = nambu_involution(12)
    h0, h1 = _kitaev(12, 1.0).h, _kitaev(12, 3.0).h
    res = z2_spectral_flow([h0, h1], g)
    assert res.bit == 1
    assert len(res.crossings) == 1
    assert res.crossings[0] == pytest.approx(0.5, abs=1e-3)
    assert res.evaluations > 2

    flat0 = flatten(h0, g, 1e-8)
    flat1 = flatten(h1, g, 1e-8)
    assert res.bit == pfaffian_pair_index(flat0, flat1, g)


def test_flow_with_no_crossing_within_a_phase():
    g = nambu_involution(10)
    res = z2_spectral_flow([_kitaev(10, 0.2).h, _kitaev(10, 1.5).h], g)
    assert res.bit == 0
    assert res.crossings == ()


def test_flow_rejects_degenerate_endpoint():
    g = nambu_involution(2)
    h0 = np.diag([0.0, 1.0, 0.0, -1.0])
    h1 = np.diag([1.0, 1.0, -1.0, -1.0])
    with pytest.raises(GapClosedError):
        z2_spectral_flow([h0, h1], g)


def test_flow_reports_unresolvable_flat_stretch():
    # the middle half of the path is exactly gapless: no bisection can
    # decide a sign there, and the stretch is far wider than any pocket
    g = nambu_involution(2)
    mus = [1.0, 0.0, 0.0, 0.0, 1.0]
    path = [np.diag([m, 1.0, -m, -1.0]) for m in mus]
    with pytest.raises(UnresolvedDegeneracyError):
        z2_spectral_flow(path, g)


def test_flow_validates_particle_hole_symmetry():
    g = nambu_involution(2)
    ok = np.diag([1.0, 1.0, -1.0, -1.0])
    bad = np.diag([1.0, 1.0, -1.0, -2.0])
    with pytest.raises(ComputationError):
        z2_spectral_flow([ok, bad], g)


# ---------------------------------------------------------------------------
# homotopy obstruction
# ---------------------------------------------------------------------------


def test_obstruction_witnessed_for_nontrivial_pair():
    g = nambu_involution(4)
    j0, j1 = planted_kernel_pair(g, np.random.default_rng(5), kernel_dim=2)
    report = homotopy_obstruction_test(j0, j1, g, trials=4, grid_points=21)
    assert report.z2 == 1
    assert report.verdict == "obstruction_witnessed"
    # the direct path must pass exactly through a singular point at t = 1/2
    assert report.direct_path_min < 1e-10
    assert report.attempt_minima
    assert max(report.attempt_minima) < 1e-6


def test_path_certified_for_trivial_pair():
    g = nambu_involution(4)
    j0, j1 = conjugated_pair(g, np.random.default_rng(6), strength=0.3)
    report = homotopy_obstruction_test(j0, j1, g, trials=4, grid_points=21)
    assert report.z2 == 0
    assert report.verdict == "path_certified"
    assert report.certified_margin > 1e-3
    assert report.direct_path_min > 0.5


def test_certification_survives_singular_direct_path():
    # kernel dimension 4: the index vanishes but the straight line is still
    # singular at the midpoint, so certification must go through a detour
    g = nambu_involution(4)
    j0, j1 = planted_kernel_pair(g, np.random.default_rng(7), kernel_dim=4)
    report = homotopy_obstruction_test(j0, j1, g, trials=8, grid_points=21, seed=1)
    assert report.z2 == 0
    assert report.direct_path_min < 1e-10
    assert report.verdict == "path_certified"
    assert report.certified_margin > 1e-3


def test_obstruction_test_validates_grid():
    g = nambu_involution(2)
    j0, j1 = conjugated_pair(g, np.random.default_rng(0))
    with pytest.raises(ValueError):
        homotopy_obstruction_test(j0, j1, g, grid_points=20)


# ---------------------------------------------------------------------------
# equivariant characters
# ---------------------------------------------------------------------------


def test_characters_on_planted_kernel():
    g = nambu_involution(4)
    j0, j1 = planted_kernel_pair(g, np.random.default_rng(8), kernel_dim=4)
    sym = SymmetryData(group_reps=(
        GroupElement("e", np.eye(8, dtype=complex)),
        GroupElement("m", -np.eye(8, dtype=complex)),
        GroupElement("gamma", g.c_matrix, antiunitary=True),
    ))
    table = equivariant_kernel_character(j0, j1, sym, g)
    assert table.kernel_dim == 4
    values = {e.label: e.value for e in table.entries}
    assert values["e"] == pytest.approx(4.0, abs=1e-9)
    assert values["m"] == pytest.approx(-4.0, abs=1e-9)
    assert values["gamma"] == pytest.approx(4.0, abs=1e-9)
    assert all(e.invariance_residual < 1e-8 for e in table.entries)
    assert table.j0_invariance_residual < 1e-8
    assert table.cl01_module is True


def test_characters_reject_non_invariant_rep():
    g = nambu_involution(4)
    j0, j1 = planted_kernel_pair(g, np.random.default_rng(9), kernel_dim=2)
    perm = np.eye(8)[np.random.default_rng(1).permutation(8)].astype(complex)
    sym = SymmetryData(group_reps=(GroupElement("p", perm),))
    with pytest.raises(ComputationError):
        equivariant_kernel_character(j0, j1, sym, g)


# ---------------------------------------------------------------------------
# half-space boundary census
# ---------------------------------------------------------------------------


def test_half_space_on_topological_ring():
    system = _kitaev(60, 0.5)
    report = half_space_boundary(system, range(30))
    assert report.total_count == 2
    assert report.splitting < 1e-8
    assert report.flattening_singular is True
    assert len(report.edges) == 2
    for edge in report.edges:
        assert edge.count == 1
        assert edge.parity == 1
    bulk = pfaffian_pair_index(
        system.j, build_bdg(ModelSpec(kind="atomic_trivial", size=60)).j,
        system.gamma,
    )
    assert bulk == 1
    assert all(e.parity == bulk for e in report.edges)


def test_half_space_on_trivial_ring():
    system = _kitaev(40, 3.0)
    report = half_space_boundary(system, range(20))
    assert report.total_count == 0
    assert all(e.count == 0 and e.parity == 0 for e in report.edges)
    assert report.flattening_singular is False
    assert report.compressed_flattening_gap > 0.3
    assert report.rotation_residual is not None
    assert report.rotation_residual < 1e-8
    assert report.ph_asymmetry < 1e-10


def test_half_space_cut_as_predicate_matches_iterable():
    system = _kitaev(30, 0.8)
    a = half_space_boundary(system, range(15))
    b = half_space_boundary(system, lambda i: i < 15)
    assert a.cut_sites == b.cut_sites
    assert a.total_count == b.total_count
    assert a.near_zero == b.near_zero


def test_half_space_rejects_improper_cuts():
    system = _kitaev(10, 3.0)
    with pytest.raises(ComputationError):
        half_space_boundary(system, [])
    with pytest.raises(ComputationError):
        half_space_boundary(system, range(10))


def test_half_space_tolerance_override():
    system = _kitaev(30, 0.5)
    tight = half_space_boundary(system, range(15), tol=1e-12)
    assert tight.tol_edge == pytest.approx(1e-12)
    # the edge pair sits at ~1e-5 for N=30, so a 1e-12 window finds nothing
    assert tight.total_count == 0
    default = half_space_boundary(system, range(15))
    assert default.total_count == 2
