"""Topological indices for pairs of gapped quasifree ground states.

The package computes Z2 and KO-valued indices of pairs of Real skew-adjoint
unitaries (spectral flattenings of gapped BdG Hamiltonians), their Pfaffian
and spectral-flow formulations, relative Cayley transforms, Clifford-module
classification, and coarse-geometry locality diagnostics — all on finite
lattice models with explicit real-structure bookkeeping.
"""

from .cayley import (PINV_CUT, CayleyPair, bounded_transform, cayley_osu,
                     relative_cayley)
from .clifford import (BOTT_GROUPS, CliffordModule, CliffordSignature, KOClass,
                       KOGroup, RelationReport, abs_class, check_relations,
                       minimal_dimension, standard_generators, try_extend)
from .core_linalg import (Operator, RealSkewUnitary, RealStructure,
                          basis_projection, flatten, is_real, kernel,
                          nambu_involution, pfaffian, pfaffian_sign_logabs,
                          realify)
from .errors import (AmbiguousKernelError, ComputationError, ConfigError,
                     DimensionMismatchError, GapClosedError,
                     InvalidModuleError, NormConditionError,
                     NotAntisymmetricError, NotHermitianError,
                     NotParticleHoleSymmetricError, NotRealOperatorError,
                     PfaffianConditioningError, QfiError,
                     UnresolvedDegeneracyError)
from .indices import (CharacterEntry, CharacterTable, EdgeModes, FlowResult,
                      GroupElement, HalfSpaceReport, ObstructionReport,
                      PairIndexResult, SymmetryData,
                      equivariant_kernel_character, half_space_boundary,
                      homotopy_obstruction_test, pair_index, pair_index_ko,
                      pair_index_z2, pfaffian_pair_index, z2_spectral_flow)
from .locality import (LocalityReport, WindowCommutator,
                       local_equivalence_curve, locality_report, propagation,
                       pseudolocality_profile, roe_membership_score)
from .models import (BdgSystem, LatticeGeometry, ModelSpec, assemble_bdg,
                     build_bdg, kitaev_bloch_invariant, site_projection)
from .sampling import (conjugated_pair, planted_kernel_pair,
                       random_antisymmetric, random_orthogonal,
                       random_real_skew_unitary)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # real-structure linear algebra
    "RealStructure", "RealSkewUnitary", "Operator", "nambu_involution",
    "is_real", "realify", "flatten", "basis_projection", "pfaffian",
    "pfaffian_sign_logabs", "kernel",
    # Clifford modules
    "KOGroup", "KOClass", "BOTT_GROUPS", "CliffordSignature", "CliffordModule",
    "RelationReport", "check_relations", "standard_generators",
    "minimal_dimension", "abs_class", "try_extend",
    # models
    "LatticeGeometry", "ModelSpec", "BdgSystem", "assemble_bdg", "build_bdg",
    "site_projection", "kitaev_bloch_invariant",
    # Cayley transforms
    "CayleyPair", "relative_cayley", "bounded_transform", "cayley_osu",
    "PINV_CUT",
    # locality
    "LocalityReport", "WindowCommutator", "propagation",
    "pseudolocality_profile", "local_equivalence_curve",
    "roe_membership_score", "locality_report",
    # indices
    "PairIndexResult", "SymmetryData", "GroupElement", "FlowResult",
    "ObstructionReport", "CharacterEntry", "CharacterTable", "EdgeModes",
    "HalfSpaceReport", "pair_index_z2", "pair_index_ko", "pair_index",
    "pfaffian_pair_index", "z2_spectral_flow", "homotopy_obstruction_test",
    "equivariant_kernel_character", "half_space_boundary",
    # sampling
    "random_orthogonal", "random_antisymmetric", "random_real_skew_unitary",
    "conjugated_pair", "planted_kernel_pair",
    # errors
    "QfiError", "ConfigError", "ComputationError", "DimensionMismatchError",
    "NotHermitianError", "NotAntisymmetricError", "NotRealOperatorError",
    "NotParticleHoleSymmetricError", "GapClosedError", "AmbiguousKernelError",
    "NormConditionError", "PfaffianConditioningError",
    "UnresolvedDegeneracyError", "InvalidModuleError",
]
