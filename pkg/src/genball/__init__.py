"""Linear self maps of generalized balls D_{p,q} and the domains D^r_{p,q}."""

from ._config import DEFAULT_TOLERANCES, Tolerances
from .automorphisms import (
    DilationParams,
    FactorSequence,
    PartialIsometry,
    dilation,
    double_transitivity_witness,
    membership_residual,
    normal_form,
    random_u_pq,
    transitivity_witness,
    witt_extend,
    witt_residuals,
)
from .core import (
    Signature,
    Subspace,
    VectorClass,
    classify_vector,
    eigen_decompose,
    gram_matrix,
    inner_product,
    orthogonal_complement,
    span,
    spectral_clusters,
    subspace_signature,
)
from .estimator import LinearSelfMapAnalyzer
from .exceptions import (
    ClusteredSpectrumError,
    ConvergenceError,
    DimensionError,
    GenballError,
    InvariantViolation,
    NotSelfMapError,
    PreconditionError,
    RankDeficientError,
)
from .fixed_points import (
    boundary_invariant_subspace,
    fixed_lines,
    fixed_points,
    jordan_structure,
    location_counts,
    orthogonality_audit,
    theorem_audit,
)
from .fixtures import FIXTURES, get_fixture
from .grassmann import (
    PlaneClass,
    PlaneFrame,
    classify_plane,
    closure_fixed_plane_search,
    induced_plane_map,
    oracle_selfmap_planes,
    sample_positive_plane,
)
from .realball import real_selfmap_check, theta_normalize
from .selfmap import (
    MapCandidate,
    Verdict,
    classify,
    extension_obstruction,
    is_expansion,
    isometry_constant,
    oracle_selfmap_vectors,
    scaling_interval,
)

__version__ = "0.1.0"
