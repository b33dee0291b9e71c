"""State-independent variance uncertainty bounds from Bloch vectors, and an
entanglement test built on them."""

__version__ = "0.1.0"

from .su_algebra import SuBasis, build_basis, star_product
from .codec import (
    Observable,
    decode_state,
    encode_observable,
    encode_state,
    max_bloch_norm,
    observable_from_bloch,
)
from .bounds import (
    BoundsReport,
    ObservableSet,
    build_set,
    horn_gap_check,
    orthogonal_complete_sum,
    qubit_bounds,
    split_subspace,
    theorem1_bounds,
    variance_bloch,
)
from .witness import (
    BipartiteState,
    Verdict,
    WitnessReport,
    criterion_kyfan,
    criterion_local_sum,
    extract_bipartite,
    optimal_observables,
)
from .oracle import SamplerConfig, extremize_sum, sample_separable, sample_state, variance_direct
