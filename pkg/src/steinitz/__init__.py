"""Orderings of vector families with bounded prefix sums.

Library layout:

  core       : gauges, families, orderings, prefix evaluation
  ordering   : the constructive d-bound orderer, drift variant, greedy
               baseline, and the exact subset-DP oracle
  kernels    : subset tables and the DP kernel (compiled or numpy, selected
               at import)
  partition  : ball-cone membership, witness search, greedy partition,
               residual verification
  pipeline   : group compression, end-to-end ordering, certification
  capgeo     : ball volumes, cap measures, and the cap-bound certificates
  generators : deterministic seedable instance generators
  cli        : the `steinitz` command
"""

from .capgeo import (
    CapLemmaResult,
    CapQuery,
    CapResult,
    auto_t,
    cap_measure,
    cap_measure_closed,
    gautschi_bounds,
    inequality_chain_check,
    lemma_c140_check,
    log_unit_ball_volume,
    surface_ratio_bound,
    triangle_lower_bound,
    unit_ball_volume,
)
from .core import (
    DEFAULT_TOL,
    Gauge,
    Ordering,
    PrefixReport,
    VectorFamily,
    center_family,
    family_sum,
    gauge_norm,
    philox_generator,
    prefix_report,
)
from .generators import (
    GenSpec,
    gen_hadamard,
    gen_l1_adversarial,
    gen_near_unit,
    gen_random_zero_sum,
    gen_simplex,
    gen_two_dir,
    generate,
)
from .kernels import available_backends, backend_name
from .ordering import (
    OrderResult,
    WeightState,
    drift_order,
    greedy_order,
    gs_order,
    oracle_order,
    vertexify,
)
from .partition import (
    BallCone,
    PartitionResult,
    ResidualCertificate,
    WitnessSearchConfig,
    cone_contains,
    max_min_cosine,
    partition,
    quasi_uniform_directions,
    trim_minimal,
    verify_residual,
    witness_search,
)
from .pipeline import (
    CertReport,
    ReduceResult,
    WFamily,
    bound_value,
    build_w,
    certify,
    group_partial_check,
    reduce_order,
)

__version__ = "0.1.0"
