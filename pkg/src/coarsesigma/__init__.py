"""Scale-N end classes of locally finite metric spaces and their direct sequences."""

from .dirseq import (OMEGA, ConcreteSequence, Morphism, SetMap, SymbolicSequence, check_equivalence,
                     check_morphism, cardinality_obstruction, compose_bonding, direct_limit,
                     induced_limit_map, normalize_morphism)
from .functor import (ControlFunction, ControlledMap, induced_morphism, rebase, validate_controlled,
                      verify_coarse_equivalence)
from .rips import (ThinTruncationError, TruncationParams, build_rips, components_outside,
                   persistent_components)
from .seqcore import OracleModel, is_n_sequence, is_subsequence, oracle_classes
from .sigma import bonding_map, ind_sigma, sigma_level, sigma_stability
from .space import (build_space, discrete_open_book, distance, enumerate_ball, integer_line, integer_ray,
                    metric_wedge, open_book)

__all__ = [
    "OMEGA", "ConcreteSequence", "ControlFunction", "ControlledMap", "Morphism", "OracleModel", "SetMap",
    "SymbolicSequence", "ThinTruncationError", "TruncationParams", "bonding_map", "build_rips",
    "build_space", "cardinality_obstruction", "check_equivalence", "check_morphism", "components_outside",
    "compose_bonding", "direct_limit", "discrete_open_book", "distance", "enumerate_ball", "ind_sigma",
    "induced_limit_map", "induced_morphism", "integer_line", "integer_ray", "is_n_sequence",
    "is_subsequence", "metric_wedge", "normalize_morphism", "open_book", "oracle_classes",
    "persistent_components", "rebase", "sigma_level", "sigma_stability", "validate_controlled",
    "verify_coarse_equivalence",
]
