"""Exact computations with homeomorphisms of the Cantor set and the odometer."""
from .approx import (
    PrunedTree,
    clopen_code_bijection,
    conjugate_into_neighborhood,
    dirac_obstruction_check,
    fold_back,
    gamma_Y_approximation,
    kr_extension,
    kr_matching,
    periodic_approximation,
    topologically_free_perturbation,
)
from .errors import *  # noqa: F401,F403
from .homeo import (
    AdicMap,
    FullGroupElement,
    apply,
    compose,
    disagreement,
    equivalent,
    full_group_certify,
    identity,
    invert,
    odometer,
    periodicity,
    power,
    prefix_permutation,
    sup_distance,
    tau_distance,
)
from .measures import Bernoulli, Dirac, Markov, Mixture
from .towers import (
    alpha_structure,
    canonical_sequence,
    exhaustion_level,
    f_classify,
    gamma_member,
    gamma_Y_member,
    kr_conditions,
    kr_partition,
)
from .words import ClopenSet, EPPoint
