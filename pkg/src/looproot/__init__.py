"""Exact classification of root subsystems of loop extensions of root systems."""

__version__ = "0.1.0"

from looproot.errors import LoopRootError
from looproot.root_core import (
    GeneralizedCartanMatrix,
    Root,
    RootSystem,
    cartan_matrix,
    generate_root_system,
    pairing,
    reflect,
    validate_gcm,
    weyl_orbits,
)
from looproot.subsystems import Subsystem, enumerate_subsystems, reflection_closure
from looproot.coweight import AdmissibleSubgroup, canonical_coset, evaluate, extend_scaling
from looproot.scaling import enumerate_basic_scalings, finite_type_scalings, scaled_datum
from looproot.loop_classifier import (
    AffineRoot,
    ClassifiedPair,
    CosetFamily,
    build_root_function,
    classify_root_function,
    closure_oracle,
    enumerate_loop_subsystems,
    materialize_window,
    verify_root_function,
)
