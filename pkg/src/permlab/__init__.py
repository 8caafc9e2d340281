"""permlab: exact permanents, permanent gadgets, oracle-to-exact recovery,
boson sampling, and small statevector experiments."""

from .adversary import (
    QueryTranscript,
    collision_probability,
    commit_injective,
    commit_simon,
    lazy_query,
    pair_collision_probability,
    restricted_masks,
    run_distinguishing_experiment,
)
from .boson import (
    BosonDistribution,
    LinearNetwork,
    embed_scaled,
    enumerate_states,
    full_distribution,
    outcome_probability,
    sample,
    state_submatrix,
)
from .gadgets import GadgetZ, build_w, build_z
from .oracle_reduction import (
    AdviceEntry,
    AdviceSearchError,
    AdviceTable,
    ApproxOracle,
    MissingAdviceError,
    cached_advice,
    generate_advice,
    make_boson_oracle,
    make_exact_oracle,
    make_noisy_oracle,
    recover_permanent,
)
from .perm_core import (
    IntMatrix,
    minor,
    permanent_complex,
    permanent_naive,
    permanent_ryser,
    rotate_column_to_front,
)
from .qsim import (
    Circuit,
    FunctionTable,
    Op,
    StateVector,
    build_simquery,
    measure,
    oracle_op,
    run,
    simon_decide,
    swap_test,
)

__version__ = "0.1.0"
