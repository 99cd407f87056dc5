"""Planning of entangling/swapping schedules on a time-slotted quantum network."""

from swapsched.allocation import Allocation, Assigned
from swapsched.base import (
    AsapSolver,
    BaseSolver,
    FltoSolver,
    FnprSolver,
    LinearSolver,
    NestingSolver,
    UpperBoundSolver,
    make_solver,
)
from swapsched.fidelity import (
    FidelityModel,
    FullyDecoheredError,
    decay_one_slot,
    decoherence_curve,
    invert_curve,
    link_success_prob,
    path_success_prob,
    swap_fidelity,
    swap_with_decay,
)
from swapsched.instance import (
    Batch,
    Instance,
    Path,
    Request,
    ScenarioConfig,
    build_instance,
    mis_reduction,
    substream,
)
from swapsched.strategy import (
    Numerology,
    TreeNode,
    enumerate_numerologies,
    evaluate_fidelity,
    numerology_to_tree,
    tree_to_numerology,
)

__version__ = "0.1.0"
