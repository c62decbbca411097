"""Kinematics, gait planning, design search and command generation for a
wire-driven quadruped whose legs are driven through shared tendons.

Set ``WIREDRIVE_DISABLE_JIT=1`` before import to run the pure-numpy kernels.
"""

from ._jit import USE_JIT
from .chain_model import (
    ChainConfiguration, ChainSpec, EfficiencyBands, EfficiencyModel, baseline_length,
    crossover_bend, efficiency_comparison, tip_pose, transmission_efficiency, wire_path_length,
    wire_routing, wrap_angles,
)
from .command_pipeline import (
    CommandSeries, PipelineConfig, WireSpline, allocate_times, cyclic_series, emit_commands,
)
from .design_optimization import (
    DesignProblem, DesignSolution, check_constraints, objective, optimize, reference_comparison,
)
from .errors import (
    EmptySeriesError, JointLimitError, NoFeasiblePointError, NonMonotoneTimeError,
    PlanInvariantError, SingularJacobianError, UnreachableTargetError, UnreachableTrajectoryError,
)
from .gait_synthesis import GaitParameters, GaitPlan, build_gait_plan, target_foot_trajectory
from .leg_kinematics import (
    ELBOW_NEGATIVE, ELBOW_POSITIVE, FootPosition, JointAngles, JointLimits, LegGeometry,
    forward_kinematics, inverse_kinematics, reachable,
)
from .tendon_transmission import (
    INTERIOR, KINEMATIC, DesignPair, JointConvention, TendonJacobian, coupling_map,
    joint_angles_from_wire, nominal_optimum, tuned_design, wire_displacement,
)

__version__ = "0.1.0"
