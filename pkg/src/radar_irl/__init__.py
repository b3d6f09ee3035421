"""Multi-intention inverse reinforcement learning for cognitive radar
spectrum sharing: tabular MDP dynamic programming, reward-network trainers
(MaxEnt, maximum likelihood, EM mixtures), a radar/jammer scene simulator,
clustering baselines and evaluation metrics.
"""

from .errors import (
    CapacityError,
    ConvergenceError,
    InvalidInputError,
    NumericError,
    ValidationError,
)
from .mdp import (
    TabularMdp,
    Trajectory,
    boltzmann_policy,
    empirical_visitation,
    estimate_transitions,
    greedy_policy_from_q,
    load_dataset,
    policy_value,
    propagate_policy,
    sample_trajectories,
    save_dataset,
    soft_value_iteration,
    trajectory_log_policy_likelihood,
    uniform_policy,
    value_iteration,
)
from .reward_model import (
    AdamState,
    LinearRewardModel,
    MlpRewardModel,
    TripleFeatureMap,
    apply_update,
    backward_accumulate,
    forward_all,
    init_model,
    load_model,
    save_model,
)
from .radar_env import (
    EnvState,
    RadarAction,
    ScenarioConfig,
    TaskWeights,
    build_mdp,
    default_scenario,
    encode_features,
    enumerate_actions,
    enumerate_states,
    expert_policy,
    load_scenario,
    paper_scenario,
    reward,
    reward_tensor,
    save_scenario,
    sinr_db,
    start_distribution,
    step,
)
from .irl import (
    IrlConfig,
    MixtureModel,
    TrainReport,
    assign_trajectory,
    compute_trajectory_weights,
    em_multi_intention_irl,
    load_mixture,
    maxent_irl,
    merge_similar_rewards,
    ml_irl,
    responsibilities,
    save_mixture,
)
from .metrics import ape, ari, evd, nmi
from .baselines import featurize, gmm, kmeans

__version__ = "0.1.0"
