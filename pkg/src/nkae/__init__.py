"""NK-landscape regression benchmarks for hill-climbed feedforward networks
with per-neuron autoencoding."""

from .errors import ParameterError, InapplicableTestError
from .landscape import (
    Dataset,
    NkLandscape,
    gen_dataset,
    gene_contribution,
    fitness_batch,
    load_dataset,
    load_landscape,
    nk_fitness,
    nk_new,
    save_dataset,
    save_landscape,
)
from .networks import (
    AnnNetwork,
    Coord,
    MlpCore,
    NanNetwork,
    NnNetwork,
    ae_mse,
    decode_layer,
    decode_neuron,
    forward,
    hidden_activation,
    init_network,
    layer_ae_mse,
    load_network,
    nan_mean_ae_mse,
    neuron_ae_mse,
    param_count,
    save_network,
    sigmoid,
    task_mse,
)
from .incremental import EvalCache
from .hillclimb import (
    CycleRecord,
    RunLog,
    Snapshot,
    TrainConfig,
    choose_cycle,
    pick_coordinate,
    propose_and_test,
    train,
)
from .stats import SummaryStats, TestReport, shapiro_wilk, summarize, welch_t_test
from .experiments import (
    ExperimentConfig,
    TrialResult,
    aggregate,
    derive_seed,
    emit_series,
    run_experiment,
)

__version__ = "0.1.0"
