"""Self-contained engine for gated residual graph networks.

Plain numpy/scipy throughout: CSR graphs, a minimal reverse-mode tape,
the gated residual architecture with GCN/SGC baselines, a
deterministic trainer, and an over-smoothing analysis toolkit.
"""

from .analysis import (
    KBoundConfig,
    KBoundResult,
    degree_bucket_accuracy,
    k_bound,
    lambda2,
    mdcn,
    mdcn_vs_depth,
    smoothing_limit_oracle,
)
from .container import (
    Dataset,
    SplitMasks,
    ValidationReport,
    load_container,
    row_normalize,
    save_container,
    validate_dataset,
)
from .errors import NdggError
from .graph import (
    Graph,
    SparseMatrix,
    build_graph,
    connected_components,
    normalize_adjacency,
    spmm,
)
from .models import (
    MODEL_KINDS,
    ModelConfig,
    forward_dataset,
    init_params,
    model_forward,
    seeded_params,
)
from .training import (
    MetricsReport,
    TrainConfig,
    adam_step,
    evaluate,
    lr_at_epoch,
    predict,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "Graph",
    "KBoundConfig",
    "KBoundResult",
    "MODEL_KINDS",
    "MetricsReport",
    "ModelConfig",
    "NdggError",
    "SparseMatrix",
    "SplitMasks",
    "TrainConfig",
    "ValidationReport",
    "adam_step",
    "build_graph",
    "connected_components",
    "degree_bucket_accuracy",
    "evaluate",
    "forward_dataset",
    "init_params",
    "k_bound",
    "lambda2",
    "load_container",
    "lr_at_epoch",
    "mdcn",
    "mdcn_vs_depth",
    "model_forward",
    "normalize_adjacency",
    "predict",
    "row_normalize",
    "save_container",
    "seeded_params",
    "smoothing_limit_oracle",
    "spmm",
    "train",
    "validate_dataset",
]
