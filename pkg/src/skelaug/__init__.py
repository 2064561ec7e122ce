"""Geometry-aware augmentation and specialist ensembles for skeletal motion."""

from .core import (
    LabeledDataset,
    LandmarkSequence,
    SkeletonTopology,
    SplitSpec,
    center_sequence,
    make_splits,
    normalize_length,
)
from .augment import (
    PRESETS,
    AugmentationSpec,
    apply_augmentation,
    build_specialist_dataset,
    default_specialist_presets,
    get_preset,
)
from .genaug import GENERIC_PRESETS, GenericAugSpec, apply_generic
from .model import (
    ModelConfig,
    TrainConfig,
    TrainedSpecialist,
    load_specialist,
    predict,
    save_specialist,
    train,
)
from .ensemble import (
    EnsembleModel,
    hard_vote,
    load_ensemble,
    predict_ensemble,
    save_ensemble,
    soft_vote,
    train_bagging,
    train_generalist,
    train_specialist_ensemble,
)
from .evaluation import (
    EvalReport,
    accuracy,
    jaccard_error_overlap,
    mean_ci,
    run_experiment,
    subset_sweep,
)
from .dataio import (
    CsvSchema,
    SyntheticSpec,
    generate_synthetic,
    get_topology,
    import_csv,
    load_dataset,
    save_dataset,
)

__version__ = "0.1.0"
