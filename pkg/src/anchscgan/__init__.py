"""Anchor-guided, score-stabilized GAN oversampling for imbalanced tabular data."""

from .anchors import AnchorSet, select_anchors
from .baselines import adasyn, borderline_smote, ros, smote
from .data import Dataset, load_csv, make_dataset, write_csv
from .errors import AnchError, DataError, DivergenceError, ModelFormatError
from .evaluation import benchmark, friedman_test, metrics_from_counts
from .gan import GanConfig, GanModel
from .model_io import load_model, save_model
from .pipeline import PipelineConfig, fit, oversample_anchscgan

__version__ = "0.1.0"
