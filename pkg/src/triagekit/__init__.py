"""triagekit: gradient-boosted triage models with exact SHAP explanations.

Subpackages:
  dataset   cohort ingestion, cleaning, encoding, balancing, splitting
  gbtree    from-scratch second-order boosted trees (binary logistic)
  model_io  versioned text model files
  explain   exact SHAP attributions, rankings, representative tree
  metrics   confusion-matrix metrics, ROC/PR curves
  crossval  repeated stratified CV and grid search
  cluster   Yeo-Johnson transform + k-prototypes bias check
  service   HTTP calculator backend
  cli       pipeline orchestration
"""

__version__ = "0.1.0"

from .gbtree import (  # noqa: F401
    GBTModel,
    Hyperparams,
    MORTALITY_HYPERPARAMS,
    SEVERITY_HYPERPARAMS,
    predict_label,
    predict_margin,
    predict_proba,
    train_ensemble,
)
from .model_io import load_model, save_model  # noqa: F401
