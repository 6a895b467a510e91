"""Imbalanced requirements classification: TF-IDF features, SMOTE-Tomek
resampling, leakage-safe stratified cross-validation and five classifiers."""

from .corpus import Dataset, Label, RequirementRecord, class_distribution, load_promise_csv
from .evaluation import aggregate, confusion_matrix, metrics
from .harness import ExperimentConfig, run_cv, stratified_kfold, train_final
from .models import ModelSpec, TrainedModel, predict, predict_proba, top_features, train
from .resampler import SmoteParams, find_tomek_links, remove_tomek_majority, smote_oversample, smote_tomek
from .vectorizer import FeatureMatrix, TfidfConfig, Vocabulary, fit, fit_transform, nonzero_terms, transform

__version__ = "0.1.0"
