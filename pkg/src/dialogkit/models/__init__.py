"""The three predictors: entity recognition, action prediction, argument filling."""

from .vocab import Vocab, build_vocab
from .features import catalogue_features, levenshtein_similarity
from .ner import NerConfig, NerModel
from .action import ApConfig, ApModel, select_action
from .argfill import ActionSignature, AfConfig, AfModel, MissingArgument, resolve_signature_values
from .train import TrainConfig, train_models
from .bundle import ModelBundle, load_bundle, save_bundle

__all__ = [
    "Vocab", "build_vocab", "catalogue_features", "levenshtein_similarity",
    "NerConfig", "NerModel", "ApConfig", "ApModel", "select_action",
    "ActionSignature", "AfConfig", "AfModel", "MissingArgument",
    "resolve_signature_values", "TrainConfig", "train_models",
    "ModelBundle", "load_bundle", "save_bundle",
]
