"""Append-only record store with windowed queries and feature alignment."""

from .core import BatchAssociation, EventStore, StoreConfig
from .features import FeatureField, FeatureVector, MISSING, reel_feature_spec

__all__ = [
    "BatchAssociation",
    "EventStore",
    "FeatureField",
    "FeatureVector",
    "MISSING",
    "StoreConfig",
    "reel_feature_spec",
]
