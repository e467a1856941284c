from .anomaly import (DEFAULT_THRESHOLD, AnomalyReference, anomaly_score,
                      detect_extreme, fit_reference)
from .changepoint import (DIRECTION_DOWN, DIRECTION_UP, ChangePointEvent,
                          CusumDetector)
from .classify import (ALL_CLASSES, CLASS_HIGH, CLASS_IN_SPEC, CLASS_LOW,
                       classify_quality)
from .ensemble import (MIN_TRAINING_SAMPLES, MODEL_SCHEMA, ClassificationForest,
                       Hyperparams, RegressionForest, TrainingReport)
from .evaluate import (WITHIN_BAND, EvaluationReport, check_disjoint, evaluate,
                       read_reports, write_report)
from .quality import QualityForecast, QualityForecaster
from .tree import ClassificationTree, RegressionTree
from .webtrack import OUT_OF_HORIZON, track_web_segment

__all__ = [
    "DEFAULT_THRESHOLD", "AnomalyReference", "anomaly_score", "detect_extreme",
    "fit_reference",
    "DIRECTION_DOWN", "DIRECTION_UP", "ChangePointEvent", "CusumDetector",
    "ALL_CLASSES", "CLASS_HIGH", "CLASS_IN_SPEC", "CLASS_LOW", "classify_quality",
    "MIN_TRAINING_SAMPLES", "MODEL_SCHEMA", "ClassificationForest", "Hyperparams",
    "RegressionForest", "TrainingReport",
    "WITHIN_BAND", "EvaluationReport", "check_disjoint", "evaluate",
    "read_reports", "write_report",
    "QualityForecast", "QualityForecaster",
    "ClassificationTree", "RegressionTree",
    "OUT_OF_HORIZON", "track_web_segment",
]
