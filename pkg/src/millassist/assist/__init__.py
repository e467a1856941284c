from .engine import (DISPOSITION_ACTED, DISPOSITION_DISMISSED,
                     DISPOSITION_OPEN, TRIGGER_KINDS, TRIGGER_PCS_ALARM,
                     TRIGGER_QUALITY, TRIGGER_SITUATION, TRIGGER_WEB_BREAK,
                     VERDICT_CONFIRM, VERDICT_CORRECT, VERDICT_REJECT,
                     VERDICT_SUPPLEMENT, VERDICTS, AssistEngine, Feedback,
                     Recommendation, TriggerEvent, replay_stats,
                     smoothed_score)
from .situation import (DEFAULT_CONFIDENCE_THRESHOLD, LABEL_UNKNOWN,
                        SituationClassifier, train_situation_classifier)

__all__ = [
    "DISPOSITION_ACTED", "DISPOSITION_DISMISSED", "DISPOSITION_OPEN",
    "TRIGGER_KINDS", "TRIGGER_PCS_ALARM", "TRIGGER_QUALITY",
    "TRIGGER_SITUATION", "TRIGGER_WEB_BREAK",
    "VERDICT_CONFIRM", "VERDICT_CORRECT", "VERDICT_REJECT",
    "VERDICT_SUPPLEMENT", "VERDICTS",
    "AssistEngine", "Feedback", "Recommendation", "TriggerEvent",
    "replay_stats", "smoothed_score",
    "DEFAULT_CONFIDENCE_THRESHOLD", "LABEL_UNKNOWN", "SituationClassifier",
    "train_situation_classifier",
]
