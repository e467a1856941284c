"""Recommendation loop: triggers in, ranked knowledge cards out, feedback back.

The engine never touches machine settings.  Everything it does is appended to
an audit log whose replay reconstructs the feedback tallies exactly.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import NotFoundError, ValidationError
from ..knowledge import KnowledgeBase, SolutionStep
from .situation import LABEL_UNKNOWN, SituationClassifier

TRIGGER_PCS_ALARM = "pcs_alarm"
TRIGGER_WEB_BREAK = "web_break"
TRIGGER_SITUATION = "recognized_situation"
TRIGGER_QUALITY = "quality_deviation"
TRIGGER_KINDS = (TRIGGER_PCS_ALARM, TRIGGER_WEB_BREAK, TRIGGER_SITUATION,
                 TRIGGER_QUALITY)

VERDICT_CONFIRM = "confirm"
VERDICT_REJECT = "reject"
VERDICT_CORRECT = "correct"
VERDICT_SUPPLEMENT = "supplement"
VERDICTS = (VERDICT_CONFIRM, VERDICT_REJECT, VERDICT_CORRECT,
            VERDICT_SUPPLEMENT)

DISPOSITION_OPEN = "open"
DISPOSITION_ACTED = "acted"
DISPOSITION_DISMISSED = "dismissed"

# smoothing prior: one phantom confirm and one phantom reject
PRIOR_A = 1
PRIOR_B = 1


@dataclass(frozen=True)
class TriggerEvent:
    kind: str
    timestamp: int
    location: str
    alarm_group_id: str | None = None
    situation_label: str | None = None
    forecast_id: str | None = None
    error_codes: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in TRIGGER_KINDS:
            raise ValidationError(f"unknown trigger kind {self.kind!r}")
        required = {TRIGGER_PCS_ALARM: self.alarm_group_id,
                    TRIGGER_SITUATION: self.situation_label,
                    TRIGGER_QUALITY: self.forecast_id}
        if self.kind in required and not required[self.kind]:
            raise ValidationError(
                f"{self.kind} trigger is missing its source reference")
        object.__setattr__(self, "error_codes", tuple(self.error_codes))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "timestamp": self.timestamp,
                "location": self.location,
                "alarm_group_id": self.alarm_group_id,
                "situation_label": self.situation_label,
                "forecast_id": self.forecast_id,
                "error_codes": list(self.error_codes)}

    @classmethod
    def from_dict(cls, doc: dict) -> "TriggerEvent":
        return cls(kind=doc["kind"], timestamp=doc["timestamp"],
                   location=doc["location"],
                   alarm_group_id=doc.get("alarm_group_id"),
                   situation_label=doc.get("situation_label"),
                   forecast_id=doc.get("forecast_id"),
                   error_codes=tuple(doc.get("error_codes", ())))


@dataclass
class Recommendation:
    recommendation_id: str
    trigger: TriggerEvent
    situation_label: str
    candidates: list[tuple[str, float]]
    created_at: int
    disposition: str = DISPOSITION_OPEN

    def __post_init__(self):
        scores = [score for _, score in self.candidates]
        if any(b > a for a, b in zip(scores, scores[1:])):
            raise ValidationError("candidate scores must be non-increasing")

    def to_dict(self) -> dict:
        return {"recommendation_id": self.recommendation_id,
                "trigger": self.trigger.to_dict(),
                "situation_label": self.situation_label,
                "candidates": [[card, score] for card, score in self.candidates],
                "created_at": self.created_at,
                "disposition": self.disposition}


@dataclass(frozen=True)
class Feedback:
    recommendation_id: str
    card_id: str
    verdict: str
    author: str
    timestamp: int
    text: str = ""

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValidationError(f"unknown verdict {self.verdict!r}")
        if self.verdict in (VERDICT_CORRECT, VERDICT_SUPPLEMENT) \
                and not self.text.strip():
            raise ValidationError(
                f"{self.verdict} feedback must carry text")

    def to_dict(self) -> dict:
        return {"recommendation_id": self.recommendation_id,
                "card_id": self.card_id, "verdict": self.verdict,
                "author": self.author, "timestamp": self.timestamp,
                "text": self.text}


def smoothed_score(confirms: int, rejects: int) -> float:
    return (confirms + PRIOR_A) / (confirms + rejects + PRIOR_A + PRIOR_B)


class AssistEngine:
    """Binds the card store, the situation classifier, and feedback learning."""

    def __init__(self, kb: KnowledgeBase,
                 classifier: SituationClassifier | None = None,
                 audit_path: str | Path | None = None):
        self.kb = kb
        self.classifier = classifier
        self.audit_path = Path(audit_path) if audit_path else None
        self._lock = threading.RLock()
        self._stats: dict[tuple[str, str], list[int]] = {}
        self._recommendations: dict[str, Recommendation] = {}
        self._feedback: list[Feedback] = []
        self._rec_seq = 0

    # --- scoring ----------------------------------------------------------

    def score(self, card_id: str, situation: str) -> float:
        confirms, rejects = self._stats.get((card_id, situation), (0, 0))
        return smoothed_score(confirms, rejects)

    def stats(self) -> dict[tuple[str, str], tuple[int, int]]:
        with self._lock:
            return {key: (c, r) for key, (c, r) in self._stats.items()}

    def scorer_for(self, situation: str):
        return lambda card_id: self.score(card_id, situation)

    def rank_candidates(self, card_ids, situation: str) -> list[tuple[str, float]]:
        """Smoothed confirm ratio per (card, situation); recency breaks ties."""
        def recency(card_id: str) -> int:
            try:
                version = self.kb.latest_approved(card_id)
            except NotFoundError:
                return 0
            return version.approved_at or 0
        ordered = sorted(card_ids,
                         key=lambda c: (-self.score(c, situation),
                                        -recency(c), c))
        return [(card_id, self.score(card_id, situation))
                for card_id in ordered]

    # --- situation recognition -------------------------------------------

    def classify_situation(self, features, location: str) -> tuple[str, float]:
        if self.classifier is None:
            return LABEL_UNKNOWN, 0.0
        return self.classifier.classify(features)

    # --- trigger handling --------------------------------------------------

    def on_trigger(self, event: TriggerEvent, features=None) -> Recommendation:
        with self._lock:
            label = event.situation_label
            if label is None and features is not None:
                label, _ = self.classify_situation(features, event.location)
            if label is None:
                label = LABEL_UNKNOWN

            queries = list(event.error_codes)
            if event.situation_label:
                queries.append(event.situation_label)
            elif label != LABEL_UNKNOWN:
                queries.append(label)
            if event.location:
                queries.append(event.location)
            seen: dict[str, None] = {}
            for query in queries:
                for version in self.kb.find_cards(query):
                    seen.setdefault(version.card_id)
            candidates = self.rank_candidates(list(seen), label)

            self._rec_seq += 1
            rec = Recommendation(
                recommendation_id=f"rec-{self._rec_seq:06d}",
                trigger=event, situation_label=label,
                candidates=candidates, created_at=event.timestamp)
            self._recommendations[rec.recommendation_id] = rec
            self._audit("trigger", event.to_dict())
            self._audit("recommendation", rec.to_dict())
            return rec

    def recommendation(self, recommendation_id: str) -> Recommendation:
        rec = self._recommendations.get(recommendation_id)
        if rec is None:
            raise NotFoundError(f"unknown recommendation {recommendation_id!r}")
        return rec

    def recommendations(self) -> list[Recommendation]:
        with self._lock:
            return [self._recommendations[k]
                    for k in sorted(self._recommendations)]

    def dismiss(self, recommendation_id: str) -> None:
        with self._lock:
            rec = self.recommendation(recommendation_id)
            rec.disposition = DISPOSITION_DISMISSED
            self._audit("disposition", {"recommendation_id": recommendation_id,
                                        "disposition": rec.disposition})

    # --- feedback -----------------------------------------------------------

    def record_feedback(self, feedback: Feedback) -> str | None:
        """Update tallies; correct/supplement also drafts a change proposal.

        Returns the proposal id when one was created.
        """
        with self._lock:
            rec = self.recommendation(feedback.recommendation_id)
            if rec.disposition == DISPOSITION_DISMISSED:
                raise ValidationError(
                    f"{rec.recommendation_id} is dismissed; feedback closed")
            proposal_id = None
            key = (feedback.card_id, rec.situation_label)
            if feedback.verdict == VERDICT_CONFIRM:
                self._stats.setdefault(key, [0, 0])[0] += 1
            elif feedback.verdict == VERDICT_REJECT:
                self._stats.setdefault(key, [0, 0])[1] += 1
            else:
                # correction and supplementation feed the editorial loop, not
                # the tallies
                proposal_id = self._draft_proposal(feedback)
            self._feedback.append(feedback)
            rec.disposition = DISPOSITION_ACTED
            doc = feedback.to_dict()
            doc["proposal_id"] = proposal_id
            self._audit("feedback", doc)
            return proposal_id

    def _draft_proposal(self, feedback: Feedback) -> str:
        base = self.kb.latest_approved(feedback.card_id)
        steps = [s.to_dict() for s in base.solutions]
        steps.append(SolutionStep(feedback.text).to_dict())
        return self.kb.propose_change(
            feedback.card_id, {"solutions": steps}, proposer=feedback.author,
            note=f"{feedback.verdict} feedback on {feedback.recommendation_id}")

    def feedback_log(self) -> list[Feedback]:
        with self._lock:
            return list(self._feedback)

    # --- audit --------------------------------------------------------------

    def _audit(self, kind: str, payload: dict) -> None:
        if self.audit_path is None:
            return
        entry = {"kind": kind, "payload": payload}
        with open(self.audit_path, "a", encoding="utf-8") as fp:
            fp.write(json.dumps(entry, sort_keys=True,
                                separators=(",", ":")) + "\n")


def replay_stats(audit_path: str | Path) -> dict[tuple[str, str], tuple[int, int]]:
    """Rebuild feedback tallies from the audit log alone."""
    situations: dict[str, str] = {}
    stats: dict[tuple[str, str], list[int]] = {}
    for line in Path(audit_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        payload = doc["payload"]
        if doc["kind"] == "recommendation":
            situations[payload["recommendation_id"]] = payload["situation_label"]
        elif doc["kind"] == "feedback":
            situation = situations.get(payload["recommendation_id"],
                                       LABEL_UNKNOWN)
            key = (payload["card_id"], situation)
            if payload["verdict"] == VERDICT_CONFIRM:
                stats.setdefault(key, [0, 0])[0] += 1
            elif payload["verdict"] == VERDICT_REJECT:
                stats.setdefault(key, [0, 0])[1] += 1
    return {key: (c, r) for key, (c, r) in stats.items()}
