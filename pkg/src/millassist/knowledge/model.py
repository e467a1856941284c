"""Card content structures and the content hash that pins approved versions."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from ..errors import ValidationError

STATUS_DRAFT = "draft"
STATUS_PROPOSED = "proposed"
STATUS_APPROVED = "approved"
STATUS_DEPRECATED = "deprecated"

PROPOSAL_OPEN = "open"
PROPOSAL_APPROVED = "approved"
PROPOSAL_REJECTED = "rejected"

ROLE_OPERATOR = "operator"
ROLE_EDITOR = "editor"


@dataclass(frozen=True)
class Malfunction:
    description: str
    cause: str = ""
    locations: tuple[str, ...] = ()
    error_codes: tuple[str, ...] = ()
    situations: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.description.strip():
            raise ValidationError("malfunction description must not be empty")
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "error_codes", tuple(self.error_codes))
        object.__setattr__(self, "situations", tuple(self.situations))

    def to_dict(self) -> dict:
        return {"description": self.description, "cause": self.cause,
                "locations": list(self.locations),
                "error_codes": list(self.error_codes),
                "situations": list(self.situations)}

    @classmethod
    def from_dict(cls, doc: dict) -> "Malfunction":
        return cls(description=doc["description"], cause=doc.get("cause", ""),
                   locations=tuple(doc.get("locations", ())),
                   error_codes=tuple(doc.get("error_codes", ())),
                   situations=tuple(doc.get("situations", ())))


@dataclass(frozen=True)
class SolutionStep:
    text: str
    media: str | None = None    # opaque file reference, never a stored blob

    def __post_init__(self):
        if not self.text.strip():
            raise ValidationError("solution step text must not be empty")

    def to_dict(self) -> dict:
        return {"text": self.text, "media": self.media}

    @classmethod
    def from_dict(cls, doc: dict) -> "SolutionStep":
        return cls(text=doc["text"], media=doc.get("media"))


@dataclass(frozen=True)
class Comment:
    author: str
    timestamp: int
    text: str

    def to_dict(self) -> dict:
        return {"author": self.author, "timestamp": self.timestamp,
                "text": self.text}

    @classmethod
    def from_dict(cls, doc: dict) -> "Comment":
        return cls(author=doc["author"], timestamp=doc["timestamp"],
                   text=doc["text"])


def content_hash(malfunction: Malfunction, solutions: tuple[SolutionStep, ...]) -> str:
    """Hash over the approvable sections only; comments never count."""
    doc = {"malfunction": malfunction.to_dict(),
           "solutions": [s.to_dict() for s in solutions]}
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CardVersion:
    card_id: str
    version: int
    status: str
    malfunction: Malfunction
    solutions: tuple[SolutionStep, ...]
    author: str
    editor_of_record: str | None = None
    approved_at: int | None = None

    def __post_init__(self):
        if self.version < 1:
            raise ValidationError("version numbers start at 1")
        object.__setattr__(self, "solutions", tuple(self.solutions))

    @property
    def content_hash(self) -> str:
        return content_hash(self.malfunction, self.solutions)

    def to_dict(self) -> dict:
        return {"card_id": self.card_id, "version": self.version,
                "status": self.status,
                "malfunction": self.malfunction.to_dict(),
                "solutions": [s.to_dict() for s in self.solutions],
                "author": self.author,
                "editor_of_record": self.editor_of_record,
                "approved_at": self.approved_at,
                "content_hash": self.content_hash}

    @classmethod
    def from_dict(cls, doc: dict) -> "CardVersion":
        version = cls(card_id=doc["card_id"], version=doc["version"],
                      status=doc["status"],
                      malfunction=Malfunction.from_dict(doc["malfunction"]),
                      solutions=tuple(SolutionStep.from_dict(s)
                                      for s in doc["solutions"]),
                      author=doc["author"],
                      editor_of_record=doc.get("editor_of_record"),
                      approved_at=doc.get("approved_at"))
        stored = doc.get("content_hash")
        if stored is not None and stored != version.content_hash:
            raise ValidationError(
                f"content hash mismatch for {doc['card_id']} v{doc['version']}")
        return version


@dataclass(frozen=True)
class CausalLink:
    from_card: str
    to_card: str
    note: str = ""

    def to_dict(self) -> dict:
        return {"from_card": self.from_card, "to_card": self.to_card,
                "note": self.note}

    @classmethod
    def from_dict(cls, doc: dict) -> "CausalLink":
        return cls(from_card=doc["from_card"], to_card=doc["to_card"],
                   note=doc.get("note", ""))


@dataclass
class ChangeProposal:
    proposal_id: str
    card_id: str
    base_version: int
    diff: dict
    proposer: str
    state: str = PROPOSAL_OPEN
    note: str = ""

    def to_dict(self) -> dict:
        return {"proposal_id": self.proposal_id, "card_id": self.card_id,
                "base_version": self.base_version, "diff": self.diff,
                "proposer": self.proposer, "state": self.state,
                "note": self.note}

    @classmethod
    def from_dict(cls, doc: dict) -> "ChangeProposal":
        return cls(proposal_id=doc["proposal_id"], card_id=doc["card_id"],
                   base_version=doc["base_version"], diff=doc["diff"],
                   proposer=doc["proposer"], state=doc["state"],
                   note=doc.get("note", ""))
