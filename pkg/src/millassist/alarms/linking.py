"""Knowledge linkage for alarm groups: pass, hold, or fail-open."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .groups import AlarmGroup

log = logging.getLogger(__name__)

# Presentation importance derived from the representative alarm's severity.
IMPORTANCE_BY_SEVERITY = {"alarm": "critical", "warning": "normal", "info": "info"}

STATUS_PASS = "pass"
STATUS_HOLD = "hold"
STATUS_UNFILTERED = "unfiltered"


@dataclass
class AnnotatedGroup:
    """An alarm group plus its knowledge linkage verdict."""

    group: AlarmGroup
    status: str
    card_ids: list[str] = field(default_factory=list)

    @property
    def importance(self) -> str:
        return IMPORTANCE_BY_SEVERITY[self.group.representative.severity]

    def to_dict(self) -> dict:
        d = self.group.to_dict()
        d["status"] = self.status
        d["card_ids"] = list(self.card_ids)
        d["importance"] = self.importance
        return d


def knowledge_link_filter(group: AlarmGroup, knowledge_base) -> AnnotatedGroup:
    """Attach approved-card ids for the representative error code.

    Groups with no linked knowledge are flagged hold (deprioritized, never
    dropped); critical groups always pass. A failing knowledge base fails
    open: the group passes with an `unfiltered` marker so no alarm is lost.
    """
    code = group.representative.error_code
    critical = group.representative.severity == "alarm"
    if knowledge_base is None:
        return AnnotatedGroup(group=group, status=STATUS_UNFILTERED)
    try:
        cards = knowledge_base.find_cards(error_code=code)
    except Exception:
        log.warning("knowledge base lookup failed for %s; passing unfiltered", code)
        return AnnotatedGroup(group=group, status=STATUS_UNFILTERED)
    card_ids = [card.card_id for card in cards]
    if card_ids or critical:
        return AnnotatedGroup(group=group, status=STATUS_PASS, card_ids=card_ids)
    return AnnotatedGroup(group=group, status=STATUS_HOLD)
