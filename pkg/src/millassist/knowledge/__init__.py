from .base import ARCHIVE_SCHEMA, KnowledgeBase
from .model import (PROPOSAL_APPROVED, PROPOSAL_OPEN, PROPOSAL_REJECTED,
                    ROLE_EDITOR, ROLE_OPERATOR, STATUS_APPROVED, STATUS_DRAFT,
                    STATUS_PROPOSED, CardVersion, CausalLink, ChangeProposal,
                    Comment, Malfunction, SolutionStep, content_hash)

__all__ = [
    "ARCHIVE_SCHEMA", "KnowledgeBase",
    "PROPOSAL_APPROVED", "PROPOSAL_OPEN", "PROPOSAL_REJECTED",
    "ROLE_EDITOR", "ROLE_OPERATOR",
    "STATUS_APPROVED", "STATUS_DRAFT", "STATUS_PROPOSED",
    "CardVersion", "CausalLink", "ChangeProposal", "Comment", "Malfunction",
    "SolutionStep", "content_hash",
]
