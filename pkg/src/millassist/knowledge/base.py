"""Versioned card store with the editor-approval workflow.

All mutations funnel through one lock.  Approved versions are frozen value
objects; a new approval appends a version and never touches older ones, so
readers can hold on to whatever they fetched.
"""

from __future__ import annotations

import io
import json
import threading
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (AuthorizationError, ConflictError, CycleError,
                      NotFoundError, ValidationError)
from .model import (PROPOSAL_APPROVED, PROPOSAL_OPEN, PROPOSAL_REJECTED,
                    ROLE_EDITOR, ROLE_OPERATOR, STATUS_APPROVED, STATUS_DRAFT,
                    STATUS_PROPOSED, CardVersion, CausalLink, ChangeProposal,
                    Comment, Malfunction, SolutionStep)

ARCHIVE_SCHEMA = 1


@dataclass
class _Card:
    card_id: str
    created_by: str
    versions: list[CardVersion] = field(default_factory=list)
    comments: list[Comment] = field(default_factory=list)
    deprecated: bool = False
    submitted: bool = False

    @property
    def latest(self) -> CardVersion:
        return self.versions[-1]

    @property
    def latest_approved(self) -> CardVersion | None:
        for version in reversed(self.versions):
            if version.status == STATUS_APPROVED:
                return version
        return None

    @property
    def status(self) -> str:
        if self.deprecated:
            return "deprecated"
        if self.latest_approved is not None:
            return STATUS_APPROVED
        return STATUS_PROPOSED if self.submitted else STATUS_DRAFT


class KnowledgeBase:
    """Cards, proposals, comments, and the acyclic causal graph."""

    def __init__(self):
        self._lock = threading.RLock()
        self._users: dict[str, str] = {}
        self._cards: dict[str, _Card] = {}
        self._proposals: dict[str, ChangeProposal] = {}
        self._links: list[CausalLink] = []
        self._edges: dict[str, set[str]] = {}
        self._card_seq = 0
        self._proposal_seq = 0
        self._clock = 0

    # --- users ------------------------------------------------------------

    def register_user(self, name: str, role: str) -> None:
        if role not in (ROLE_OPERATOR, ROLE_EDITOR):
            raise ValidationError(f"unknown role {role!r}")
        with self._lock:
            self._users[name] = role

    def _require_user(self, name: str) -> str:
        role = self._users.get(name)
        if role is None:
            raise AuthorizationError(f"unknown user {name!r}")
        return role

    def _require_editor(self, name: str) -> None:
        if self._require_user(name) != ROLE_EDITOR:
            raise AuthorizationError(f"{name} is not a card editor")

    def _tick(self, at: int | None) -> int:
        if at is None:
            self._clock += 1
        else:
            self._clock = max(self._clock + 1, int(at))
        return self._clock

    # --- card lifecycle ----------------------------------------------------

    def create_card(self, malfunction: Malfunction,
                    solutions: list[SolutionStep], author: str) -> str:
        with self._lock:
            self._require_user(author)
            self._card_seq += 1
            card_id = f"card-{self._card_seq:04d}"
            draft = CardVersion(card_id=card_id, version=1, status=STATUS_DRAFT,
                                malfunction=malfunction,
                                solutions=tuple(solutions), author=author)
            self._cards[card_id] = _Card(card_id=card_id, created_by=author,
                                         versions=[draft])
            return card_id

    def submit_card(self, card_id: str, author: str) -> None:
        """Mark a draft ready for editor review."""
        with self._lock:
            self._require_user(author)
            card = self._card(card_id)
            if card.latest_approved is not None:
                raise ConflictError(f"{card_id} already has an approved version")
            card.submitted = True

    def approve_card(self, card_id: str, editor: str,
                     at: int | None = None) -> CardVersion:
        """First approval: promotes the version-1 draft."""
        with self._lock:
            self._require_editor(editor)
            card = self._card(card_id)
            if card.latest_approved is not None:
                raise ConflictError(
                    f"{card_id} already approved; use a change proposal")
            draft = card.versions[0]
            if editor == draft.author:
                raise AuthorizationError(
                    "card author cannot approve their own draft")
            approved = CardVersion(card_id=card_id, version=1,
                                   status=STATUS_APPROVED,
                                   malfunction=draft.malfunction,
                                   solutions=draft.solutions,
                                   author=draft.author, editor_of_record=editor,
                                   approved_at=self._tick(at))
            card.versions[0] = approved
            return approved

    def deprecate_card(self, card_id: str, editor: str) -> None:
        with self._lock:
            self._require_editor(editor)
            self._card(card_id).deprecated = True

    def _card(self, card_id: str) -> _Card:
        card = self._cards.get(card_id)
        if card is None:
            raise NotFoundError(f"unknown card {card_id!r}")
        return card

    # --- proposals ----------------------------------------------------------

    def propose_change(self, card_id: str, diff: dict, proposer: str,
                       note: str = "") -> str:
        with self._lock:
            self._require_user(proposer)
            card = self._card(card_id)
            base = card.latest_approved
            if base is None:
                raise ConflictError(
                    f"{card_id} has no approved version to change yet")
            unknown = set(diff) - {"malfunction", "solutions"}
            if unknown:
                raise ValidationError(
                    f"diff may only replace malfunction/solutions, "
                    f"got {sorted(unknown)}")
            if not diff:
                raise ValidationError("empty diff")
            self._proposal_seq += 1
            proposal_id = f"prop-{self._proposal_seq:04d}"
            self._proposals[proposal_id] = ChangeProposal(
                proposal_id=proposal_id, card_id=card_id,
                base_version=base.version, diff=dict(diff), proposer=proposer,
                note=note)
            return proposal_id

    def _proposal(self, proposal_id: str) -> ChangeProposal:
        proposal = self._proposals.get(proposal_id)
        if proposal is None:
            raise NotFoundError(f"unknown proposal {proposal_id!r}")
        return proposal

    def approve(self, proposal_id: str, editor: str,
                at: int | None = None) -> CardVersion:
        with self._lock:
            self._require_editor(editor)
            proposal = self._proposal(proposal_id)
            if proposal.state != PROPOSAL_OPEN:
                raise ValidationError(
                    f"proposal {proposal_id} is {proposal.state}, not open")
            if editor == proposal.proposer:
                raise AuthorizationError(
                    "proposer cannot approve their own change")
            card = self._card(proposal.card_id)
            base = card.latest_approved
            if base is None or base.version != proposal.base_version:
                latest = base.version if base else 0
                raise ConflictError(
                    f"proposal base v{proposal.base_version} is stale, "
                    f"latest is v{latest}; rebase required")
            malfunction = base.malfunction
            solutions = base.solutions
            if "malfunction" in proposal.diff:
                malfunction = Malfunction.from_dict(proposal.diff["malfunction"])
            if "solutions" in proposal.diff:
                solutions = tuple(SolutionStep.from_dict(s)
                                  for s in proposal.diff["solutions"])
            version = CardVersion(card_id=card.card_id,
                                  version=base.version + 1,
                                  status=STATUS_APPROVED,
                                  malfunction=malfunction, solutions=solutions,
                                  author=proposal.proposer,
                                  editor_of_record=editor,
                                  approved_at=self._tick(at))
            card.versions.append(version)
            proposal.state = PROPOSAL_APPROVED
            return version

    def reject_proposal(self, proposal_id: str, editor: str) -> None:
        with self._lock:
            self._require_editor(editor)
            proposal = self._proposal(proposal_id)
            if proposal.state != PROPOSAL_OPEN:
                raise ValidationError(
                    f"proposal {proposal_id} is {proposal.state}, not open")
            proposal.state = PROPOSAL_REJECTED

    def rebase_proposal(self, proposal_id: str) -> ChangeProposal:
        """Re-point an open proposal at the card's current approved version."""
        with self._lock:
            proposal = self._proposal(proposal_id)
            if proposal.state != PROPOSAL_OPEN:
                raise ValidationError(
                    f"proposal {proposal_id} is {proposal.state}, not open")
            base = self._card(proposal.card_id).latest_approved
            proposal.base_version = base.version if base else 0
            return proposal

    def open_proposals(self, card_id: str | None = None) -> list[ChangeProposal]:
        with self._lock:
            out = [p for p in self._proposals.values()
                   if p.state == PROPOSAL_OPEN]
            if card_id is not None:
                out = [p for p in out if p.card_id == card_id]
            return sorted(out, key=lambda p: p.proposal_id)

    def proposal_state(self, proposal_id: str) -> str:
        return self._proposal(proposal_id).state

    # --- comments -----------------------------------------------------------

    def comment(self, card_id: str, author: str, text: str,
                at: int | None = None) -> Comment:
        if not text.strip():
            raise ValidationError("comment text must not be empty")
        with self._lock:
            self._require_user(author)
            card = self._card(card_id)
            entry = Comment(author=author, timestamp=self._tick(at), text=text)
            card.comments.append(entry)
            return entry

    def comments(self, card_id: str) -> list[Comment]:
        with self._lock:
            return list(self._card(card_id).comments)

    # --- causal links -------------------------------------------------------

    def link_causal(self, from_card: str, to_card: str, actor: str,
                    note: str = "") -> CausalLink:
        with self._lock:
            self._require_editor(actor)
            self._card(from_card)
            self._card(to_card)
            if from_card == to_card:
                raise CycleError(f"cycle: {from_card} -> {to_card}")
            if any(l.from_card == from_card and l.to_card == to_card
                   for l in self._links):
                raise ConflictError(
                    f"link {from_card} -> {to_card} already exists")
            path = self._path(to_card, from_card)
            if path is not None:
                loop = " -> ".join([from_card] + path)
                raise CycleError(f"cycle: {loop}")
            link = CausalLink(from_card=from_card, to_card=to_card, note=note)
            self._links.append(link)
            self._edges.setdefault(from_card, set()).add(to_card)
            return link

    def _path(self, start: str, goal: str) -> list[str] | None:
        """Edge path start..goal following causal direction, if any."""
        parent = {start: None}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            if node == goal:
                path = [node]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return list(reversed(path))
            for nxt in self._edges.get(node, ()):
                if nxt not in parent:
                    parent[nxt] = node
                    frontier.append(nxt)
        return None

    def _closure(self, card_id: str, forward: bool) -> set[str]:
        if forward:
            edges = self._edges
        else:
            edges = {}
            for link in self._links:
                edges.setdefault(link.to_card, set()).add(link.from_card)
        seen: set[str] = set()
        frontier = [card_id]
        while frontier:
            for nxt in edges.get(frontier.pop(), ()):
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    def effects_of(self, card_id: str) -> set[str]:
        with self._lock:
            self._card(card_id)
            return self._closure(card_id, forward=True)

    def causes_of(self, card_id: str) -> set[str]:
        with self._lock:
            self._card(card_id)
            return self._closure(card_id, forward=False)

    def links(self) -> list[CausalLink]:
        with self._lock:
            return list(self._links)

    def assert_acyclic(self) -> None:
        """Topological-sort check over the whole graph."""
        with self._lock:
            indegree: dict[str, int] = {c: 0 for c in self._cards}
            for link in self._links:
                indegree[link.to_card] = indegree.get(link.to_card, 0) + 1
            queue = [c for c, d in indegree.items() if d == 0]
            visited = 0
            while queue:
                node = queue.pop()
                visited += 1
                for nxt in self._edges.get(node, ()):
                    indegree[nxt] -= 1
                    if indegree[nxt] == 0:
                        queue.append(nxt)
            if visited != len(indegree):
                raise CycleError("causal graph contains a cycle")

    # --- queries ------------------------------------------------------------

    def get_version(self, card_id: str, version: int) -> CardVersion:
        with self._lock:
            card = self._card(card_id)
            for v in card.versions:
                if v.version == version:
                    return v
            raise NotFoundError(f"{card_id} has no version {version}")

    def latest_approved(self, card_id: str) -> CardVersion:
        with self._lock:
            version = self._card(card_id).latest_approved
            if version is None:
                raise NotFoundError(f"{card_id} has no approved version")
            return version

    def card_status(self, card_id: str) -> str:
        with self._lock:
            return self._card(card_id).status

    def card_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._cards)

    def visible_cards(self) -> list[CardVersion]:
        """Operator view: latest approved version of non-deprecated cards."""
        with self._lock:
            out = []
            for card in self._cards.values():
                if card.deprecated:
                    continue
                version = card.latest_approved
                if version is not None:
                    out.append(version)
            return sorted(out, key=lambda v: v.card_id)

    def find_cards(self, query: str | None = None, scorer=None, *,
                   error_code: str | None = None) -> list[CardVersion]:
        """Approved, non-deprecated cards matching an error code, location
        identifier, or situation label.

        scorer maps card_id to a rank score; without one every card scores
        the same and recency decides.  error_code= is an alias for query
        so alarm annotation can name what it passes.
        """
        if query is None:
            query = error_code
        if query is None:
            raise ValidationError("find_cards needs a query")
        with self._lock:
            matches = []
            for version in self.visible_cards():
                m = version.malfunction
                if (query in m.error_codes or query in m.locations
                        or query in m.situations):
                    matches.append(version)
            def key(version: CardVersion):
                score = scorer(version.card_id) if scorer else 0.5
                return (-score, -(version.approved_at or 0), version.card_id)
            return sorted(matches, key=key)

    # --- persistence --------------------------------------------------------

    def _documents(self) -> dict[str, str]:
        """Relative path -> file body for every stored object."""
        docs: dict[str, str] = {}
        meta = {"archive_schema": ARCHIVE_SCHEMA,
                "users": self._users,
                "card_seq": self._card_seq,
                "proposal_seq": self._proposal_seq,
                "clock": self._clock}
        docs["meta.json"] = json.dumps(meta, indent=2, sort_keys=True)
        docs["links.json"] = json.dumps([l.to_dict() for l in self._links],
                                        indent=2)
        docs["proposals.json"] = json.dumps(
            [p.to_dict() for p in sorted(self._proposals.values(),
                                         key=lambda p: p.proposal_id)],
            indent=2)
        for card in self._cards.values():
            base = f"cards/{card.card_id}"
            state = {"card_id": card.card_id, "created_by": card.created_by,
                     "deprecated": card.deprecated,
                     "submitted": card.submitted,
                     "comments": [c.to_dict() for c in card.comments]}
            docs[f"{base}/card.json"] = json.dumps(state, indent=2,
                                                   sort_keys=True)
            for version in card.versions:
                name = f"v{version.version:03d}-{version.content_hash[:12]}.json"
                docs[f"{base}/{name}"] = json.dumps(version.to_dict(), indent=2,
                                                    sort_keys=True)
        return docs

    def save(self, directory: str | Path) -> None:
        root = Path(directory)
        with self._lock:
            for rel, body in self._documents().items():
                path = root / rel
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(body, encoding="utf-8")

    def export_archive(self, path: str | Path) -> None:
        with self._lock:
            docs = self._documents()
        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as zf:
            for rel in sorted(docs):
                zf.writestr(rel, docs[rel])
        Path(path).write_bytes(buffer.getvalue())

    @classmethod
    def _from_documents(cls, docs: dict[str, str]) -> "KnowledgeBase":
        kb = cls()
        meta = json.loads(docs["meta.json"])
        if meta.get("archive_schema") != ARCHIVE_SCHEMA:
            raise ValidationError(
                f"unsupported archive schema {meta.get('archive_schema')!r}")
        kb._users = dict(meta["users"])
        kb._card_seq = meta["card_seq"]
        kb._proposal_seq = meta["proposal_seq"]
        kb._clock = meta["clock"]
        for link_doc in json.loads(docs.get("links.json", "[]")):
            link = CausalLink.from_dict(link_doc)
            kb._links.append(link)
            kb._edges.setdefault(link.from_card, set()).add(link.to_card)
        for prop_doc in json.loads(docs.get("proposals.json", "[]")):
            proposal = ChangeProposal.from_dict(prop_doc)
            kb._proposals[proposal.proposal_id] = proposal
        states = {rel: body for rel, body in docs.items()
                  if rel.startswith("cards/") and rel.endswith("/card.json")}
        for rel, body in sorted(states.items()):
            state = json.loads(body)
            card_id = state["card_id"]
            card = _Card(card_id=card_id, created_by=state["created_by"],
                         deprecated=state["deprecated"],
                         submitted=state.get("submitted", False),
                         comments=[Comment.from_dict(c)
                                   for c in state["comments"]])
            prefix = f"cards/{card_id}/v"
            versions = sorted(rel for rel in docs
                              if rel.startswith(prefix))
            for vrel in versions:
                card.versions.append(CardVersion.from_dict(
                    json.loads(docs[vrel])))
            expected = list(range(1, len(card.versions) + 1))
            if [v.version for v in card.versions] != expected:
                raise ValidationError(f"{card_id} version history has gaps")
            kb._cards[card_id] = card
        kb.assert_acyclic()
        return kb

    @classmethod
    def load(cls, directory: str | Path) -> "KnowledgeBase":
        root = Path(directory)
        docs = {str(p.relative_to(root)).replace("\\", "/"): p.read_text("utf-8")
                for p in root.rglob("*.json")}
        if "meta.json" not in docs:
            raise NotFoundError(f"no card store at {root}")
        return cls._from_documents(docs)

    @classmethod
    def import_archive(cls, path: str | Path) -> "KnowledgeBase":
        with zipfile.ZipFile(path) as zf:
            docs = {info.filename: zf.read(info.filename).decode("utf-8")
                    for info in zf.infolist() if not info.is_dir()}
        return cls._from_documents(docs)
