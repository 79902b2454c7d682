"""Fragments: [type, value] pairs that reify one dimension of a prompt."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (
    MalformedPayloadError,
    RemoveOfAbsentFragmentError,
    ReplaceTypeMismatchError,
)
from .lexicon import Lexicon

ORIGINS = ("decomposed", "suggested", "user", "extracted")

_SPACES = re.compile(r"\s+")


def canon_text(text: str) -> str:
    return _SPACES.sub(" ", text.strip().lower())


@dataclass(frozen=True)
class Fragment:
    """Identity is (ftype, value); origin is bookkeeping only."""

    ftype: str
    value: str
    origin: str = field(default="decomposed", compare=False)

    def __post_init__(self):
        ftype = canon_text(self.ftype)
        value = canon_text(self.value)
        if not ftype or not value:
            raise MalformedPayloadError("fragment needs non-empty type and value")
        if self.origin not in ORIGINS:
            raise MalformedPayloadError(f"unknown fragment origin {self.origin!r}")
        object.__setattr__(self, "ftype", ftype)
        object.__setattr__(self, "value", value)

    @property
    def key(self) -> tuple[str, str]:
        return (self.ftype, self.value)

    def to_dict(self) -> dict:
        return {"ftype": self.ftype, "value": self.value, "origin": self.origin}

    @classmethod
    def from_dict(cls, d: dict) -> "Fragment":
        return cls(d["ftype"], d["value"], d.get("origin", "decomposed"))


@dataclass(frozen=True)
class FragmentEdit:
    """One add/remove/replace step against a fragment set."""

    action: str
    fragment: Fragment
    replacement: Fragment | None = None

    def __post_init__(self):
        if self.action not in ("add", "remove", "replace"):
            raise MalformedPayloadError(f"unknown edit action {self.action!r}")
        if self.action == "replace":
            if self.replacement is None:
                raise MalformedPayloadError("replace edit needs a replacement")
            if self.replacement.ftype != self.fragment.ftype:
                raise ReplaceTypeMismatchError(
                    f"replace must keep the type: {self.fragment.ftype} != {self.replacement.ftype}"
                )
        elif self.replacement is not None:
            raise MalformedPayloadError(f"{self.action} edit must not carry a replacement")

    def to_dict(self) -> dict:
        d = {"action": self.action, "fragment": self.fragment.to_dict()}
        if self.replacement is not None:
            d["replacement"] = self.replacement.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "FragmentEdit":
        repl = d.get("replacement")
        return cls(
            d["action"],
            Fragment.from_dict(d["fragment"]),
            Fragment.from_dict(repl) if repl else None,
        )


@dataclass
class FragmentRow:
    """Base fragments (one per type, canonical order) plus per-type value
    expansion columns shown beneath them."""

    fragments: list[Fragment]
    expansions: dict[str, list[Fragment]] = field(default_factory=dict)

    def __post_init__(self):
        seen = set()
        for frag in self.fragments:
            if frag.ftype in seen:
                raise MalformedPayloadError(f"two base fragments of type {frag.ftype!r}")
            seen.add(frag.ftype)
        for ftype, col in self.expansions.items():
            for frag in col:
                if frag.ftype != ftype:
                    raise MalformedPayloadError("expansion column mixes fragment types")

    def to_dict(self) -> dict:
        return {
            "fragments": [f.to_dict() for f in self.fragments],
            "expansions": {t: [f.to_dict() for f in col] for t, col in self.expansions.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FragmentRow":
        return cls(
            fragments=[Fragment.from_dict(f) for f in d["fragments"]],
            expansions={
                t: [Fragment.from_dict(f) for f in col] for t, col in d.get("expansions", {}).items()
            },
        )


def sort_fragments(fragments: list[Fragment], lexicon: Lexicon) -> list[Fragment]:
    """Canonical order: type order first, then table order within a type.

    Table order (not insertion order) keeps composition stable under
    remove-then-re-add of the same fragment.
    """
    return sorted(
        fragments,
        key=lambda f: (lexicon.type_order_key(f.ftype), lexicon.value_order_key(f.ftype, f.value)),
    )


def apply_edits(fragments: list[Fragment], edits: list[FragmentEdit]) -> list[Fragment]:
    """Apply edits to a fragment set. Adds are idempotent; removing or
    replacing an absent fragment is an error."""
    current: dict[tuple[str, str], Fragment] = {f.key: f for f in fragments}
    for edit in edits:
        key = edit.fragment.key
        if edit.action == "add":
            current.setdefault(key, edit.fragment)
        elif edit.action == "remove":
            if key not in current:
                raise RemoveOfAbsentFragmentError(f"no fragment {key} to remove")
            del current[key]
        else:
            if key not in current:
                raise RemoveOfAbsentFragmentError(f"no fragment {key} to replace")
            del current[key]
            current[edit.replacement.key] = edit.replacement
    return list(current.values())


def join_fragments(fragments: list[Fragment], lexicon: Lexicon) -> str:
    return ", ".join(f.value for f in sort_fragments(fragments, lexicon))
