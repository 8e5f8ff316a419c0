"""Outcome of resolving one referring expression, shared by all strategies."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Outcome(enum.Enum):
    REFERENT = "referent"
    NO_REFERENT = "no-referent"
    AMBIGUOUS = "ambiguous"
    UNSUPPORTED = "unsupported"
    PARSE_ERROR = "parse-error"


@dataclass(frozen=True)
class Resolution:
    """Result of one resolution attempt.

    referents is non-empty exactly when outcome is REFERENT; candidates lists
    the contenders of an AMBIGUOUS outcome; reason explains UNSUPPORTED and
    PARSE_ERROR; provenance is a strategy-specific note (e.g. which buffer and
    frame an episodic referent came from).
    """

    outcome: Outcome
    referents: frozenset[str] = frozenset()
    candidates: tuple[str, ...] = ()
    reason: str = ""
    provenance: str = ""

    def __post_init__(self) -> None:
        if (self.outcome is Outcome.REFERENT) != bool(self.referents):
            raise ValueError("referents must be non-empty iff outcome is REFERENT")

    @classmethod
    def referent(cls, ids: frozenset[str] | set[str], provenance: str = "") -> "Resolution":
        return cls(Outcome.REFERENT, referents=frozenset(ids), provenance=provenance)

    @classmethod
    def no_referent(cls, provenance: str = "") -> "Resolution":
        return cls(Outcome.NO_REFERENT, provenance=provenance)

    @classmethod
    def ambiguous(cls, candidates: tuple[str, ...], provenance: str = "") -> "Resolution":
        return cls(Outcome.AMBIGUOUS, candidates=candidates, provenance=provenance)

    @classmethod
    def unsupported(cls, reason: str) -> "Resolution":
        return cls(Outcome.UNSUPPORTED, reason=reason)

    @classmethod
    def parse_error(cls, reason: str) -> "Resolution":
        return cls(Outcome.PARSE_ERROR, reason=reason)

    def describe(self) -> str:
        """Stable one-token-ish rendering used in trace files and the REPL."""
        if self.outcome is Outcome.REFERENT:
            ids = ",".join(sorted(self.referents))
            note = f" [{self.provenance}]" if self.provenance else ""
            return f"Referent{{{ids}}}{note}"
        if self.outcome is Outcome.NO_REFERENT:
            return "NoReferent"
        if self.outcome is Outcome.AMBIGUOUS:
            return f"Ambiguous{{{','.join(self.candidates)}}}"
        if self.outcome is Outcome.UNSUPPORTED:
            return f"Unsupported({self.reason})"
        return f"ParseError({self.reason})"
