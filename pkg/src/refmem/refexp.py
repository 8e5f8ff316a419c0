"""Referring-expression grammar: surface forms and selection restrictions.

The grammar is a closed vocabulary of determiners plus configurable noun and
colour lists. Parsing is total and deterministic over the grammar language;
anything else raises UnparseableExpression with the character position of the
offending token.

Productions (tokens are lowercase, whitespace-separated):

    it | them                                -> pronoun ("them" is plural)
    (that|this) [colour] [noun]              -> demonstrative
    (a|an) [colour] noun                     -> indefinite (singular only)
    the [first|last] [colour] noun [we saw]  -> definite (+ordinal, +plural)
    the [colour] (one|ones)                  -> one-anaphora
    the other [colour] [noun]                -> other-anaphora

Plurality comes from noun inflection: a trailing "s" is stripped against the
configured noun list.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

RESERVED_TOKENS = frozenset(
    {"the", "a", "an", "that", "this", "it", "them", "one", "ones",
     "first", "last", "we", "saw", "other"}
)


class SurfaceForm(enum.Enum):
    DEFINITE = "definite"
    INDEFINITE = "indefinite"
    PRONOUN = "pronoun"
    DEMONSTRATIVE = "demonstrative"
    ONE_ANAPHORA = "one-anaphora"
    OTHER_ANAPHORA = "other-anaphora"


class Ordinal(enum.Enum):
    FIRST = "first"
    LAST = "last"


@dataclass(frozen=True)
class Restrictions:
    """Selection restrictions carried by a referring expression."""

    type_label: str | None = None
    colour: str | None = None
    plural: bool = False
    ordinal: Ordinal | None = None


@dataclass(frozen=True)
class RefExp:
    """A parsed referring expression. raw_text is kept but ignored by ==."""

    form: SurfaceForm
    restrictions: Restrictions
    raw_text: str = field(compare=False, default="")


@dataclass(frozen=True)
class Vocabulary:
    """Noun and colour token lists the grammar is closed over."""

    nouns: tuple[str, ...]
    colours: tuple[str, ...]

    def __post_init__(self) -> None:
        for token in (*self.nouns, *self.colours):
            if token in RESERVED_TOKENS:
                raise ValueError(f"vocabulary token {token!r} collides with a grammar keyword")
            if not token or not token.isalpha() or token != token.lower():
                raise ValueError(f"vocabulary token {token!r} must be lowercase alphabetic")

    def match_noun(self, token: str) -> tuple[str, bool] | None:
        """Return (noun, plural) if *token* is a configured noun, else None."""
        if token in self.nouns:
            return token, False
        if token.endswith("s") and token[:-1] in self.nouns:
            return token[:-1], True
        return None

    def is_colour(self, token: str) -> bool:
        return token in self.colours


class UnparseableExpression(ValueError):
    """No grammar production matches; position indexes the normalised text."""

    def __init__(self, position: int, message: str):
        super().__init__(f"at position {position}: {message}")
        self.position = position
        self.message = message


def _normalise(text: str) -> str:
    return " ".join(text.lower().split())


def parse_refexp(text: str, vocab: Vocabulary) -> RefExp:
    """Parse *text* against the grammar, or raise UnparseableExpression."""
    norm = _normalise(text)
    if not norm:
        raise UnparseableExpression(0, "empty expression")
    tokens = norm.split(" ")
    offsets = []
    pos = 0
    for tok in tokens:
        offsets.append(pos)
        pos += len(tok) + 1
    end_pos = len(norm)

    furthest = 0

    def fail(i: int) -> None:
        nonlocal furthest
        furthest = max(furthest, i)

    def take_colour(i: int) -> tuple[str | None, int]:
        if i < len(tokens) and vocab.is_colour(tokens[i]):
            return tokens[i], i + 1
        return None, i

    def take_noun(i: int) -> tuple[tuple[str, bool] | None, int]:
        if i < len(tokens):
            hit = vocab.match_noun(tokens[i])
            if hit is not None:
                return hit, i + 1
        return None, i

    def at_end(i: int) -> bool:
        if i == len(tokens):
            return True
        fail(i)
        return False

    head = tokens[0]

    if head == "it" and at_end(1):
        return RefExp(SurfaceForm.PRONOUN, Restrictions(), text)
    if head == "them" and at_end(1):
        return RefExp(SurfaceForm.PRONOUN, Restrictions(plural=True), text)

    if head in ("that", "this"):
        colour, i = take_colour(1)
        noun, i = take_noun(i)
        if at_end(i):
            type_label, plural = noun if noun else (None, False)
            return RefExp(
                SurfaceForm.DEMONSTRATIVE,
                Restrictions(type_label=type_label, colour=colour, plural=plural),
                text,
            )

    if head in ("a", "an"):
        colour, i = take_colour(1)
        noun, i = take_noun(i)
        if noun is not None and not noun[1] and at_end(i):
            return RefExp(
                SurfaceForm.INDEFINITE,
                Restrictions(type_label=noun[0], colour=colour),
                text,
            )
        fail(i if noun is None else i - 1)

    if head == "the":
        if len(tokens) > 1 and tokens[1] == "other":
            colour, i = take_colour(2)
            noun, i = take_noun(i)
            if at_end(i):
                type_label, plural = noun if noun else (None, False)
                return RefExp(
                    SurfaceForm.OTHER_ANAPHORA,
                    Restrictions(type_label=type_label, colour=colour, plural=plural),
                    text,
                )
        # one-anaphora: the [colour] one|ones
        colour, i = take_colour(1)
        if i < len(tokens) and tokens[i] in ("one", "ones") and i + 1 == len(tokens):
            return RefExp(
                SurfaceForm.ONE_ANAPHORA,
                Restrictions(colour=colour, plural=tokens[i] == "ones"),
                text,
            )
        # definite: the [first|last] [colour] noun [we saw]
        i = 1
        ordinal: Ordinal | None = None
        if i < len(tokens) and tokens[i] in ("first", "last"):
            ordinal = Ordinal(tokens[i])
            i += 1
        colour, i = take_colour(i)
        noun, i = take_noun(i)
        if noun is None:
            fail(i)
        else:
            if tokens[i : i + 2] == ["we", "saw"]:
                i += 2
            if at_end(i):
                return RefExp(
                    SurfaceForm.DEFINITE,
                    Restrictions(
                        type_label=noun[0], colour=colour, plural=noun[1], ordinal=ordinal
                    ),
                    text,
                )

    fail(0 if furthest == 0 else furthest)
    position = offsets[furthest] if furthest < len(tokens) else end_pos
    bad = tokens[furthest] if furthest < len(tokens) else "<end>"
    raise UnparseableExpression(position, f"no production matches at {bad!r}")


def matches(restrictions: Restrictions, entity_type: str, entity_colour: str) -> bool:
    """True iff every specified restriction equals the entity attribute."""
    if restrictions.type_label is not None and restrictions.type_label != entity_type:
        return False
    if restrictions.colour is not None and restrictions.colour != entity_colour:
        return False
    return True


def canonical_text(refexp: RefExp) -> str:
    """Canonical surface string; parsing it back yields an equal RefExp."""
    r = refexp.restrictions
    noun = r.type_label + ("s" if r.plural else "") if r.type_label else None
    if refexp.form is SurfaceForm.PRONOUN:
        return "them" if r.plural else "it"
    if refexp.form is SurfaceForm.DEMONSTRATIVE:
        return " ".join(t for t in ("that", r.colour, noun) if t)
    if refexp.form is SurfaceForm.INDEFINITE:
        first = r.colour or noun or ""
        article = "an" if first[:1] in "aeiou" else "a"
        return " ".join(t for t in (article, r.colour, noun) if t)
    if refexp.form is SurfaceForm.ONE_ANAPHORA:
        return " ".join(t for t in ("the", r.colour, "ones" if r.plural else "one") if t)
    if refexp.form is SurfaceForm.OTHER_ANAPHORA:
        return " ".join(t for t in ("the", "other", r.colour, noun) if t)
    parts = ["the"]
    if r.ordinal is not None:
        parts.append(r.ordinal.value)
    if r.colour:
        parts.append(r.colour)
    parts.append(noun or "")
    if r.ordinal is not None:
        parts.append("we saw")
    return " ".join(p for p in parts if p)
