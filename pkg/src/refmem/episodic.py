"""Episodic memory strategy: per-frame reference domains in FIFO buffers.

Each frame is summarised as a *reference domain*: salience-ordered partitions
("object", one per type label, one per colour) predicting how a user may refer
to the scene. Past domains live in a bounded perceptual FIFO; the newest
domain is the current working percept and enters the buffer only when the next
frame arrives, so an entity last seen k frames ago stays reachable for
k <= capacity. Resolving a reference selects a domain (recency plus internal
structure), copies it, restructures the copy to mark the referent, and pushes
the copy to the head of the discourse context.

Domains and partitions are immutable values; restructuring builds new ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple, Protocol

from .refexp import Ordinal, RefExp, Restrictions, SurfaceForm, matches
from .resolution import Resolution
from .world import Frame

DEFAULT_CAPACITY = 3000
DEFAULT_DELTA_AMB = 0.05


class SupportsAttrs(Protocol):
    """Anything with type_label and colour attributes (e.g. world.Entity)."""

    type_label: str
    colour: str


class EntityAttrs(NamedTuple):
    type_label: str
    colour: str


@dataclass(frozen=True)
class Partition:
    """Criterion-labelled entity list, sorted by salience desc, id asc."""

    criterion: str
    elements: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        key = [(-sal, eid) for eid, sal in self.elements]
        if key != sorted(key):
            raise ValueError(f"partition {self.criterion!r} not salience-sorted")
        ids = [eid for eid, _ in self.elements]
        if len(ids) != len(set(ids)):
            raise ValueError(f"partition {self.criterion!r} repeats an entity")

    @property
    def entity_ids(self) -> tuple[str, ...]:
        return tuple(eid for eid, _ in self.elements)


@dataclass(frozen=True)
class ReferenceDomain:
    """Salience-ordered partitions over one frame's entities.

    attributes maps each entity id in the domain to its (type, colour) pair so
    later restructuring does not need the world.
    """

    frame_index: int
    partitions: tuple[Partition, ...]
    referent_mark: str | None = None
    attributes: Mapping[str, EntityAttrs] = field(default_factory=dict)

    def __post_init__(self) -> None:
        criteria = [p.criterion for p in self.partitions]
        if criteria.count("object") != 1:
            raise ValueError("domain must contain exactly one 'object' partition")
        universe = set(self.object_partition.entity_ids)
        for p in self.partitions:
            extra = set(p.entity_ids) - universe
            if extra:
                raise ValueError(f"partition {p.criterion!r} has ids outside 'object': {extra}")

    @property
    def object_partition(self) -> Partition:
        for p in self.partitions:
            if p.criterion == "object":
                return p
        raise AssertionError("unreachable: validated in __post_init__")

    def partition(self, criterion: str) -> Partition | None:
        for p in self.partitions:
            if p.criterion == criterion:
                return p
        return None


@dataclass
class FifoBuffer:
    """Bounded chronological buffer of reference domains.

    Perceptual memory appends (oldest at index 0) and requires strictly
    increasing frame indices; the discourse context prepends (newest at index
    0, insertion order preserved). When full, the oldest item is evicted.
    """

    capacity: int
    newest_first: bool = False
    items: list[ReferenceDomain] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.capacity <= 0:
            raise ValueError(f"capacity must be > 0, got {self.capacity}")

    def __len__(self) -> int:
        return len(self.items)

    def newest_to_oldest(self) -> Iterable[ReferenceDomain]:
        return iter(self.items) if self.newest_first else reversed(self.items)

    def oldest_to_newest(self) -> Iterable[ReferenceDomain]:
        return reversed(self.items) if self.newest_first else iter(self.items)


def push_domain(buffer: FifoBuffer, domain: ReferenceDomain) -> FifoBuffer:
    """Insert *domain*, evicting the oldest item when over capacity."""
    if buffer.newest_first:
        buffer.items.insert(0, domain)
        while len(buffer.items) > buffer.capacity:
            buffer.items.pop()
    else:
        if buffer.items and domain.frame_index <= buffer.items[-1].frame_index:
            raise ValueError(
                f"perceptual frame indices must increase: "
                f"{domain.frame_index} after {buffer.items[-1].frame_index}"
            )
        buffer.items.append(domain)
        while len(buffer.items) > buffer.capacity:
            buffer.items.pop(0)
    return buffer


@dataclass
class EpisodicState:
    """Perceptual memory and discourse context, plus the working percept.

    current holds the newest frame's domain; it is pushed into perceptual
    memory when the next frame arrives. mentioned accumulates every resolved
    referent id (used by the indefinite novelty preference).
    """

    perceptual: FifoBuffer
    discourse: FifoBuffer
    current: ReferenceDomain | None = None
    mentioned: set[str] = field(default_factory=set)


def new_state(capacity: int = DEFAULT_CAPACITY) -> EpisodicState:
    return EpisodicState(
        perceptual=FifoBuffer(capacity=capacity),
        discourse=FifoBuffer(capacity=capacity, newest_first=True),
    )


def build_reference_domain(
    frame: Frame, entity_attributes: Mapping[str, SupportsAttrs]
) -> ReferenceDomain:
    """One 'object' partition plus one per type label and colour present.

    Type and colour partitions appear in order of first appearance in the
    salience-ordered frame listing.
    """
    rows = [(v.entity_id, v.salience) for v in frame.visibles]
    attrs = {
        eid: EntityAttrs(entity_attributes[eid].type_label, entity_attributes[eid].colour)
        for eid, _ in rows
    }
    partitions = [Partition("object", tuple(rows))]
    seen_criteria = {"object"}
    for pick in (lambda a: a.type_label, lambda a: a.colour):
        for eid, _ in rows:
            criterion = pick(attrs[eid])
            if criterion in seen_criteria:
                continue
            seen_criteria.add(criterion)
            members = tuple(r for r in rows if pick(attrs[r[0]]) == criterion)
            partitions.append(Partition(criterion, members))
    return ReferenceDomain(
        frame_index=frame.index, partitions=tuple(partitions), attributes=attrs
    )


def observe_frame(
    state: EpisodicState, frame: Frame, entity_attributes: Mapping[str, SupportsAttrs]
) -> ReferenceDomain:
    """Fold a new frame into the state; returns the new current domain."""
    if state.current is not None:
        push_domain(state.perceptual, state.current)
    domain = build_reference_domain(frame, entity_attributes)
    state.current = domain
    return domain


def compound_criterion(restrictions: Restrictions) -> str:
    """Partition token for a restriction set, e.g. 'red+house'."""
    parts = [p for p in (restrictions.colour, restrictions.type_label) if p]
    if not parts:
        raise ValueError("restrictions specify no attribute fields")
    return "+".join(parts)


def add_partition(domain: ReferenceDomain, restrictions: Restrictions) -> ReferenceDomain:
    """Return a domain extended with the compound partition for *restrictions*.

    Idempotent: if the criterion already exists the domain is returned as is.
    The input domain is never mutated.
    """
    criterion = compound_criterion(restrictions)
    if domain.partition(criterion) is not None:
        return domain
    members = tuple(
        (eid, sal)
        for eid, sal in domain.object_partition.elements
        if matches(restrictions, *domain.attributes[eid])
    )
    return replace(domain, partitions=domain.partitions + (Partition(criterion, members),))


class AmbiguousReferenceError(Exception):
    """Top matches are closer than the ambiguity margin delta_amb."""

    def __init__(self, candidates: tuple[str, ...], margin: float):
        super().__init__(f"ambiguous among {candidates} (margin {margin})")
        self.candidates = candidates
        self.margin = margin


def _effective_restrictions(domain: ReferenceDomain, refexp: RefExp) -> Restrictions:
    # One-anaphora inherits its type from the domain's marked referent.
    r = refexp.restrictions
    if refexp.form is SurfaceForm.ONE_ANAPHORA and domain.referent_mark is not None:
        mark_attrs = domain.attributes.get(domain.referent_mark)
        if mark_attrs is not None:
            return replace(r, type_label=mark_attrs.type_label)
    return r


def candidate_elements(
    domain: ReferenceDomain, refexp: RefExp, mentioned: set[str] | frozenset[str] = frozenset()
) -> list[tuple[str, float]]:
    """Matching (id, salience) pairs in referent-preference order.

    Base order is salience descending with exact ties broken in favour of the
    domain's referent_mark, then id ascending. Other-anaphora excludes the
    mark; indefinites sort never-mentioned entities first (novelty).
    """
    restrictions = _effective_restrictions(domain, refexp)
    rows = [
        (eid, sal)
        for eid, sal in domain.object_partition.elements
        if matches(restrictions, *domain.attributes[eid])
    ]
    if refexp.form is SurfaceForm.OTHER_ANAPHORA and domain.referent_mark is not None:
        rows = [r for r in rows if r[0] != domain.referent_mark]

    def key(row: tuple[str, float]):
        eid, sal = row
        mark_rank = 0 if eid == domain.referent_mark else 1
        if refexp.form is SurfaceForm.INDEFINITE:
            return (0 if eid not in mentioned else 1, -sal, mark_rank, eid)
        return (-sal, mark_rank, eid)

    rows.sort(key=key)
    return rows


def _required_count(refexp: RefExp) -> int:
    return 2 if refexp.restrictions.plural else 1


def _is_eligible(domain, refexp, mentioned) -> bool:
    return len(candidate_elements(domain, refexp, mentioned)) >= _required_count(refexp)


def _most_specific_partition(
    domain: ReferenceDomain, restrictions: Restrictions, candidate_ids: set[str]
) -> Partition | None:
    """Most specific existing partition holding at least one candidate.

    Specificity: compound criterion (both fields), then single-field criteria
    (fewer elements first), then 'object'.
    """
    ordered: list[Partition] = []
    if restrictions.colour and restrictions.type_label:
        p = domain.partition(compound_criterion(restrictions))
        if p is not None:
            ordered.append(p)
    singles = [
        domain.partition(tok)
        for tok in (restrictions.colour, restrictions.type_label)
        if tok is not None
    ]
    singles = [p for p in singles if p is not None]
    singles.sort(key=lambda p: (len(p.elements), p.criterion))
    ordered.extend(singles)
    ordered.append(domain.object_partition)
    for p in ordered:
        if any(eid in candidate_ids for eid in p.entity_ids):
            return p
    return None


def _has_clean_structure(domain: ReferenceDomain, refexp: RefExp, mentioned) -> bool:
    """True when the best match uniquely tops its most specific partition."""
    cands = candidate_elements(domain, refexp, mentioned)
    if not cands:
        return False
    restrictions = _effective_restrictions(domain, refexp)
    part = _most_specific_partition(domain, restrictions, {eid for eid, _ in cands})
    if part is None or not part.elements:
        return False
    top_id, top_sal = part.elements[0]
    if top_id not in {eid for eid, _ in cands}:
        return False
    return len(part.elements) == 1 or top_sal > part.elements[1][1]


def select_domain(
    state: EpisodicState, refexp: RefExp
) -> tuple[ReferenceDomain, str] | None:
    """Pick the domain a reference is resolved in, or None when none is eligible.

    Search order by surface form:
      pronoun / one-anaphora / other-anaphora: discourse head -> tail only;
      definite / demonstrative: discourse head -> tail, then perceptual
        newest -> oldest;
      ordinal definite: perceptual only, oldest -> newest for FIRST and
        newest -> oldest for LAST (chronology lives in the perceptual stream,
        so the discourse leg is skipped);
      indefinite: perceptual newest -> oldest only.

    A domain is eligible when it holds at least one matching entity (two for
    plurals). Within the discourse leg plain recency decides (the head is the
    anaphoric focus). Within the perceptual leg, among eligible domains the
    first whose best match uniquely tops its most specific partition wins;
    otherwise the first eligible one does. The returned domain is an immutable
    value, so the source is never mutated.
    """
    current = [state.current] if state.current is not None else []
    perceptual_newest = current + list(state.perceptual.newest_to_oldest())
    perceptual_oldest = list(state.perceptual.oldest_to_newest()) + current
    discourse = list(state.discourse.newest_to_oldest())

    form = refexp.form
    if form in (SurfaceForm.PRONOUN, SurfaceForm.ONE_ANAPHORA, SurfaceForm.OTHER_ANAPHORA):
        search_discourse: list[ReferenceDomain] = discourse
        search_perceptual: list[ReferenceDomain] = []
    elif form is SurfaceForm.INDEFINITE:
        search_discourse = []
        search_perceptual = perceptual_newest
    elif refexp.restrictions.ordinal is not None:
        search_discourse = []
        search_perceptual = (
            perceptual_oldest
            if refexp.restrictions.ordinal is Ordinal.FIRST
            else perceptual_newest
        )
    else:
        search_discourse = discourse
        search_perceptual = perceptual_newest

    for domain in search_discourse:
        if _is_eligible(domain, refexp, state.mentioned):
            return domain, "discourse"

    first_eligible: tuple[ReferenceDomain, str] | None = None
    for domain in search_perceptual:
        if not _is_eligible(domain, refexp, state.mentioned):
            continue
        if first_eligible is None:
            first_eligible = (domain, "perceptual")
        if _has_clean_structure(domain, refexp, state.mentioned):
            return domain, "perceptual"
    return first_eligible


def restructure(
    domain: ReferenceDomain,
    refexp: RefExp,
    mentioned: set[str] | frozenset[str] = frozenset(),
    delta_amb: float = DEFAULT_DELTA_AMB,
) -> tuple[ReferenceDomain, tuple[str, ...]]:
    """Mark the referent(s) in a copy of *domain* and return (copy, referents).

    Adds the compound partition for the restrictions (when any attribute field
    is specified), picks the referent per candidate_elements (plural: all
    matches), raises the referents' salience to the domain maximum in every
    partition, and sets referent_mark. Raises AmbiguousReferenceError when a
    singular definite's top two matches are closer than delta_amb.
    """
    cands = candidate_elements(domain, refexp, mentioned)
    if len(cands) < _required_count(refexp):
        raise ValueError("domain is not eligible for this expression")

    restrictions = _effective_restrictions(domain, refexp)
    if (
        refexp.form is SurfaceForm.DEFINITE
        and not restrictions.plural
        and len(cands) >= 2
    ):
        by_salience = sorted(cands, key=lambda r: (-r[1], r[0]))
        margin = by_salience[0][1] - by_salience[1][1]
        if margin < delta_amb:
            raise AmbiguousReferenceError(tuple(eid for eid, _ in by_salience), margin)

    referents = (
        tuple(eid for eid, _ in cands) if restrictions.plural else (cands[0][0],)
    )

    out = domain
    if restrictions.colour or restrictions.type_label:
        out = add_partition(out, restrictions)

    # Mark the selection: boost referents to the domain-wide maximum so they
    # dominate subsequent anaphora, keeping every partition sorted.
    domain_max = max(sal for _, sal in out.object_partition.elements)
    chosen = set(referents)
    new_partitions = []
    for part in out.partitions:
        elements = [
            (eid, domain_max if eid in chosen else sal) for eid, sal in part.elements
        ]
        elements.sort(key=lambda r: (-r[1], r[0]))
        new_partitions.append(Partition(part.criterion, tuple(elements)))
    out = replace(
        out, partitions=tuple(new_partitions), referent_mark=referents[0]
    )
    return out, referents


def resolve_episodic(
    state: EpisodicState, refexp: RefExp, delta_amb: float = DEFAULT_DELTA_AMB
) -> Resolution:
    """Select, copy-restructure, and push to the discourse head.

    The discourse context grows by exactly one domain per successful
    resolution and is untouched on abstention or ambiguity.
    """
    selected = select_domain(state, refexp)
    if selected is None:
        return Resolution.no_referent()
    domain, source = selected
    provenance = f"{source}#{domain.frame_index}"
    try:
        restructured, referents = restructure(
            domain, refexp, mentioned=state.mentioned, delta_amb=delta_amb
        )
    except AmbiguousReferenceError as exc:
        return Resolution.ambiguous(exc.candidates, provenance=provenance)
    push_domain(state.discourse, restructured)
    state.mentioned.update(referents)
    return Resolution.referent(frozenset(referents), provenance=provenance)
