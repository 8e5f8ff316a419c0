"""Global memory strategy: one evolving record per entity with decaying salience.

Every entity ever rendered gets exactly one record carrying a visual and a
linguistic salience score. Visual salience is set from each frame and halved
while the entity stays off-screen; linguistic salience is set to 1.0 on
mention and halved per utterance while unmentioned (halving is exact in binary
floating point, so decay is bit-reproducible). Resolution scores every record
with a surface-form-weighted sum of reference-relative saliences and takes the
argmax; there is no episodic structure, so chronological references are
unsupported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .refexp import RefExp, Restrictions, SurfaceForm, matches
from .resolution import Resolution
from .world import Frame

DEFAULT_DELTA_AMB = 0.05
DEFAULT_DELTA_PLURAL = 0.01

FitFn = Callable[[Restrictions, str, str], float]


@dataclass
class EntityRecord:
    """Single persistent representation of an entity."""

    id: str
    type_label: str
    colour: str
    visual_salience: float = 0.0
    linguistic_salience: float = 0.0

    def __post_init__(self) -> None:
        for name in ("visual_salience", "linguistic_salience"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")


@dataclass
class GlobalContext:
    """Unordered set of entity records, keyed by id (one record per entity)."""

    records: dict[str, EntityRecord] = field(default_factory=dict)

    def sorted_records(self) -> list[EntityRecord]:
        return [self.records[eid] for eid in sorted(self.records)]


@dataclass(frozen=True)
class FormWeights:
    """(visual, linguistic) weight pair per surface form."""

    weights: Mapping[SurfaceForm, tuple[float, float]]

    def __post_init__(self) -> None:
        for form in SurfaceForm:
            if form not in self.weights:
                raise ValueError(f"missing weights for {form}")
            w_v, w_l = self.weights[form]
            if w_v < 0 or w_l < 0 or w_v + w_l <= 0:
                raise ValueError(f"invalid weights for {form}: {(w_v, w_l)}")

    def of(self, form: SurfaceForm) -> tuple[float, float]:
        return self.weights[form]

    def replaced(self, form: SurfaceForm, pair: tuple[float, float]) -> "FormWeights":
        merged = dict(self.weights)
        merged[form] = pair
        return FormWeights(merged)

    @classmethod
    def default(cls) -> "FormWeights":
        # Pronouns weight linguistic salience over visual; demonstratives the
        # reverse; everything else is an even split.
        return cls(
            {
                SurfaceForm.PRONOUN: (0.2, 0.8),
                SurfaceForm.DEMONSTRATIVE: (0.8, 0.2),
                SurfaceForm.DEFINITE: (0.5, 0.5),
                SurfaceForm.INDEFINITE: (0.5, 0.5),
                SurfaceForm.ONE_ANAPHORA: (0.5, 0.5),
                SurfaceForm.OTHER_ANAPHORA: (0.5, 0.5),
            }
        )


class UnknownEntityError(KeyError):
    def __init__(self, entity_id: str):
        super().__init__(entity_id)
        self.entity_id = entity_id


def update_on_frame(
    ctx: GlobalContext,
    frame: Frame,
    entity_attributes: Mapping[str, object],
    prune_below: float | None = None,
) -> GlobalContext:
    """Set visual salience from the frame; halve it for absent records."""
    visible = {v.entity_id: v.salience for v in frame.visibles}
    for eid, salience in visible.items():
        record = ctx.records.get(eid)
        if record is None:
            attrs = entity_attributes[eid]
            record = EntityRecord(eid, attrs.type_label, attrs.colour)  # type: ignore[attr-defined]
            ctx.records[eid] = record
        record.visual_salience = salience
    for eid, record in ctx.records.items():
        if eid not in visible:
            record.visual_salience = record.visual_salience / 2.0
    if prune_below is not None:
        stale = [
            eid
            for eid, r in ctx.records.items()
            if r.visual_salience < prune_below and r.linguistic_salience < prune_below
        ]
        for eid in stale:
            del ctx.records[eid]
    return ctx


def update_on_utterance(ctx: GlobalContext, mentioned_ids: Iterable[str]) -> GlobalContext:
    """Set linguistic salience to 1.0 for mentions; halve it for the rest."""
    mentioned = set(mentioned_ids)
    unknown = mentioned - set(ctx.records)
    if unknown:
        raise UnknownEntityError(sorted(unknown)[0])
    for eid, record in ctx.records.items():
        if eid in mentioned:
            record.linguistic_salience = 1.0
        else:
            record.linguistic_salience = record.linguistic_salience / 2.0
    return ctx


def binary_fit(restrictions: Restrictions, type_label: str, colour: str) -> float:
    return 1.0 if matches(restrictions, type_label, colour) else 0.0


def reference_relative_scores(
    record: EntityRecord, refexp: RefExp, fit_fn: FitFn = binary_fit
) -> tuple[float, float]:
    """Scale both saliences by the record's fit with the restrictions."""
    fit = fit_fn(refexp.restrictions, record.type_label, record.colour)
    return fit * record.visual_salience, fit * record.linguistic_salience


def integrated_salience(
    v: float, l: float, form: SurfaceForm, weights: FormWeights
) -> float:
    w_v, w_l = weights.of(form)
    return w_v * v + w_l * l


def rank_candidates(
    ctx: GlobalContext, refexp: RefExp, weights: FormWeights, fit_fn: FitFn = binary_fit
) -> list[tuple[str, float]]:
    """All records with their integrated scores, sorted score desc, id asc."""
    scored = []
    for record in ctx.sorted_records():
        v, l = reference_relative_scores(record, refexp, fit_fn)
        scored.append((record.id, integrated_salience(v, l, refexp.form, weights)))
    scored.sort(key=lambda r: (-r[1], r[0]))
    return scored


def resolve_global(
    ctx: GlobalContext,
    refexp: RefExp,
    weights: FormWeights,
    delta_amb: float = DEFAULT_DELTA_AMB,
    delta_plural: float = DEFAULT_DELTA_PLURAL,
    fit_fn: FitFn = binary_fit,
) -> Resolution:
    """Argmax of the integrated salience over all records.

    Singular: the top-scoring record with score > 0 wins unless the runner-up
    is within delta_amb. Plural: every record scoring at least delta_plural
    (two or more required). Ordinal expressions are unsupported: this
    architecture stores no chronology. Successful resolutions update the
    linguistic salience with the referent ids.
    """
    if refexp.restrictions.ordinal is not None:
        return Resolution.unsupported("ordinal")
    ranked = rank_candidates(ctx, refexp, weights, fit_fn)
    if refexp.restrictions.plural:
        chosen = [eid for eid, score in ranked if score >= delta_plural]
        if len(chosen) < 2:
            return Resolution.no_referent(provenance="context")
        update_on_utterance(ctx, chosen)
        return Resolution.referent(frozenset(chosen), provenance="context")
    positive = [(eid, score) for eid, score in ranked if score > 0.0]
    if not positive:
        return Resolution.no_referent(provenance="context")
    if len(positive) >= 2 and positive[0][1] - positive[1][1] < delta_amb:
        tied = [eid for eid, score in positive if positive[0][1] - score < delta_amb]
        return Resolution.ambiguous(tuple(tied), provenance="context")
    winner = positive[0][0]
    update_on_utterance(ctx, [winner])
    return Resolution.referent(frozenset([winner]), provenance="context")
