"""Visibility-flag knowledge base: resolve only against what is on screen.

Encountered entities accumulate in a monotonically growing knowledge base and
carry here/visible/accessible flags refreshed each frame (containment chain:
accessible implies visible implies here). Resolution considers currently
visible entities only and has no salience model, so any multi-candidate
reference is ambiguous and off-screen referents are unreachable by design.
Linguistic salience is deliberately absent from this strategy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .refexp import RefExp, matches
from .resolution import Resolution
from .world import Camera, Entity, Frame

DEFAULT_HERE_RADIUS = 25.0


@dataclass
class KbEntity:
    id: str
    type_label: str
    colour: str
    here: bool = False
    visible: bool = False
    accessible: bool = False


@dataclass
class KnowledgeBase:
    """Entities the viewer has encountered; entries are never removed."""

    entities: dict[str, KbEntity] = field(default_factory=dict)

    def sorted_entities(self) -> list[KbEntity]:
        return [self.entities[eid] for eid in sorted(self.entities)]


def update_flags(
    kb: KnowledgeBase,
    frame: Frame,
    camera: Camera,
    entity_lookup: Mapping[str, Entity],
    here_radius: float = DEFAULT_HERE_RADIUS,
) -> KnowledgeBase:
    """Insert newly seen entities and refresh all flags for this frame.

    visible: in the current frame. here: visible, or within here_radius of
    the camera (keeps visible => here). accessible: visible and within
    here_radius / 2.
    """
    if here_radius <= 0:
        raise ValueError(f"here_radius must be > 0, got {here_radius}")
    distances = {v.entity_id: v.distance for v in frame.visibles}
    for eid in distances:
        if eid not in kb.entities:
            entity = entity_lookup[eid]
            kb.entities[eid] = KbEntity(eid, entity.type_label, entity.colour)
    for eid, kb_entity in kb.entities.items():
        if eid in distances:
            distance = distances[eid]
            kb_entity.visible = True
        else:
            entity = entity_lookup[eid]
            distance = math.hypot(
                entity.position[0] - camera.position[0],
                entity.position[1] - camera.position[1],
            )
            kb_entity.visible = False
        kb_entity.here = kb_entity.visible or distance <= here_radius
        kb_entity.accessible = kb_entity.visible and distance <= here_radius / 2.0
    return kb


def resolve_visible(kb: KnowledgeBase, refexp: RefExp) -> Resolution:
    """Unique visible match wins; zero abstains; several are ambiguous.

    Ordinal and plural references are outside this strategy's design.
    """
    if refexp.restrictions.ordinal is not None:
        return Resolution.unsupported("ordinal")
    if refexp.restrictions.plural:
        return Resolution.unsupported("plural")
    candidates = [
        e.id
        for e in kb.sorted_entities()
        if e.visible and matches(refexp.restrictions, e.type_label, e.colour)
    ]
    if not candidates:
        return Resolution.no_referent(provenance="visible-set")
    if len(candidates) > 1:
        return Resolution.ambiguous(tuple(candidates), provenance="visible-set")
    return Resolution.referent(frozenset(candidates), provenance="visible-set")
