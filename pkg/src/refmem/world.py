"""Deterministic 2D world with a cone-of-view camera.

Entities are circles with a type label and a colour. A camera renders
chronologically indexed frames listing the visible entities together with a
normalised visual salience score (the most salient visible entity always
scores exactly 1.0). Everything here is a pure value: rendering the same
world/camera/index twice yields an identical frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

TAU = 2.0 * math.pi


@dataclass(frozen=True)
class Entity:
    """A circular world object."""

    id: str
    type_label: str
    colour: str
    position: tuple[float, float]
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError(f"entity {self.id!r}: radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class Camera:
    """Viewpoint with a heading, a field-of-view cone and a maximum range."""

    position: tuple[float, float]
    heading: float
    fov: float
    range: float

    def __post_init__(self) -> None:
        if not 0.0 < self.fov <= math.pi:
            raise ValueError(f"fov must be in (0, pi], got {self.fov}")
        if self.range <= 0:
            raise ValueError(f"range must be > 0, got {self.range}")


@dataclass(frozen=True)
class World:
    """Immutable collection of entities with unique ids."""

    entities: tuple[Entity, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for entity in self.entities:
            if entity.id in seen:
                raise ValueError(f"duplicate entity id {entity.id!r}")
            seen.add(entity.id)
        object.__setattr__(self, "_by_id", {e.id: e for e in self.entities})

    @property
    def by_id(self) -> dict[str, Entity]:
        return self._by_id  # type: ignore[attr-defined]


@dataclass(frozen=True)
class Move:
    dx: float
    dy: float


@dataclass(frozen=True)
class Turn:
    dtheta: float


@dataclass(frozen=True)
class Teleport:
    x: float
    y: float
    heading: float


CameraCommand = Move | Turn | Teleport


class VisibleEntity(NamedTuple):
    """One row of a frame: entity id, normalised salience, distance, bearing."""

    entity_id: str
    salience: float
    distance: float
    bearing: float


@dataclass(frozen=True)
class Frame:
    """Per-tick snapshot of the visible entities, sorted by salience.

    Invariants: visibles are sorted by salience descending (ties by id
    ascending), ids are unique, and a non-empty frame has max salience 1.0
    exactly.
    """

    index: int
    time_s: float
    visibles: tuple[VisibleEntity, ...]

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"frame index must be >= 0, got {self.index}")
        ids = [v.entity_id for v in self.visibles]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate entity ids in frame")
        key = [(-v.salience, v.entity_id) for v in self.visibles]
        if key != sorted(key):
            raise ValueError("frame visibles must be sorted by salience desc, id asc")
        if self.visibles and self.visibles[0].salience != 1.0:
            raise ValueError("non-empty frame must have max salience exactly 1.0")

    @property
    def entity_ids(self) -> tuple[str, ...]:
        return tuple(v.entity_id for v in self.visibles)


@dataclass(frozen=True)
class SalienceWeights:
    """Mix of the size term and the centrality term of the raw salience."""

    size: float = 0.5
    centrality: float = 0.5

    def __post_init__(self) -> None:
        if self.size < 0 or self.centrality < 0 or self.size + self.centrality <= 0:
            raise ValueError("weights must be >= 0 and sum to > 0")


DEFAULT_SALIENCE_WEIGHTS = SalienceWeights()


def relative_bearing(camera: Camera, position: tuple[float, float]) -> float:
    """Angle from the camera heading to *position*, normalised into [-pi, pi]."""
    dx = position[0] - camera.position[0]
    dy = position[1] - camera.position[1]
    return math.remainder(math.atan2(dy, dx) - camera.heading, TAU)


def visible_entities(world: World, camera: Camera) -> list[tuple[Entity, float, float]]:
    """Entities inside the camera's view cone, with distance and bearing.

    An entity is visible when its centre is within range and within fov/2 of
    the heading (boundaries inclusive). No occlusion. Results are ordered by
    entity id.
    """
    half_fov = camera.fov / 2.0
    out: list[tuple[Entity, float, float]] = []
    for entity in sorted(world.entities, key=lambda e: e.id):
        dist = math.hypot(
            entity.position[0] - camera.position[0],
            entity.position[1] - camera.position[1],
        )
        if dist > camera.range:
            continue
        bearing = relative_bearing(camera, entity.position)
        if abs(bearing) > half_fov:
            continue
        out.append((entity, dist, bearing))
    return out


def raw_salience(
    entity: Entity,
    distance: float,
    bearing: float,
    camera: Camera,
    weights: SalienceWeights = DEFAULT_SALIENCE_WEIGHTS,
) -> float:
    """Unnormalised salience: weighted sum of apparent size and centrality."""
    size = 1.0 if distance == 0.0 else min(1.0, entity.radius / distance)
    centrality = 1.0 - abs(bearing) / (camera.fov / 2.0)
    return weights.size * size + weights.centrality * centrality


def compute_salience(
    visibles: Iterable[tuple[Entity, float, float]],
    camera: Camera,
    weights: SalienceWeights = DEFAULT_SALIENCE_WEIGHTS,
) -> dict[str, float]:
    """Normalised salience per visible entity id (max is exactly 1.0)."""
    raws = {
        entity.id: raw_salience(entity, dist, bearing, camera, weights)
        for entity, dist, bearing in visibles
    }
    if not raws:
        return {}
    top = max(raws.values())
    if top <= 0.0:
        # Degenerate configuration (e.g. centrality-only weights with every
        # entity on the cone boundary): treat all as equally, fully salient.
        return {eid: 1.0 for eid in raws}
    return {eid: raw / top for eid, raw in raws.items()}


def render_frame(
    world: World,
    camera: Camera,
    index: int,
    fps: int,
    weights: SalienceWeights = DEFAULT_SALIENCE_WEIGHTS,
) -> Frame:
    """Compose visibility and salience into a Frame for tick *index*."""
    if fps <= 0:
        raise ValueError(f"fps must be > 0, got {fps}")
    vis = visible_entities(world, camera)
    salience = compute_salience(vis, camera, weights)
    rows = [
        VisibleEntity(entity.id, salience[entity.id], dist, bearing)
        for entity, dist, bearing in vis
    ]
    rows.sort(key=lambda r: (-r.salience, r.entity_id))
    return Frame(index=index, time_s=index / fps, visibles=tuple(rows))


def step_camera(camera: Camera, command: CameraCommand) -> Camera:
    """Apply one motion command, returning a new camera (input unchanged)."""
    if isinstance(command, Move):
        x, y = camera.position
        return Camera((x + command.dx, y + command.dy), camera.heading, camera.fov, camera.range)
    if isinstance(command, Turn):
        return Camera(
            camera.position,
            (camera.heading + command.dtheta) % TAU,
            camera.fov,
            camera.range,
        )
    if isinstance(command, Teleport):
        return Camera(
            (command.x, command.y), command.heading % TAU, camera.fov, camera.range
        )
    raise TypeError(f"unknown camera command: {command!r}")
