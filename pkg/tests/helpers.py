"""Shared test fixtures: independent oracles and randomised generators.

The oracles deliberately re-derive expected results from first principles
(vector geometry, filter-and-sort, log replay) instead of calling back into
the code paths they check.
"""

from __future__ import annotations

import math
import random

from refmem.config import EngineConfig
from refmem.refexp import (
    Ordinal,
    RefExp,
    Restrictions,
    SurfaceForm,
    Vocabulary,
    canonical_text,
    matches,
)
from refmem.resolution import Outcome, Resolution
from refmem.scenario import CommandEvent, Scenario, UtteranceEvent
from refmem.world import (
    Camera,
    Entity,
    Move,
    Teleport,
    Turn,
    World,
    render_frame,
    step_camera,
)

VOCAB = Vocabulary(nouns=("house", "tree", "car"), colours=("red", "green", "blue"))


def three_house_world() -> World:
    """Houses straight ahead whose saliences normalise to exactly 1.0/0.2/0.1."""
    return World(
        (
            Entity("H1", "house", "red", (4.0, 0.0), 4.0),
            Entity("H2", "house", "green", (20.0, 0.0), 2.0),
            Entity("H3", "house", "blue", (10.0, 0.0), 2.0),
        )
    )


def three_house_camera() -> Camera:
    return Camera((0.0, 0.0), 0.0, math.pi / 2.0, 100.0)


# ---------------------------------------------------------------------------
# Geometry oracle: point-in-cone via dot products, no bearing arithmetic.


def cone_contains(camera: Camera, point: tuple[float, float]) -> bool:
    vx = point[0] - camera.position[0]
    vy = point[1] - camera.position[1]
    dist = math.sqrt(vx * vx + vy * vy)
    if dist > camera.range:
        return False
    if dist == 0.0:
        return True
    hx, hy = math.cos(camera.heading), math.sin(camera.heading)
    cos_angle = max(-1.0, min(1.0, (vx * hx + vy * hy) / dist))
    return math.acos(cos_angle) <= camera.fov / 2.0


def near_cone_boundary(camera: Camera, point: tuple[float, float], eps: float = 1e-9) -> bool:
    """True when *point* is too close to the cone boundary to compare oracles."""
    vx = point[0] - camera.position[0]
    vy = point[1] - camera.position[1]
    dist = math.sqrt(vx * vx + vy * vy)
    if abs(dist - camera.range) <= eps * max(1.0, camera.range):
        return True
    if dist == 0.0:
        return False
    hx, hy = math.cos(camera.heading), math.sin(camera.heading)
    cos_angle = max(-1.0, min(1.0, (vx * hx + vy * hy) / dist))
    return abs(math.acos(cos_angle) - camera.fov / 2.0) <= 1e-7


# ---------------------------------------------------------------------------
# Random structure generators (plain random.Random: reproducible, no
# boundary-hunting).


def random_world(rng: random.Random, max_entities: int = 10) -> World:
    count = rng.randint(1, max_entities)
    entities = tuple(
        Entity(
            id=f"E{i}",
            type_label=rng.choice(VOCAB.nouns),
            colour=rng.choice(VOCAB.colours),
            position=(rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0)),
            radius=rng.uniform(0.5, 5.0),
        )
        for i in range(count)
    )
    return World(entities)


def random_camera(rng: random.Random) -> Camera:
    return Camera(
        position=(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)),
        heading=rng.uniform(0.0, 2.0 * math.pi),
        fov=rng.uniform(0.5, math.pi),
        range=rng.uniform(10.0, 60.0),
    )


def random_refexp(rng: random.Random, vocab: Vocabulary = VOCAB) -> RefExp:
    form = rng.choice(list(SurfaceForm))
    noun = rng.choice(vocab.nouns)
    colour = rng.choice(vocab.colours) if rng.random() < 0.7 else None
    plural = rng.random() < 0.3
    if form is SurfaceForm.PRONOUN:
        restrictions = Restrictions(plural=plural)
    elif form is SurfaceForm.INDEFINITE:
        restrictions = Restrictions(type_label=noun, colour=colour)
    elif form is SurfaceForm.ONE_ANAPHORA:
        restrictions = Restrictions(colour=colour, plural=plural)
    elif form is SurfaceForm.DEFINITE:
        ordinal = rng.choice([None, Ordinal.FIRST, Ordinal.LAST]) if rng.random() < 0.3 else None
        restrictions = Restrictions(
            type_label=noun, colour=colour, plural=plural, ordinal=ordinal
        )
    else:  # demonstrative / other-anaphora: noun optional, plural needs a noun
        opt_noun = noun if rng.random() < 0.8 else None
        restrictions = Restrictions(
            type_label=opt_noun, colour=colour, plural=plural and opt_noun is not None
        )
    refexp = RefExp(form, restrictions)
    return RefExp(form, restrictions, canonical_text(refexp))


def random_scenario(
    rng: random.Random,
    max_entities: int = 10,
    max_ticks: int = 100,
    max_utterances: int = 10,
) -> Scenario:
    world = random_world(rng, max_entities)
    ids = [e.id for e in world.entities]
    max_tick = rng.randint(1, max_ticks)
    events: list = []
    for tick in range(max_tick + 1):
        if rng.random() < 0.25:
            kind = rng.random()
            if kind < 0.5:
                command = Move(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0))
            elif kind < 0.85:
                command = Turn(rng.uniform(-math.pi, math.pi))
            else:
                command = Teleport(
                    rng.uniform(-15.0, 15.0),
                    rng.uniform(-15.0, 15.0),
                    rng.uniform(0.0, 2.0 * math.pi),
                )
            events.append(CommandEvent(tick, command))
    utter_count = rng.randint(1, max_utterances)
    utter_ticks = sorted(rng.randint(0, max_tick) for _ in range(utter_count))
    for tick in utter_ticks:
        gold = frozenset(rng.sample(ids, k=min(len(ids), rng.randint(1, 2))))
        events.append(UtteranceEvent(tick, canonical_text(random_refexp(rng)), gold))
    events.sort(key=lambda e: e.tick)
    return Scenario(vocab=VOCAB, world=world, fps=28, config=EngineConfig(), events=tuple(events))


# ---------------------------------------------------------------------------
# Brute-force oracle for the global strategy: recompute every salience and
# score from the raw event log at each query.


def replay_frames(scenario: Scenario, config: EngineConfig) -> list[dict[str, float]]:
    """Visible saliences per tick, replayed straight from the scenario."""
    camera = Camera((0.0, 0.0), 0.0, config.fov, config.view_range)
    commands_at: dict[int, list] = {}
    for event in scenario.events:
        if isinstance(event, CommandEvent):
            commands_at.setdefault(event.tick, []).append(event.command)
    frames = []
    for tick in range(scenario.max_tick + 1):
        for command in commands_at.get(tick, []):
            camera = step_camera(camera, command)
        frame = render_frame(
            scenario.world, camera, tick, scenario.fps, config.salience_weights
        )
        frames.append({v.entity_id: v.salience for v in frame.visibles})
    return frames


def oracle_global_outcome(
    scenario: Scenario,
    config: EngineConfig,
    frames: list[dict[str, float]],
    prior_resolutions: list[tuple[int, Resolution]],
    query_tick: int,
    refexp: RefExp,
) -> Resolution:
    """Expected resolve_global outcome, recomputed from the logs.

    prior_resolutions lists the earlier utterances of the run in order with
    their actual outcomes (only successful ones update linguistic salience).
    """
    if refexp.restrictions.ordinal is not None:
        return Resolution.unsupported("ordinal")

    first_seen: dict[str, int] = {}
    last_seen: dict[str, tuple[int, float]] = {}
    for tick in range(query_tick + 1):
        for eid, salience in frames[tick].items():
            first_seen.setdefault(eid, tick)
            last_seen[eid] = (tick, salience)

    visual = {
        eid: salience * 2.0 ** (-(query_tick - tick))
        for eid, (tick, salience) in last_seen.items()
    }
    linguistic = {eid: 0.0 for eid in visual}
    for utter_tick, resolution in prior_resolutions:
        if resolution.outcome is not Outcome.REFERENT:
            continue
        for eid in linguistic:
            if first_seen[eid] > utter_tick:
                continue
            if eid in resolution.referents:
                linguistic[eid] = 1.0
            else:
                linguistic[eid] = linguistic[eid] / 2.0

    attrs = scenario.world.by_id
    w_v, w_l = config.form_weights.of(refexp.form)
    scored = []
    for eid in sorted(visual):
        fit = 1.0 if matches(refexp.restrictions, attrs[eid].type_label, attrs[eid].colour) else 0.0
        scored.append((eid, w_v * (fit * visual[eid]) + w_l * (fit * linguistic[eid])))
    scored.sort(key=lambda r: (-r[1], r[0]))

    if refexp.restrictions.plural:
        chosen = [eid for eid, score in scored if score >= config.delta_plural]
        if len(chosen) < 2:
            return Resolution.no_referent(provenance="context")
        return Resolution.referent(frozenset(chosen), provenance="context")
    positive = [(eid, score) for eid, score in scored if score > 0.0]
    if not positive:
        return Resolution.no_referent(provenance="context")
    if len(positive) >= 2 and positive[0][1] - positive[1][1] < config.delta_amb:
        tied = tuple(
            eid for eid, score in positive if positive[0][1] - score < config.delta_amb
        )
        return Resolution.ambiguous(tied, provenance="context")
    return Resolution.referent(frozenset([positive[0][0]]), provenance="context")
