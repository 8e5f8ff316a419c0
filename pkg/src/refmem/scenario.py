"""Line-oriented scenario DSL: vocabulary, world, config, and timed events.

Grammar (one directive per line, '#' starts a comment):

    VOCAB nouns=house,tree colours=red,blue
    FPS 28
    CONFIG capacity=3000 delta_amb=0.05 w_pronoun=0.2,0.8
    ENTITY H1 type=house colour=red pos=10.0,30.0 radius=3.0
    TICK 0 TELEPORT 0,0,0
    TICK 1 MOVE 0,1
    TICK 2 TURN 1.57
    TICK 5 UTTER "the red house" GOLD H1

Event ticks must be non-decreasing and GOLD ids must name declared entities.
parse/serialise form a fixpoint: serialising a parsed scenario and reparsing
yields an equal Scenario.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import EngineConfig
from .refexp import Vocabulary
from .world import CameraCommand, Entity, Move, Teleport, Turn, World


class ScenarioSyntaxError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col
        self.reason = message


class ScenarioSemanticError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.reason = message


@dataclass(frozen=True)
class CommandEvent:
    tick: int
    command: CameraCommand


@dataclass(frozen=True)
class UtteranceEvent:
    tick: int
    text: str
    gold: frozenset[str]


Event = CommandEvent | UtteranceEvent


@dataclass(frozen=True)
class Scenario:
    vocab: Vocabulary
    world: World
    fps: int = 28
    config: EngineConfig = field(default_factory=EngineConfig)
    events: tuple[Event, ...] = ()

    @property
    def max_tick(self) -> int:
        return max((e.tick for e in self.events), default=0)

    @property
    def utterances(self) -> tuple[UtteranceEvent, ...]:
        return tuple(e for e in self.events if isinstance(e, UtteranceEvent))


def _strip_comment(line: str) -> str:
    # '#' starts a comment unless inside a quoted utterance.
    in_quotes = False
    for i, char in enumerate(line):
        if char == '"':
            in_quotes = not in_quotes
        elif char == "#" and not in_quotes:
            return line[:i]
    return line


def _parse_kv(token: str, lineno: int, col: int) -> tuple[str, str]:
    if "=" not in token:
        raise ScenarioSyntaxError(lineno, col, f"expected key=value, got {token!r}")
    key, _, value = token.partition("=")
    if not key or not value:
        raise ScenarioSyntaxError(lineno, col, f"malformed key=value pair {token!r}")
    return key, value


def _parse_floats(raw: str, count: int, lineno: int, col: int) -> list[float]:
    parts = raw.split(",")
    if len(parts) != count:
        raise ScenarioSyntaxError(lineno, col, f"expected {count} comma-separated numbers, got {raw!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ScenarioSyntaxError(lineno, col, f"bad number in {raw!r}: {exc}") from None


def parse_command(kind: str, payload: str, lineno: int = 0, col: int = 0) -> CameraCommand:
    """Parse a MOVE/TURN/TELEPORT payload (shared with the REPL)."""
    if kind == "MOVE":
        dx, dy = _parse_floats(payload, 2, lineno, col)
        return Move(dx, dy)
    if kind == "TURN":
        (dtheta,) = _parse_floats(payload, 1, lineno, col)
        return Turn(dtheta)
    if kind == "TELEPORT":
        x, y, heading = _parse_floats(payload, 3, lineno, col)
        return Teleport(x, y, heading)
    raise ScenarioSyntaxError(lineno, col, f"unknown command {kind!r}")


def command_payload(command: CameraCommand) -> str:
    """Canonical DSL rendering of a camera command."""
    if isinstance(command, Move):
        return f"MOVE {command.dx!r},{command.dy!r}"
    if isinstance(command, Turn):
        return f"TURN {command.dtheta!r}"
    if isinstance(command, Teleport):
        return f"TELEPORT {command.x!r},{command.y!r},{command.heading!r}"
    raise TypeError(f"unknown camera command: {command!r}")


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text; raises ScenarioSyntaxError / ScenarioSemanticError."""
    vocab: Vocabulary | None = None
    fps: int | None = None
    config = EngineConfig()
    entities: list[Entity] = []
    entity_ids: set[str] = set()
    events: list[Event] = []
    event_lines: list[int] = []
    last_tick = -1

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw_line).strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]
        col = raw_line.index(keyword) + 1

        if keyword == "VOCAB":
            if vocab is not None:
                raise ScenarioSemanticError(lineno, "duplicate VOCAB directive")
            fields = dict(_parse_kv(t, lineno, col) for t in tokens[1:])
            missing = {"nouns", "colours"} - set(fields)
            if missing:
                raise ScenarioSyntaxError(lineno, col, f"VOCAB missing {sorted(missing)}")
            try:
                vocab = Vocabulary(
                    nouns=tuple(fields["nouns"].split(",")),
                    colours=tuple(fields["colours"].split(",")),
                )
            except ValueError as exc:
                raise ScenarioSemanticError(lineno, str(exc)) from None
        elif keyword == "FPS":
            if fps is not None:
                raise ScenarioSemanticError(lineno, "duplicate FPS directive")
            if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) <= 0:
                raise ScenarioSyntaxError(lineno, col, "FPS expects one positive integer")
            fps = int(tokens[1])
        elif keyword == "CONFIG":
            for token in tokens[1:]:
                key, value = _parse_kv(token, lineno, col)
                try:
                    config = config.with_override(key, value)
                except ValueError as exc:
                    raise ScenarioSemanticError(lineno, str(exc)) from None
        elif keyword == "ENTITY":
            if len(tokens) < 2:
                raise ScenarioSyntaxError(lineno, col, "ENTITY expects an id")
            eid = tokens[1]
            fields = dict(_parse_kv(t, lineno, col) for t in tokens[2:])
            missing = {"type", "colour", "pos", "radius"} - set(fields)
            if missing:
                raise ScenarioSyntaxError(lineno, col, f"ENTITY missing {sorted(missing)}")
            if eid in entity_ids:
                raise ScenarioSemanticError(lineno, f"duplicate entity id {eid!r}")
            x, y = _parse_floats(fields["pos"], 2, lineno, col)
            try:
                entity = Entity(
                    id=eid,
                    type_label=fields["type"],
                    colour=fields["colour"],
                    position=(x, y),
                    radius=float(fields["radius"]),
                )
            except ValueError as exc:
                raise ScenarioSemanticError(lineno, str(exc)) from None
            entities.append(entity)
            entity_ids.add(eid)
        elif keyword == "TICK":
            if len(tokens) < 3:
                raise ScenarioSyntaxError(lineno, col, "TICK expects a tick number and a command")
            if not tokens[1].isdigit():
                raise ScenarioSyntaxError(lineno, col, f"bad tick number {tokens[1]!r}")
            tick = int(tokens[1])
            if tick < last_tick:
                raise ScenarioSemanticError(
                    lineno, f"event ticks must be non-decreasing ({tick} after {last_tick})"
                )
            last_tick = tick
            kind = tokens[2]
            if kind == "UTTER":
                rest = line.split(None, 2)[2][len("UTTER") :].strip()
                if not rest.startswith('"'):
                    raise ScenarioSyntaxError(lineno, col, 'UTTER expects a double-quoted string')
                closing = rest.find('"', 1)
                if closing < 0:
                    raise ScenarioSyntaxError(lineno, col, "unterminated utterance string")
                utter_text = rest[1:closing]
                tail = rest[closing + 1 :].split()
                if len(tail) != 2 or tail[0] != "GOLD":
                    raise ScenarioSyntaxError(lineno, col, "UTTER expects: UTTER \"...\" GOLD id[,id]")
                gold = frozenset(tail[1].split(","))
                events.append(UtteranceEvent(tick, utter_text, gold))
                event_lines.append(lineno)
            else:
                if len(tokens) != 4:
                    raise ScenarioSyntaxError(lineno, col, f"{kind} expects one argument token")
                events.append(CommandEvent(tick, parse_command(kind, tokens[3], lineno, col)))
                event_lines.append(lineno)
        else:
            raise ScenarioSyntaxError(lineno, col, f"unknown directive {keyword!r}")

    if vocab is None:
        raise ScenarioSemanticError(len(text.splitlines()) or 1, "missing VOCAB directive")
    world = World(tuple(entities))
    for event, event_line in zip(events, event_lines):
        if isinstance(event, UtteranceEvent):
            unknown = event.gold - entity_ids
            if unknown:
                raise ScenarioSemanticError(
                    event_line, f"gold ids not declared: {sorted(unknown)}"
                )
    return Scenario(
        vocab=vocab,
        world=world,
        fps=fps if fps is not None else 28,
        config=config,
        events=tuple(events),
    )


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical scenario text; parse(serialize(s)) == s."""
    lines = [
        "VOCAB nouns={} colours={}".format(
            ",".join(scenario.vocab.nouns), ",".join(scenario.vocab.colours)
        ),
        f"FPS {scenario.fps}",
    ]
    overrides = scenario.config.override_items()
    if overrides:
        lines.append("CONFIG " + " ".join(f"{k}={v}" for k, v in overrides))
    for entity in scenario.world.entities:
        lines.append(
            f"ENTITY {entity.id} type={entity.type_label} colour={entity.colour} "
            f"pos={entity.position[0]!r},{entity.position[1]!r} radius={entity.radius!r}"
        )
    for event in scenario.events:
        if isinstance(event, CommandEvent):
            lines.append(f"TICK {event.tick} {command_payload(event.command)}")
        else:
            gold = ",".join(sorted(event.gold))
            lines.append(f'TICK {event.tick} UTTER "{event.text}" GOLD {gold}')
    return "\n".join(lines) + "\n"
