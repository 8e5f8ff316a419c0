"""Interactive session: drive the camera tick by tick and resolve utterances.

Commands:
    move DX,DY        advance one tick, translating the camera
    turn DTHETA       advance one tick, rotating the camera (radians)
    teleport X,Y,TH   advance one tick, jumping the camera
    say "TEXT"        resolve a referring expression against current memory
    show context      dump the strategy's memory state
    help              this text
    quit              leave

Transcripts are deterministic: a scripted stdin session always produces the
same output.
"""

from __future__ import annotations

import sys
from typing import TextIO

from .config import EngineConfig
from .engine import Session, make_strategy
from .scenario import Scenario, ScenarioSyntaxError, parse_command
from .world import Frame

HELP_TEXT = (
    "commands: move DX,DY | turn DTHETA | teleport X,Y,THETA | "
    'say "TEXT" | show context | help | quit'
)


def _frame_lines(session: Session, frame: Frame) -> list[str]:
    x, y = session.camera.position
    lines = [
        f"tick {frame.index} time={frame.time_s!r} "
        f"camera=({x!r},{y!r}) heading={session.camera.heading!r}"
    ]
    by_id = session.world.by_id
    for row in frame.visibles:
        entity = by_id[row.entity_id]
        lines.append(
            f"  {row.entity_id} {entity.type_label} {entity.colour} "
            f"salience={row.salience!r} distance={row.distance!r} bearing={row.bearing!r}"
        )
    if not frame.visibles:
        lines.append("  (nothing visible)")
    return lines


def _say_text(argument: str) -> str:
    argument = argument.strip()
    if argument.startswith('"') and argument.endswith('"') and len(argument) >= 2:
        return argument[1:-1]
    return argument


def repl(
    scenario: Scenario,
    strategy_name: str,
    config: EngineConfig | None = None,
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
) -> None:
    """Run the interactive loop until quit or EOF."""
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    cfg = config if config is not None else scenario.config
    strategy = make_strategy(strategy_name, cfg)
    session = Session(scenario.world, scenario.vocab, strategy, cfg, scenario.fps)

    def emit(lines: list[str]) -> None:
        for line in lines:
            stdout.write(line + "\n")

    emit([f"refmem repl strategy={strategy.name} (type 'help' for commands)"])
    emit(_frame_lines(session, session.advance([])))

    while True:
        stdout.write("refmem> ")
        stdout.flush()
        raw = stdin.readline()
        if not raw:
            emit(["bye"])
            return
        line = raw.strip()
        if not line:
            continue
        verb, _, argument = line.partition(" ")
        verb = verb.lower()
        if verb == "quit":
            emit(["bye"])
            return
        if verb == "help":
            emit([HELP_TEXT])
        elif verb in ("move", "turn", "teleport"):
            try:
                command = parse_command(verb.upper(), argument.strip())
            except ScenarioSyntaxError as exc:
                emit([f"error: {exc.reason}", HELP_TEXT])
                continue
            emit(_frame_lines(session, session.advance([command])))
        elif verb == "say":
            if not argument.strip():
                emit(["error: say expects a referring expression", HELP_TEXT])
                continue
            resolution = session.utter(_say_text(argument))
            emit([f"-> {resolution.describe()}"])
        elif verb == "show" and argument.strip() == "context":
            emit(session.strategy.context_lines())
        else:
            emit([f"unknown command {line!r}", HELP_TEXT])
