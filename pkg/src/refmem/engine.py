"""Event-loop engine: drive a strategy over a scenario's frame/utterance stream.

Each scenario tick applies that tick's camera commands, renders one frame,
feeds it to the strategy, and then processes that tick's utterances in order.
Runs are fully deterministic: the serialised trace of a run is a pure function
of (scenario, strategy, config), byte for byte.

Trace lines are tab-separated: tick, event kind, payload, outcome. Metrics
lines are tab-separated: strategy, correct, wrong, abstain, ambiguous,
unsupported, accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

from . import episodic, globalctx, visibility
from .config import EngineConfig
from .refexp import RefExp, UnparseableExpression, Vocabulary, parse_refexp
from .resolution import Outcome, Resolution
from .scenario import CommandEvent, Scenario, UtteranceEvent, command_payload
from .world import Camera, CameraCommand, Frame, World, render_frame, step_camera

STRATEGY_NAMES = ("episodic", "global", "visibility-kb")


class Strategy(Protocol):
    name: str

    def on_frame(self, world: World, camera: Camera, frame: Frame) -> None: ...

    def resolve(self, refexp: RefExp) -> Resolution: ...

    def context_lines(self) -> list[str]: ...


class EpisodicStrategy:
    name = "episodic"

    def __init__(self, config: EngineConfig):
        self._config = config
        self.state = episodic.new_state(config.capacity)

    def on_frame(self, world: World, camera: Camera, frame: Frame) -> None:
        episodic.observe_frame(self.state, frame, world.by_id)

    def resolve(self, refexp: RefExp) -> Resolution:
        return episodic.resolve_episodic(self.state, refexp, self._config.delta_amb)

    def context_lines(self) -> list[str]:
        state = self.state
        lines = [f"perceptual={len(state.perceptual)} discourse={len(state.discourse)}"]
        head = state.discourse.items[0] if state.discourse.items else None
        for label, domain in (("current", state.current), ("discourse-head", head)):
            if domain is None:
                lines.append(f"{label}: none")
                continue
            lines.append(
                f"{label}: frame={domain.frame_index} mark={domain.referent_mark or '-'}"
            )
            for partition in domain.partitions:
                row = ",".join(f"{eid}:{sal!r}" for eid, sal in partition.elements)
                lines.append(f"  {partition.criterion}: {row or '-'}")
        return lines


class GlobalStrategy:
    name = "global"

    def __init__(self, config: EngineConfig):
        self._config = config
        self.ctx = globalctx.GlobalContext()

    def on_frame(self, world: World, camera: Camera, frame: Frame) -> None:
        globalctx.update_on_frame(self.ctx, frame, world.by_id)

    def resolve(self, refexp: RefExp) -> Resolution:
        return globalctx.resolve_global(
            self.ctx,
            refexp,
            self._config.form_weights,
            delta_amb=self._config.delta_amb,
            delta_plural=self._config.delta_plural,
        )

    def context_lines(self) -> list[str]:
        return [
            f"{r.id} {r.type_label} {r.colour} "
            f"v={r.visual_salience!r} l={r.linguistic_salience!r}"
            for r in self.ctx.sorted_records()
        ] or ["(no records)"]


class VisibilityKbStrategy:
    name = "visibility-kb"

    def __init__(self, config: EngineConfig):
        self._config = config
        self.kb = visibility.KnowledgeBase()

    def on_frame(self, world: World, camera: Camera, frame: Frame) -> None:
        visibility.update_flags(
            self.kb, frame, camera, world.by_id, self._config.here_radius
        )

    def resolve(self, refexp: RefExp) -> Resolution:
        return visibility.resolve_visible(self.kb, refexp)

    def context_lines(self) -> list[str]:
        return [
            f"{e.id} {e.type_label} {e.colour} "
            f"here={e.here} visible={e.visible} accessible={e.accessible}"
            for e in self.kb.sorted_entities()
        ] or ["(no entities)"]


def make_strategy(name: str, config: EngineConfig) -> Strategy:
    if name == "episodic":
        return EpisodicStrategy(config)
    if name == "global":
        return GlobalStrategy(config)
    if name == "visibility-kb":
        return VisibilityKbStrategy(config)
    raise ValueError(f"unknown strategy {name!r}; expected one of {STRATEGY_NAMES}")


class Session:
    """Mutable run state shared by the scenario runner and the REPL."""

    def __init__(
        self,
        world: World,
        vocab: Vocabulary,
        strategy: Strategy,
        config: EngineConfig,
        fps: int,
    ):
        self.world = world
        self.vocab = vocab
        self.strategy = strategy
        self.config = config
        self.fps = fps
        self.tick = -1
        self.camera = Camera(
            position=(0.0, 0.0), heading=0.0, fov=config.fov, range=config.view_range
        )
        self.frame: Frame | None = None

    def advance(self, commands: list[CameraCommand]) -> Frame:
        """Apply commands, advance one tick, render and feed the frame."""
        for command in commands:
            self.camera = step_camera(self.camera, command)
        self.tick += 1
        self.frame = render_frame(
            self.world, self.camera, self.tick, self.fps, self.config.salience_weights
        )
        self.strategy.on_frame(self.world, self.camera, self.frame)
        return self.frame

    def utter(self, text: str) -> Resolution:
        try:
            refexp = parse_refexp(text, self.vocab)
        except UnparseableExpression as exc:
            return Resolution.parse_error(str(exc))
        return self.strategy.resolve(refexp)


@dataclass(frozen=True)
class TraceRecord:
    tick: int
    kind: str  # "command" | "frame" | "utter"
    payload: str
    resolution: Resolution | None = None

    def line(self) -> str:
        outcome = self.resolution.describe() if self.resolution is not None else "-"
        return f"{self.tick}\t{self.kind}\t{self.payload}\t{outcome}"


@dataclass(frozen=True)
class Trace:
    strategy: str
    records: tuple[TraceRecord, ...]

    def serialize(self) -> str:
        return "".join(record.line() + "\n" for record in self.records)

    @property
    def utterance_records(self) -> tuple[TraceRecord, ...]:
        return tuple(r for r in self.records if r.kind == "utter")


def _frame_payload(frame: Frame) -> str:
    return ",".join(f"{v.entity_id}:{v.salience!r}" for v in frame.visibles) or "-"


def run_scenario(
    scenario: Scenario,
    strategy: str,
    config: EngineConfig | None = None,
    probe: Callable[[Session, Frame], None] | None = None,
) -> Trace:
    """Run one strategy over the scenario and return the full trace.

    Per-utterance resolution failures are recorded, never raised. *probe*,
    when given, is called after each frame update (used by reporting).
    """
    cfg = config if config is not None else scenario.config
    strat = make_strategy(strategy, cfg)
    session = Session(scenario.world, scenario.vocab, strat, cfg, scenario.fps)

    commands_at: dict[int, list[CommandEvent]] = {}
    utterances_at: dict[int, list[UtteranceEvent]] = {}
    for event in scenario.events:
        if isinstance(event, CommandEvent):
            commands_at.setdefault(event.tick, []).append(event)
        else:
            utterances_at.setdefault(event.tick, []).append(event)

    records: list[TraceRecord] = []
    for tick in range(scenario.max_tick + 1):
        tick_commands = commands_at.get(tick, [])
        for event in tick_commands:
            records.append(TraceRecord(tick, "command", command_payload(event.command)))
        frame = session.advance([e.command for e in tick_commands])
        records.append(TraceRecord(tick, "frame", _frame_payload(frame)))
        if probe is not None:
            probe(session, frame)
        for event in utterances_at.get(tick, []):
            resolution = session.utter(event.text)
            records.append(TraceRecord(tick, "utter", event.text, resolution))
    return Trace(strategy=strat.name, records=tuple(records))


@dataclass(frozen=True)
class Metrics:
    """Per-strategy outcome counts; the buckets partition the utterances."""

    strategy: str
    correct: int = 0
    wrong: int = 0
    abstain: int = 0
    ambiguous: int = 0
    unsupported: int = 0

    @property
    def total(self) -> int:
        return self.correct + self.wrong + self.abstain + self.ambiguous + self.unsupported

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    def line(self) -> str:
        return (
            f"{self.strategy}\t{self.correct}\t{self.wrong}\t{self.abstain}"
            f"\t{self.ambiguous}\t{self.unsupported}\t{self.accuracy!r}"
        )


class MismatchedScenarioError(ValueError):
    pass


def score_trace(trace: Trace, scenario: Scenario) -> Metrics:
    """Score a trace against the scenario's gold sets (exact set match)."""
    utterances = scenario.utterances
    records = trace.utterance_records
    if len(records) != len(utterances) or any(
        r.payload != u.text or r.tick != u.tick for r, u in zip(records, utterances)
    ):
        raise MismatchedScenarioError("trace does not match the scenario's utterances")
    correct = wrong = abstain = ambiguous = unsupported = 0
    for record, utterance in zip(records, utterances):
        outcome = record.resolution.outcome  # type: ignore[union-attr]
        if outcome is Outcome.REFERENT:
            if record.resolution.referents == utterance.gold:  # type: ignore[union-attr]
                correct += 1
            else:
                wrong += 1
        elif outcome is Outcome.NO_REFERENT:
            abstain += 1
        elif outcome is Outcome.AMBIGUOUS:
            ambiguous += 1
        elif outcome is Outcome.UNSUPPORTED:
            unsupported += 1
        else:  # parse errors land in the wrong bucket; the schema has no column
            wrong += 1
    return Metrics(trace.strategy, correct, wrong, abstain, ambiguous, unsupported)


@dataclass(frozen=True)
class CompareResult:
    traces: dict[str, Trace]
    metrics: tuple[Metrics, ...]


def compare(scenario: Scenario, config: EngineConfig | None = None) -> CompareResult:
    """Run every strategy on the same scenario."""
    traces = {name: run_scenario(scenario, name, config) for name in STRATEGY_NAMES}
    metrics = tuple(score_trace(traces[name], scenario) for name in STRATEGY_NAMES)
    return CompareResult(traces=traces, metrics=metrics)


def capability_rows(result: CompareResult) -> list[str]:
    """Side-by-side per-utterance outcomes, one TSV row per utterance."""
    per_strategy = {
        name: trace.utterance_records for name, trace in result.traces.items()
    }
    rows = []
    count = len(next(iter(per_strategy.values()), ()))
    for i in range(count):
        reference = per_strategy[STRATEGY_NAMES[0]][i]
        outcomes = "\t".join(
            per_strategy[name][i].resolution.describe()  # type: ignore[union-attr]
            for name in STRATEGY_NAMES
        )
        rows.append(f"{reference.tick}\t{reference.payload}\t{outcomes}")
    return rows
