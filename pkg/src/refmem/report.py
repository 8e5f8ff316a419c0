"""Report rendering: run every strategy, write TSVs and matplotlib figures.

Outputs in the target directory:
    trace_<strategy>.tsv   full run trace per strategy
    metrics.tsv            one metrics line per strategy
    outcomes.tsv           side-by-side per-utterance outcomes
    salience_timeline.png  global visual salience per entity over ticks
    strategy_outcomes.png  outcome counts per strategy
    world_map.png          entities, camera path, and final view cone
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib import patches

from .config import EngineConfig
from .engine import STRATEGY_NAMES, capability_rows, compare, run_scenario
from .scenario import Scenario

_OUTCOME_FIELDS = ("correct", "wrong", "abstain", "ambiguous", "unsupported")


def _colour_for(token: str) -> str:
    try:
        matplotlib.colors.to_rgba(token)
        return token
    except ValueError:
        return "0.6"


def _probe_history(scenario: Scenario, config: EngineConfig | None):
    """Re-run the global strategy, recording salience and the camera path."""
    salience: dict[str, list[float]] = {e.id: [] for e in scenario.world.entities}
    path: list[tuple[float, float]] = []
    cameras = []

    def probe(session, frame):
        path.append(session.camera.position)
        cameras.append(session.camera)
        records = session.strategy.ctx.records
        for eid in salience:
            record = records.get(eid)
            salience[eid].append(record.visual_salience if record else 0.0)

    run_scenario(scenario, "global", config, probe=probe)
    return salience, path, cameras


def _plot_salience(scenario, salience, out_path: Path) -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ticks = range(len(next(iter(salience.values()), [])))
    by_id = scenario.world.by_id
    for eid in sorted(salience):
        ax.plot(
            list(ticks),
            salience[eid],
            label=f"{eid} ({by_id[eid].colour} {by_id[eid].type_label})",
            color=_colour_for(by_id[eid].colour),
            alpha=0.85,
        )
    for event in scenario.utterances:
        ax.axvline(event.tick, color="0.5", linestyle=":", linewidth=0.8)
    ax.set_xlabel("tick")
    ax.set_ylabel("visual salience")
    ax.set_title("global-context visual salience (dotted: utterances)")
    if salience:
        ax.legend(fontsize=8, loc="upper right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def _plot_outcomes(metrics, out_path: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.8 / len(_OUTCOME_FIELDS)
    for i, fieldname in enumerate(_OUTCOME_FIELDS):
        xs = [j + i * width for j in range(len(metrics))]
        ax.bar(xs, [getattr(m, fieldname) for m in metrics], width=width, label=fieldname)
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(metrics))])
    ax.set_xticklabels([m.strategy for m in metrics])
    ax.set_ylabel("utterances")
    ax.set_title("resolution outcomes per strategy")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def _plot_world(scenario, path, cameras, out_path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 6))
    for entity in scenario.world.entities:
        ax.add_patch(
            patches.Circle(
                entity.position,
                entity.radius,
                facecolor=_colour_for(entity.colour),
                edgecolor="black",
                alpha=0.7,
            )
        )
        ax.annotate(entity.id, entity.position, fontsize=8, ha="center", va="center")
    if path:
        xs = [p[0] for p in path]
        ys = [p[1] for p in path]
        ax.plot(xs, ys, "-o", color="0.3", markersize=2, linewidth=0.9, label="camera path")
        final = cameras[-1]
        half = math.degrees(final.fov / 2.0)
        heading = math.degrees(final.heading)
        ax.add_patch(
            patches.Wedge(
                final.position,
                final.range,
                heading - half,
                heading + half,
                facecolor="tab:blue",
                alpha=0.12,
                label="final view cone",
            )
        )
    ax.set_aspect("equal")
    ax.autoscale_view()
    ax.relim()
    ax.set_title("world and camera path")
    ax.legend(fontsize=8, loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def write_report(
    scenario: Scenario, out_dir: Path | str, config: EngineConfig | None = None
) -> list[Path]:
    """Render all report artifacts for *scenario* into *out_dir*."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    result = compare(scenario, config)
    for name in STRATEGY_NAMES:
        trace_path = out / f"trace_{name.replace('-', '_')}.tsv"
        trace_path.write_text(result.traces[name].serialize())
        written.append(trace_path)

    metrics_path = out / "metrics.tsv"
    metrics_path.write_text("".join(m.line() + "\n" for m in result.metrics))
    written.append(metrics_path)

    outcomes_path = out / "outcomes.tsv"
    header = "tick\ttext\t" + "\t".join(STRATEGY_NAMES)
    outcomes_path.write_text("".join(line + "\n" for line in [header, *capability_rows(result)]))
    written.append(outcomes_path)

    salience, path, cameras = _probe_history(scenario, config)
    figures = {
        "salience_timeline.png": lambda p: _plot_salience(scenario, salience, p),
        "strategy_outcomes.png": lambda p: _plot_outcomes(result.metrics, p),
        "world_map.png": lambda p: _plot_world(scenario, path, cameras, p),
    }
    for filename, render in figures.items():
        figure_path = out / filename
        render(figure_path)
        written.append(figure_path)
    return written
