"""refmem: reference resolution for situated dialog over perceptual memory.

Three interchangeable memory strategies resolve referring expressions against
a deterministic 2D world: an episodic architecture (per-frame reference
domains in FIFO buffers), a global architecture (one decaying record per
entity), and a visibility-filtered knowledge base.
"""

from .config import EngineConfig
from .engine import (
    Metrics,
    Session,
    Trace,
    capability_rows,
    compare,
    make_strategy,
    run_scenario,
    score_trace,
)
from .episodic import (
    EpisodicState,
    FifoBuffer,
    Partition,
    ReferenceDomain,
    build_reference_domain,
    resolve_episodic,
)
from .globalctx import (
    EntityRecord,
    FormWeights,
    GlobalContext,
    integrated_salience,
    resolve_global,
    update_on_frame,
    update_on_utterance,
)
from .refexp import (
    Ordinal,
    RefExp,
    Restrictions,
    SurfaceForm,
    UnparseableExpression,
    Vocabulary,
    canonical_text,
    matches,
    parse_refexp,
)
from .resolution import Outcome, Resolution
from .scenario import Scenario, parse_scenario, serialize_scenario
from .visibility import KbEntity, KnowledgeBase, resolve_visible, update_flags
from .world import (
    Camera,
    Entity,
    Frame,
    Move,
    SalienceWeights,
    Teleport,
    Turn,
    World,
    compute_salience,
    render_frame,
    step_camera,
    visible_entities,
)

__version__ = "0.1.0"

__all__ = [
    "Camera",
    "EngineConfig",
    "Entity",
    "EntityRecord",
    "EpisodicState",
    "FifoBuffer",
    "FormWeights",
    "Frame",
    "GlobalContext",
    "KbEntity",
    "KnowledgeBase",
    "Metrics",
    "Move",
    "Ordinal",
    "Outcome",
    "Partition",
    "RefExp",
    "ReferenceDomain",
    "Resolution",
    "Restrictions",
    "SalienceWeights",
    "Scenario",
    "Session",
    "SurfaceForm",
    "Teleport",
    "Trace",
    "Turn",
    "UnparseableExpression",
    "Vocabulary",
    "World",
    "build_reference_domain",
    "canonical_text",
    "capability_rows",
    "compare",
    "compute_salience",
    "integrated_salience",
    "make_strategy",
    "matches",
    "parse_refexp",
    "parse_scenario",
    "render_frame",
    "resolve_episodic",
    "resolve_global",
    "resolve_visible",
    "run_scenario",
    "score_trace",
    "serialize_scenario",
    "step_camera",
    "update_flags",
    "update_on_frame",
    "update_on_utterance",
    "visible_entities",
]
