"""Engine configuration: buffer sizes, thresholds, camera and weight settings.

Overridable from scenario CONFIG lines and from the CLI as K=V pairs. Weight
pairs are written "v,l" (e.g. w_pronoun=0.2,0.8).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .globalctx import FormWeights
from .refexp import SurfaceForm
from .world import SalienceWeights

_FORM_KEYS = {
    "w_pronoun": SurfaceForm.PRONOUN,
    "w_definite": SurfaceForm.DEFINITE,
    "w_indefinite": SurfaceForm.INDEFINITE,
    "w_demonstrative": SurfaceForm.DEMONSTRATIVE,
    "w_one_anaphora": SurfaceForm.ONE_ANAPHORA,
    "w_other_anaphora": SurfaceForm.OTHER_ANAPHORA,
}


@dataclass(frozen=True)
class EngineConfig:
    capacity: int = 3000
    delta_amb: float = 0.05
    delta_plural: float = 0.01
    fov: float = math.pi / 2.0
    view_range: float = 50.0
    here_radius: float = 25.0
    salience_weights: SalienceWeights = field(default_factory=SalienceWeights)
    form_weights: FormWeights = field(default_factory=FormWeights.default)

    def with_override(self, key: str, raw_value: str) -> "EngineConfig":
        """Apply one K=V override; raises ValueError for unknown keys/values."""
        if key == "capacity":
            value = int(raw_value)
            if value <= 0:
                raise ValueError("capacity must be > 0")
            return replace(self, capacity=value)
        if key in ("delta_amb", "delta_plural", "fov", "here_radius"):
            return replace(self, **{key: float(raw_value)})
        if key == "range":
            return replace(self, view_range=float(raw_value))
        if key == "w_size":
            return replace(
                self,
                salience_weights=SalienceWeights(
                    float(raw_value), self.salience_weights.centrality
                ),
            )
        if key == "w_centrality":
            return replace(
                self,
                salience_weights=SalienceWeights(
                    self.salience_weights.size, float(raw_value)
                ),
            )
        if key in _FORM_KEYS:
            parts = raw_value.split(",")
            if len(parts) != 2:
                raise ValueError(f"{key} expects 'v,l', got {raw_value!r}")
            pair = (float(parts[0]), float(parts[1]))
            return replace(self, form_weights=self.form_weights.replaced(_FORM_KEYS[key], pair))
        raise ValueError(f"unknown config key {key!r}")

    def override_items(self) -> list[tuple[str, str]]:
        """(key, value) pairs for every setting differing from the defaults."""
        default = EngineConfig()
        out: list[tuple[str, str]] = []
        if self.capacity != default.capacity:
            out.append(("capacity", repr(self.capacity)))
        for key in ("delta_amb", "delta_plural", "fov", "here_radius"):
            if getattr(self, key) != getattr(default, key):
                out.append((key, repr(getattr(self, key))))
        if self.view_range != default.view_range:
            out.append(("range", repr(self.view_range)))
        if self.salience_weights.size != default.salience_weights.size:
            out.append(("w_size", repr(self.salience_weights.size)))
        if self.salience_weights.centrality != default.salience_weights.centrality:
            out.append(("w_centrality", repr(self.salience_weights.centrality)))
        for key, form in sorted(_FORM_KEYS.items()):
            if self.form_weights.of(form) != default.form_weights.of(form):
                w_v, w_l = self.form_weights.of(form)
                out.append((key, f"{w_v!r},{w_l!r}"))
        return out
