"""Measurement-scenario presets for the two tank setups.

Each preset bundles the electrode geometry of one hardware scenario
with the frequency-domain defaults used throughout dataset generation:
the cutoff radius of the low-pass disc, the per-preset amplitude
threshold on the frequency data, and the simulated measurement noise
level.  The ``act4`` preset pairs with chest-like phantoms, ``kit4``
with circular inclusions.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["Preset", "ACT4", "KIT4", "PRESETS", "get_preset"]


@dataclass(frozen=True)
class Preset:
    name: str
    n_electrodes: int
    tank_radius: float  # meters
    electrode_width: float  # meters
    threshold: float  # amplitude cutoff on the frequency data
    phantom: str  # "chest" or "circles"
    cutoff_radius: float = 4.5
    noise_level: float = 1e-4

    def __post_init__(self):
        if self.n_electrodes < 2 or self.n_electrodes % 2:
            raise ValueError("electrode count must be even and >= 2")
        if self.phantom not in ("chest", "circles"):
            raise ValueError(f"unknown phantom family {self.phantom!r}")
        if min(self.tank_radius, self.electrode_width, self.threshold) <= 0:
            raise ValueError("geometry and threshold must be positive")
        # electrodes must fit around the tank without overlapping
        if self.arc_width * self.n_electrodes >= 2 * 3.141592653589793:
            raise ValueError("electrodes do not fit on the tank boundary")

    @property
    def arc_width(self) -> float:
        """Angular electrode width in radians: physical width / radius."""
        return self.electrode_width / self.tank_radius


ACT4 = Preset(
    name="act4",
    n_electrodes=32,
    tank_radius=0.15,
    electrode_width=0.025,
    threshold=24.0,
    phantom="chest",
)

KIT4 = Preset(
    name="kit4",
    n_electrodes=16,
    tank_radius=0.14,
    electrode_width=0.025,
    threshold=8.0,
    phantom="circles",
)

PRESETS = {p.name: p for p in (ACT4, KIT4)}


def get_preset(name) -> Preset:
    """Look up a preset by (case-insensitive) name."""
    if isinstance(name, Preset):
        return name
    key = str(name).lower()
    if key not in PRESETS:
        options = ", ".join(sorted(PRESETS))
        raise ValueError(f"unknown preset {name!r}; expected one of: {options}")
    return PRESETS[key]
