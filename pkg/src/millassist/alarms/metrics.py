"""Flood metrics over a filtering window."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class FloodMetrics:
    window_ms: int
    raw_alarms: int
    presentation_units: int
    groups_formed: int            # units with more than one member
    rate_per_10min: float
    suppression_ratio: float

    def to_dict(self) -> dict:
        return {
            "window_ms": self.window_ms,
            "raw_alarms": self.raw_alarms,
            "presentation_units": self.presentation_units,
            "groups_formed": self.groups_formed,
            "rate_per_10min": self.rate_per_10min,
            "suppression_ratio": self.suppression_ratio,
        }


def flood_metrics(raw_alarms: int, presentation_units: int, groups_formed: int,
                  window_ms: int) -> FloodMetrics:
    """Ratio is 1 - units/raw; both rate and ratio are 0 when nothing happened."""
    if raw_alarms == 0:
        rate = 0.0
        ratio = 0.0
    else:
        rate = raw_alarms / (window_ms / 600_000.0) if window_ms > 0 else 0.0
        ratio = 1.0 - presentation_units / raw_alarms
    return FloodMetrics(window_ms=window_ms, raw_alarms=raw_alarms,
                        presentation_units=presentation_units,
                        groups_formed=groups_formed, rate_per_10min=rate,
                        suppression_ratio=ratio)
