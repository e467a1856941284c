"""Two-sided cumulative-sum drift detector for standardized residual streams."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError

DIRECTION_UP = "up"
DIRECTION_DOWN = "down"


@dataclass(frozen=True)
class ChangePointEvent:
    parameter: str
    detected_at: int
    statistic: float
    direction: str

    def to_dict(self) -> dict:
        return {"parameter": self.parameter, "detected_at": self.detected_at,
                "statistic": self.statistic, "direction": self.direction}


class CusumDetector:
    """Tabular CUSUM on (x - mean) / sigma with reference value k and limit h.

    Both one-sided statistics run in parallel; whichever crosses h first
    raises the event, and both reset to zero afterwards so a sustained shift
    re-alerts rather than saturating.
    """

    def __init__(self, parameter: str, mean: float, sigma: float,
                 k: float = 0.5, h: float = 6.0):
        if sigma <= 0:
            raise ValidationError("sigma must be positive")
        if k < 0 or h <= 0:
            raise ValidationError("k must be >= 0 and h > 0")
        self.parameter = parameter
        self.mean = mean
        self.sigma = sigma
        self.k = k
        self.h = h
        self.g_up = 0.0
        self.g_down = 0.0
        self.events: list[ChangePointEvent] = []

    def update(self, value: float, at_ms: int) -> ChangePointEvent | None:
        z = (value - self.mean) / self.sigma
        self.g_up = max(0.0, self.g_up + z - self.k)
        self.g_down = max(0.0, self.g_down - z - self.k)
        if self.g_up > self.h or self.g_down > self.h:
            if self.g_up >= self.g_down:
                event = ChangePointEvent(self.parameter, int(at_ms),
                                         self.g_up, DIRECTION_UP)
            else:
                event = ChangePointEvent(self.parameter, int(at_ms),
                                         self.g_down, DIRECTION_DOWN)
            self.g_up = 0.0
            self.g_down = 0.0
            self.events.append(event)
            return event
        return None

    def feed(self, samples) -> list[ChangePointEvent]:
        """samples: iterable of (value, at_ms) pairs."""
        out = []
        for value, at_ms in samples:
            event = self.update(value, at_ms)
            if event is not None:
                out.append(event)
        return out
