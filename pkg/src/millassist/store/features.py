"""Feature alignment types: fixed-length vectors from multi-rate streams."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ValidationError

AGGREGATIONS = ("mean", "min", "max", "last", "stddev")

SORTING_PREFIX = "sorting."


class _Missing:
    """Explicit missing-value marker; distinct from any float, never NaN."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "MISSING"

    def __bool__(self) -> bool:
        return False


MISSING = _Missing()


@dataclass(frozen=True)
class FeatureField:
    """One requested feature.

    ``window`` is "reel" for the reel span or a positive float for a trailing
    window of that many seconds ending at the reel end. ``last`` looks back
    past the window start to the most recent sample; all other aggregations
    use in-window samples only.
    """

    tag: str
    agg: str = "mean"
    window: str | float = "reel"

    def validate(self) -> None:
        if not self.tag:
            raise ValidationError("feature field needs a tag")
        if self.agg not in AGGREGATIONS:
            raise ValidationError(f"unknown aggregation {self.agg!r}")
        if self.window != "reel":
            if not isinstance(self.window, (int, float)) or self.window <= 0:
                raise ValidationError(
                    f"window must be 'reel' or seconds > 0, got {self.window!r}")

    @property
    def name(self) -> str:
        if self.window == "reel":
            return f"{self.tag}:{self.agg}"
        return f"{self.tag}:{self.agg}:{self.window:g}s"


@dataclass
class FeatureVector:
    """Aligned features for one reel; missing entries hold MISSING."""

    reel_id: str
    names: list[str]
    values: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.values))

    def numeric(self) -> list[float | None]:
        """Values with MISSING mapped to None, for serialization."""
        return [None if v is MISSING else v for v in self.values]


def reel_feature_spec(tags: list[str], agg: str = "mean") -> list[FeatureField]:
    """Convenience spec: one reel-span aggregation per tag."""
    return [FeatureField(tag=tag, agg=agg) for tag in tags]
