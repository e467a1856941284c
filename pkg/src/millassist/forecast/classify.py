"""Map numeric predictions onto quality bands."""

from __future__ import annotations

from ..errors import ValidationError

CLASS_LOW = "low"
CLASS_IN_SPEC = "in_specification"
CLASS_HIGH = "high"

ALL_CLASSES = (CLASS_LOW, CLASS_IN_SPEC, CLASS_HIGH)


def classify_quality(value: float, spec_low: float, spec_high: float,
                     guard_band: float = 0.0) -> str:
    """Band an estimate against a closed spec interval.

    guard_band widens the accepted interval outward on both sides, making the
    call more forgiving near the limits; both widened limits stay inclusive.
    Every finite value gets exactly one label.
    """
    if not spec_low < spec_high:
        raise ValidationError(f"spec interval [{spec_low}, {spec_high}] is invalid")
    if guard_band < 0:
        raise ValidationError("guard_band must be >= 0")
    if value < spec_low - guard_band:
        return CLASS_LOW
    if value > spec_high + guard_band:
        return CLASS_HIGH
    return CLASS_IN_SPEC
