"""Follow a marked web segment downstream through a speed profile.

The machine speed is sampled as (timestamp_ms, m_per_s) pairs and treated as
piecewise constant: each sampled speed holds until the next sample.  The last
sample extends forward indefinitely, and times before the first sample use
the first sampled speed, so a single sample models a constant-speed machine.
"""

from __future__ import annotations

from ..errors import OrderingError, ValidationError

OUT_OF_HORIZON = "out_of_horizon"


def _check_series(speed_series) -> list[tuple[int, float]]:
    series = [(int(ts), float(v)) for ts, v in speed_series]
    if not series:
        raise ValidationError("speed series is empty")
    for (t0, v0), (t1, _) in zip(series, series[1:]):
        if t1 <= t0:
            raise OrderingError(f"speed samples out of order at {t1}")
    for ts, v in series:
        if v <= 0:
            raise ValidationError(f"speed must be positive, got {v} at {ts}")
    return series


def track_web_segment(speed_series, positions: dict[str, float],
                      segment_birth_time: int,
                      horizon_ms: int | None = None) -> dict[str, int | str]:
    """Arrival time of a web segment at each downstream position.

    For a sensor at x meters the result is the t satisfying
    integral of v from birth to t == x, computed segment-exactly.  Positions
    not reached within horizon_ms (when given) map to OUT_OF_HORIZON.
    """
    series = _check_series(speed_series)
    for name, x in positions.items():
        if x < 0:
            raise ValidationError(f"position for {name} must be >= 0, got {x}")

    birth = int(segment_birth_time)
    deadline = None if horizon_ms is None else birth + int(horizon_ms)

    # walk once in distance order; travelled is exact at each segment edge
    order = sorted(positions, key=lambda name: positions[name])
    out: dict[str, int | str] = {}
    # speed in effect at birth: last sample at or before it
    seg = 0
    while seg + 1 < len(series) and series[seg + 1][0] <= birth:
        seg += 1
    t = float(birth)
    travelled = 0.0
    speed = series[seg][1]
    for name in order:
        x = float(positions[name])
        while True:
            next_edge = series[seg + 1][0] if seg + 1 < len(series) else None
            if next_edge is not None and next_edge <= t:
                seg += 1
                speed = series[seg][1]
                continue
            remaining = x - travelled
            arrival = t + remaining / speed * 1000.0
            if next_edge is None or arrival <= next_edge:
                if deadline is not None and arrival > deadline:
                    out[name] = OUT_OF_HORIZON
                else:
                    out[name] = round(arrival)
                    t = arrival
                    travelled = x
                break
            # consume the rest of this constant-speed segment
            travelled += speed * (next_edge - t) / 1000.0
            t = float(next_edge)
            seg += 1
            speed = series[seg][1]
        if out[name] == OUT_OF_HORIZON:
            # farther positions cannot arrive earlier
            for later in order[order.index(name) + 1:]:
                out[later] = OUT_OF_HORIZON
            break
    return out
