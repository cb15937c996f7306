"""Crossing events along one segment and the signed geometric functions.

For a segment that starts and ends outside the shape, the boundary crossings
alternate ingoing/outgoing. The order-n geometric function combines all
pairwise gaps: sum over ingoing x outgoing pairs of gap**n, minus the same sum
over outgoing pairs and over ingoing pairs. Order 1 collapses to the plain
in-shape intercept length; order 3 is what the area estimator consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .geometry import Point, Shape, contains

INGOING = "in"
OUTGOING = "out"

# Relative half-width of the "on the line" band for vertex classification.
ONLINE_TOL = 1e-12


class DegenerateLineError(ValueError):
    """Crossing classification was ambiguous; the caller should resample."""


class ArenaTooSmallError(ValueError):
    """A segment endpoint fell inside the shape, so chords would be clipped."""


@dataclass(frozen=True)
class CrossingEvent:
    t: float  # arclength along the segment
    kind: str  # INGOING or OUTGOING


@dataclass(frozen=True)
class LineObservation:
    events: tuple[CrossingEvent, ...]
    chords: tuple[float, ...]
    k: int
    L1: float
    L3: float

    def scratch_scalar_count(self) -> int:
        """Numeric values held while processing this line (frugality audit)."""
        # event times + event labels + chord lengths + (k, L1, L3)
        return 2 * len(self.events) + len(self.chords) + 3


ZERO_OBSERVATION = LineObservation(events=(), chords=(), k=0, L1=0.0, L3=0.0)


def _ring_crossing_ts(coords: np.ndarray, a: np.ndarray, u: np.ndarray, tol: float) -> list[float]:
    """Arclength positions where one ring crosses the carrier line of a->b.

    Vertices within tol of the line are resolved by walking maximal on-line
    runs: a run whose neighbours lie on opposite sides is one genuine crossing
    (at the run's midpoint), same side is a tangential touch and is dropped.
    """
    rel = coords - a
    nrm = np.array([-u[1], u[0]])
    s = rel @ nrm
    xi = rel @ u
    on_line = np.abs(s) <= tol
    if np.all(on_line):
        raise DegenerateLineError("ring is collinear with the sampled line")

    ts: list[float] = []
    n = len(coords)
    s_next = np.roll(s, -1)
    plain = ~on_line & ~np.roll(on_line, -1) & ((s > 0) != (s_next > 0))
    for j in np.nonzero(plain)[0]:
        j2 = (j + 1) % n
        ts.append(float(xi[j] + (xi[j2] - xi[j]) * (s[j] / (s[j] - s[j2]))))

    if np.any(on_line):
        visited = np.zeros(n, dtype=bool)
        for j in np.nonzero(on_line)[0]:
            if visited[j]:
                continue
            run = [j]
            visited[j] = True
            k = (j + 1) % n
            while on_line[k] and not visited[k]:
                run.append(k)
                visited[k] = True
                k = (k + 1) % n
            k = (j - 1) % n
            while on_line[k] and not visited[k]:
                run.insert(0, k)
                visited[k] = True
                k = (k - 1) % n
            before = s[(run[0] - 1) % n]
            after = s[(run[-1] + 1) % n]
            if (before > 0) != (after > 0):
                run_xi = xi[run]
                ts.append(float((run_xi.min() + run_xi.max()) / 2.0))
    return ts


def crossings(shape: Shape, seg: tuple[Point, Point]) -> list[CrossingEvent]:
    """Sorted, alternating crossing events of the shape boundary within seg."""
    a_pt, b_pt = seg
    a = a_pt.as_array()
    b = b_pt.as_array()
    length = float(np.hypot(*(b - a)))
    if length == 0.0:
        return []
    if contains(shape, a_pt) or contains(shape, b_pt):
        raise ArenaTooSmallError("segment endpoint lies inside the shape")
    u = (b - a) / length
    tol = ONLINE_TOL * shape.coordinate_scale()

    ts: list[float] = []
    for ring in shape.rings:
        ts.extend(_ring_crossing_ts(ring.coords, a, u, tol))
    ts = [t for t in ts if 0.0 <= t <= length]
    ts.sort()
    if len(ts) % 2 != 0:
        raise DegenerateLineError(f"odd crossing count ({len(ts)}) after resolution")
    return [
        CrossingEvent(t, INGOING if i % 2 == 0 else OUTGOING) for i, t in enumerate(ts)
    ]


def _check_alternating(events) -> None:
    if len(events) % 2 != 0:
        raise ValueError("event sequence must have even length")
    for i, ev in enumerate(events):
        want = INGOING if i % 2 == 0 else OUTGOING
        if ev.kind != want:
            raise ValueError(f"event {i} is {ev.kind!r}, expected {want!r}")
        if i and ev.t < events[i - 1].t:
            raise ValueError("events must be sorted by t")


def geometric_function(events, n: int) -> float:
    """Signed all-pairs gap sum of order n; zero for an empty line."""
    if n < 1:
        raise ValueError("order must be a positive integer")
    _check_alternating(events)
    t_in = [e.t for e in events if e.kind == INGOING]
    t_out = [e.t for e in events if e.kind == OUTGOING]
    total = sum(abs(o - i) ** n for i in t_in for o in t_out)
    total -= sum(abs(b - a) ** n for a, b in combinations(t_out, 2))
    total -= sum(abs(b - a) ** n for a, b in combinations(t_in, 2))
    return total


def observe(shape: Shape, seg: tuple[Point, Point]) -> LineObservation:
    """Full per-line record: events, chords and the order-1/order-3 functions."""
    events = crossings(shape, seg)
    if not events:
        return ZERO_OBSERVATION
    chords = tuple(
        events[i + 1].t - events[i].t for i in range(0, len(events), 2)
    )
    if any(c <= 0.0 for c in chords):
        raise DegenerateLineError("zero-length chord after resolution")
    return LineObservation(
        events=tuple(events),
        chords=chords,
        k=len(chords),
        L1=geometric_function(events, 1),
        L3=geometric_function(events, 3),
    )
