"""Poses, compass-heading math and pose-to-pose path planning.

Headings are compass degrees: 0 = north = +y (into the scene), angles grow
clockwise, east = 90 = +x (stage right of center).  All public functions take
and return degrees; radians are used only internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PlanningError

FORWARD = "forward"
BACKING = "backing"
LEFT = "left"
RIGHT = "right"

_TWO_PI = 2.0 * math.pi
# Arcs/lines shorter than this are treated as degenerate by the planner.
_EPS_ANG = 1e-12  # radians
_EPS_LEN = 1e-12  # meters


def normalize_heading(heading: float) -> float:
    h = heading % 360.0
    return h if h != 360.0 else 0.0


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float  # compass degrees in [0, 360)

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite pose position ({self.x}, {self.y})")
        object.__setattr__(self, "heading", normalize_heading(self.heading))


@dataclass(frozen=True)
class TurnConstraint:
    min_radius: float  # meters

    def __post_init__(self):
        if not (math.isfinite(self.min_radius) and self.min_radius > 0):
            raise ValueError(f"turning radius must be positive, got {self.min_radius}")


@dataclass(frozen=True)
class PathSegment:
    """A straight line or circular arc with a direction of travel.

    ``end`` is the analytic image of ``start`` under the segment; consecutive
    segments of a planned path chain exactly (end of one == start of next).
    """

    kind: str  # 'line' | 'arc'
    start: Pose
    end: Pose
    length: float  # meters, >= 0
    travel: str  # FORWARD | BACKING
    center: tuple[float, float] | None = None
    radius: float | None = None
    side: str | None = None  # LEFT | RIGHT (arcs only)
    sweep: float | None = None  # degrees > 0 (arcs only)


def heading_to_vector(heading: float) -> tuple[float, float]:
    """Unit vector of a compass heading: north (0) -> (0, 1), east (90) -> (1, 0)."""
    r = math.radians(heading)
    return (math.sin(r), math.cos(r))


def line_endpoint(start: Pose, distance: float, travel: str = FORWARD) -> Pose:
    """Pose after driving ``distance`` meters straight; heading unchanged."""
    if distance < 0:
        raise ValueError(f"negative distance {distance}")
    dx, dy = heading_to_vector(start.heading)
    sign = 1.0 if travel == FORWARD else -1.0
    return Pose(start.x + sign * distance * dx, start.y + sign * distance * dy, start.heading)


def arc_center(start: Pose, radius: float, side: str) -> tuple[float, float]:
    side_sign = 1.0 if side == RIGHT else -1.0
    cx, cy = heading_to_vector(start.heading + side_sign * 90.0)
    return (start.x + radius * cx, start.y + radius * cy)


def arc_endpoint(start: Pose, radius: float, angle: float, side: str, travel: str = FORWARD) -> Pose:
    """Pose after following a circle of ``radius`` through ``angle`` degrees.

    The center sits perpendicular to the heading on the named side.  Heading
    change: forward-right +angle, forward-left -angle; backing reverses both
    the heading change and the sense in which the position revolves.
    """
    if radius <= 0:
        raise ValueError(f"arc radius must be positive, got {radius}")
    if angle < 0:
        raise ValueError(f"negative arc angle {angle}")
    side_sign = 1.0 if side == RIGHT else -1.0
    travel_sign = 1.0 if travel == FORWARD else -1.0
    cx, cy = arc_center(start, radius, side)
    # Position rotates about the center; math-CCW positive.
    rot = math.radians(-side_sign * travel_sign * angle)
    rx, ry = start.x - cx, start.y - cy
    cr, sr = math.cos(rot), math.sin(rot)
    ex = cx + rx * cr - ry * sr
    ey = cy + rx * sr + ry * cr
    return Pose(ex, ey, start.heading + side_sign * travel_sign * angle)


def line_segment(start: Pose, distance: float, travel: str = FORWARD) -> PathSegment:
    return PathSegment("line", start, line_endpoint(start, distance, travel), distance, travel)


def arc_segment(start: Pose, radius: float, sweep: float, side: str, travel: str = FORWARD) -> PathSegment:
    end = arc_endpoint(start, radius, sweep, side, travel)
    length = radius * math.radians(sweep)
    return PathSegment("arc", start, end, length, travel,
                       center=arc_center(start, radius, side), radius=radius,
                       side=side, sweep=sweep)


def path_length(segments) -> float:
    return sum(seg.length for seg in segments)


def sample_path(segments, s: float) -> Pose:
    """Pose at arclength ``s`` along a chained segment sequence."""
    total = path_length(segments)
    if s < -1e-9 or s > total + 1e-9:
        raise ValueError(f"arclength {s} outside [0, {total}]")
    s = min(max(s, 0.0), total)
    for seg in segments:
        if s <= seg.length or seg is segments[-1]:
            s = min(s, seg.length)
            if seg.kind == "line":
                return line_endpoint(seg.start, s, seg.travel)
            return arc_endpoint(seg.start, seg.radius, math.degrees(s / seg.radius),
                                seg.side, seg.travel)
        s -= seg.length
    # Only reachable for an empty path with s == 0.
    raise ValueError("cannot sample an empty path")


# --- CSC planner -----------------------------------------------------------
#
# Classic circle-straight-circle construction with all four turn combinations
# (RSR, RSL, LSR, LSL).  Computed in math convention (yaw radians, CCW
# positive); compass-right turns map to math clockwise ("R").


def _mod2pi(x: float) -> float:
    v = x % _TWO_PI
    # Snap float noise that lands just below a full turn back to zero,
    # otherwise a degenerate arc would become a full circle.
    if v > _TWO_PI - _EPS_ANG:
        v = 0.0
    return v


def _lsl(a, b, d):
    sa, sb, ca, cb = math.sin(a), math.sin(b), math.cos(a), math.cos(b)
    p_sq = 2 + d * d - 2 * math.cos(a - b) + 2 * d * (sa - sb)
    if p_sq < -1e-12:
        return None
    tmp = math.atan2(cb - ca, d + sa - sb)
    return _mod2pi(-a + tmp), math.sqrt(max(p_sq, 0.0)), _mod2pi(b - tmp)


def _rsr(a, b, d):
    sa, sb, ca, cb = math.sin(a), math.sin(b), math.cos(a), math.cos(b)
    p_sq = 2 + d * d - 2 * math.cos(a - b) + 2 * d * (sb - sa)
    if p_sq < -1e-12:
        return None
    tmp = math.atan2(ca - cb, d - sa + sb)
    return _mod2pi(a - tmp), math.sqrt(max(p_sq, 0.0)), _mod2pi(-b + tmp)


def _lsr(a, b, d):
    sa, sb, ca, cb = math.sin(a), math.sin(b), math.cos(a), math.cos(b)
    p_sq = -2 + d * d + 2 * math.cos(a - b) + 2 * d * (sa + sb)
    if p_sq < -1e-12:
        return None
    p = math.sqrt(max(p_sq, 0.0))
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return _mod2pi(-a + tmp), p, _mod2pi(-_mod2pi(b) + tmp)


def _rsl(a, b, d):
    sa, sb, ca, cb = math.sin(a), math.sin(b), math.cos(a), math.cos(b)
    p_sq = d * d - 2 + 2 * math.cos(a - b) - 2 * d * (sa + sb)
    if p_sq < -1e-12:
        return None
    p = math.sqrt(max(p_sq, 0.0))
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return _mod2pi(a - tmp), p, _mod2pi(b - tmp)


# Candidate order doubles as the tie-break: right-turn-first candidates win
# exact length ties.
_CANDIDATES = (("RSR", _rsr), ("RSL", _rsl), ("LSR", _lsr), ("LSL", _lsl))
_SIDE_OF = {"L": LEFT, "R": RIGHT}


def _build_forward(start: Pose, radius: float, word: str, t: float, p: float, q: float):
    segs = []
    pose = start
    for amount, letter in ((t, word[0]), (p, "S"), (q, word[2])):
        if letter == "S":
            if amount * radius <= _EPS_LEN:
                continue
            seg = line_segment(pose, amount * radius, FORWARD)
        else:
            if amount <= _EPS_ANG:
                continue
            seg = arc_segment(pose, radius, math.degrees(amount), _SIDE_OF[letter], FORWARD)
        segs.append(seg)
        pose = seg.end
    # A vanished middle line can leave two co-circular arcs; merge them.
    if (len(segs) == 2 and segs[0].kind == "arc" and segs[1].kind == "arc"
            and segs[0].side == segs[1].side
            and math.hypot(segs[0].center[0] - segs[1].center[0],
                           segs[0].center[1] - segs[1].center[1]) < 1e-9):
        segs = [arc_segment(start, radius, segs[0].sweep + segs[1].sweep,
                            segs[0].side, FORWARD)]
    return segs


def _reverse_segment(seg: PathSegment) -> PathSegment:
    if seg.kind == "line":
        return PathSegment("line", seg.end, seg.start, seg.length, BACKING)
    return PathSegment("arc", seg.end, seg.start, seg.length, BACKING,
                       center=seg.center, radius=seg.radius, side=seg.side,
                       sweep=seg.sweep)


def plan_path(start: Pose, goal: Pose, travel: str, constraint: TurnConstraint):
    """Shortest CSC path from ``start`` to ``goal`` in the requested direction.

    Returns a tuple of chained PathSegments (empty when start == goal).  Every
    arc uses the minimum turning radius; degenerate elements are dropped.
    """
    if start == goal:
        return ()
    if travel == BACKING:
        # Backing from A to B traverses, in reverse, the forward path B -> A.
        fwd = plan_path(goal, start, FORWARD, constraint)
        return tuple(_reverse_segment(seg) for seg in reversed(fwd))

    r = constraint.min_radius
    th0 = math.radians(90.0 - start.heading)
    th1 = math.radians(90.0 - goal.heading)
    dx, dy = goal.x - start.x, goal.y - start.y
    d = math.hypot(dx, dy) / r
    phi = math.atan2(dy, dx)
    a, b = _mod2pi(th0 - phi), _mod2pi(th1 - phi)

    best = None
    best_key = None
    for word, fn in _CANDIDATES:
        res = fn(a, b, d)
        if res is None:
            continue
        t, p, q = res
        length = r * (t + q) + r * p
        nseg = sum(1 for v in (t * r, p * r, q * r) if v > _EPS_LEN)
        right_rank = 0 if word[0] == "R" else 1
        key = (length, right_rank, nseg)
        if best_key is None or key < best_key:
            best_key = key
            best = (word, t, p, q)
    if best is None:
        raise PlanningError(
            f"no feasible CSC path from ({start.x:.3f}, {start.y:.3f}, {start.heading:.3f}) "
            f"to ({goal.x:.3f}, {goal.y:.3f}, {goal.heading:.3f}) with radius {r}")
    word, t, p, q = best
    return tuple(_build_forward(start, r, word, t, p, q))
