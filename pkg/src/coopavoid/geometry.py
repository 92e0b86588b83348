"""Straight multi-lane road model and oriented-rectangle geometry.

Lanes are indexed from the right road edge (lane 0 is rightmost); lane k's
centre line sits at ``origin_y + (k + 0.5) * lane_width``.  Rectangle overlap
uses a separating-axis test over the four edge normals of the two boxes, which
is exact for convex rectangles.  All functions here are pure and safe to call
from concurrent planners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Road:
    """Straight road running along +x with ``lane_count`` parallel lanes."""

    lane_count: int
    lane_width: float  # m
    length: float  # m
    origin_y: float = 0.0  # y of the right road edge, m

    def __post_init__(self) -> None:
        if self.lane_count < 1:
            raise ValueError("lane_count must be >= 1")
        if self.lane_width <= 0.0:
            raise ValueError("lane_width must be positive")

    @property
    def width(self) -> float:
        """Total paved width in metres."""
        return self.lane_count * self.lane_width

    def lane_centre(self, lane: int) -> float:
        """y coordinate of the centre of 0-based lane index ``lane``."""
        return self.origin_y + (lane + 0.5) * self.lane_width


@dataclass(frozen=True)
class OrientedBox:
    """Rectangle with centre position, heading (0 = +x) and full extents."""

    cx: float
    cy: float
    heading: float  # rad
    length: float  # m, along heading
    width: float  # m, across heading

    def __post_init__(self) -> None:
        if self.length <= 0.0 or self.width <= 0.0:
            raise ValueError("box extents must be positive")


def nearest_lane_index(y: float, road: Road) -> int:
    """0-based index of the lane whose centre is closest to ``y``.

    The exact midpoint between two centres ties to the lower index.  Off-road
    positions clamp to the outermost lane.
    """
    u = (y - road.origin_y) / road.lane_width - 0.5  # continuous lane coordinate
    k = math.ceil(u - 0.5)  # nearest integer, ties resolved downward
    return min(max(k, 0), road.lane_count - 1)


def nearest_lane_centre_offset(y: float, road: Road) -> float:
    """Signed distance from ``y`` to the closest lane centre (centre minus y).

    Defined for any y, including off-road; magnitude is at most half a lane
    width while y is within the road.
    """
    return road.lane_centre(nearest_lane_index(y, road)) - y


def road_boundary_excess(box: OrientedBox, road: Road) -> float:
    """Distance by which the box centre's y leaves the allowed lateral band.

    The band is where a straight-ahead box just touches the road edges; only
    the box width matters, orientation is deliberately ignored, so a rotated
    box may poke its corners over the boundary at zero excess.
    """
    lo = road.origin_y + box.width / 2.0
    hi = road.origin_y + road.width - box.width / 2.0
    if box.cy < lo:
        return lo - box.cy
    if box.cy > hi:
        return box.cy - hi
    return 0.0


def boxes_overlap(a: OrientedBox, b: OrientedBox, inflation: float = 0.0) -> bool:
    """True iff the two rectangles intersect once inflated; touching counts.

    ``inflation`` is added to each box's length and width.  Separating-axis
    test: the boxes are disjoint iff some edge normal of either box separates
    the projected intervals.
    """
    if inflation < 0.0:
        raise ValueError("inflation must be >= 0")
    hla = (a.length + inflation) / 2.0
    hwa = (a.width + inflation) / 2.0
    hlb = (b.length + inflation) / 2.0
    hwb = (b.width + inflation) / 2.0

    ca, sa = math.cos(a.heading), math.sin(a.heading)
    cb, sb = math.cos(b.heading), math.sin(b.heading)
    dx = b.cx - a.cx
    dy = b.cy - a.cy

    # Unit axes of each box: (u = along heading, v = across heading).
    axes = ((ca, sa), (-sa, ca), (cb, sb), (-sb, cb))
    for nx, ny in axes:
        ra = hla * abs(ca * nx + sa * ny) + hwa * abs(-sa * nx + ca * ny)
        rb = hlb * abs(cb * nx + sb * ny) + hwb * abs(-sb * nx + cb * ny)
        if abs(dx * nx + dy * ny) > ra + rb:
            return False
    return True
