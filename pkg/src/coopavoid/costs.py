"""Cost terms for reference-free trajectory optimisation.

The total cost of a candidate trajectory is the arithmetic sum of the enabled
terms, evaluated against the predictions of non-cooperating vehicles and the
broadcast planned/desired trajectories of cooperating peers.  There is no
reference trajectory: lane keeping, progress and comfort preferences all live
here as soft terms, and actuation limits appear as a single large fixed
penalty rather than hard constraints.

Term catalogue
--------------
- overlap: running-max of reciprocal squared centre separation per peer,
  gated by straight-line and lateral cutoffs so ordinary side-by-side
  driving is free.
- collision: kinetic-energy-flavoured penalty added once per peer if the
  inflated footprints ever overlap at matched times.
- long_jerk / lat_jerk: squared applied control changes per prediction step.
- forward_accel: accelerating in the direction of travel ("accelerating out
  of trouble") is penalised; braking is free.
- progress: penalises decreasing rate of change of x (second finite
  difference), so giving up forward progress costs something.
- lane_keep: squared distance to the nearest lane centre, no preferred lane.
- road_keep: squared excess beyond the widthwise road band.
- constraint_penalty: fixed cost if any actuation limit is broken.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .geometry import Road
from .vehicle import ConstraintLimits, ControlSequence, Trajectory, constraint_violated

#: Planned cost below which a vehicle is deemed to need no help (guards the
#: importance ratio against division by ~zero).
COST_EPSILON = 1e-6


class PeerKind(enum.Enum):
    """How a peer trajectory should be weighted against a candidate."""

    HDV_PREDICTED = "hdv_predicted"
    MEV_PLANNED = "mev_planned"
    MEV_DESIRED = "mev_desired"


@dataclass(frozen=True)
class WeightSet:
    """Every cost-term weight, threshold and cutoff: the tuning surface.

    Defaults form the shipped "default" profile, tuned for the built-in
    scenarios; they are configuration, not contract.
    """

    w_overlap_hdv: float = 120.0
    w_overlap_planned: float = 100.0
    w_overlap_desired: float = 10.0
    w_collision_hdv: float = 100.0
    w_collision_mev: float = 50.0
    w_long_jerk: float = 0.05
    w_forward_accel: float = 0.1
    w_lat_jerk: float = 0.05
    w_progress: float = 1.0
    w_lane: float = 1.0
    w_road: float = 200.0
    w_constraint_penalty: float = 1e7
    w_halting: float = 1.0
    overlap_epsilon: float = 0.1  # m, floor on separation before reciprocal
    overlap_range_cutoff: float = 30.0  # m straight-line
    overlap_lateral_cutoff: float = 2.0  # m across lanes
    collision_inflation: float = 0.25  # m, planning only; scoring uses 0

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if v < 0.0:
                raise ValueError(f"{f.name} must be >= 0")
        if self.overlap_epsilon <= 0.0:
            raise ValueError("overlap_epsilon must be positive")
        if self.w_collision_mev > self.w_collision_hdv:
            raise ValueError("w_collision_mev must not exceed w_collision_hdv")

    def replace(self, **changes: float) -> "WeightSet":
        from dataclasses import replace as _replace

        return _replace(self, **changes)

    def zero_collision(self) -> "WeightSet":
        """Copy with both collision weights zeroed (overlap still active)."""
        return self.replace(w_collision_hdv=0.0, w_collision_mev=0.0)

    def as_dict(self) -> Dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


#: Named weight profiles selectable from the CLI and session service.
WEIGHT_PROFILES: Dict[str, WeightSet] = {
    "default": WeightSet(),
    "zero-collision": WeightSet().zero_collision(),
}


@dataclass(frozen=True)
class CostBreakdown:
    """Per-term costs of one candidate evaluation; total is their sum."""

    overlap_hdv: float = 0.0
    overlap_planned: float = 0.0
    overlap_desired: float = 0.0
    collision_hdv: float = 0.0
    collision_mev: float = 0.0
    long_jerk: float = 0.0
    forward_accel: float = 0.0
    lat_jerk: float = 0.0
    progress: float = 0.0
    lane_keep: float = 0.0
    road_keep: float = 0.0
    constraint_penalty: float = 0.0
    total: float = field(init=False, default=0.0)

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "total",
            self.overlap_hdv
            + self.overlap_planned
            + self.overlap_desired
            + self.collision_hdv
            + self.collision_mev
            + self.long_jerk
            + self.forward_accel
            + self.lat_jerk
            + self.progress
            + self.lane_keep
            + self.road_keep
            + self.constraint_penalty,
        )

    def as_dict(self) -> Dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _check_matched(a: Trajectory, b: Trajectory) -> int:
    if a.dt != b.dt:
        raise ValueError(
            f"trajectory dt mismatch ({a.dt} vs {b.dt}); peers must share the "
            "candidate's prediction timestep"
        )
    return min(len(a), len(b))


def overlap_cost(a: Trajectory, b: Trajectory, w: float, ws: WeightSet) -> float:
    """Running-max reciprocal-squared-separation cost between two trajectories.

    At each time-matched index the reciprocal of the squared centre distance
    (floored at ``overlap_epsilon``) is folded into a running maximum, so a
    single close approach keeps dominating the remaining horizon instead of
    being diluted by distant points.  Points beyond the straight-line or
    lateral cutoff contribute nothing and do not enter (or reset) the running
    maximum.
    """
    n = _check_matched(a, b)
    if w == 0.0:
        return 0.0
    dx = b.x[:n] - a.x[:n]
    dy = b.y[:n] - a.y[:n]
    d2 = dx * dx + dy * dy
    in_range = (d2 <= ws.overlap_range_cutoff**2) & (
        np.abs(dy) <= ws.overlap_lateral_cutoff
    )
    if not in_range.any():
        return 0.0
    d = np.maximum(np.sqrt(d2), ws.overlap_epsilon)
    recip = np.where(in_range, 1.0 / (d * d), 0.0)
    running = np.maximum.accumulate(recip)
    return w * float(np.sum(running[in_range]))


def _overlap_mask(
    a: Trajectory, b: Trajectory, n: int, inflation: float
) -> np.ndarray:
    """Boolean mask of time-matched indices where inflated footprints overlap.

    Vectorised separating-axis test; agrees with geometry.boxes_overlap.
    """
    hla = (a.footprint.length + inflation) / 2.0
    hwa = (a.footprint.width + inflation) / 2.0
    hlb = (b.footprint.length + inflation) / 2.0
    hwb = (b.footprint.width + inflation) / 2.0

    dx = b.x[:n] - a.x[:n]
    dy = b.y[:n] - a.y[:n]

    # Cheap reject: beyond summed half-diagonals no contact is possible.
    reach = np.hypot(hla, hwa) + np.hypot(hlb, hwb)
    near = dx * dx + dy * dy <= reach * reach
    if not near.any():
        return near

    ca, sa = np.cos(a.heading[:n]), np.sin(a.heading[:n])
    cb, sb = np.cos(b.heading[:n]), np.sin(b.heading[:n])
    overlap = near.copy()
    for nx, ny in ((ca, sa), (-sa, ca), (cb, sb), (-sb, cb)):
        ra = hla * np.abs(ca * nx + sa * ny) + hwa * np.abs(-sa * nx + ca * ny)
        rb = hlb * np.abs(cb * nx + sb * ny) + hwb * np.abs(-sb * nx + cb * ny)
        overlap &= np.abs(dx * nx + dy * ny) <= ra + rb
    return overlap


def collision_severity(
    speed_a: float, heading_a: float, speed_b: float, heading_b: float
) -> float:
    """Unweighted collision severity: |v_A - v_B|^2 + v_min^2 / 4.

    The relative speed is the magnitude of the 2-D velocity difference and
    v_min is the scalar speed of the slower vehicle, so a matched-speed
    side-swipe prices far below a head-on into a stationary obstacle.
    """
    vax, vay = speed_a * np.cos(heading_a), speed_a * np.sin(heading_a)
    vbx, vby = speed_b * np.cos(heading_b), speed_b * np.sin(heading_b)
    rel2 = (vax - vbx) ** 2 + (vay - vby) ** 2
    vmin = min(abs(speed_a), abs(speed_b))
    return float(rel2 + vmin * vmin / 4.0)


def collision_cost(a: Trajectory, b: Trajectory, w: float, inflation: float) -> float:
    """Severity-weighted cost, added once, if footprints ever overlap.

    Only the first overlapping time-matched index contributes; its speeds and
    headings feed :func:`collision_severity`.
    """
    n = _check_matched(a, b)
    if w == 0.0:
        return 0.0
    mask = _overlap_mask(a, b, n, inflation)
    if not mask.any():
        return 0.0
    i = int(np.argmax(mask))
    return w * collision_severity(
        float(a.speed[i]), float(a.heading[i]), float(b.speed[i]), float(b.heading[i])
    )


def desired_importance(c_desired: float, c_planned: float) -> float:
    """Broadcast factor K = 1 - c_desired / c_planned, clamped to [0, 1].

    A vehicle whose plan is barely worse than its desire needs little help;
    one whose plan is catastrophically worse broadcasts K near 1.  A planned
    cost below ``COST_EPSILON`` means no help is needed at all (K = 0), which
    also dodges the undefined ratio at zero.
    """
    if c_planned < COST_EPSILON:
        return 0.0
    return min(1.0, max(0.0, 1.0 - c_desired / c_planned))


def long_jerk_cost(applied_per_step: np.ndarray, w: float) -> float:
    """Sum of squared applied longitudinal jerk values, one per step."""
    a = np.asarray(applied_per_step, dtype=float)
    return w * float(np.sum(a * a))


def lat_jerk_cost(applied_per_step: np.ndarray, w: float) -> float:
    """Sum of squared applied steering-change values, one per step."""
    a = np.asarray(applied_per_step, dtype=float)
    return w * float(np.sum(a * a))


def forward_accel_cost(traj: Trajectory, w: float) -> float:
    """Penalise acceleration in the direction of travel.

    Indices where acceleration opposes travel (braking while moving forwards)
    contribute zero.
    """
    prod = traj.accel * traj.speed
    return w * float(np.sum(np.maximum(prod, 0.0)))


def progress_cost(traj: Trajectory, w: float) -> float:
    """Penalise decreasing rate of change of x along the trajectory.

    Uses the squared negative part of the second finite difference of x
    (scaled to m/s^2); positive x-acceleration is free.
    """
    if len(traj) < 3:
        return 0.0
    xdd = np.diff(traj.x, 2) / (traj.dt * traj.dt)
    neg = np.minimum(xdd, 0.0)
    return w * float(np.sum(neg * neg))


def lane_keep_cost(traj: Trajectory, road: Road, w: float) -> float:
    """Sum of squared distances to the nearest lane centre; no preferred lane."""
    u = (traj.y - road.origin_y) / road.lane_width - 0.5
    k = np.clip(np.ceil(u - 0.5), 0, road.lane_count - 1)
    off = road.origin_y + (k + 0.5) * road.lane_width - traj.y
    return w * float(np.sum(off * off))


def road_keep_cost(traj: Trajectory, road: Road, w: float) -> float:
    """Sum of squared excesses beyond the widthwise road band.

    Width-only: the band is where a straight-ahead footprint just touches the
    boundary, so rotation can poke corners out at zero cost.
    """
    half_w = traj.footprint.width / 2.0
    lo = road.origin_y + half_w
    hi = road.origin_y + road.width - half_w
    excess = np.maximum(lo - traj.y, 0.0) + np.maximum(traj.y - hi, 0.0)
    return w * float(np.sum(excess * excess))


def constraint_cost(traj: Trajectory, limits: ConstraintLimits, penalty: float) -> float:
    """Fixed penalty, added once, if any actuation limit is violated."""
    return penalty if constraint_violated(traj, limits) else 0.0


#: Peer entry for total_cost: trajectory, how to weight it, and the
#: originating vehicle's broadcast importance (used for MEV_DESIRED only).
Peer = Tuple[Trajectory, PeerKind, float]


def total_cost(
    candidate: Trajectory,
    controls: Optional[ControlSequence],
    peers: Iterable[Peer],
    road: Road,
    weights: WeightSet,
    limits: ConstraintLimits,
) -> CostBreakdown:
    """Arithmetic sum of every enabled term for one candidate trajectory.

    Peer kinds select the overlap/collision weights: predictions of
    non-cooperating vehicles use the HDV weights, peers' planned trajectories
    the strong planned weights, and peers' desired trajectories the weak
    desired weights scaled by each peer's broadcast importance.  A peer with
    a different prediction timestep is a scenario misconfiguration and raises.
    """
    o_hdv = o_planned = o_desired = c_hdv = c_mev = 0.0
    for traj, kind, importance in peers:
        if kind is PeerKind.HDV_PREDICTED:
            o_hdv += overlap_cost(candidate, traj, weights.w_overlap_hdv, weights)
            c_hdv += collision_cost(
                candidate, traj, weights.w_collision_hdv, weights.collision_inflation
            )
        elif kind is PeerKind.MEV_PLANNED:
            o_planned += overlap_cost(
                candidate, traj, weights.w_overlap_planned, weights
            )
            c_mev += collision_cost(
                candidate, traj, weights.w_collision_mev, weights.collision_inflation
            )
        elif kind is PeerKind.MEV_DESIRED:
            o_desired += overlap_cost(
                candidate, traj, weights.w_overlap_desired * importance, weights
            )
            c_mev += collision_cost(
                candidate,
                traj,
                weights.w_collision_mev * importance,
                weights.collision_inflation,
            )
        else:  # pragma: no cover - exhaustive enum
            raise ValueError(f"unknown peer kind {kind!r}")

    if controls is not None:
        ca, cs = controls.per_step()
    else:
        ca = cs = np.zeros(0)

    return CostBreakdown(
        overlap_hdv=o_hdv,
        overlap_planned=o_planned,
        overlap_desired=o_desired,
        collision_hdv=c_hdv,
        collision_mev=c_mev,
        long_jerk=long_jerk_cost(ca, weights.w_long_jerk),
        forward_accel=forward_accel_cost(candidate, weights.w_forward_accel),
        lat_jerk=lat_jerk_cost(cs, weights.w_lat_jerk),
        progress=progress_cost(candidate, weights.w_progress),
        lane_keep=lane_keep_cost(candidate, road, weights.w_lane),
        road_keep=road_keep_cost(candidate, road, weights.w_road),
        constraint_penalty=constraint_cost(
            candidate, limits, weights.w_constraint_penalty
        ),
    )
