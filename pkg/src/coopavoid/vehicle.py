"""Point-kinematic vehicle state, decimated controls and forward rollout.

The vehicle is a centre point with heading, speed, yaw rate and longitudinal
acceleration.  Control free variables are the *rates of change* of
acceleration (longitudinal jerk) and of yaw rate (steering change), held
constant over ``decimator`` prediction steps each.  Propagation is explicit
Euler with a fixed update order so that repeated runs are bit-identical:

    accel    += accel_rate * dt
    yaw_rate += yaw_rate_rate * dt
    speed    += accel * dt
    heading  += yaw_rate * dt
    x        += speed * cos(heading) * dt
    y        += speed * sin(heading) * dt

Speed is deliberately *not* clamped at zero here; infeasible candidates are
priced by the constraint cost instead so the optimiser keeps a usable cost
surface.  The simulation engine clamps the committed state separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np


@dataclass(frozen=True)
class VehicleState:
    """Pose and motion of one vehicle at one instant."""

    x: float  # m
    y: float  # m
    heading: float  # rad, 0 = +x
    speed: float  # m/s
    yaw_rate: float = 0.0  # rad/s
    accel: float = 0.0  # m/s^2

    def __post_init__(self) -> None:
        for name in ("x", "y", "heading", "speed", "yaw_rate", "accel"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class Footprint:
    """Rectangular plan-view extent of a vehicle."""

    length: float = 4.0  # m
    width: float = 1.8  # m

    def __post_init__(self) -> None:
        if self.length <= 0.0 or self.width <= 0.0:
            raise ValueError("footprint extents must be positive")


@dataclass(frozen=True)
class ConstraintLimits:
    """Soft actuation limits; violations are costed, never rejected."""

    max_accel: float = 2.0  # m/s^2 forwards
    max_decel: float = 10.0  # m/s^2 braking (positive magnitude)
    min_speed: float = 0.0  # m/s
    max_yaw_rate: float = 5.0  # rad/s

    def __post_init__(self) -> None:
        if self.max_accel <= 0 or self.max_decel <= 0 or self.max_yaw_rate <= 0:
            raise ValueError("limits must be positive")


def control_slot_count(horizon_steps: int, decimator: int) -> int:
    """Number of control slots covering ``horizon_steps`` prediction steps."""
    if horizon_steps < 1 or decimator < 1:
        raise ValueError("horizon_steps and decimator must be >= 1")
    return -(-horizon_steps // decimator)


def control_slot_index(step: int, decimator: int) -> int:
    """Slot holding the control value applied at prediction step ``step``."""
    if step < 0 or decimator < 1:
        raise ValueError("step must be >= 0 and decimator >= 1")
    return step // decimator


@dataclass(frozen=True)
class ControlSequence:
    """Decimated (longitudinal jerk, steering change) free variables.

    ``accel_rate`` and ``yaw_rate_rate`` hold one value per control slot; the
    value of slot ``i`` is applied at prediction steps
    ``i*decimator .. (i+1)*decimator - 1``.
    """

    accel_rate: np.ndarray  # m/s^3 per slot
    yaw_rate_rate: np.ndarray  # rad/s^2 per slot
    decimator: int
    dt: float  # s
    horizon_steps: int

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        slots = control_slot_count(self.horizon_steps, self.decimator)
        ar = np.asarray(self.accel_rate, dtype=float)
        yr = np.asarray(self.yaw_rate_rate, dtype=float)
        if ar.shape != (slots,) or yr.shape != (slots,):
            raise ValueError(
                f"control lists must have {slots} slots for horizon "
                f"{self.horizon_steps} with decimator {self.decimator}"
            )
        ar.setflags(write=False)
        yr.setflags(write=False)
        object.__setattr__(self, "accel_rate", ar)
        object.__setattr__(self, "yaw_rate_rate", yr)

    @property
    def slots(self) -> int:
        return self.accel_rate.shape[0]

    def per_step(self) -> Tuple[np.ndarray, np.ndarray]:
        """Applied per-prediction-step values, each slot held ``decimator`` steps."""
        ca = np.repeat(self.accel_rate, self.decimator)[: self.horizon_steps]
        cs = np.repeat(self.yaw_rate_rate, self.decimator)[: self.horizon_steps]
        return ca, cs

    def to_vector(self) -> np.ndarray:
        """Flat free-variable vector: accel slots then steering slots."""
        return np.concatenate([self.accel_rate, self.yaw_rate_rate])

    @classmethod
    def from_vector(
        cls, vec: np.ndarray, horizon_steps: int, decimator: int, dt: float
    ) -> "ControlSequence":
        slots = control_slot_count(horizon_steps, decimator)
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (2 * slots,):
            raise ValueError(f"expected vector of length {2 * slots}")
        return cls(vec[:slots].copy(), vec[slots:].copy(), decimator, dt, horizon_steps)

    @classmethod
    def zeros(cls, horizon_steps: int, decimator: int, dt: float) -> "ControlSequence":
        slots = control_slot_count(horizon_steps, decimator)
        return cls(np.zeros(slots), np.zeros(slots), decimator, dt, horizon_steps)


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed predicted states at a uniform timestep.

    Index i is the state i*dt after "now"; index 0 is the initial state.
    Arrays are read-only so trajectories can be shared across planners.
    """

    x: np.ndarray
    y: np.ndarray
    heading: np.ndarray
    speed: np.ndarray
    yaw_rate: np.ndarray
    accel: np.ndarray
    dt: float
    footprint: Footprint

    def __post_init__(self) -> None:
        n = self.x.shape[0]
        if n < 1:
            raise ValueError("trajectory must contain at least one state")
        for name in ("x", "y", "heading", "speed", "yaw_rate", "accel"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (n,):
                raise ValueError("trajectory arrays must share one length")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")

    def __len__(self) -> int:
        return self.x.shape[0]

    def state(self, i: int) -> VehicleState:
        return VehicleState(
            x=float(self.x[i]),
            y=float(self.y[i]),
            heading=float(self.heading[i]),
            speed=float(self.speed[i]),
            yaw_rate=float(self.yaw_rate[i]),
            accel=float(self.accel[i]),
        )

    @property
    def states(self) -> List[VehicleState]:
        return [self.state(i) for i in range(len(self))]

    @classmethod
    def from_states(
        cls, states: List[VehicleState], dt: float, footprint: Footprint
    ) -> "Trajectory":
        return cls(
            x=np.array([s.x for s in states]),
            y=np.array([s.y for s in states]),
            heading=np.array([s.heading for s in states]),
            speed=np.array([s.speed for s in states]),
            yaw_rate=np.array([s.yaw_rate for s in states]),
            accel=np.array([s.accel for s in states]),
            dt=dt,
            footprint=footprint,
        )


def propagate(
    initial: VehicleState, controls: ControlSequence, footprint: Footprint
) -> Trajectory:
    """Roll the kinematic model forward under ``controls``.

    Returns ``horizon_steps + 1`` states including ``initial`` at index 0.
    Constraint violations (negative speed, excessive accel) are allowed here
    and priced later.
    """
    ca, cs = controls.per_step()
    dt = controls.dt
    accel = initial.accel + dt * np.cumsum(ca)
    yaw_rate = initial.yaw_rate + dt * np.cumsum(cs)
    speed = initial.speed + dt * np.cumsum(accel)
    heading = initial.heading + dt * np.cumsum(yaw_rate)
    x = initial.x + dt * np.cumsum(speed * np.cos(heading))
    y = initial.y + dt * np.cumsum(speed * np.sin(heading))
    return Trajectory(
        x=np.concatenate(([initial.x], x)),
        y=np.concatenate(([initial.y], y)),
        heading=np.concatenate(([initial.heading], heading)),
        speed=np.concatenate(([initial.speed], speed)),
        yaw_rate=np.concatenate(([initial.yaw_rate], yaw_rate)),
        accel=np.concatenate(([initial.accel], accel)),
        dt=dt,
        footprint=footprint,
    )


def constraint_violated(traj: Trajectory, limits: ConstraintLimits) -> bool:
    """True iff any state breaks an actuation limit (limits are inclusive)."""
    return bool(
        np.any(traj.accel > limits.max_accel)
        or np.any(traj.accel < -limits.max_decel)
        or np.any(traj.speed < limits.min_speed)
        or np.any(np.abs(traj.yaw_rate) > limits.max_yaw_rate)
    )
