"""Door, push-carrier and battery models plus the fault catalog.

The carrier is a servo-speed-limited kinematic stage: the rack moves at
the no-load rack speed whenever the effective tangential force covers
the payload load (friction plus the sizing acceleration), and stalls at
stall current otherwise.  Matching the go/no-go threshold to the sizing
chain keeps the stall boundary exactly at the computed payload limit.

The bay door is passive once unlocked: a linear actuator retracts the
lock rod over a fixed travel time, then the door swings open at a
constant rate.  A jammed door keeps the rod motion but never swings.
"""

import math
from dataclasses import dataclass, replace

from .errors import ContractViolationError, ParameterError
from .mechanism import MechanismParams, required_acceleration, tangential_force


@dataclass(frozen=True)
class ServoSpec:
    """Drive servo datasheet figures (6 V column)."""

    stall_torque: float = 0.98          # N*m
    rated_speed: float = 1.0            # rev/s (60 RPM)
    running_current_min: float = 0.5    # A
    running_current_max: float = 0.9    # A
    stall_current: float = 2.0          # A
    operating_voltage: float = 6.0      # V

    def __post_init__(self) -> None:
        for name in ("stall_torque", "rated_speed", "stall_current",
                     "operating_voltage"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ParameterError(f"{name} must be > 0, got {value!r}")
        if not (0.0 <= self.running_current_min
                <= self.running_current_max <= self.stall_current):
            raise ParameterError("running currents must satisfy 0 <= min <= "
                                 "max <= stall_current")


def rack_speed(servo: ServoSpec, pitch_diameter: float) -> float:
    """No-load linear rack speed: rev/s times pitch circumference."""
    if pitch_diameter <= 0.0 or not math.isfinite(pitch_diameter):
        raise ParameterError(f"pitch_diameter must be > 0, "
                             f"got {pitch_diameter!r}")
    return servo.rated_speed * math.pi * pitch_diameter


@dataclass(frozen=True)
class DoorSpec:
    """Bay door geometry and actuator timing."""

    rod_travel_time: float = 0.5            # s to retract the lock rod
    open_time: float = 0.3                  # s from closed to fully open
    max_open: float = math.pi / 2           # rad
    open_threshold: float = math.radians(85.0)  # rad counted as "open"
    actuator_current: float = 0.5           # A while the rod moves

    def __post_init__(self) -> None:
        for name in ("rod_travel_time", "open_time", "max_open",
                     "open_threshold"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ParameterError(f"{name} must be > 0, got {value!r}")
        if self.open_threshold > self.max_open:
            raise ParameterError("open_threshold cannot exceed max_open")
        if self.actuator_current < 0.0:
            raise ParameterError("actuator_current must be >= 0")


@dataclass(frozen=True)
class FaultPlan:
    """Injected failures; at most one of each kind per mission.

    gear_slip_push models a misassembled gear mesh: from push number
    `gear_slip_push` onward the rack still cycles but transmits nothing.
    link_break_force breaks the pusher linkage permanently the first
    time its load exceeds the threshold.
    """

    gear_slip_push: int | None = None       # 1-based push number
    link_break_force: float | None = None   # N
    surface_friction_scale: float = 1.0     # multiplier on mu
    battery_fail_time: float | None = None  # s, mission clock
    door_jam: bool = False

    def __post_init__(self) -> None:
        if self.gear_slip_push is not None and self.gear_slip_push < 1:
            raise ParameterError("gear_slip_push counts from 1")
        if self.link_break_force is not None and self.link_break_force < 0.0:
            raise ParameterError("link_break_force must be >= 0")
        if (not math.isfinite(self.surface_friction_scale)
                or self.surface_friction_scale < 0.0):
            raise ParameterError("surface_friction_scale must be >= 0")
        if self.battery_fail_time is not None and self.battery_fail_time < 0.0:
            raise ParameterError("battery_fail_time must be >= 0")


NO_FAULTS = FaultPlan()


@dataclass(slots=True)
class DoorState:
    locked: bool = True
    rod_extended: bool = True
    rod_travel: float = 1.0     # fraction of lock-rod travel remaining
    angle: float = 0.0          # rad
    open: bool = False


@dataclass(slots=True)
class CarrierState:
    rack_extension: float = 0.0         # m, 0 = retracted
    pushing: bool = False               # a push cycle is in progress
    retracting: bool = False            # second half of the cycle
    push_count: int = 0                 # completed extensions
    payload_displacement: float = 0.0   # m, cumulative motion transmitted
    link_broken: bool = False
    slipped: bool = False               # a gear slip has occurred
    stalled: bool = False               # currently force-limited


@dataclass(slots=True)
class BatteryState:
    voltage: float = 7.4        # V (2S pack)
    charge: float = 7920.0      # C (2.2 Ah)
    failed: bool = False


def command_unlock(door: DoorState, battery: BatteryState, spec: DoorSpec,
                   dt: float, faults: FaultPlan = NO_FAULTS) -> DoorState:
    """Step the lock-rod retraction.  No-op on a dead battery or once
    the rod is already retracted.  A door jam does not stop the rod."""
    if battery.failed or not door.rod_extended:
        return door
    travel = door.rod_travel - dt / spec.rod_travel_time
    if travel <= 0.0:
        return replace(door, rod_travel=0.0, rod_extended=False, locked=False)
    return replace(door, rod_travel=travel)


def step_door(door: DoorState, spec: DoorSpec, drag_torque_proxy: float,
              dt: float, faults: FaultPlan = NO_FAULTS) -> DoorState:
    """Swing the door toward full open at a constant rate.

    `drag_torque_proxy` is accepted for interface stability; the
    constant-rate model does not use it.  The door is unpowered, so it
    keeps opening even after a battery failure.
    """
    if door.locked or faults.door_jam or door.angle >= spec.max_open:
        return door
    angle = min(door.angle + spec.max_open / spec.open_time * dt,
                spec.max_open)
    return replace(door, angle=angle, open=angle >= spec.open_threshold)


def begin_push(carrier: CarrierState, door_open: bool) -> CarrierState:
    """Start one extend-retract push cycle.

    Raises ContractViolationError if the door is not open: the carrier
    must never drive the payload into a closed door.
    """
    if not door_open:
        raise ContractViolationError("push commanded while the door is not "
                                     "open")
    if carrier.pushing:
        return carrier
    return replace(carrier, pushing=True, retracting=False)


def halt_carrier(carrier: CarrierState) -> CarrierState:
    """De-energize the drive: the rack holds position, the cycle aborts."""
    if not (carrier.pushing or carrier.retracting or carrier.stalled):
        return carrier
    return replace(carrier, pushing=False, retracting=False, stalled=False)


def step_carrier(carrier: CarrierState, servo: ServoSpec, payload_mass: float,
                 params: MechanismParams, faults: FaultPlan, dt: float,
                 powered: bool = True) -> tuple[CarrierState, float, float]:
    """Advance the carrier one step.

    Returns (state, payload displacement gained this step in m, current
    draw in A).  Idle or unpowered carriers draw nothing and do not
    move.  Extension against a load the servo cannot overcome holds the
    rack still at stall current.
    """
    if not carrier.pushing or not powered:
        return carrier, 0.0, 0.0
    if payload_mass < 0.0 or not math.isfinite(payload_mass):
        raise ParameterError(f"payload_mass must be >= 0, got {payload_mass!r}")

    speed = rack_speed(servo, params.pinion_pitch_diameter)

    if carrier.retracting:
        extension = carrier.rack_extension - speed * dt
        if extension <= 0.0:
            new = replace(carrier, rack_extension=0.0, pushing=False,
                          retracting=False)
        else:
            new = replace(carrier, rack_extension=extension)
        return new, 0.0, servo.running_current_max

    # Extending against the payload: static go/no-go force check.  The
    # load includes the sizing acceleration so the stall boundary sits
    # exactly at the computed payload limit.
    mu_eff = params.friction_coefficient * faults.surface_friction_scale
    accel = required_acceleration(params.stroke, 0.0,
                                  params.deployment_time_budget)
    load = payload_mass * (mu_eff * params.gravity + accel)
    drive = tangential_force(params.servo_stall_torque,
                             params.pinion_pitch_diameter,
                             params.drivetrain_efficiency)
    if drive < load:
        if not carrier.stalled:
            carrier = replace(carrier, stalled=True)
        return carrier, 0.0, servo.stall_current

    link_broken = carrier.link_broken
    if (not link_broken and faults.link_break_force is not None
            and load > faults.link_break_force):
        link_broken = True

    push_number = carrier.push_count + 1
    slipping = (faults.gear_slip_push is not None
                and push_number >= faults.gear_slip_push)

    advance = min(speed * dt, params.stroke - carrier.rack_extension)
    extension = carrier.rack_extension + advance
    transmitted = 0.0
    if not link_broken and not slipping:
        # Contact is lost once the payload has travelled the full stroke.
        transmitted = min(advance,
                          params.stroke - carrier.payload_displacement)
        if transmitted < 0.0:
            transmitted = 0.0

    displacement = carrier.payload_displacement + transmitted
    if extension >= params.stroke:
        new = replace(carrier, rack_extension=params.stroke,
                      push_count=carrier.push_count + 1, retracting=True,
                      payload_displacement=displacement,
                      link_broken=link_broken,
                      slipped=carrier.slipped or slipping, stalled=False)
    else:
        new = replace(carrier, rack_extension=extension,
                      payload_displacement=displacement,
                      link_broken=link_broken,
                      slipped=carrier.slipped or slipping, stalled=False)
    return new, transmitted, servo.running_current_max


def ejection_complete(carrier: CarrierState, cumulative_displacement: float,
                      params: MechanismParams) -> bool:
    """True once the payload has been pushed the full stroke."""
    return cumulative_displacement >= params.stroke


def drain_battery(battery: BatteryState, current: float, dt: float,
                  now: float = 0.0,
                  faults: FaultPlan = NO_FAULTS) -> BatteryState:
    """Coulomb-count the pack and apply scheduled failures.

    Voltage steps to zero when the charge runs out or the failure time
    passes; a failed pack stays failed.
    """
    if battery.failed:
        return battery
    if (faults.battery_fail_time is not None
            and now >= faults.battery_fail_time):
        return replace(battery, voltage=0.0, failed=True)
    if current < 0.0 or not math.isfinite(current):
        raise ParameterError(f"current must be >= 0, got {current!r}")
    if current == 0.0:
        return battery
    charge = battery.charge - current * dt
    if charge <= 0.0:
        return replace(battery, charge=0.0, voltage=0.0, failed=True)
    return replace(battery, charge=charge)
