"""Deployment sequencing: trigger logic, state machine, task schedule.

The controller sees only sensed altitude (with whatever noise, latency
and quantization the barometer added); ground truth never enters a
decision.  It runs as cooperative tasks on the shared logical clock, so
every decision lands on a deploy-logic tick and replays identically for
a given scenario and seed.

Sequence: Locked -> AwaitWindow -> Unlocking -> DoorOpenWait ->
StabilizeDelay -> Push(1..3) -> Ejected, with SafeHold as the absorbing
abort state.  SafeHold never retries and never commands anything.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .actuation import (BatteryState, CarrierState, DoorState, ServoSpec,
                        ejection_complete, rack_speed)
from .errors import ParameterError
from .flight import FlightState
from .mechanism import MechanismParams

# Settle time between the door reading open and the first push.
STABILIZE_DWELL_S = 2.0

_TIME_EPS = 1e-9


class DeployPhase(enum.Enum):
    LOCKED = "Locked"
    AWAIT_WINDOW = "AwaitWindow"
    UNLOCKING = "Unlocking"
    DOOR_OPEN_WAIT = "DoorOpenWait"
    STABILIZE_DELAY = "StabilizeDelay"
    PUSH_1 = "Push(1)"
    PUSH_2 = "Push(2)"
    PUSH_3 = "Push(3)"
    EJECTED = "Ejected"
    SAFE_HOLD = "SafeHold"


# Nominal progression order; used by tests to assert monotonicity.
PHASE_ORDER = {phase: index for index, phase in enumerate(DeployPhase)}
_PUSH_INDEX = {DeployPhase.PUSH_1: 1, DeployPhase.PUSH_2: 2,
               DeployPhase.PUSH_3: 3}
_NEXT_PUSH = {1: DeployPhase.PUSH_2, 2: DeployPhase.PUSH_3}
MAX_PUSHES = 3


class SafeHoldReason(enum.Enum):
    WINDOW_MISSED = "window-missed"
    DOOR_TIMEOUT = "door-timeout"
    PUSH_TIMEOUT = "push-timeout"
    PUSHES_EXHAUSTED = "pushes-exhausted"
    BATTERY_FAILURE = "battery-failure"
    FLOOR_BREACHED = "floor-breached"


@dataclass(frozen=True)
class TriggerConfig:
    """Deployment window and watchdog settings.

    push_timeout None means three times one full push cycle, computed
    from the mechanism once the controller is built.
    """

    deploy_ceiling: float               # m, sensed
    deploy_floor: float                 # m, sensed
    arm_after_apogee: bool = True
    door_open_timeout: float = 2.0      # s from the unlock command
    push_timeout: float | None = None   # s per push phase
    apogee_confirm_drop: float = 5.0    # m of sensed descent = apogee seen
    window_allowance: float = 5.0       # m sensed-vs-truth slack for verdicts

    def __post_init__(self) -> None:
        for name in ("deploy_ceiling", "deploy_floor"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ParameterError(f"{name} must be >= 0, got {value!r}")
        if self.deploy_floor >= self.deploy_ceiling:
            raise ParameterError(
                f"deploy_floor ({self.deploy_floor}) must be below "
                f"deploy_ceiling ({self.deploy_ceiling})")
        if self.door_open_timeout <= 0.0:
            raise ParameterError("door_open_timeout must be > 0")
        if self.push_timeout is not None and self.push_timeout <= 0.0:
            raise ParameterError("push_timeout must be > 0")
        if self.apogee_confirm_drop <= 0.0:
            raise ParameterError("apogee_confirm_drop must be > 0")
        if self.window_allowance < 0.0:
            raise ParameterError("window_allowance must be >= 0")


class Command(NamedTuple):
    """One actuation command emitted by deploy logic."""

    name: str       # "unlock" | "push"
    value: float    # sensed altitude for unlock, push number for push


# ---------------------------------------------------------------------------
# Cooperative task schedule


DEFAULT_TASKS = (
    ("sense_barometer", 50.0),
    ("estimate_state", 50.0),
    ("deploy_logic", 100.0),
    ("telemetry", 20.0),
)


def _lcm(values):
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out


class TaskSchedule:
    """Fixed-priority rate table on the logical clock.

    Priority is listed order; tasks due on the same tick run in that
    order, each to completion.  dt must divide every task period
    exactly, which keeps due-ness pure integer arithmetic.
    """

    def __init__(self, dt: float, tasks=DEFAULT_TASKS) -> None:
        if not math.isfinite(dt) or dt <= 0.0:
            raise ParameterError(f"dt must be > 0, got {dt!r}")
        self.dt = dt
        self.tasks = tuple((str(name), float(rate)) for name, rate in tasks)
        period_ticks = []
        for name, rate in self.tasks:
            if rate <= 0.0:
                raise ParameterError(f"task {name!r} rate must be > 0")
            period = 1.0 / rate
            ticks = round(period / dt)
            if ticks < 1 or abs(ticks * dt - period) > 1e-9 * max(period, dt):
                raise ParameterError(
                    f"dt={dt} does not divide the period of task {name!r} "
                    f"({period} s)")
            period_ticks.append(ticks)
        self._period_ticks = tuple(period_ticks)
        # Due-ness repeats with the period lcm; precompute one cycle.
        cycle = _lcm(period_ticks) if period_ticks else 1
        self._cycle = cycle
        self._pattern = tuple(
            tuple(name for (name, _), p in zip(self.tasks, period_ticks)
                  if tick % p == 0)
            for tick in range(cycle))

    def due_at_tick(self, tick: int) -> tuple[str, ...]:
        return self._pattern[tick % self._cycle]


def scheduler_tick(schedule: TaskSchedule, now: float) -> list[str]:
    """Tasks due at logical time `now`, in priority order."""
    tick = round(now / schedule.dt)
    if abs(tick * schedule.dt - now) > 1e-9:
        raise ParameterError(f"now={now!r} is not on the dt grid "
                             f"({schedule.dt})")
    return list(schedule.due_at_tick(tick))


# ---------------------------------------------------------------------------
# Controller


class DeploymentController:
    """Runs the deployment protocol from sensed altitude alone."""

    def __init__(self, trigger: TriggerConfig, mechanism: MechanismParams,
                 servo: ServoSpec) -> None:
        self.trigger = trigger
        self.mechanism = mechanism
        if trigger.push_timeout is not None:
            self.push_timeout = trigger.push_timeout
        else:
            cycle = 2.0 * mechanism.stroke / rack_speed(
                servo, mechanism.pinion_pitch_diameter)
            self.push_timeout = 3.0 * cycle
        self.phase = DeployPhase.LOCKED
        self.safe_hold_reason: SafeHoldReason | None = None
        self.sensed_altitude: float | None = None
        self.sensed_time: float | None = None
        self.apogee_seen = False
        self.apogee_seen_time: float | None = None
        self.unlock_time: float | None = None
        self.door_open_seen: float | None = None
        self.unlocks_sent = 0
        self.pushes_sent = 0
        self._max_sensed = -math.inf
        self._push_phase_start: float | None = None

    # -- tasks, in schedule priority order ---------------------------------

    def task_sense(self, sample, now: float) -> None:
        """Latch the newest barometer reading, if one arrived."""
        if sample is not None:
            self.sensed_altitude = sample[1]
            self.sensed_time = now

    def task_estimate(self, now: float) -> None:
        """Track peak sensed altitude; flag apogee after a confirmed drop."""
        altitude = self.sensed_altitude
        if altitude is None:
            return
        if altitude > self._max_sensed:
            self._max_sensed = altitude
        elif (not self.apogee_seen
              and self._max_sensed - altitude
              >= self.trigger.apogee_confirm_drop):
            self.apogee_seen = True
            self.apogee_seen_time = now

    def _hold(self, reason: SafeHoldReason) -> list[Command]:
        self.phase = DeployPhase.SAFE_HOLD
        self.safe_hold_reason = reason
        return []

    def update_phase(self, door: DoorState, carrier: CarrierState,
                     battery: BatteryState, now: float) -> list[Command]:
        """One deploy-logic tick: advance the phase, emit commands.

        SafeHold and Ejected are absorbing; neither ever emits.
        """
        phase = self.phase
        if phase is DeployPhase.SAFE_HOLD or phase is DeployPhase.EJECTED:
            return []

        if phase is DeployPhase.LOCKED:
            # Arming happens on the first logic tick after power-up.
            self.phase = DeployPhase.AWAIT_WINDOW
            return []

        if battery.failed:
            return self._hold(SafeHoldReason.BATTERY_FAILURE)

        altitude = self.sensed_altitude
        if altitude is None:
            return []
        trigger = self.trigger

        if phase is DeployPhase.AWAIT_WINDOW:
            armed = self.apogee_seen or not trigger.arm_after_apogee
            if self.apogee_seen and altitude < trigger.deploy_floor:
                return self._hold(SafeHoldReason.WINDOW_MISSED)
            if armed and trigger.deploy_floor <= altitude <= trigger.deploy_ceiling:
                self.phase = DeployPhase.UNLOCKING
                self.unlock_time = now
                self.unlocks_sent += 1
                return [Command("unlock", altitude)]
            return []

        # Past AwaitWindow the floor is a hard abort until ejection.
        if altitude < trigger.deploy_floor:
            return self._hold(SafeHoldReason.FLOOR_BREACHED)

        if phase is DeployPhase.UNLOCKING:
            if not door.locked:
                self.phase = DeployPhase.DOOR_OPEN_WAIT
            elif now - self.unlock_time >= trigger.door_open_timeout - _TIME_EPS:
                return self._hold(SafeHoldReason.DOOR_TIMEOUT)
            return []

        if phase is DeployPhase.DOOR_OPEN_WAIT:
            if door.open:
                self.phase = DeployPhase.STABILIZE_DELAY
                self.door_open_seen = now
            elif now - self.unlock_time >= trigger.door_open_timeout - _TIME_EPS:
                return self._hold(SafeHoldReason.DOOR_TIMEOUT)
            return []

        if phase is DeployPhase.STABILIZE_DELAY:
            if now - self.door_open_seen >= STABILIZE_DWELL_S - _TIME_EPS:
                self.phase = DeployPhase.PUSH_1
                self._push_phase_start = now
                self.pushes_sent = 1
                return [Command("push", 1.0)]
            return []

        # Push phases.
        push_index = _PUSH_INDEX[phase]
        if ejection_complete(carrier, carrier.payload_displacement,
                             self.mechanism):
            self.phase = DeployPhase.EJECTED
            return []
        if carrier.push_count >= push_index and not carrier.pushing:
            if push_index < MAX_PUSHES:
                self.phase = _NEXT_PUSH[push_index]
                self._push_phase_start = now
                self.pushes_sent += 1
                return [Command("push", float(push_index + 1))]
            # All pushes spent without ejection: give up, stay safe.
            return self._hold(SafeHoldReason.PUSHES_EXHAUSTED)
        if now - self._push_phase_start >= self.push_timeout - _TIME_EPS:
            return self._hold(SafeHoldReason.PUSH_TIMEOUT)
        return []

    def phase_label(self) -> str:
        """Phase name for telemetry; SafeHold carries its reason."""
        if (self.phase is DeployPhase.SAFE_HOLD
                and self.safe_hold_reason is not None):
            return f"SafeHold({self.safe_hold_reason.value})"
        return self.phase.value


# ---------------------------------------------------------------------------
# Telemetry


TELEMETRY_SCHEMA = "deploysim.telemetry.v1"

TELEMETRY_COLUMNS = (
    "time_s", "truth_alt_m", "truth_vel_mps", "sensed_alt_m", "flight_phase",
    "deploy_phase", "door_angle_rad", "rack_ext_m", "push_count", "current_a",
    "battery_v", "fault_flags",
)


class TelemetryRecord(NamedTuple):
    time_s: float
    truth_alt_m: float
    truth_vel_mps: float
    sensed_alt_m: float
    flight_phase: str
    deploy_phase: str
    door_angle_rad: float
    rack_ext_m: float
    push_count: int
    current_a: float
    battery_v: float
    fault_flags: str


def make_telemetry_record(now: float, vehicle: FlightState,
                          controller: DeploymentController, door: DoorState,
                          carrier: CarrierState, battery: BatteryState,
                          current: float, fault_flags: str) -> TelemetryRecord:
    sensed = controller.sensed_altitude
    return TelemetryRecord(
        time_s=now,
        truth_alt_m=vehicle.altitude,
        truth_vel_mps=vehicle.velocity,
        sensed_alt_m=sensed if sensed is not None else math.nan,
        flight_phase=vehicle.phase.value,
        deploy_phase=controller.phase_label(),
        door_angle_rad=door.angle,
        rack_ext_m=carrier.rack_extension,
        push_count=carrier.push_count,
        current_a=current,
        battery_v=battery.voltage,
        fault_flags=fault_flags,
    )
