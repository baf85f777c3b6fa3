"""Sizing math for the rack-and-pinion payload pusher.

Everything is SI: newton-metres, metres, seconds, kilograms.  The servo
datasheet rates stall torque as 10 kgf*cm at 6 V; that is stored here as
0.98 N*m.  Drivetrain losses are applied as a multiplier on the ideal
tangential force, which is how the ~84 N working figure falls out of the
98 N ideal one.

The sizing chain is:

    ideal force        F0 = 2*torque / pitch_diameter
    effective force    F  = efficiency * F0
    needed accel       a  = 2*(stroke - v0*t) / t^2
    friction per kg    f  = mu * g
    payload limit      m  = F / (mu*g + a)

The payload limit is where the carrier transitions from moving the
payload to stalling against it, so the same expression doubles as the
go/no-go threshold in the actuation model.
"""

import math
from dataclasses import dataclass

from .errors import ParameterError, SingularConfigurationError

# Drivetrain geometry carried for reference.  Only the pitch diameter
# (via MechanismParams) and the stroke enter the motion model; the rest
# documents the gear cut used on the flight hardware.
GEAR_MODULE_MM = 2.0
GEAR_TOOTH_COUNT = 10
RACK_LENGTH_M = 0.06648
RACK_PRESSURE_ANGLE_DEG = 14.5


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    return value


def _positive(name: str, value: float) -> float:
    value = _finite(name, value)
    if value <= 0.0:
        raise ParameterError(f"{name} must be > 0, got {value}")
    return value


def _non_negative(name: str, value: float) -> float:
    value = _finite(name, value)
    if value < 0.0:
        raise ParameterError(f"{name} must be >= 0, got {value}")
    return value


@dataclass(frozen=True)
class MechanismParams:
    """Physical parameters of the deployment drivetrain.

    Defaults describe the flight unit: a 6 V hobby servo driving a
    module-2 pinion, pushing the payload across an aluminium bulkhead.
    """

    servo_stall_torque: float = 0.98        # N*m (10 kgf*cm at 6 V)
    pinion_pitch_diameter: float = 0.020    # m
    drivetrain_efficiency: float = 0.85     # fraction in (0, 1]
    friction_coefficient: float = 0.61      # payload on bulkhead, dry sliding
    stroke: float = 0.060                   # m of travel to clear the bay
    deployment_time_budget: float = 5.0     # s allowed for the push
    gravity: float = 9.81                   # m/s^2

    def __post_init__(self) -> None:
        _positive("servo_stall_torque", self.servo_stall_torque)
        _positive("pinion_pitch_diameter", self.pinion_pitch_diameter)
        _positive("stroke", self.stroke)
        _positive("deployment_time_budget", self.deployment_time_budget)
        _positive("gravity", self.gravity)
        eff = _finite("drivetrain_efficiency", self.drivetrain_efficiency)
        if not 0.0 < eff <= 1.0:
            raise ParameterError(
                f"drivetrain_efficiency must be in (0, 1], got {eff}")
        _non_negative("friction_coefficient", self.friction_coefficient)


@dataclass(frozen=True)
class SizingReport:
    """Unrounded sizing results; presentation layers do any rounding."""

    ideal_tangential_force: float       # N, lossless drivetrain
    effective_tangential_force: float   # N, after efficiency
    required_acceleration: float        # m/s^2 to finish inside the budget
    friction_force_per_kg: float        # N per kg of payload
    max_payload_mass: float             # kg


def tangential_force(torque: float, pitch_diameter: float,
                     efficiency: float) -> float:
    """Tangential force at the pinion pitch circle, derated by efficiency.

    F = efficiency * 2*torque / pitch_diameter.  An efficiency of 1.0
    gives the ideal (lossless) force.
    """
    torque = _non_negative("torque", torque)
    pitch_diameter = _positive("pitch_diameter", pitch_diameter)
    efficiency = _finite("efficiency", efficiency)
    if not 0.0 < efficiency <= 1.0:
        raise ParameterError(f"efficiency must be in (0, 1], got {efficiency}")
    return efficiency * (2.0 * torque / pitch_diameter)


def required_acceleration(stroke: float, initial_velocity: float,
                          time_budget: float) -> float:
    """Constant acceleration that covers `stroke` in `time_budget`.

    Solves stroke = v0*t + a*t^2/2 for a.  A negative result is legal:
    it means the initial velocity alone overshoots the stroke.
    """
    stroke = _non_negative("stroke", stroke)
    initial_velocity = _finite("initial_velocity", initial_velocity)
    time_budget = _positive("time_budget", time_budget)
    return 2.0 * (stroke - initial_velocity * time_budget) / time_budget ** 2


def friction_force(mu: float, mass: float, gravity: float) -> float:
    """Dry sliding friction mu*m*g for a payload resting on the bulkhead."""
    mu = _non_negative("mu", mu)
    mass = _non_negative("mass", mass)
    gravity = _non_negative("gravity", gravity)
    return mu * mass * gravity


def max_payload_mass(effective_force: float, mu: float, gravity: float,
                     accel: float) -> float:
    """Heaviest payload the pusher can move: F / (mu*g + a).

    Raises SingularConfigurationError when mu*g + a is not positive,
    since the limit is then unbounded or meaningless.
    """
    effective_force = _non_negative("effective_force", effective_force)
    mu = _non_negative("mu", mu)
    gravity = _non_negative("gravity", gravity)
    accel = _finite("accel", accel)
    denominator = mu * gravity + accel
    if denominator <= 0.0:
        raise SingularConfigurationError(
            "mu*gravity + accel must be > 0 for a finite payload limit, "
            f"got {denominator}")
    return effective_force / denominator


def sizing_report(params: MechanismParams) -> SizingReport:
    """Run the full sizing chain for one parameter set."""
    ideal = tangential_force(params.servo_stall_torque,
                             params.pinion_pitch_diameter, 1.0)
    effective = tangential_force(params.servo_stall_torque,
                                 params.pinion_pitch_diameter,
                                 params.drivetrain_efficiency)
    accel = required_acceleration(params.stroke, 0.0,
                                  params.deployment_time_budget)
    per_kg = friction_force(params.friction_coefficient, 1.0, params.gravity)
    mass_limit = max_payload_mass(effective, params.friction_coefficient,
                                  params.gravity, accel)
    return SizingReport(
        ideal_tangential_force=ideal,
        effective_tangential_force=effective,
        required_acceleration=accel,
        friction_force_per_kg=per_kg,
        max_payload_mass=mass_limit,
    )
