"""One-dimensional vertical flight dynamics for carrier and payload.

Integration is semi-implicit Euler on a fixed step: velocity first,
then position with the new velocity.  That keeps the drag-free energy
drift second order in dt, which the test suite audits.
"""

import enum
import math
from dataclasses import dataclass, replace
from typing import Iterable

from .atmosphere import AtmosphereModel, density_at_altitude
from .errors import ApogeeNotFoundError, ContractViolationError, ParameterError

GRAVITY = 9.81  # m/s^2, matches the sizing convention


class FlightPhase(enum.Enum):
    PRELAUNCH = "PreLaunch"
    BOOST = "Boost"
    COAST = "Coast"
    DROGUE_DESCENT = "DrogueDescent"
    LANDED = "Landed"


class PayloadState(enum.Enum):
    STOWED = "Stowed"
    FREE_FALL = "FreeFall"
    PARACHUTE_DESCENT = "ParachuteDescent"
    LANDED = "Landed"


@dataclass(frozen=True)
class VehicleSpec:
    """Carrier rocket masses, motor and drag areas.  Drag areas are
    Cd*A products in m^2; the drogue area replaces the coast area once
    the vehicle is past apogee."""

    dry_mass: float                 # kg, structure without propellant/payload
    propellant_mass: float          # kg
    avg_thrust: float               # N, constant over the burn
    burn_time: float                # s
    drag_area_coast: float          # Cd*A, m^2, boost and coast
    drogue_drag_area: float         # Cd*A, m^2, descent

    def __post_init__(self) -> None:
        if not math.isfinite(self.dry_mass) or self.dry_mass <= 0.0:
            raise ParameterError(f"dry_mass must be > 0, got {self.dry_mass!r}")
        for name in ("propellant_mass", "avg_thrust", "burn_time",
                     "drag_area_coast", "drogue_drag_area"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ParameterError(f"{name} must be >= 0, got {value!r}")
        # Either a real burn (both positive) or none at all.
        if (self.avg_thrust > 0.0) != (self.burn_time > 0.0):
            raise ParameterError("avg_thrust and burn_time must both be "
                                 "positive or both zero")


@dataclass(slots=True)
class FlightState:
    """Vehicle truth state.  `mass` is the full stack currently flying
    (structure + remaining propellant + stowed payload)."""

    time: float = 0.0
    altitude: float = 0.0
    velocity: float = 0.0
    mass: float = 0.0
    propellant: float = 0.0
    phase: FlightPhase = FlightPhase.PRELAUNCH


def initial_state(spec: VehicleSpec, payload_mass: float = 0.0) -> FlightState:
    """On-pad state with the payload stowed aboard."""
    if not math.isfinite(payload_mass) or payload_mass < 0.0:
        raise ParameterError(f"payload_mass must be >= 0, got {payload_mass!r}")
    return FlightState(
        mass=spec.dry_mass + spec.propellant_mass + payload_mass,
        propellant=spec.propellant_mass,
    )


def step_vehicle(spec: VehicleSpec, state: FlightState, dt: float,
                 atmosphere: AtmosphereModel) -> FlightState:
    """Advance the vehicle one step.  Landed states pass through."""
    phase = state.phase
    if phase is FlightPhase.LANDED:
        return state
    if dt <= 0.0 or not math.isfinite(dt):
        raise ParameterError(f"dt must be > 0, got {dt!r}")

    if phase is FlightPhase.PRELAUNCH:
        # Ignition on the first step; unpowered specs go straight to coast.
        phase = FlightPhase.BOOST if spec.avg_thrust > 0.0 else FlightPhase.COAST

    mass = state.mass
    propellant = state.propellant
    thrust = 0.0
    if phase is FlightPhase.BOOST:
        burned = min(spec.propellant_mass / spec.burn_time * dt, propellant)
        mass -= burned
        propellant -= burned
        thrust = spec.avg_thrust

    drag_area = (spec.drogue_drag_area
                 if phase is FlightPhase.DROGUE_DESCENT
                 else spec.drag_area_coast)
    velocity = state.velocity
    drag = 0.0
    if drag_area > 0.0 and velocity != 0.0:
        rho = density_at_altitude(atmosphere, state.altitude)
        drag = math.copysign(
            0.5 * rho * velocity * velocity * drag_area, velocity)

    accel = (thrust - drag) / mass - GRAVITY
    velocity = velocity + accel * dt
    altitude = state.altitude + velocity * dt
    time = state.time + dt

    if phase is FlightPhase.BOOST and propellant <= 0.0:
        propellant = 0.0
        phase = FlightPhase.COAST
    if phase is FlightPhase.COAST and velocity <= 0.0:
        phase = FlightPhase.DROGUE_DESCENT
    if altitude <= 0.0 and phase is not FlightPhase.PRELAUNCH:
        altitude = 0.0
        velocity = 0.0
        phase = FlightPhase.LANDED

    return FlightState(time=time, altitude=altitude, velocity=velocity,
                       mass=mass, propellant=propellant, phase=phase)


def detect_apogee(history: Iterable[FlightState]) -> tuple[float, float]:
    """(time, altitude) of the first sample with velocity <= 0."""
    for state in history:
        if state.velocity <= 0.0:
            return state.time, state.altitude
    raise ApogeeNotFoundError("history never reaches a non-positive velocity")


@dataclass(slots=True)
class PayloadBody:
    """Free payload after ejection: ballistic fall, then parachute.

    The parachute opens once the body has fallen
    `parachute_open_altitude_loss` metres below its ejection altitude.
    """

    mass: float                             # kg
    parachute_drag_area: float              # Cd*A, m^2
    parachute_open_altitude_loss: float     # m of fall before the chute opens
    state: PayloadState = PayloadState.STOWED
    altitude: float = 0.0
    velocity: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.mass) or self.mass <= 0.0:
            raise ParameterError(f"payload mass must be > 0, got {self.mass!r}")
        for name in ("parachute_drag_area", "parachute_open_altitude_loss"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ParameterError(f"{name} must be >= 0, got {value!r}")


def release_payload(body: PayloadBody, altitude: float,
                    velocity: float) -> PayloadBody:
    """Hand the stowed payload its own state vector at ejection."""
    if body.state is not PayloadState.STOWED:
        raise ContractViolationError("payload already released")
    return replace(body, state=PayloadState.FREE_FALL,
                   altitude=altitude, velocity=velocity)


def step_payload(body: PayloadBody, dt: float, ejection_altitude: float,
                 atmosphere: AtmosphereModel) -> PayloadBody:
    """Advance a released payload one step.  Landed passes through."""
    state = body.state
    if state is PayloadState.STOWED:
        raise ContractViolationError("cannot step a stowed payload; it moves "
                                     "with the vehicle until ejection")
    if state is PayloadState.LANDED:
        return body
    if body.altitude <= 0.0:
        return replace(body, altitude=0.0, velocity=0.0,
                       state=PayloadState.LANDED)

    velocity = body.velocity
    accel = -GRAVITY
    if state is PayloadState.PARACHUTE_DESCENT and velocity != 0.0:
        rho = density_at_altitude(atmosphere, body.altitude)
        drag = 0.5 * rho * velocity * velocity * body.parachute_drag_area
        accel -= math.copysign(drag, velocity) / body.mass
    velocity = velocity + accel * dt
    altitude = body.altitude + velocity * dt

    if altitude <= 0.0:
        return replace(body, altitude=0.0, velocity=0.0,
                       state=PayloadState.LANDED)
    if (state is PayloadState.FREE_FALL
            and ejection_altitude - altitude >= body.parachute_open_altitude_loss):
        state = PayloadState.PARACHUTE_DESCENT
    return replace(body, altitude=altitude, velocity=velocity, state=state)


def terminal_speed(mass: float, drag_area: float, rho: float) -> float:
    """Steady descent speed sqrt(2*m*g / (rho*Cd*A))."""
    if drag_area <= 0.0 or rho <= 0.0:
        raise ParameterError("terminal speed needs positive drag area and "
                             "density")
    return math.sqrt(2.0 * mass * GRAVITY / (rho * drag_area))
