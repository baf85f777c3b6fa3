"""Troposphere pressure model and a simulated barometric altimeter.

The pressure model is the standard-atmosphere barometric formula with a
linear temperature lapse, valid from sea level to 11 km.  Its inverse is
closed-form, so pressure -> altitude round-trips to machine precision.
"""

import math
import random
from collections import deque
from dataclasses import dataclass

from .errors import ContractViolationError, DomainError, ParameterError

# Standard-atmosphere physical constants.  Single source for every
# module that needs air properties.
GAS_CONSTANT = 8.31432          # J/(mol*K)
MOLAR_MASS_AIR = 0.0289644      # kg/mol
STANDARD_GRAVITY = 9.80665      # m/s^2
MODEL_CEILING = 11000.0         # m, top of the linear-lapse band

_TIME_EPS = 1e-9                # s, slack for float tick arithmetic


@dataclass(frozen=True)
class AtmosphereModel:
    """Linear-lapse troposphere, queryable between 0 and 11 km."""

    sea_level_pressure: float = 101325.0    # Pa
    sea_level_temperature: float = 288.15   # K
    lapse_rate: float = 0.0065              # K/m

    def __post_init__(self) -> None:
        for name in ("sea_level_pressure", "sea_level_temperature",
                     "lapse_rate"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ParameterError(f"{name} must be finite and > 0, "
                                     f"got {value!r}")
        # Lapse must leave positive temperature across the whole band.
        if self.sea_level_temperature - self.lapse_rate * MODEL_CEILING <= 0.0:
            raise ParameterError("lapse_rate drives temperature below zero "
                                 "inside the model band")

    @property
    def exponent(self) -> float:
        """g*M / (R*L), the exponent of the barometric formula."""
        return (STANDARD_GRAVITY * MOLAR_MASS_AIR
                / (GAS_CONSTANT * self.lapse_rate))


def _check_altitude(altitude: float) -> float:
    altitude = float(altitude)
    if not math.isfinite(altitude) or not 0.0 <= altitude <= MODEL_CEILING:
        raise DomainError(f"altitude {altitude!r} outside model band "
                          f"[0, {MODEL_CEILING}] m")
    return altitude


def temperature_at_altitude(model: AtmosphereModel, altitude: float) -> float:
    """Air temperature in K at `altitude` metres."""
    altitude = _check_altitude(altitude)
    return model.sea_level_temperature - model.lapse_rate * altitude


def pressure_at_altitude(model: AtmosphereModel, altitude: float) -> float:
    """Static pressure in Pa at `altitude` metres above sea level."""
    altitude = _check_altitude(altitude)
    base = 1.0 - model.lapse_rate * altitude / model.sea_level_temperature
    return model.sea_level_pressure * base ** model.exponent


def density_at_altitude(model: AtmosphereModel, altitude: float) -> float:
    """Air density in kg/m^3 from the ideal gas law."""
    pressure = pressure_at_altitude(model, altitude)
    temperature = temperature_at_altitude(model, altitude)
    return pressure * MOLAR_MASS_AIR / (GAS_CONSTANT * temperature)


def min_pressure(model: AtmosphereModel) -> float:
    """Pressure at the top of the model band; lower is out of range."""
    return pressure_at_altitude(model, MODEL_CEILING)


def altitude_from_pressure(model: AtmosphereModel, pressure: float) -> float:
    """Invert the barometric formula.  Exact closed form, no iteration."""
    pressure = float(pressure)
    if (not math.isfinite(pressure)
            or not min_pressure(model) <= pressure <= model.sea_level_pressure):
        raise DomainError(
            f"pressure {pressure!r} Pa outside model band "
            f"[{min_pressure(model):.1f}, {model.sea_level_pressure}]")
    ratio = pressure / model.sea_level_pressure
    return (model.sea_level_temperature / model.lapse_rate) * (
        1.0 - ratio ** (1.0 / model.exponent))


@dataclass(frozen=True)
class BarometerSpec:
    """Sampling and noise figures for the flight barometer."""

    sample_rate: float = 50.0           # Hz
    pressure_noise_sigma: float = 3.0   # Pa, gaussian
    quantization: float = 1.0           # Pa, 0 disables
    latency: float = 0.02               # s, fixed transport delay
    seed: int = 0

    def __post_init__(self) -> None:
        if not math.isfinite(self.sample_rate) or self.sample_rate <= 0.0:
            raise ParameterError(f"sample_rate must be > 0, "
                                 f"got {self.sample_rate!r}")
        for name in ("pressure_noise_sigma", "quantization", "latency"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0.0:
                raise ParameterError(f"{name} must be >= 0, got {value!r}")


class Barometer:
    """Simulated pressure altimeter with noise, quantization and latency.

    Call `sample()` every simulation tick; it returns a reading only on
    sample-rate boundaries and None otherwise.  Noise is gaussian on
    pressure, drawn from the stdlib Mersenne Twister (`random.Random`,
    `normalvariate`), so a given seed reproduces the same stream on any
    platform.  Latency is a fixed delay: a reading emitted at time t
    reflects the true altitude at t - latency.
    """

    def __init__(self, spec: BarometerSpec, model: AtmosphereModel) -> None:
        self.spec = spec
        self.model = model
        self._rng = random.Random(spec.seed)
        self._period = 1.0 / spec.sample_rate
        self._next_index = 0            # index of the next sample to emit
        self._truth: deque = deque()    # (time, altitude) back to t - latency
        self._last_time = -math.inf
        self._min_pressure = min_pressure(model)

    def sample(self, true_altitude: float, tick_time: float):
        """Feed one tick of truth; get (pressure, altitude) or None.

        `tick_time` must not go backwards between calls.
        """
        if tick_time < self._last_time:
            raise ContractViolationError(
                f"barometer time went backwards: {tick_time} < "
                f"{self._last_time}")
        self._last_time = tick_time

        # Keep truth[0] as the newest entry at or before t - latency.
        truth = self._truth
        truth.append((tick_time, true_altitude))
        target = tick_time - self.spec.latency + _TIME_EPS
        while len(truth) > 1 and truth[1][0] <= target:
            truth.popleft()

        if tick_time + _TIME_EPS < self._next_index * self._period:
            return None
        self._next_index += 1

        # Oldest retained entry is the truth from `latency` seconds ago
        # (or the earliest available while the buffer is still filling).
        delayed_altitude = truth[0][1]
        pressure = pressure_at_altitude(self.model, delayed_altitude)
        sigma = self.spec.pressure_noise_sigma
        if sigma > 0.0:
            pressure += self._rng.normalvariate(0.0, sigma)
        quantum = self.spec.quantization
        if quantum > 0.0:
            pressure = round(pressure / quantum) * quantum
        # Clamp into the invertible band before converting back.
        if pressure > self.model.sea_level_pressure:
            pressure = self.model.sea_level_pressure
        elif pressure < self._min_pressure:
            pressure = self._min_pressure
        return pressure, altitude_from_pressure(self.model, pressure)
