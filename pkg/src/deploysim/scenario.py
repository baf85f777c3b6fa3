"""Scenario files: flat `section.key = value` pairs, SI units.

Unknown keys are rejected, missing keys take the documented defaults,
and an empty file is exactly the nominal mission.  The schema table
below is the single source of truth for keys, types, ranges and
defaults; the README renders the same table for users.
"""

import math
from dataclasses import dataclass
from importlib import resources

from .actuation import BatteryState, DoorSpec, FaultPlan, ServoSpec
from .atmosphere import AtmosphereModel, BarometerSpec
from .controller import TaskSchedule, TriggerConfig
from .errors import ParameterError, ScenarioError
from .flight import PayloadBody, VehicleSpec
from .mechanism import MechanismParams


class _Key:
    """One schema entry: type, default, allowed range, documentation."""

    __slots__ = ("kind", "default", "low", "low_open", "high", "doc")

    def __init__(self, kind, default, low=None, high=None, low_open=False,
                 doc=""):
        self.kind = kind
        self.default = default
        self.low = low
        self.low_open = low_open
        self.high = high
        self.doc = doc

    def check(self, key: str, value):
        if self.kind is bool or value is None:
            return
        if not math.isfinite(value):
            raise ScenarioError(f"{key}: value must be finite, got {value!r}")
        if self.low is not None:
            if self.low_open and value <= self.low:
                raise ScenarioError(f"{key}: must be > {self.low}, "
                                    f"got {value}")
            if not self.low_open and value < self.low:
                raise ScenarioError(f"{key}: must be >= {self.low}, "
                                    f"got {value}")
        if self.high is not None and value > self.high:
            raise ScenarioError(f"{key}: must be <= {self.high}, got {value}")


def _pos(kind, default, doc=""):
    return _Key(kind, default, low=0, low_open=True, doc=doc)


def _nonneg(kind, default, doc=""):
    return _Key(kind, default, low=0, doc=doc)


SCHEMA: dict[str, _Key] = {
    # Carrier vehicle
    "vehicle.dry_mass": _pos(float, 25.0, "kg, structure w/o propellant"),
    "vehicle.propellant_mass": _nonneg(float, 8.0, "kg"),
    "vehicle.avg_thrust": _nonneg(float, 1900.0, "N, constant over burn"),
    "vehicle.burn_time": _nonneg(float, 3.0, "s"),
    "vehicle.drag_area_coast": _nonneg(float, 0.006, "Cd*A, m^2"),
    "vehicle.drogue_drag_area": _nonneg(float, 1.1, "Cd*A, m^2"),
    # Payload
    "payload.mass": _pos(float, 1.0, "kg"),
    "payload.parachute_drag_area": _nonneg(float, 0.45, "Cd*A, m^2"),
    "payload.parachute_open_altitude_loss": _nonneg(float, 50.0, "m"),
    # Deployment drivetrain (sizing + carrier force model)
    "mechanism.stall_torque": _pos(float, 0.98, "N*m"),
    "mechanism.pitch_diameter": _pos(float, 0.020, "m"),
    "mechanism.efficiency": _Key(float, 0.85, low=0, low_open=True, high=1.0,
                                 doc="fraction of ideal force delivered"),
    "mechanism.friction": _nonneg(float, 0.61, "payload-on-bulkhead mu"),
    "mechanism.stroke": _pos(float, 0.060, "m"),
    "mechanism.time_budget": _pos(float, 5.0, "s"),
    "mechanism.gravity": _pos(float, 9.81, "m/s^2"),
    # Drive servo (speed and current model)
    "servo.stall_torque": _pos(float, 0.98, "N*m"),
    "servo.rated_speed": _pos(float, 1.0, "rev/s"),
    "servo.running_current_min": _nonneg(float, 0.5, "A"),
    "servo.running_current_max": _nonneg(float, 0.9, "A"),
    "servo.stall_current": _pos(float, 2.0, "A"),
    "servo.voltage": _pos(float, 6.0, "V"),
    # Bay door
    "door.rod_travel_time": _pos(float, 0.5, "s"),
    "door.open_time": _pos(float, 0.3, "s"),
    "door.max_open": _pos(float, math.pi / 2, "rad"),
    "door.open_threshold": _pos(float, math.radians(85.0), "rad"),
    "door.actuator_current": _nonneg(float, 0.5, "A while rod moves"),
    # Barometer
    "barometer.sample_rate": _pos(float, 50.0, "Hz"),
    "barometer.noise_sigma": _nonneg(float, 3.0, "Pa"),
    "barometer.quantization": _nonneg(float, 1.0, "Pa, 0 disables"),
    "barometer.latency": _nonneg(float, 0.02, "s"),
    # Trigger / watchdogs
    "trigger.deploy_ceiling": _nonneg(float, 400.0, "m sensed"),
    "trigger.deploy_floor": _nonneg(float, 150.0, "m sensed"),
    "trigger.arm_after_apogee": _Key(bool, True),
    "trigger.door_open_timeout": _pos(float, 2.0, "s from unlock"),
    "trigger.push_timeout": _pos(float, None, "s; omit for 3x a push cycle"),
    "trigger.apogee_confirm_drop": _pos(float, 5.0, "m"),
    "trigger.window_allowance": _nonneg(float, 5.0, "m"),
    # Battery
    "battery.voltage": _pos(float, 7.4, "V"),
    "battery.capacity": _pos(float, 7920.0, "C (2.2 Ah)"),
    "battery.quiescent_current": _nonneg(float, 0.0, "A, always-on load"),
    # Atmosphere
    "atmosphere.sea_level_pressure": _pos(float, 101325.0, "Pa"),
    "atmosphere.sea_level_temperature": _pos(float, 288.15, "K"),
    "atmosphere.lapse_rate": _pos(float, 0.0065, "K/m"),
    # Fault injection (at most one of each kind)
    "faults.gear_slip_push": _Key(int, None, low=1,
                                  doc="pushes >= this number slip"),
    "faults.link_break_force": _nonneg(float, None, "N load that breaks it"),
    "faults.surface_friction_scale": _nonneg(float, 1.0, "multiplier on mu"),
    "faults.battery_fail_time": _nonneg(float, None, "s"),
    "faults.door_jam": _Key(bool, False),
    # Simulation
    "sim.dt": _pos(float, 0.001, "s"),
    "sim.seed": _Key(int, 42),
    "sim.max_sim_time": _pos(float, 400.0, "s"),
}

_TRUE_WORDS = {"true", "yes", "on", "1"}
_FALSE_WORDS = {"false", "no", "off", "0"}


@dataclass(frozen=True)
class Scenario:
    """A fully validated mission definition.

    `values` keeps the flat key map the scenario was built from so
    sweeps and overrides can rebuild a sibling scenario cheaply.
    """

    vehicle: VehicleSpec
    payload: PayloadBody
    mechanism: MechanismParams
    servo: ServoSpec
    door: DoorSpec
    barometer: BarometerSpec
    trigger: TriggerConfig
    battery: BatteryState
    quiescent_current: float
    atmosphere: AtmosphereModel
    faults: FaultPlan
    dt: float
    seed: int
    max_sim_time: float
    values: dict


def _parse_value(key: str, raw: str, where: str):
    entry = SCHEMA[key]
    if entry.kind is bool:
        word = raw.lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
        raise ScenarioError(f"{where}: {key} expects true/false, got {raw!r}")
    try:
        if entry.kind is int:
            return int(raw, 10)
        return float(raw)
    except ValueError:
        raise ScenarioError(f"{where}: {key} expects "
                            f"{'an integer' if entry.kind is int else 'a number'}, "
                            f"got {raw!r}") from None


def parse_scenario_text(text: str, source: str = "<string>") -> dict:
    """Parse flat key-value text into a typed override map."""
    overrides: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        where = f"{source}:{lineno}"
        if "=" not in body:
            raise ScenarioError(f"{where}: expected 'key = value', "
                                f"got {line.strip()!r}")
        key, _, raw = body.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in SCHEMA:
            raise ScenarioError(f"{where}: unknown key {key!r}")
        if key in overrides:
            raise ScenarioError(f"{where}: duplicate key {key!r}")
        if not raw:
            raise ScenarioError(f"{where}: {key} has no value")
        overrides[key] = _parse_value(key, raw, where)
    return overrides


def build_scenario(overrides: dict | None = None) -> Scenario:
    """Merge overrides onto defaults and construct every component."""
    values = {key: entry.default for key, entry in SCHEMA.items()}
    if overrides:
        for key, value in overrides.items():
            if key not in SCHEMA:
                raise ScenarioError(f"unknown key {key!r}")
            values[key] = value
    for key, value in values.items():
        SCHEMA[key].check(key, value)

    def group(section: str) -> dict:
        prefix = section + "."
        return {key[len(prefix):]: value for key, value in values.items()
                if key.startswith(prefix)}

    v, p, m = group("vehicle"), group("payload"), group("mechanism")
    s, d, b = group("servo"), group("door"), group("barometer")
    t, bat, a = group("trigger"), group("battery"), group("atmosphere")
    f, sim = group("faults"), group("sim")

    try:
        vehicle = VehicleSpec(
            dry_mass=v["dry_mass"], propellant_mass=v["propellant_mass"],
            avg_thrust=v["avg_thrust"], burn_time=v["burn_time"],
            drag_area_coast=v["drag_area_coast"],
            drogue_drag_area=v["drogue_drag_area"])
        payload = PayloadBody(
            mass=p["mass"], parachute_drag_area=p["parachute_drag_area"],
            parachute_open_altitude_loss=p["parachute_open_altitude_loss"])
        mechanism = MechanismParams(
            servo_stall_torque=m["stall_torque"],
            pinion_pitch_diameter=m["pitch_diameter"],
            drivetrain_efficiency=m["efficiency"],
            friction_coefficient=m["friction"], stroke=m["stroke"],
            deployment_time_budget=m["time_budget"], gravity=m["gravity"])
        servo = ServoSpec(
            stall_torque=s["stall_torque"], rated_speed=s["rated_speed"],
            running_current_min=s["running_current_min"],
            running_current_max=s["running_current_max"],
            stall_current=s["stall_current"],
            operating_voltage=s["voltage"])
        door = DoorSpec(
            rod_travel_time=d["rod_travel_time"], open_time=d["open_time"],
            max_open=d["max_open"], open_threshold=d["open_threshold"],
            actuator_current=d["actuator_current"])
        barometer = BarometerSpec(
            sample_rate=b["sample_rate"],
            pressure_noise_sigma=b["noise_sigma"],
            quantization=b["quantization"], latency=b["latency"],
            seed=sim["seed"])
        trigger = TriggerConfig(
            deploy_ceiling=t["deploy_ceiling"],
            deploy_floor=t["deploy_floor"],
            arm_after_apogee=t["arm_after_apogee"],
            door_open_timeout=t["door_open_timeout"],
            push_timeout=t["push_timeout"],
            apogee_confirm_drop=t["apogee_confirm_drop"],
            window_allowance=t["window_allowance"])
        battery = BatteryState(voltage=bat["voltage"],
                               charge=bat["capacity"])
        atmosphere = AtmosphereModel(
            sea_level_pressure=a["sea_level_pressure"],
            sea_level_temperature=a["sea_level_temperature"],
            lapse_rate=a["lapse_rate"])
        faults = FaultPlan(
            gear_slip_push=f["gear_slip_push"],
            link_break_force=f["link_break_force"],
            surface_friction_scale=f["surface_friction_scale"],
            battery_fail_time=f["battery_fail_time"],
            door_jam=f["door_jam"])
        # dt must land every scheduled task on an exact tick.
        TaskSchedule(sim["dt"])
    except ParameterError as exc:
        raise ScenarioError(str(exc)) from exc

    return Scenario(
        vehicle=vehicle, payload=payload, mechanism=mechanism, servo=servo,
        door=door, barometer=barometer, trigger=trigger, battery=battery,
        quiescent_current=bat["quiescent_current"], atmosphere=atmosphere,
        faults=faults, dt=sim["dt"], seed=sim["seed"],
        max_sim_time=sim["max_sim_time"], values=dict(values))


def scenario_with(base: Scenario, overrides: dict) -> Scenario:
    """Sibling scenario with a handful of keys replaced."""
    values = dict(base.values)
    for key, value in overrides.items():
        if key not in SCHEMA:
            raise ScenarioError(f"unknown key {key!r}")
        values[key] = value
    return build_scenario(values)


def load_scenario(path) -> Scenario:
    """Read and validate a scenario file."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {path!r}: {exc}") from exc
    return build_scenario(parse_scenario_text(text, source=str(path)))


def list_bundled() -> list[str]:
    """Names of scenarios shipped inside the package."""
    root = resources.files(__package__) / "scenarios"
    return sorted(entry.name[:-len(".scn")] for entry in root.iterdir()
                  if entry.name.endswith(".scn"))


def bundled_scenario(name: str) -> Scenario:
    """Load a shipped scenario by bare name, e.g. 'altair_nominal'."""
    candidate = resources.files(__package__) / "scenarios" / f"{name}.scn"
    if not candidate.is_file():
        raise ScenarioError(f"no bundled scenario {name!r}; "
                            f"available: {', '.join(list_bundled())}")
    text = candidate.read_text(encoding="utf-8")
    return build_scenario(parse_scenario_text(text, source=f"{name}.scn"))
