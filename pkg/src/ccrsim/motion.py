"""Speed parameters, trapezoidal profiles and control-string interpretation.

A MotionProfile is a piecewise-constant-acceleration speed function whose
integral equals the length of the path it drives.  Control strings modulate
the profile: entry/exit markers ('!' hard, '=' carry) and interior actions
('+' raise target, '-' lower target, '!' brake-and-relaunch, anything else
hold).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import ProfileError

NORMAL = "normal"
HARD = "hard"
CARRY = "carry"

_FEAS_EPS = 1e-9
SPEED_UP_FACTOR = 1.25
SLOW_DOWN_FACTOR = 0.8


@dataclass(frozen=True)
class SpeedParams:
    max_speed: float = 1.0
    acceleration: float = 0.5
    deceleration: float = 0.5
    physical_max: float = 2.0
    hard_acceleration: float = 4.0
    hard_deceleration: float = 4.0

    def __post_init__(self):
        for name in ("max_speed", "acceleration", "deceleration", "physical_max",
                     "hard_acceleration", "hard_deceleration"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if self.max_speed > self.physical_max:
            raise ValueError(f"max_speed {self.max_speed} exceeds physical_max {self.physical_max}")
        if self.hard_acceleration < self.acceleration:
            raise ValueError("hard_acceleration below acceleration")
        if self.hard_deceleration < self.deceleration:
            raise ValueError("hard_deceleration below deceleration")


@dataclass(frozen=True)
class ControlSpec:
    entry: str = NORMAL  # NORMAL | HARD | CARRY
    exit: str = NORMAL
    interior: str = ""


def parse_control_string(s: str) -> ControlSpec:
    """Classify a control string into entry marker, interior actions, exit marker."""
    if s == "":
        return ControlSpec()
    if s == "!":
        return ControlSpec(HARD, HARD, "")
    if s == "=":
        return ControlSpec(CARRY, CARRY, "")
    entry, exit_, interior = NORMAL, NORMAL, s
    if interior[0] == "!":
        entry, interior = HARD, interior[1:]
    elif interior[0] == "=":
        entry, interior = CARRY, interior[1:]
    if interior and interior[-1] == "!":
        exit_, interior = HARD, interior[:-1]
    elif interior and interior[-1] == "=":
        exit_, interior = CARRY, interior[:-1]
    return ControlSpec(entry, exit_, interior)


@dataclass(frozen=True)
class Phase:
    v0: float
    accel: float
    duration: float


@dataclass(frozen=True)
class MotionProfile:
    phases: tuple[Phase, ...]
    entry_speed: float
    exit_speed: float
    _ends: tuple[float, ...] = field(default=(), repr=False, compare=False)
    _dists: tuple[float, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        ends, dists = [], []
        t = d = 0.0
        for ph in self.phases:
            t += ph.duration
            d += ph.v0 * ph.duration + 0.5 * ph.accel * ph.duration * ph.duration
            ends.append(t)
            dists.append(d)
        object.__setattr__(self, "_ends", tuple(ends))
        object.__setattr__(self, "_dists", tuple(dists))

    @property
    def duration(self) -> float:
        return self._ends[-1] if self._ends else 0.0

    @property
    def distance(self) -> float:
        return self._dists[-1] if self._dists else 0.0

    def speed_at(self, t: float) -> float:
        if t <= 0.0:
            return self.entry_speed
        if t >= self.duration:
            return self.exit_speed
        t0 = 0.0
        for ph, end in zip(self.phases, self._ends):
            if t <= end:
                return max(0.0, ph.v0 + ph.accel * (t - t0))
            t0 = end
        return self.exit_speed

    def distance_at(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t >= self.duration:
            return self.distance
        t0 = d0 = 0.0
        for ph, end, dist in zip(self.phases, self._ends, self._dists):
            if t <= end:
                dt = t - t0
                return d0 + ph.v0 * dt + 0.5 * ph.accel * dt * dt
            t0, d0 = end, dist
        return self.distance


def _ramp(v0: float, v1: float, up_rate: float, down_rate: float) -> list[Phase]:
    if v1 == v0:
        return []
    rate = up_rate if v1 > v0 else down_rate
    dt = abs(v1 - v0) / rate
    return [Phase(v0, math.copysign(rate, v1 - v0), dt)]


def _ramp_dist(v0: float, v1: float, up_rate: float, down_rate: float) -> float:
    rate = up_rate if v1 > v0 else down_rate
    return abs(v1 * v1 - v0 * v0) / (2.0 * rate)


def _trapezoid(length, ve, vx, vmax, accel, decel):
    """Minimal-time ramp/cruise/ramp phases; vx=None leaves the exit free.

    Returns (phases, cruise_speed, exit_speed).
    """
    if length < 0:
        raise ProfileError(f"negative path length {length}")
    if length == 0.0:
        if vx is not None and abs(ve - vx) > _FEAS_EPS:
            raise ProfileError(f"zero-length move cannot change speed {ve} -> {vx}")
        return [], ve, ve
    if ve > vmax:
        # Carry speed above the current limit: shed it first, then continue.
        target = max(vmax, vx) if vx is not None else vmax
        d_down = _ramp_dist(ve, target, accel, decel)
        if d_down > length + _FEAS_EPS:
            raise ProfileError(
                f"distance {length} too short to decelerate {ve} -> {target}")
        phases = _ramp(ve, target, accel, decel)
        rest, vc, vout = _trapezoid(length - d_down, target, vx, vmax, accel, decel)
        return phases + rest, vc, vout

    if vx is None:
        vc = min(vmax, math.sqrt(ve * ve + 2.0 * accel * length))
        d1 = _ramp_dist(ve, vc, accel, decel)
        phases = _ramp(ve, vc, accel, decel)
        cruise = length - d1
        if cruise > _FEAS_EPS * max(1.0, length) and vc > 0:
            phases.append(Phase(vc, 0.0, cruise / vc))
        return phases, vc, vc

    if ve > vx and _ramp_dist(ve, vx, accel, decel) > length + _FEAS_EPS:
        raise ProfileError(
            f"distance {length} too short to decelerate {ve} -> {vx} at {decel}")
    if vx > ve and _ramp_dist(ve, vx, accel, decel) > length + _FEAS_EPS:
        raise ProfileError(
            f"distance {length} too short to accelerate {ve} -> {vx} at {accel}")
    v_peak_sq = (2.0 * accel * decel * length + decel * ve * ve + accel * vx * vx) / (accel + decel)
    vc = min(vmax, math.sqrt(max(v_peak_sq, 0.0)))
    vc = max(vc, ve, vx)
    d1 = _ramp_dist(ve, vc, accel, decel)
    d2 = _ramp_dist(vc, vx, accel, decel)
    phases = _ramp(ve, vc, accel, decel)
    cruise = length - d1 - d2
    if vc > 0 and cruise > 0:
        phases.append(Phase(vc, 0.0, cruise / vc))
    phases += _ramp(vc, vx, accel, decel)
    if vc == 0.0 and length > _FEAS_EPS:
        raise ProfileError(f"cannot cover {length} m from standstill to standstill")
    return phases, vc, vx


def base_profile(distance: float, params: SpeedParams,
                 entry_speed: float = 0.0, exit_speed: float = 0.0) -> MotionProfile:
    """Trapezoidal (or triangular) profile covering ``distance`` in minimal time."""
    phases, _, vout = _trapezoid(distance, entry_speed, exit_speed,
                                 params.max_speed, params.acceleration, params.deceleration)
    return MotionProfile(tuple(phases), entry_speed, vout)


def apply_control(length: float, params: SpeedParams, spec: ControlSpec,
                  previous_exit_speed: float = 0.0) -> MotionProfile:
    """Profile for a path of ``length`` meters under a control specification.

    Interior actions modulate the target speed over equal subintervals of the
    nominal (unmodulated) duration; the result is re-integrated so that the
    covered distance equals ``length`` exactly.
    """
    a_in = params.hard_acceleration if spec.entry == HARD else params.acceleration
    d_out = params.hard_deceleration if spec.exit == HARD else params.deceleration
    ve = previous_exit_speed if spec.entry == CARRY else 0.0
    vx = None if spec.exit == CARRY else 0.0

    nominal, vc0, vout = _trapezoid(length, ve, vx, params.max_speed, a_in, d_out)
    if not spec.interior:
        return MotionProfile(tuple(nominal), ve, vout)
    nominal_prof = MotionProfile(tuple(nominal), ve, vout)
    if nominal_prof.duration == 0.0:
        return MotionProfile(tuple(nominal), ve, ve)

    # Target speed per interior subinterval.
    targets = []
    v = vc0
    for ch in spec.interior:
        if ch == "+":
            v = min(v * SPEED_UP_FACTOR, params.physical_max)
        elif ch == "-":
            v = v * SLOW_DOWN_FACTOR
        targets.append((ch, v))

    phases: list[Phase] = []
    dwell_speeds: list[float] = []
    dwell_slots: list[int] = []  # index into phases where a dwell placeholder goes
    cur = ve
    trans_dist = 0.0
    for i, (ch, v) in enumerate(targets):
        up = a_in if i == 0 else params.acceleration
        down = params.deceleration
        if ch == "!":
            for v_to, u, dn in ((0.0, params.hard_acceleration, params.hard_deceleration),
                                (v, params.hard_acceleration, params.hard_deceleration)):
                trans_dist += _ramp_dist(cur, v_to, u, dn)
                phases += _ramp(cur, v_to, u, dn)
                cur = v_to
        elif v != cur:
            trans_dist += _ramp_dist(cur, v, up, down)
            phases += _ramp(cur, v, up, down)
            cur = v
        dwell_slots.append(len(phases))
        dwell_speeds.append(cur)
        phases.append(Phase(cur, 0.0, 0.0))  # dwell placeholder
    if vx is not None and cur != vx:
        rate_down = d_out
        trans_dist += _ramp_dist(cur, vx, params.acceleration, rate_down)
        phases += _ramp(cur, vx, params.acceleration, rate_down)
        exit_speed = vx
    else:
        exit_speed = cur

    residual = length - trans_dist
    if residual < -_FEAS_EPS * max(1.0, length):
        raise ProfileError(
            f"control string needs {trans_dist:.6f} m of speed changes "
            f"but the path is only {length:.6f} m long")
    residual = max(residual, 0.0)
    slot = nominal_prof.duration / len(targets)
    weight = sum(v * slot for v in dwell_speeds)
    if weight <= 0.0:
        if residual > _FEAS_EPS:
            raise ProfileError("control string leaves no speed to cover the path")
        scale = 0.0
    else:
        scale = residual / weight
    for idx, v in zip(dwell_slots, dwell_speeds):
        phases[idx] = Phase(v, 0.0, slot * scale)
    phases = [ph for ph in phases if ph.duration > 0.0]
    return MotionProfile(tuple(phases), ve, exit_speed)


# --- per-robot speed settings ---------------------------------------------

MAX = "max"
STD = "std"

_SETTING_FIELDS = {
    "maxSpeed": ("max_speed", "physical_max"),
    "acceleration": ("acceleration", "hard_acceleration"),
    "deceleration": ("deceleration", "hard_deceleration"),
}


def apply_setting(params: SpeedParams, defaults: SpeedParams,
                  setting: str, value) -> SpeedParams:
    """One robot's SpeedParams after a maxSpeed/acceleration/deceleration setting.

    ``value`` is a positive number, MAX (the physical limit) or STD (the
    configured default).  Numeric maxSpeed is clamped to physical_max to keep
    the params invariant.
    """
    if setting not in _SETTING_FIELDS:
        raise ValueError(f"unknown setting {setting!r}")
    fld, hard_fld = _SETTING_FIELDS[setting]
    if value == MAX:
        v = getattr(params, hard_fld)
    elif value == STD:
        v = getattr(defaults, fld)
    else:
        v = float(value)
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{setting} must be positive, got {value}")
        if fld == "max_speed":
            v = min(v, params.physical_max)
    return replace(params, **{fld: v})


def apply_settings(instruction, table: dict, defaults: dict) -> dict:
    """Updated robot -> SpeedParams table after one setting instruction.

    ``instruction`` carries .setting, .robot (None = all robots) and .value.
    """
    robots = list(table) if instruction.robot is None else [instruction.robot]
    out = dict(table)
    for rid in robots:
        out[rid] = apply_setting(out[rid], defaults[rid], instruction.setting,
                                 instruction.value)
    return out


# --- config file -----------------------------------------------------------

CONFIG_KEYS = {
    "max_speed": "max_speed",
    "acceleration": "acceleration",
    "deceleration": "deceleration",
    "physical_max": "physical_max",
    "hard_acceleration": "hard_acceleration",
    "hard_deceleration": "hard_deceleration",
}

DEFAULT_MIN_TURN_RADIUS = 0.5


def load_config(path) -> tuple[SpeedParams, float]:
    """Read `key = value` lines; returns (default SpeedParams, min turn radius)."""
    values = {}
    turn_radius = DEFAULT_MIN_TURN_RADIUS
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            try:
                num = float(val)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value {val!r}") from None
            if key == "min_turn_radius":
                turn_radius = num
            elif key in CONFIG_KEYS:
                values[CONFIG_KEYS[key]] = num
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return SpeedParams(**values), turn_radius
