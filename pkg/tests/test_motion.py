"""Tests for speed profiles, control strings and speed settings."""

import math
import random

import pytest

from ccrsim.errors import ProfileError
from ccrsim.motion import (CARRY, HARD, MAX, NORMAL, STD, ControlSpec,
                           MotionProfile, Phase, SpeedParams, apply_control,
                           apply_setting, apply_settings, base_profile,
                           load_config, parse_control_string)

DEFAULTS = SpeedParams()


def integrated_distance(profile, dt=1e-5):
    """Trapezoid-rule integral of the speed curve, as an independent check."""
    total = profile.duration
    if total == 0.0:
        return 0.0
    n = max(1, int(math.ceil(total / dt)))
    h = total / n
    acc = 0.5 * (profile.speed_at(0.0) + profile.speed_at(total))
    for i in range(1, n):
        acc += profile.speed_at(i * h)
    return acc * h


def test_parse_control_markers():
    assert parse_control_string("") == ControlSpec(NORMAL, NORMAL, "")
    assert parse_control_string("!") == ControlSpec(HARD, HARD, "")
    assert parse_control_string("=") == ControlSpec(CARRY, CARRY, "")
    assert parse_control_string("=!") == ControlSpec(CARRY, HARD, "")
    assert parse_control_string("!=") == ControlSpec(HARD, CARRY, "")
    assert parse_control_string("++__!") == ControlSpec(NORMAL, HARD, "++__")
    assert parse_control_string("=__-") == ControlSpec(CARRY, NORMAL, "__-")
    assert parse_control_string("a!b") == ControlSpec(NORMAL, NORMAL, "a!b")


def test_trapezoid_timing():
    # 10 m at cruise 2 m/s with 1 m/s^2 ramps: 1 s up, 1 s down, 4 m of
    # ramps, 6 m of cruise -> 1 + 3 + 1 = 7 s.
    params = SpeedParams(max_speed=2.0, acceleration=1.0, deceleration=1.0)
    prof = base_profile(10.0, params)
    assert prof.duration == pytest.approx(7.0, abs=1e-12)
    assert prof.distance == pytest.approx(10.0, abs=1e-12)
    assert integrated_distance(prof) == pytest.approx(10.0, abs=1e-4)


def test_triangular_profile():
    # Too short to reach cruise speed: peak sqrt(2*a*d*L/(a+d)) = 1.
    params = SpeedParams(max_speed=2.0, acceleration=1.0, deceleration=1.0)
    prof = base_profile(1.0, params)
    peak = max(prof.speed_at(t * prof.duration / 500) for t in range(501))
    assert peak == pytest.approx(1.0, abs=1e-9)
    assert prof.duration == pytest.approx(2.0, abs=1e-9)


def test_profile_starts_and_ends_at_rest_by_default():
    prof = base_profile(3.0, DEFAULTS)
    assert prof.speed_at(0.0) == 0.0
    assert prof.speed_at(prof.duration) == 0.0


def test_carry_through_keeps_speed():
    spec = parse_control_string("=")
    prof = apply_control(4.0, DEFAULTS, spec, previous_exit_speed=1.0)
    assert prof.entry_speed == 1.0
    assert prof.exit_speed == pytest.approx(1.0)
    assert prof.duration == pytest.approx(4.0)
    assert prof.distance == pytest.approx(4.0, abs=1e-9)


def test_hard_stop_is_faster_than_normal():
    soft = apply_control(5.0, DEFAULTS, parse_control_string(""))
    hard = apply_control(5.0, DEFAULTS, parse_control_string("!"))
    assert hard.duration < soft.duration


def test_braking_cycles_structure():
    # Eight interior '!' actions: eight full stop-and-relaunch cycles.
    spec = parse_control_string("!!!!!!!!!!")
    prof = apply_control(4.0, DEFAULTS, spec)
    launches = [ph for ph in prof.phases if ph.v0 == 0.0 and ph.accel > 0.0]
    assert len(launches) == 8  # one relaunch per interior '!'
    assert prof.distance == pytest.approx(4.0, abs=1e-9)
    assert prof.exit_speed == 0.0


def test_plus_exceeds_nominal_but_not_physical():
    params = SpeedParams(max_speed=1.0, physical_max=1.5)
    prof = apply_control(30.0, params, parse_control_string("++++++"))
    peak = max(prof.speed_at(i * prof.duration / 2000) for i in range(2001))
    assert peak > 1.0
    assert peak <= 1.5 + 1e-9


def test_minus_slows_down():
    prof = apply_control(20.0, DEFAULTS, parse_control_string("__--__"))
    dwell_speeds = sorted({ph.v0 for ph in prof.phases if ph.accel == 0.0})
    # Two '-' actions scale the cruise speed by 0.8 each.
    assert dwell_speeds[0] == pytest.approx(1.0 * 0.8 * 0.8)
    assert dwell_speeds[-1] == pytest.approx(1.0)


def test_infeasible_control_raises():
    with pytest.raises(ProfileError):
        # 1 m is far too short for six full-speed ramps.
        apply_control(1.0, DEFAULTS, parse_control_string("+_+_+_+_"))


def test_too_short_for_carried_speed_raises():
    with pytest.raises(ProfileError):
        apply_control(0.05, SpeedParams(deceleration=0.2),
                      parse_control_string("="), previous_exit_speed=2.0)


def test_distance_conservation_random_controls():
    rng = random.Random(97)
    alphabet = "+-_!"
    checked = 0
    while checked < 300:
        length = rng.uniform(2.0, 30.0)
        body = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 9)))
        decor = rng.choice(["", "!", "="]) + body + rng.choice(["", "!", "="])
        prev = rng.uniform(0.0, 1.0)
        try:
            prof = apply_control(length, DEFAULTS, parse_control_string(decor),
                                 previous_exit_speed=prev)
        except ProfileError:
            continue
        checked += 1
        assert prof.distance == pytest.approx(length, rel=1e-9, abs=1e-9)
        if checked % 10 == 0:
            assert integrated_distance(prof, dt=1e-3) == pytest.approx(
                length, rel=1e-3, abs=1e-3)


def test_speed_never_negative_nor_above_physical():
    rng = random.Random(5)
    for _ in range(50):
        body = "".join(rng.choice("+-_!") for _ in range(rng.randrange(0, 7)))
        try:
            prof = apply_control(rng.uniform(5.0, 25.0), DEFAULTS,
                                 parse_control_string(body))
        except ProfileError:
            continue
        for i in range(300):
            v = prof.speed_at(prof.duration * i / 299)
            assert -1e-12 <= v <= DEFAULTS.physical_max + 1e-9


def test_distance_at_is_monotonic():
    prof = apply_control(12.0, DEFAULTS, parse_control_string("++--!_"))
    samples = [prof.distance_at(prof.duration * i / 400) for i in range(401)]
    assert all(b >= a - 1e-12 for a, b in zip(samples, samples[1:]))
    assert samples[0] == 0.0
    assert samples[-1] == pytest.approx(12.0, abs=1e-9)


def test_carry_chain_is_continuous():
    first = apply_control(6.0, DEFAULTS, parse_control_string("="))
    second = apply_control(4.0, DEFAULTS, parse_control_string("="),
                           previous_exit_speed=first.exit_speed)
    assert second.entry_speed == first.exit_speed
    assert second.speed_at(0.0) == pytest.approx(first.speed_at(first.duration))


def test_apply_setting_max_std_and_clamp():
    p = apply_setting(DEFAULTS, DEFAULTS, "maxSpeed", MAX)
    assert p.max_speed == DEFAULTS.physical_max
    p = apply_setting(p, DEFAULTS, "maxSpeed", STD)
    assert p.max_speed == DEFAULTS.max_speed
    p = apply_setting(p, DEFAULTS, "maxSpeed", 99.0)
    assert p.max_speed == DEFAULTS.physical_max
    p = apply_setting(p, DEFAULTS, "acceleration", 2.0)
    assert p.acceleration == 2.0
    p = apply_setting(p, DEFAULTS, "deceleration", STD)
    assert p.deceleration == DEFAULTS.deceleration


def test_apply_settings_broadcast():
    class Fake:
        robot = None
        setting = "maxSpeed"
        value = 0.75

    table = {"a": SpeedParams(), "b": SpeedParams()}
    defaults = {"a": SpeedParams(), "b": SpeedParams()}
    out = apply_settings(Fake(), table, defaults)
    assert out["a"].max_speed == 0.75 and out["b"].max_speed == 0.75
    assert table["a"].max_speed == 1.0  # input untouched


def test_speed_params_validation():
    with pytest.raises(ValueError):
        SpeedParams(max_speed=0.0)
    with pytest.raises(ValueError):
        SpeedParams(max_speed=3.0, physical_max=2.0)
    with pytest.raises(ValueError):
        SpeedParams(acceleration=5.0, hard_acceleration=4.0)


def test_load_config(tmp_path):
    cfg = tmp_path / "robot.cfg"
    cfg.write_text("""
# defaults for the small robots
max_speed = 0.8
acceleration = 0.4
deceleration = 0.3
min_turn_radius = 0.25
""")
    params, radius = load_config(cfg)
    assert params.max_speed == 0.8
    assert params.acceleration == 0.4
    assert params.deceleration == 0.3
    assert radius == 0.25


def test_load_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("warp_factor = 9\n")
    with pytest.raises(ValueError):
        load_config(cfg)


def test_profile_dataclass_bookkeeping():
    prof = MotionProfile((Phase(0.0, 1.0, 2.0), Phase(2.0, 0.0, 3.0)), 0.0, 2.0)
    assert prof.duration == 5.0
    assert prof.distance == pytest.approx(2.0 + 6.0)
    assert prof.speed_at(1.0) == pytest.approx(1.0)
    assert prof.distance_at(2.0) == pytest.approx(2.0)
