"""Tests for per-robot timelines and barrier synchronization."""

import random

import pytest

from ccrsim.expander import InitialPose, MoveRel, Setting, Wait, compile_source
from ccrsim.scheduler import (Barrier, chain_ideal_poses, robot_pose_at,
                              simulate, split_streams)

HEADER = """
sceneWidth = 10;
sceneDepth = 5;
robot nille = robot("Nille", color(255, 128, 128));
robot frederik = robot("Frederik", color(128, 128, 255));
"""

THREE = HEADER + 'robot pelle = robot("Pelle", color(128, 255, 128));\n'


def run(body, header=HEADER, **kwargs):
    return simulate(compile_source(header + body), **kwargs)


def actions_of(timeline, robot, kind=None):
    acts = timeline.actions[robot]
    if kind is None:
        return acts
    return [a for a in acts if a.kind == kind]


def test_split_streams_routing():
    stream = compile_source(HEADER + """
initialPose(nille, 0, 1, north);
initialPose(frederik, 1, 1, north);
maxSpeed(2);
move(nille, 1);
wait(frederik, 1);
synchronize();
acceleration(nille, 0.4);
""")
    queues, barriers = split_streams(stream)
    assert set(queues) == {"nille", "frederik"}
    assert len(barriers) == 1
    assert barriers[0].participants == ("nille", "frederik")
    kinds_n = [type(i).__name__ for i in queues["nille"]]
    assert kinds_n == ["InitialPose", "Setting", "MoveRel", "Barrier",
                       "Setting"]
    kinds_f = [type(i).__name__ for i in queues["frederik"]]
    assert kinds_f == ["InitialPose", "Setting", "Wait", "Barrier"]
    # The shared barrier is the very same object in both queues.
    assert queues["nille"][3] is queues["frederik"][3]


def test_chain_ideal_poses():
    stream = compile_source(HEADER + """
initialPose(nille, 0, 1, north);
move(nille, 2);
circleRight(nille, 1, 90);
wait(nille, 1);
""")
    queues, _ = split_streams(stream)
    pairs = chain_ideal_poses(queues["nille"])
    assert pairs[0][1] == pairs[0][0]
    assert (pairs[1][1].x, pairs[1][1].y) == (pytest.approx(0.0),
                                              pytest.approx(3.0))
    end = pairs[2][1]
    assert (end.x, end.y, end.heading) == (pytest.approx(1.0),
                                           pytest.approx(4.0),
                                           pytest.approx(90.0))
    assert pairs[3] == (end, end)


def test_independent_robots_run_in_parallel():
    tl = run("""
initialPose(nille, -2, 1, north);
initialPose(frederik, 2, 1, north);
move(nille, 2);
move(frederik, 2);
""")
    a = actions_of(tl, "nille", "path")[0]
    b = actions_of(tl, "frederik", "path")[0]
    assert a.start == 0.0 and b.start == 0.0
    assert tl.duration == pytest.approx(a.end)


def test_wait_delays_only_its_robot():
    tl = run("""
initialPose(nille, -2, 1, north);
initialPose(frederik, 2, 1, north);
wait(nille, 3);
move(nille, 1);
move(frederik, 1);
""")
    n_path = actions_of(tl, "nille", "path")[0]
    f_path = actions_of(tl, "frederik", "path")[0]
    assert n_path.start == pytest.approx(3.0)
    assert f_path.start == 0.0


def test_barrier_everyone_waits_for_the_slowest():
    # nille: 2 s wait; frederik: 6.5 s wait; barrier releases at 6.5.
    tl = run("""
initialPose(nille, -2, 1, north);
initialPose(frederik, 2, 1, north);
wait(nille, 2);
wait(frederik, 6.5);
synchronize();
move(nille, 1);
move(frederik, 1);
""")
    holds_n = actions_of(tl, "nille", "hold")
    holds_f = actions_of(tl, "frederik", "hold")
    assert len(holds_n) == 1 and len(holds_f) == 1
    assert holds_n[0].start == pytest.approx(2.0)
    assert holds_n[0].end == pytest.approx(6.5)
    assert holds_f[0].start == pytest.approx(6.5)
    assert holds_f[0].end == pytest.approx(6.5)
    assert actions_of(tl, "nille", "path")[0].start == pytest.approx(6.5)
    assert actions_of(tl, "frederik", "path")[0].start == pytest.approx(6.5)


def test_subset_barrier_leaves_third_robot_alone():
    with_sync = run("""
initialPose(nille, -3, 1, north);
initialPose(frederik, 0, 1, north);
initialPose(pelle, 3, 1, north);
wait(nille, 5);
synchronize(nille, frederik);
move(frederik, 1);
move(pelle, 1);
""", header=THREE)
    without = run("""
initialPose(pelle, 3, 1, north);
move(pelle, 1);
""", header=THREE.replace(HEADER, "sceneWidth = 10;\nsceneDepth = 5;\n"))
    a = actions_of(with_sync, "pelle", "path")[0]
    b = actions_of(without, "pelle", "path")[0]
    assert a.start == b.start == 0.0
    assert a.end == pytest.approx(b.end)
    # frederik waits for nille's 5 s.
    assert actions_of(with_sync, "frederik", "path")[0].start == pytest.approx(5.0)


def test_interleaving_invariance():
    grouped = run("""
initialPose(nille, -2, 1, north);
move(nille, 2);
moveTo(nille, -2, 4, north);
initialPose(frederik, 2, 1, north);
move(frederik, 1);
moveTo(frederik, 2, 4, north);
""")
    intertwined = run("""
initialPose(nille, -2, 1, north);
initialPose(frederik, 2, 1, north);
move(nille, 2);
move(frederik, 1);
moveTo(nille, -2, 4, north);
moveTo(frederik, 2, 4, north);
""")
    assert grouped.duration == intertwined.duration
    for rid in ("nille", "frederik"):
        a = [(x.kind, x.start, x.end, x.start_pose, x.end_pose)
             for x in grouped.actions[rid]]
        b = [(x.kind, x.start, x.end, x.start_pose, x.end_pose)
             for x in intertwined.actions[rid]]
        assert a == b


def test_settings_change_following_moves_only():
    slow = run("""
initialPose(nille, 0, 1, north);
move(nille, 2);
maxSpeed(nille, 0.5);
move(nille, 2);
""")
    paths = actions_of(slow, "nille", "path")
    first = paths[0].end - paths[0].start
    second = paths[1].end - paths[1].start
    assert second > first


def test_carry_downgraded_before_barrier():
    tl = run("""
initialPose(nille, 0, 1, north);
initialPose(frederik, 2, 1, north);
move(nille, 2, "=");
synchronize();
move(nille, 1, "=");
""")
    # The robot must stand still at the barrier, so the carried exit is
    # downgraded to a stop and a note records it.
    assert any("barrier" in n for n in tl.notes)
    path = actions_of(tl, "nille", "path")[0]
    assert path.profile.exit_speed == 0.0


def test_robot_pose_at_samples_movement():
    tl = run("""
initialPose(nille, 0, 1, north);
move(nille, 2);
""")
    pose, speed = robot_pose_at(tl, "nille", 0.0)
    assert (pose.x, pose.y) == (0.0, 1.0)
    assert speed == 0.0
    mid_pose, mid_speed = robot_pose_at(tl, "nille", tl.duration / 2)
    assert 1.0 < mid_pose.y < 3.0
    assert mid_speed > 0.0
    end_pose, end_speed = robot_pose_at(tl, "nille", tl.duration)
    assert end_pose.y == pytest.approx(3.0)
    assert end_speed == 0.0


def test_pose_before_initial_pose_is_none():
    tl = run("""
initialPose(nille, 0, 1, north);
wait(frederik, 1);
initialPose(frederik, 2, 1, north);
""")
    pose, speed = robot_pose_at(tl, "frederik", 0.5)
    assert speed == 0.0
    # frederik has no pose while still waiting to be placed.
    first = tl.actions["frederik"][0]
    assert first.kind == "wait" and first.start_pose is None


def test_durations_match_profile_durations():
    tl = run("""
initialPose(nille, 0, 1, north);
moveTo(nille, 2, 3, east);
circleLeft(nille, 1, 180);
""")
    for action in actions_of(tl, "nille", "path"):
        assert action.end - action.start == pytest.approx(
            action.profile.duration)
        from ccrsim.geometry import path_length
        assert action.profile.distance == pytest.approx(
            path_length(action.segments), abs=1e-9)


def test_deterministic_repetition():
    source = HEADER + """
initialPose(nille, -2, 1, north);
initialPose(frederik, 2, 1, north);
moveTo(nille, 0, 4, east, "+-");
circleRightBacking(frederik, 0.7, 120);
synchronize();
move(nille, 1);
"""
    a = simulate(compile_source(source))
    b = simulate(compile_source(source))
    assert a == b


def test_random_schedules_have_consistent_clocks():
    rng = random.Random(13)
    for _ in range(20):
        lines = ["initialPose(nille, -2, 1, north);",
                 "initialPose(frederik, 2, 1, north);"]
        for _ in range(rng.randrange(1, 6)):
            r = rng.choice(["nille", "frederik"])
            k = rng.random()
            if k < 0.4:
                lines.append("move(%s, %.2f);" % (r, rng.uniform(0.3, 1.5)))
            elif k < 0.6:
                lines.append("wait(%s, %.2f);" % (r, rng.uniform(0.1, 2.0)))
            elif k < 0.8:
                lines.append("circleLeft(%s, 0.6, %d);" % (r, rng.randrange(30, 270)))
            else:
                lines.append("synchronize();")
        tl = run("\n".join(lines))
        assert tl.duration >= 0.0
        for rid, acts in tl.actions.items():
            t = 0.0
            for act in acts:
                assert act.start >= t - 1e-12
                assert act.end >= act.start - 1e-12
                t = act.start if act.kind == "mark" else act.end
            assert t <= tl.duration + 1e-12
