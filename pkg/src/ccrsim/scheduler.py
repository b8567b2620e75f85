"""Turn an instruction stream into per-robot timelines.

Each robot runs its instructions back to back starting at t = 0.  A
synchronize barrier holds every early arriver until the slowest participant
has arrived; all participants resume together, at a standstill.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import expander, geometry, motion
from .errors import CcrError
from .expander import (Arc, InitialPose, InstructionStream, MoveRel, MoveTo,
                       Setting, Synchronize, Wait)
from .geometry import BACKING, FORWARD, Pose, TurnConstraint
from .motion import CARRY, MotionProfile, SpeedParams


@dataclass(frozen=True)
class Barrier:
    index: int
    line: int
    text: str
    participants: tuple[str, ...]


@dataclass(frozen=True)
class TimedAction:
    robot: str
    index: int  # source instruction index
    kind: str  # 'path' | 'wait' | 'hold' | 'mark'
    text: str
    start: float
    end: float
    start_pose: Pose | None
    end_pose: Pose | None
    segments: tuple = ()
    profile: MotionProfile | None = None
    broadcast: bool = False  # True for the copies of an all-robot setting


@dataclass(frozen=True)
class Timeline:
    robots: tuple[str, ...]
    actions: dict  # robot id -> tuple[TimedAction, ...]
    duration: float
    notes: tuple[str, ...] = ()

    def final_pose(self, robot: str) -> Pose | None:
        for action in reversed(self.actions[robot]):
            if action.end_pose is not None:
                return action.end_pose
        return None


def split_streams(stream: InstructionStream):
    """Per-robot instruction queues with shared barrier markers.

    Returns (queues, barriers): queues maps robot id to its ordered items
    (instructions and Barrier objects); barriers is the stream-ordered list
    of shared Barrier objects.
    """
    all_ids = stream.robot_ids()
    queues = {rid: [] for rid in all_ids}
    barriers = []
    for instr in stream.instructions:
        if isinstance(instr, Synchronize):
            participants = instr.robots if instr.robots is not None else all_ids
            barrier = Barrier(instr.index, instr.line, instr.text, tuple(participants))
            barriers.append(barrier)
            for rid in barrier.participants:
                queues[rid].append(barrier)
        elif isinstance(instr, Setting):
            targets = all_ids if instr.robot is None else (instr.robot,)
            for rid in targets:
                queues[rid].append(instr)
        elif isinstance(instr, (InitialPose, MoveTo, MoveRel, Wait, Arc)):
            queues[instr.robot].append(instr)
        # Scene furniture (grid, reference points, forbidden areas) does not
        # enter the timelines.
    return queues, barriers


def movement_endpoints(instr, pose: Pose) -> Pose:
    """Analytic end pose of a movement started at ``pose``."""
    if isinstance(instr, MoveTo):
        return instr.goal
    if isinstance(instr, MoveRel):
        return geometry.line_endpoint(pose, instr.distance,
                                      BACKING if instr.backing else FORWARD)
    if isinstance(instr, Arc):
        return geometry.arc_endpoint(pose, instr.radius, instr.angle, instr.side,
                                     BACKING if instr.backing else FORWARD)
    raise TypeError(f"not a movement: {instr!r}")


def chain_ideal_poses(queue, initial_pose: Pose | None = None):
    """(start, end) pose annotation for every item of one robot's queue.

    Movements chain analytically from the previous movement's end pose;
    everything else keeps the pose unchanged.
    """
    pose = initial_pose
    out = []
    for item in queue:
        if isinstance(item, InitialPose):
            pose = item.pose
            out.append((pose, pose))
        elif isinstance(item, expander.MOVEMENTS):
            end = movement_endpoints(item, pose)
            out.append((pose, end))
            pose = end
        else:
            out.append((pose, pose))
    return out


def _plan_movement(instr, start: Pose, constraint: TurnConstraint):
    travel = BACKING if getattr(instr, "backing", False) else FORWARD
    if isinstance(instr, MoveTo):
        return geometry.plan_path(start, instr.goal, travel, constraint)
    if isinstance(instr, MoveRel):
        if instr.distance <= 0:
            return ()
        return (geometry.line_segment(start, instr.distance, travel),)
    if instr.angle <= 0:
        return ()
    return (geometry.arc_segment(start, instr.radius, instr.angle, instr.side, travel),)


def _effective_spec(queue, i, notes):
    instr = queue[i]
    spec = motion.parse_control_string(instr.control)
    if spec.exit != CARRY:
        return spec
    j = i + 1
    while j < len(queue) and isinstance(queue[j], Setting):
        j += 1
    nxt = queue[j] if j < len(queue) else None
    if isinstance(nxt, expander.MOVEMENTS) \
            and motion.parse_control_string(nxt.control).entry == CARRY:
        return spec
    if isinstance(nxt, Barrier):
        notes.append(f"line {instr.line}: carry-over '=' before a barrier is ignored; "
                     f"robot {instr.robot} stops")
    return replace(spec, exit=motion.NORMAL)


@dataclass
class _RobotState:
    rid: str
    queue: list
    poses: list
    params: SpeedParams
    defaults: SpeedParams
    constraint: TurnConstraint
    t: float = 0.0
    pos: int = 0
    prev_exit: float = 0.0
    actions: list = field(default_factory=list)

    @property
    def pose(self) -> Pose | None:
        if self.pos == 0:
            return self.poses[0][0] if self.poses else None
        return self.poses[self.pos - 1][1]


def _execute(state: _RobotState, instr, notes):
    start_pose, end_pose = state.poses[state.pos]
    if isinstance(instr, InitialPose):
        state.actions.append(TimedAction(state.rid, instr.index, "mark", instr.text,
                                         state.t, state.t, start_pose, end_pose))
    elif isinstance(instr, Setting):
        state.params = motion.apply_setting(state.params, state.defaults,
                                            instr.setting, instr.value)
        state.actions.append(TimedAction(state.rid, instr.index, "mark", instr.text,
                                         state.t, state.t, start_pose, end_pose,
                                         broadcast=instr.robot is None))
    elif isinstance(instr, Wait):
        state.actions.append(TimedAction(state.rid, instr.index, "wait", instr.text,
                                         state.t, state.t + instr.seconds,
                                         start_pose, end_pose))
        state.t += instr.seconds
        state.prev_exit = 0.0
    elif isinstance(instr, expander.MOVEMENTS):
        try:
            segments = _plan_movement(instr, start_pose, state.constraint)
            spec = _effective_spec(state.queue, state.pos, notes)
            profile = motion.apply_control(geometry.path_length(segments),
                                           state.params, spec, state.prev_exit)
        except CcrError as err:
            if err.line is None:
                err.line = instr.line
            raise
        state.actions.append(TimedAction(state.rid, instr.index, "path", instr.text,
                                         state.t, state.t + profile.duration,
                                         start_pose, end_pose, segments, profile))
        state.t += profile.duration
        state.prev_exit = profile.exit_speed
    else:
        raise TypeError(f"cannot execute {instr!r}")
    state.pos += 1


def _run_to(state: _RobotState, barrier, notes) -> float:
    """Execute until ``barrier`` is consumed (or to the end when None)."""
    while state.pos < len(state.queue):
        item = state.queue[state.pos]
        if isinstance(item, Barrier):
            assert item is barrier, "barriers left a robot's queue out of order"
            return state.t
        _execute(state, item, notes)
    assert barrier is None, "queue exhausted before its barrier"
    return state.t


def schedule(queues, barriers, params_by_robot, defaults_by_robot,
             constraint_by_robot) -> Timeline:
    """Assign absolute times to every queued item and resolve barriers."""
    notes: list[str] = []
    states = {}
    for rid, queue in queues.items():
        states[rid] = _RobotState(rid, queue, chain_ideal_poses(queue),
                                  params_by_robot[rid], defaults_by_robot[rid],
                                  constraint_by_robot[rid])
    for barrier in barriers:
        arrivals = {rid: _run_to(states[rid], barrier, notes)
                    for rid in barrier.participants}
        release = max(arrivals.values())
        for rid in barrier.participants:
            state = states[rid]
            pose = state.pose
            state.actions.append(TimedAction(rid, barrier.index, "hold", barrier.text,
                                             arrivals[rid], release, pose, pose))
            state.t = release
            state.prev_exit = 0.0
            state.pos += 1  # consume the barrier marker
    for state in states.values():
        _run_to(state, None, notes)
    duration = max((s.t for s in states.values()), default=0.0)
    return Timeline(tuple(queues), {rid: tuple(s.actions) for rid, s in states.items()},
                    duration, tuple(notes))


def simulate(stream: InstructionStream, base_params: SpeedParams | None = None,
             min_turn_radius: float = motion.DEFAULT_MIN_TURN_RADIUS) -> Timeline:
    """Full pipeline from an instruction stream to a Timeline."""
    params = base_params if base_params is not None else SpeedParams()
    queues, barriers = split_streams(stream)
    ids = stream.robot_ids()
    constraint = TurnConstraint(min_turn_radius)
    return schedule(queues, barriers,
                    {rid: params for rid in ids},
                    {rid: params for rid in ids},
                    {rid: constraint for rid in ids})


def robot_pose_at(timeline: Timeline, robot: str, t: float):
    """(pose, speed) of a robot at time ``t``; pose freezes outside its actions."""
    if robot not in timeline.actions:
        raise KeyError(f"unknown robot {robot!r}")
    if t < -1e-12 or t > timeline.duration + 1e-12:
        raise ValueError(f"time {t} outside [0, {timeline.duration}]")
    actions = timeline.actions[robot]
    current = None
    for action in actions:
        if action.start <= t:
            current = action
        else:
            break
    if current is None:
        return None, 0.0
    if t >= current.end or current.kind != "path":
        pose = current.end_pose if t >= current.end else current.start_pose
        return pose, 0.0
    rel = t - current.start
    speed = current.profile.speed_at(rel)
    if not current.segments:
        return current.start_pose, speed
    length = geometry.path_length(current.segments)
    s = min(max(current.profile.distance_at(rel), 0.0), length)
    return geometry.sample_path(current.segments, s), speed
