"""Scene bounds, forbidden areas, reference points and trajectory scanning.

The legal x range is [-width/2, width/2] and the legal y range [0, depth].
Forbidden areas trigger warnings, never prevention; boundaries are inclusive.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import expander, scheduler
from .errors import SceneError
from .expander import Color, InstructionStream

DEFAULT_SCAN_DT = 0.02

OUT_OF_SCENE = "out-of-scene"
FORBIDDEN = "forbidden-area"


@dataclass(frozen=True)
class AreaDef:
    name: str
    color: Color
    x0: float  # min corner
    y0: float
    x1: float  # max corner
    y1: float

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1


@dataclass(frozen=True)
class RefPointDef:
    color: Color
    x: float
    y: float


@dataclass(frozen=True)
class Scene:
    width: float
    depth: float
    areas: tuple[AreaDef, ...] = ()
    points: tuple[RefPointDef, ...] = ()
    grid: bool = False

    def __post_init__(self):
        if self.width <= 0 or self.depth <= 0:
            raise SceneError(f"scene dimensions must be positive, "
                             f"got {self.width} x {self.depth}")


def build_scene(stream: InstructionStream) -> Scene:
    """Scene declared by a stream's grid/referencePoint/forbiddenArea instructions."""
    areas = []
    points = []
    grid = False
    names = set()
    for instr in stream.instructions:
        if isinstance(instr, expander.GridOn):
            grid = True
        elif isinstance(instr, expander.ReferencePoint):
            points.append(RefPointDef(instr.color, instr.x, instr.y))
        elif isinstance(instr, expander.ForbiddenArea):
            if instr.name in names:
                # Scene settings are final: they cannot be re-declared.
                raise SceneError(f"forbidden area {instr.name!r} declared twice",
                                 instr.line)
            names.add(instr.name)
            areas.append(AreaDef(instr.name, instr.color,
                                 min(instr.x1, instr.x2), min(instr.y1, instr.y2),
                                 max(instr.x1, instr.x2), max(instr.y1, instr.y2)))
    return Scene(stream.scene_width, stream.scene_depth, tuple(areas), tuple(points), grid)


def classify_point(scene: Scene, x: float, y: float):
    """('legal', None), ('out-of-scene', None) or ('forbidden-area', name).

    When areas overlap, the first declared containing area wins.
    """
    half = scene.width / 2.0
    if not (-half <= x <= half and 0.0 <= y <= scene.depth):
        return (OUT_OF_SCENE, None)
    for area in scene.areas:
        if area.contains(x, y):
            return (FORBIDDEN, area.name)
    return ("legal", None)


@dataclass(frozen=True)
class SceneWarning:
    robot: str
    time: float
    x: float
    y: float
    cause: str  # OUT_OF_SCENE | FORBIDDEN
    area: str | None

    def describe(self) -> str:
        where = f"({self.x:.3f}, {self.y:.3f})"
        if self.cause == FORBIDDEN:
            return (f"warning: robot {self.robot} enters forbidden area "
                    f"{self.area!r} at t={self.time:.3f} s, {where}")
        return (f"warning: robot {self.robot} leaves the scene "
                f"at t={self.time:.3f} s, {where}")


def sample_times(timeline, dt: float, robot: str | None = None):
    """Sorted t = 0, dt, 2dt, ..., T plus action boundaries, deduplicated."""
    times = set()
    t = 0.0
    k = 0
    while True:
        t = k * dt
        if t > timeline.duration:
            break
        times.add(t)
        k += 1
    times.add(timeline.duration)
    robots = [robot] if robot is not None else list(timeline.actions)
    for rid in robots:
        for action in timeline.actions[rid]:
            times.add(action.start)
            times.add(action.end)
    out = []
    for t in sorted(times):
        if out and t - out[-1] < 1e-12:
            continue
        out.append(t)
    return out


def scan_timeline(scene: Scene, timeline, dt: float = DEFAULT_SCAN_DT):
    """One warning per contiguous (robot, cause) violation episode."""
    if dt <= 0:
        raise ValueError(f"scan dt must be positive, got {dt}")
    warnings = []
    for rid in timeline.robots:
        prev = ("legal", None)
        for t in sample_times(timeline, dt, rid):
            pose, _ = scheduler.robot_pose_at(timeline, rid, t)
            if pose is None:
                continue
            cause = classify_point(scene, pose.x, pose.y)
            if cause != prev and cause[0] != "legal":
                warnings.append(SceneWarning(rid, t, pose.x, pose.y,
                                             cause[0], cause[1]))
            prev = cause
    return warnings
