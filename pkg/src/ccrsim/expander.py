"""Evaluation and flattening: AST -> ordered stream of robot-bound instructions.

Procedure bodies are inlined with their arguments bound, repeat blocks are
unrolled, and every expression is evaluated against the scene environment
(units sw/hsw/sd/m, the 16 compass directions, let bindings, parameters).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import lexer, parser
from .errors import EvalError, ExpandError
from .geometry import Pose

MAX_CALL_DEPTH = 64

# 16-wind compass rose, 22.5 degrees apart, north = 0, clockwise.
DIRECTIONS = {
    "north": 0.0, "nne": 22.5, "northEast": 45.0, "ene": 67.5,
    "east": 90.0, "ese": 112.5, "southEast": 135.0, "sse": 157.5,
    "south": 180.0, "ssw": 202.5, "southWest": 225.0, "wsw": 247.5,
    "west": 270.0, "wnw": 292.5, "northWest": 315.0, "nnw": 337.5,
}


def resolve_direction(name: str) -> float:
    """Degrees of one of the 16 compass direction names."""
    try:
        return DIRECTIONS[name]
    except KeyError:
        raise EvalError(f"unknown direction name {name!r}") from None


# --- value types ------------------------------------------------------------

@dataclass(frozen=True)
class Color:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for ch in (self.r, self.g, self.b):
            if not (0 <= ch <= 255):
                raise EvalError(f"color channel {ch} outside [0, 255]")


@dataclass(frozen=True)
class RobotRef:
    name: str


@dataclass(frozen=True)
class SpeedConstant:
    name: str  # 'max' | 'std'


def _type_name(value) -> str:
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "text"
    if isinstance(value, Color):
        return "color"
    if isinstance(value, Pose):
        return "pose"
    if isinstance(value, RobotRef):
        return "robot"
    if isinstance(value, SpeedConstant):
        return f"constant {value.name}"
    return type(value).__name__


def _as_number(value, what, line=None):
    if not isinstance(value, float):
        raise EvalError(f"{what} must be a number, not {_type_name(value)}", line)
    return value


def _as_channel(value, line):
    v = _as_number(value, "color channel", line)
    if abs(v - round(v)) > 1e-9:
        raise EvalError(f"color channel must be an integer, got {v}", line)
    return int(round(v))


def eval_expr(expr, env: dict):
    """Evaluate an expression node to a value (number, text, color, pose, ...)."""
    if isinstance(expr, parser.Num):
        return expr.value
    if isinstance(expr, parser.Str):
        return expr.value
    if isinstance(expr, parser.Name):
        if expr.name in env:
            return env[expr.name]
        raise EvalError(f"unbound identifier {expr.name!r}", expr.line, expr.column)
    if isinstance(expr, parser.Unary):
        v = eval_expr(expr.operand, env)
        return -_as_number(v, "operand of unary '-'", expr.line)
    if isinstance(expr, parser.BinOp):
        left = eval_expr(expr.left, env)
        right = eval_expr(expr.right, env)
        if not isinstance(left, float) or not isinstance(right, float):
            raise EvalError(
                f"cannot apply {expr.op!r} to {_type_name(left)} and {_type_name(right)}",
                expr.line, expr.column)
        if expr.op == "+":
            return left + right
        if expr.op == "-":
            return left - right
        if expr.op == "*":
            return left * right
        if right == 0.0:
            raise EvalError("division by zero", expr.line, expr.column)
        return left / right
    if isinstance(expr, parser.FuncCall):
        if expr.name == "pose":
            if len(expr.args) != 3:
                raise EvalError("pose(x, y, heading) takes 3 arguments",
                                expr.line, expr.column)
            x, y, h = (eval_expr(a, env) for a in expr.args)
            return Pose(_as_number(x, "pose x", expr.line),
                        _as_number(y, "pose y", expr.line),
                        _as_number(h, "pose heading", expr.line))
        if expr.name == "color":
            if len(expr.args) != 3:
                raise EvalError("color(r, g, b) takes 3 arguments",
                                expr.line, expr.column)
            r, g, b = (_as_channel(eval_expr(a, env), expr.line) for a in expr.args)
            return Color(r, g, b)
        raise EvalError(f"unknown function {expr.name!r} in expression",
                        expr.line, expr.column)
    raise EvalError(f"cannot evaluate {expr!r}")


# --- instruction stream -----------------------------------------------------

@dataclass(frozen=True)
class Instruction:
    index: int
    line: int
    text: str


@dataclass(frozen=True)
class InitialPose(Instruction):
    robot: str
    pose: Pose


@dataclass(frozen=True)
class MoveTo(Instruction):
    robot: str
    goal: Pose
    backing: bool
    control: str


@dataclass(frozen=True)
class MoveRel(Instruction):
    robot: str
    distance: float
    backing: bool
    control: str


@dataclass(frozen=True)
class Arc(Instruction):
    robot: str
    radius: float
    angle: float
    side: str  # geometry.LEFT | geometry.RIGHT
    backing: bool
    control: str


@dataclass(frozen=True)
class Wait(Instruction):
    robot: str
    seconds: float


@dataclass(frozen=True)
class Synchronize(Instruction):
    robots: tuple[str, ...] | None  # None = all declared robots


@dataclass(frozen=True)
class Setting(Instruction):
    robot: str | None  # None = all robots
    setting: str  # 'maxSpeed' | 'acceleration' | 'deceleration'
    value: object  # float | 'max' | 'std'


@dataclass(frozen=True)
class GridOn(Instruction):
    pass


@dataclass(frozen=True)
class ReferencePoint(Instruction):
    color: Color
    x: float
    y: float


@dataclass(frozen=True)
class ForbiddenArea(Instruction):
    name: str
    color: Color
    x1: float
    y1: float
    x2: float
    y2: float


MOVEMENTS = (MoveTo, MoveRel, Arc)


@dataclass(frozen=True)
class RobotInfo:
    id: str  # script variable name
    display: str  # declared display name
    color: Color


@dataclass(frozen=True)
class InstructionStream:
    scene_width: float
    scene_depth: float
    robots: tuple[RobotInfo, ...]
    instructions: tuple[Instruction, ...]

    def robot_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.robots)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:g}"
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, Pose):
        return f"{v.x:g}, {v.y:g}, {v.heading:g}"
    if isinstance(v, Color):
        return f"color({v.r}, {v.g}, {v.b})"
    if isinstance(v, SpeedConstant):
        return v.name
    return str(v)


class _Expander:
    def __init__(self, ast: parser.ScriptAst, max_depth=MAX_CALL_DEPTH):
        self.ast = ast
        self.max_depth = max_depth
        self.procs: dict[str, parser.ProcDef] = {}
        self.robots: list[RobotInfo] = []
        self.robot_ids: set[str] = set()
        self.placed: set[str] = set()
        self.instructions: list[Instruction] = []
        self.env: dict = {}

    def run(self) -> InstructionStream:
        ast = self.ast
        if ast.scene_width is None or ast.scene_depth is None:
            if not ast.items:
                raise ExpandError("empty script: scene dimensions are not defined")
            raise ExpandError("sceneWidth and sceneDepth must be defined first")
        width = _as_number(eval_expr(ast.scene_width, {}), "sceneWidth")
        depth = _as_number(eval_expr(ast.scene_depth, {}), "sceneDepth")
        if width <= 0 or depth <= 0:
            raise ExpandError(f"scene dimensions must be positive, got {width} x {depth}")
        self.env = {
            "sw": width, "hsw": width / 2.0, "sd": depth, "m": 1.0,
            "max": SpeedConstant("max"), "std": SpeedConstant("std"),
        }
        self.env.update(DIRECTIONS)
        for item in ast.items:
            self.toplevel(item)
        return InstructionStream(width, depth, tuple(self.robots),
                                 tuple(self.instructions))

    def toplevel(self, item):
        if isinstance(item, parser.RobotDecl):
            self.robot_decl(item)
        elif isinstance(item, parser.ProcDef):
            self.procs[item.name] = item
        else:
            self.statement(item, self.env, 0)

    def robot_decl(self, decl: parser.RobotDecl):
        if decl.var in self.robot_ids:
            raise ExpandError(f"robot {decl.var!r} declared twice", decl.line)
        display = eval_expr(decl.name_expr, self.env)
        if not isinstance(display, str):
            raise ExpandError("robot name must be a text string", decl.line)
        color = eval_expr(decl.color_expr, self.env)
        if not isinstance(color, Color):
            raise ExpandError("robot color must be a color(r, g, b)", decl.line)
        self.robots.append(RobotInfo(decl.var, display, color))
        self.robot_ids.add(decl.var)
        self.env[decl.var] = RobotRef(decl.var)

    def statement(self, stmt, env, depth):
        if isinstance(stmt, parser.LetDecl):
            env[stmt.name] = eval_expr(stmt.expr, env)
        elif isinstance(stmt, parser.Repeat):
            count = _as_number(eval_expr(stmt.count, env), "repeat count", stmt.line)
            if count < 0 or abs(count - round(count)) > 1e-9:
                raise ExpandError(f"repeat count must be a non-negative integer, got {count:g}",
                                  stmt.line)
            for _ in range(int(round(count))):
                for inner in stmt.body:
                    self.statement(inner, env, depth)
        elif isinstance(stmt, parser.CallStmt):
            self.call(stmt, env, depth)
        else:
            raise ExpandError(f"unexpected statement {stmt!r}")

    def call(self, stmt: parser.CallStmt, env, depth):
        if stmt.name in self.procs:
            proc = self.procs[stmt.name]
            if len(stmt.args) != len(proc.params):
                raise ExpandError(
                    f"{proc.name}() takes {len(proc.params)} arguments, got {len(stmt.args)}",
                    stmt.line)
            if depth >= self.max_depth:
                raise ExpandError(f"procedure call depth exceeds {self.max_depth}",
                                  stmt.line)
            frame = dict(self.env)
            frame.update(env)
            args = [eval_expr(a, env) for a in stmt.args]
            frame.update(zip(proc.params, args))
            for inner in proc.body:
                self.statement(inner, frame, depth + 1)
            return
        handler = _BUILTINS.get(stmt.name)
        if handler is None:
            raise ExpandError(f"call to undefined instruction or procedure {stmt.name!r}",
                              stmt.line)
        args = [eval_expr(a, env) for a in stmt.args]
        handler(self, stmt, args)

    # --- builtin emission helpers ---

    def emit(self, cls, stmt, text, **fields):
        self.instructions.append(cls(index=len(self.instructions),
                                     line=stmt.line, text=text, **fields))

    def robot_arg(self, stmt, args, i=0) -> str:
        if i >= len(args) or not isinstance(args[i], RobotRef):
            raise ExpandError(f"{stmt.name}() needs a robot as argument {i + 1}",
                              stmt.line)
        rid = args[i].name
        if rid not in self.robot_ids:
            raise ExpandError(f"robot {rid!r} is not declared", stmt.line)
        return rid

    def require_placed(self, stmt, rid):
        if rid not in self.placed:
            raise ExpandError(
                f"robot {rid!r} moves before initialPose", stmt.line)

    def number_arg(self, stmt, args, i, what, minimum=None, strict=False):
        if i >= len(args):
            raise ExpandError(f"{stmt.name}() missing {what}", stmt.line)
        v = _as_number(args[i], what, stmt.line)
        if minimum is not None and (v < minimum or (strict and v == minimum)):
            raise ExpandError(f"{what} must be {'>' if strict else '>='} {minimum}, got {v:g}",
                              stmt.line)
        return v


def _pose_args(exp: _Expander, stmt, args, tail_allows_control=True):
    """(robot, goal pose, control) for initialPose/moveTo-style calls."""
    rid = exp.robot_arg(stmt, args)
    rest = args[1:]
    control = ""
    if tail_allows_control and rest and isinstance(rest[-1], str):
        control = rest[-1]
        rest = rest[:-1]
    if len(rest) == 1 and isinstance(rest[0], Pose):
        return rid, rest[0], control
    if len(rest) == 3 and all(isinstance(v, float) for v in rest):
        return rid, Pose(rest[0], rest[1], rest[2]), control
    raise ExpandError(
        f"{stmt.name}() expects (robot, x, y, heading) or (robot, pose)", stmt.line)


def _b_initial_pose(exp, stmt, args):
    rid, pose, control = _pose_args(exp, stmt, args, tail_allows_control=False)
    exp.placed.add(rid)
    exp.emit(InitialPose, stmt, f"initialPose({_fmt(pose)})", robot=rid, pose=pose)


def _move_to(backing):
    def handler(exp, stmt, args):
        rid, pose, control = _pose_args(exp, stmt, args)
        exp.require_placed(stmt, rid)
        text = f"{stmt.name}({_fmt(pose)}" + (f', "{control}")' if control else ")")
        exp.emit(MoveTo, stmt, text, robot=rid, goal=pose, backing=backing,
                 control=control)
    return handler


def _move_rel(backing):
    def handler(exp, stmt, args):
        rid = exp.robot_arg(stmt, args)
        control = ""
        rest = args
        if len(rest) >= 2 and isinstance(rest[-1], str):
            control = rest[-1]
            rest = rest[:-1]
        dist = exp.number_arg(stmt, rest, 1, "distance", minimum=0.0)
        exp.require_placed(stmt, rid)
        text = f"{stmt.name}({dist:g}" + (f', "{control}")' if control else ")")
        exp.emit(MoveRel, stmt, text, robot=rid, distance=dist, backing=backing,
                 control=control)
    return handler


def _circle(side, backing):
    def handler(exp, stmt, args):
        rid = exp.robot_arg(stmt, args)
        control = ""
        rest = args
        if len(rest) >= 2 and isinstance(rest[-1], str):
            control = rest[-1]
            rest = rest[:-1]
        radius = exp.number_arg(stmt, rest, 1, "radius", minimum=0.0, strict=True)
        angle = exp.number_arg(stmt, rest, 2, "angle", minimum=0.0)
        exp.require_placed(stmt, rid)
        text = f"{stmt.name}({radius:g}, {angle:g}" + (f', "{control}")' if control else ")")
        exp.emit(Arc, stmt, text, robot=rid, radius=radius, angle=angle,
                 side=side, backing=backing, control=control)
    return handler


def _b_wait(exp, stmt, args):
    rid = exp.robot_arg(stmt, args)
    secs = exp.number_arg(stmt, args, 1, "wait time", minimum=0.0)
    exp.emit(Wait, stmt, f"wait({secs:g})", robot=rid, seconds=secs)


def _b_synchronize(exp, stmt, args):
    if not args:
        exp.emit(Synchronize, stmt, "synchronize()", robots=None)
        return
    ids = tuple(exp.robot_arg(stmt, args, i) for i in range(len(args)))
    if len(set(ids)) != len(ids):
        raise ExpandError("synchronize() lists a robot twice", stmt.line)
    exp.emit(Synchronize, stmt, f"synchronize({', '.join(ids)})", robots=ids)


def _setting(name):
    def handler(exp, stmt, args):
        rid = None
        rest = args
        if rest and isinstance(rest[0], RobotRef):
            rid = exp.robot_arg(stmt, rest)
            rest = rest[1:]
        if len(rest) != 1:
            raise ExpandError(f"{name}() expects ([robot,] value)", stmt.line)
        value = rest[0]
        if isinstance(value, SpeedConstant):
            value = value.name
        elif isinstance(value, float):
            if value <= 0:
                raise ExpandError(f"{name} must be positive, got {value:g}", stmt.line)
        else:
            raise ExpandError(f"{name} value must be a number, max or std", stmt.line)
        text = f"{name}({_fmt(rest[0])})"
        exp.emit(Setting, stmt, text, robot=rid, setting=name, value=value)
    return handler


def _b_grid(exp, stmt, args):
    if args:
        raise ExpandError("grid() takes no arguments", stmt.line)
    exp.emit(GridOn, stmt, "grid()")


def _b_reference_point(exp, stmt, args):
    if len(args) != 3 or not isinstance(args[0], Color):
        raise ExpandError("referencePoint(color, x, y) expects a color and two numbers",
                          stmt.line)
    x = exp.number_arg(stmt, args, 1, "x")
    y = exp.number_arg(stmt, args, 2, "y")
    exp.emit(ReferencePoint, stmt, f"referencePoint({_fmt(args[0])}, {x:g}, {y:g})",
             color=args[0], x=x, y=y)


def _b_forbidden_area(exp, stmt, args):
    if len(args) != 6 or not isinstance(args[0], str) or not isinstance(args[1], Color):
        raise ExpandError(
            "forbiddenArea(name, color, x1, y1, x2, y2) expects a name, a color "
            "and four numbers", stmt.line)
    name = args[0]
    coords = [exp.number_arg(stmt, args, i, "corner coordinate") for i in range(2, 6)]
    text = (f'forbiddenArea("{name}", {_fmt(args[1])}, '
            f"{coords[0]:g}, {coords[1]:g}, {coords[2]:g}, {coords[3]:g})")
    exp.emit(ForbiddenArea, stmt, text, name=name, color=args[1],
             x1=coords[0], y1=coords[1], x2=coords[2], y2=coords[3])


_BUILTINS = {
    "initialPose": _b_initial_pose,
    "moveTo": _move_to(False),
    "moveToBacking": _move_to(True),
    "move": _move_rel(False),
    "moveBacking": _move_rel(True),
    "circleRight": _circle("right", False),
    "circleLeft": _circle("left", False),
    "circleRightBacking": _circle("right", True),
    "circleLeftBacking": _circle("left", True),
    "wait": _b_wait,
    "synchronize": _b_synchronize,
    "maxSpeed": _setting("maxSpeed"),
    "acceleration": _setting("acceleration"),
    "deceleration": _setting("deceleration"),
    "grid": _b_grid,
    "referencePoint": _b_reference_point,
    "forbiddenArea": _b_forbidden_area,
}


def expand(ast: parser.ScriptAst, max_depth: int = MAX_CALL_DEPTH) -> InstructionStream:
    """Flatten a parsed script into an ordered instruction stream."""
    return _Expander(ast, max_depth).run()


def compile_source(source: str, max_depth: int = MAX_CALL_DEPTH) -> InstructionStream:
    """tokenize + parse + expand in one step."""
    return expand(parser.parse(lexer.tokenize(source)), max_depth)
