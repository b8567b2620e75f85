"""CCRScript interpreter and headless kinematic simulator."""

from .errors import (CcrError, EvalError, ExpandError, LexError, ParseError,
                     PlanningError, ProfileError, SceneError)
from .expander import InstructionStream, compile_source, expand
from .geometry import Pose, TurnConstraint, plan_path
from .lexer import tokenize
from .motion import ControlSpec, MotionProfile, SpeedParams
from .parser import parse, parse_source
from .scene import Scene, build_scene, classify_point, scan_timeline
from .scheduler import Timeline, robot_pose_at, schedule, simulate, split_streams

__version__ = "0.1.0"

__all__ = [
    "CcrError", "ControlSpec", "EvalError", "ExpandError", "InstructionStream",
    "LexError", "MotionProfile", "ParseError", "PlanningError", "Pose",
    "ProfileError", "Scene", "SceneError", "SpeedParams", "Timeline",
    "TurnConstraint", "build_scene", "classify_point", "compile_source",
    "expand", "parse", "parse_source", "plan_path", "robot_pose_at",
    "scan_timeline", "schedule", "simulate", "split_streams", "tokenize",
]
