"""Trace, SVG and timing-report renderers.

All three outputs are byte-deterministic: fixed decimal formatting, no
timestamps, robots visited in a fixed order.
"""

from __future__ import annotations

import math

from . import scene as scene_mod
from . import scheduler
from .scene import Scene

SVG_SCALE = 60.0  # pixels per meter
SVG_MARGIN = 20.0


def _num(v: float) -> str:
    """<= 9 significant digits, no negative zero."""
    if v == 0.0:
        v = 0.0
    s = f"{v:.9g}"
    return "0" if s == "-0" else s


def write_trace(timeline, dt: float, sink) -> int:
    """Newline-delimited JSON records ordered by (t, robot); returns frame count."""
    if dt <= 0:
        raise ValueError(f"trace dt must be positive, got {dt}")
    robots = sorted(timeline.robots)
    count = 0
    for t in scene_mod.sample_times(timeline, dt):
        for rid in robots:
            pose, speed = scheduler.robot_pose_at(timeline, rid, t)
            if pose is None:
                continue
            sink.write(f'{{"t":{_num(t)},"robot":"{rid}","x":{_num(pose.x)},'
                       f'"y":{_num(pose.y)},"heading":{_num(pose.heading)},'
                       f'"v":{_num(speed)}}}\n')
            count += 1
    return count


def write_report(timeline, sink) -> str:
    """Timing-annotated statement report; returns the text it wrote."""
    entries = []
    seen_broadcast = set()
    for rid in timeline.robots:
        for action in timeline.actions[rid]:
            if action.broadcast:
                if action.index in seen_broadcast:
                    continue
                seen_broadcast.add(action.index)
                robot_label = "all"
            else:
                robot_label = rid
            entries.append((action.start, action.index, robot_label, action))
    entries.sort(key=lambda e: (e[0], e[1], e[2]))
    lines = []
    for start, _, robot_label, action in entries:
        line = f"[t={start:.3f} +{action.end - action.start:.3f}] {robot_label}: {action.text}"
        pose = action.end_pose
        if pose is not None and not action.broadcast:
            line += f" → ({pose.x:.3f}, {pose.y:.3f}, {pose.heading:.3f})"
        lines.append(line)
    lines.append(f"total {timeline.duration:.3f} s")
    text = "\n".join(lines) + "\n"
    sink.write(text)
    return text


# --- SVG -------------------------------------------------------------------


def svg_point(scene: Scene, x: float, y: float) -> tuple[float, float]:
    """Scene meters -> SVG pixels: +x right, audience edge (y=0) at the bottom."""
    sx = SVG_MARGIN + (x + scene.width / 2.0) * SVG_SCALE
    sy = SVG_MARGIN + (scene.depth - y) * SVG_SCALE
    return sx, sy


def _px(v: float) -> str:
    return f"{v:.2f}"


def _rgb(color) -> str:
    return f"rgb({color.r},{color.g},{color.b})"


def _pose_triangle(scene, pose, size=0.18):
    """Oriented triangle marker: tip at the pose, pointing along the heading."""
    h = math.radians(pose.heading)
    dx, dy = math.sin(h), math.cos(h)
    tip = (pose.x + dx * size, pose.y + dy * size)
    left = (pose.x - dy * size * 0.6, pose.y + dx * size * 0.6)
    right = (pose.x + dy * size * 0.6, pose.y - dx * size * 0.6)
    pts = [svg_point(scene, *p) for p in (tip, left, right)]
    return " ".join(f"{_px(px)},{_px(py)}" for px, py in pts)


def render_svg(scene: Scene, timeline, robots, dt: float = 0.02) -> str:
    """Standalone SVG 1.1 document of the scene and all robot trajectories.

    ``robots`` is the stream's RobotInfo sequence (declared colors and order).
    """
    width = scene.width * SVG_SCALE + 2 * SVG_MARGIN
    height = scene.depth * SVG_SCALE + 2 * SVG_MARGIN
    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{_px(width)}" height="{_px(height)}" '
               f'viewBox="0 0 {_px(width)} {_px(height)}">')
    x0, y0 = svg_point(scene, -scene.width / 2.0, scene.depth)
    out.append(f'<rect x="{_px(x0)}" y="{_px(y0)}" '
               f'width="{_px(scene.width * SVG_SCALE)}" '
               f'height="{_px(scene.depth * SVG_SCALE)}" '
               f'fill="white" stroke="black" stroke-width="1"/>')
    if scene.grid:
        k = 0
        while k <= scene.width + 1e-9:
            gx, _ = svg_point(scene, -scene.width / 2.0 + k, 0.0)
            out.append(f'<line class="grid" x1="{_px(gx)}" y1="{_px(SVG_MARGIN)}" '
                       f'x2="{_px(gx)}" y2="{_px(SVG_MARGIN + scene.depth * SVG_SCALE)}" '
                       f'stroke="#cccccc" stroke-width="0.5"/>')
            k += 1
        k = 0
        while k <= scene.depth + 1e-9:
            _, gy = svg_point(scene, 0.0, float(k))
            out.append(f'<line class="grid" x1="{_px(SVG_MARGIN)}" y1="{_px(gy)}" '
                       f'x2="{_px(SVG_MARGIN + scene.width * SVG_SCALE)}" y2="{_px(gy)}" '
                       f'stroke="#cccccc" stroke-width="0.5"/>')
            k += 1
    for area in scene.areas:
        ax, ay = svg_point(scene, area.x0, area.y1)
        out.append(f'<rect class="forbidden" x="{_px(ax)}" y="{_px(ay)}" '
                   f'width="{_px((area.x1 - area.x0) * SVG_SCALE)}" '
                   f'height="{_px((area.y1 - area.y0) * SVG_SCALE)}" '
                   f'fill="{_rgb(area.color)}" stroke="none"/>')
        out.append(f'<text x="{_px(ax + 3)}" y="{_px(ay + 12)}" '
                   f'font-size="10" font-family="sans-serif">{area.name}</text>')
    for point in scene.points:
        px, py = svg_point(scene, point.x, point.y)
        out.append(f'<circle class="refpoint" cx="{_px(px)}" cy="{_px(py)}" r="4" '
                   f'fill="{_rgb(point.color)}"/>')
    for info in robots:
        pts = []
        first_pose = last_pose = None
        for t in scene_mod.sample_times(timeline, dt, info.id):
            pose, _ = scheduler.robot_pose_at(timeline, info.id, t)
            if pose is None:
                continue
            if first_pose is None:
                first_pose = pose
            last_pose = pose
            sx, sy = svg_point(scene, pose.x, pose.y)
            pts.append(f"{_px(sx)},{_px(sy)}")
        if not pts:
            continue
        out.append(f'<polyline class="trajectory" points="{" ".join(pts)}" '
                   f'fill="none" stroke="{_rgb(info.color)}" stroke-width="1.5"/>')
        out.append(f'<polygon class="start" points="{_pose_triangle(scene, first_pose)}" '
                   f'fill="none" stroke="{_rgb(info.color)}" stroke-width="1"/>')
        out.append(f'<polygon class="end" points="{_pose_triangle(scene, last_pose)}" '
                   f'fill="{_rgb(info.color)}" stroke="none"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
