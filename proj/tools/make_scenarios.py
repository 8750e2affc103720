#!/usr/bin/env python3
"""Writes the bundled scenario files into scenarios/."""

import json
import math
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "scenarios"


def box(cx, cy, hx, hy):
    return {"type": "polygon",
            "vertices": [[cx - hx, cy - hy], [cx + hx, cy - hy], [cx + hx, cy + hy], [cx - hx, cy + hy]]}


def write(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def point_scenario(name, description, obstacles, start, goal):
    return {
        "name": name,
        "description": description,
        "robot": {"type": "point2d"},
        "obstacles": obstacles,
        "start": {"position": start, "velocity": [0.0, 0.0]},
        "goal": {"position": goal, "velocity": [0.0, 0.0]},
        "num_waypoints": 30,
        "dt": 0.2,
        "safety_margin": 0.1 if obstacles else 0.0,
        "dynamics_enabled": True,
    }


def arm_scenario(name, description, links, obstacles, start, goal, limits=None):
    robot = {"type": "planar_arm", "link_lengths": links, "link_radius": 0.05,
             "base": {"position": [0.0, 0.0], "orientation": 0.0}}
    if limits:
        robot["joint_limits"] = limits
    return {
        "name": name,
        "description": description,
        "robot": robot,
        "obstacles": obstacles,
        "start": {"position": start},
        "goal": {"position": goal},
        "num_waypoints": 30,
        "dt": 0.3,
        "safety_margin": 0.05,
        "dynamics_enabled": False,
    }


SUITE_LINKS = [0.8, 0.7, 0.5]
SUITE_OBSTACLES = [box(0.69, 1.77, 0.1, 0.1), box(1.70, -0.43, 0.1, 0.1)]
SUITE_STARTS = [[1.9, 0.3, 0.2], [1.8, 0.5, 0.3], [2.0, 0.2, 0.4], [1.7, 0.4, 0.1], [1.95, 0.6, 0.2]]
SUITE_GOALS = [[0.4, 0.3, 0.2], [0.5, 0.5, 0.4], [0.3, 0.2, 0.1], [0.6, 0.4, 0.3], [0.45, 0.6, 0.2]]


def main():
    write(ROOT / "circle2d.json", point_scenario(
        "circle2d", "Point robot passing a unit circle placed slightly off the straight line",
        [{"type": "circle", "center": [0.0, 0.05], "radius": 1.0}], [-3.0, 0.0], [3.0, 0.0]))
    write(ROOT / "free2d.json", point_scenario(
        "free2d", "Obstacle-free point robot under double-integrator dynamics",
        [], [0.0, 0.0], [4.0, 2.0]))
    write(ROOT / "thin_wall.json", point_scenario(
        "thin_wall", "Thin wall crossing the straight line at the first split point",
        [box(-0.93, -0.25, 0.02, 0.35)], [-3.0, 0.0], [3.0, 0.0]))
    write(ROOT / "arm2_shelf.json", arm_scenario(
        "arm2_shelf", "Two-link arm sweeping under a shelf edge near the end of its reach",
        [1.0, 0.8], [box(1.72, 0.5, 0.12, 0.12)], [-0.5, 0.4], [0.9, 0.4]))
    write(ROOT / "arm3_shelf.json", arm_scenario(
        "arm3_shelf", "Three-link arm folding under an overhead box",
        SUITE_LINKS, SUITE_OBSTACLES, SUITE_STARTS[0], SUITE_GOALS[0]))
    for i, s in enumerate(SUITE_STARTS):
        for j, g in enumerate(SUITE_GOALS):
            name = f"arm_suite_{i}{j}"
            write(ROOT / "arm_suite" / f"{name}.json", arm_scenario(
                name, "Stand-in 5x5 start/goal grid for a three-link arm around two boxes",
                SUITE_LINKS, SUITE_OBSTACLES, s, g))


if __name__ == "__main__":
    main()
