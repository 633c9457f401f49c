"""Goal-conditioned toy environments: enumerable gridworlds and a continuous point reacher.

Observations are real vectors [agent_xy scaled to [0,1], goal_xy scaled to [0,1]]
for both environments, so the same agents drive either. Gridworld positions are
integer cells (x, y) with (0, 0) top-left; potentials and diameters use the raw
cell coordinates, not the scaled observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnsupportedError, ValidationError

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
GRID_ACTIONS = (UP, DOWN, LEFT, RIGHT)
_MOVES = {UP: (0, -1), DOWN: (0, 1), LEFT: (-1, 0), RIGHT: (1, 0)}


@dataclass(frozen=True)
class GridworldSpec:
    width: int
    height: int
    start: tuple = (0, 0)
    goal: tuple | None = None  # None = resampled uniformly each episode
    walls: frozenset = frozenset()
    living_penalty: float = -0.1
    success_reward: float = 1.0
    max_steps: int = 50

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError("grid dims must be positive")
        object.__setattr__(self, "walls", frozenset(tuple(w) for w in self.walls))
        object.__setattr__(self, "start", tuple(self.start))
        if self.goal is not None:
            object.__setattr__(self, "goal", tuple(self.goal))
        for cell in [self.start] + ([self.goal] if self.goal is not None else []):
            if not self._in_bounds(cell):
                raise ValidationError(f"cell {cell} out of bounds")
            if cell in self.walls:
                raise ValidationError(f"cell {cell} is a wall")
        if self.goal is not None and self.goal == self.start:
            raise ValidationError("goal must differ from start")
        if not self.goal_candidates():
            raise ValidationError("no valid goal cells")
        self._check_connected()

    def _in_bounds(self, cell):
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def cells(self):
        """All non-wall cells in row-major order."""
        return [
            (x, y)
            for y in range(self.height)
            for x in range(self.width)
            if (x, y) not in self.walls
        ]

    def goal_candidates(self):
        if self.goal is not None:
            return [self.goal]
        return [c for c in self.cells() if c != self.start]

    def _check_connected(self):
        # every candidate goal must be reachable from start
        seen = {self.start}
        frontier = [self.start]
        while frontier:
            cur = frontier.pop()
            for a in GRID_ACTIONS:
                nxt = grid_next(self, cur, a)
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        missing = [c for c in self.goal_candidates() if c not in seen]
        if missing:
            raise ValidationError(f"goal cells unreachable from start: {missing[:4]}")


@dataclass(frozen=True)
class PointReacherSpec:
    action_limit: float = 0.1
    success_radius: float = 0.02
    time_penalty: float = -0.01
    success_reward: float = 1.0
    max_steps: int = 50
    min_start_goal_dist: float = 0.2


@dataclass
class StepOutcome:
    next_obs: np.ndarray
    base_reward: float
    done: bool
    info: dict = field(default_factory=dict)


def grid_next(spec, cell, action):
    """Deterministic move; walls and borders block (the agent stays put)."""
    if action not in _MOVES:
        raise ValidationError(f"unknown action {action!r}")
    dx, dy = _MOVES[action]
    nxt = (cell[0] + dx, cell[1] + dy)
    if not spec._in_bounds(nxt) or nxt in spec.walls:
        return cell
    return nxt


def _scale(cell, spec):
    return (
        cell[0] / max(spec.width - 1, 1),
        cell[1] / max(spec.height - 1, 1),
    )


class Gridworld:
    """Single-owner episodic gridworld; reset is a pure function of (seed, episode)."""

    n_actions = 4
    obs_dim = 4

    def __init__(self, spec):
        self.spec = spec
        self.agent_pos = None
        self.goal_pos = None
        self._steps = 0
        self._done = True

    def reset(self, seed, episode):
        spec = self.spec
        if spec.goal is not None:
            self.goal_pos = spec.goal
        else:
            candidates = spec.goal_candidates()
            rng = np.random.default_rng([int(seed), int(episode)])
            self.goal_pos = candidates[int(rng.integers(len(candidates)))]
        self.agent_pos = spec.start
        self._steps = 0
        self._done = False
        return self._obs()

    def _obs(self):
        ax, ay = _scale(self.agent_pos, self.spec)
        gx, gy = _scale(self.goal_pos, self.spec)
        return np.array([ax, ay, gx, gy])

    def step(self, action):
        if self._done:
            raise ValidationError("step() after episode end")
        spec = self.spec
        nxt = grid_next(spec, self.agent_pos, int(action))
        self.agent_pos = nxt
        self._steps += 1
        success = nxt == self.goal_pos
        reward = spec.living_penalty + (spec.success_reward if success else 0.0)
        self._done = success or self._steps >= spec.max_steps
        info = {
            "agent_pos": self.agent_pos,
            "goal_pos": self.goal_pos,
            "step_index": self._steps,
            "success": success,
        }
        return StepOutcome(self._obs(), reward, self._done, info)


class PointReacher:
    """Continuous stand-in for goal reaching: unit square, clipped delta actions."""

    action_dim = 2
    obs_dim = 4

    def __init__(self, spec=None):
        self.spec = spec or PointReacherSpec()
        self.agent_pos = None
        self.goal_pos = None
        self._steps = 0
        self._done = True

    @property
    def action_limit(self):
        return self.spec.action_limit

    def reset(self, seed, episode):
        spec = self.spec
        rng = np.random.default_rng([int(seed), int(episode)])
        start = rng.uniform(0.0, 1.0, size=2)
        while True:
            goal = rng.uniform(0.0, 1.0, size=2)
            if np.linalg.norm(start - goal) > spec.min_start_goal_dist:
                break
        self.agent_pos = start
        self.goal_pos = goal
        self._steps = 0
        self._done = False
        return self._obs()

    def _obs(self):
        return np.concatenate([self.agent_pos, self.goal_pos])

    def step(self, action):
        if self._done:
            raise ValidationError("step() after episode end")
        spec = self.spec
        delta = np.clip(np.asarray(action, dtype=np.float64), -spec.action_limit, spec.action_limit)
        self.agent_pos = np.clip(self.agent_pos + delta, 0.0, 1.0)
        self._steps += 1
        success = bool(np.linalg.norm(self.agent_pos - self.goal_pos) < spec.success_radius)
        reward = spec.time_penalty + (spec.success_reward if success else 0.0)
        self._done = success or self._steps >= spec.max_steps
        info = {
            "agent_pos": self.agent_pos.copy(),
            "goal_pos": self.goal_pos.copy(),
            "step_index": self._steps,
            "success": success,
        }
        return StepOutcome(self._obs(), reward, self._done, info)


def diameter(spec):
    """Max pairwise L2 distance over reachable positions."""
    if isinstance(spec, PointReacherSpec):
        return math.sqrt(2.0)
    cells = spec.cells()
    pts = np.array(cells, dtype=np.float64)
    if len(pts) == 1:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff ** 2).sum(-1)).max())


def enumerate_states(spec):
    """All non-wall cells, row-major, each with its available actions. Gridworld only."""
    if not isinstance(spec, GridworldSpec):
        raise UnsupportedError("enumerate_states needs an enumerable (gridworld) spec")
    return [(cell, GRID_ACTIONS) for cell in spec.cells()]


def fixed_goal_4x4():
    """4x4 fixed-goal navigation: start (0,0), goal (3,3), no walls."""
    return GridworldSpec(4, 4, start=(0, 0), goal=(3, 3))


def random_goal_10x10():
    """10x10 navigation with the goal resampled uniformly each episode."""
    return GridworldSpec(10, 10, start=(0, 0), goal=None)


def build_env(spec):
    if isinstance(spec, GridworldSpec):
        return Gridworld(spec)
    if isinstance(spec, PointReacherSpec):
        return PointReacher(spec)
    raise ValidationError(f"unknown env spec {type(spec)!r}")
