"""Reward curricula: sparse goal rewards, potential-based shaping, stage schedules,
and exact tabular oracles that certify a schedule as a proper sparse-to-dense curriculum.

The dense signal is the shaping term F(s, s') = gamma * psi(s') - psi(s) with
psi(s) = diam(S) - ||s - g||_2, which never changes the optimal policy set. The
oracles below verify that on enumerable gridworlds: support growth across stages,
greedy-policy nesting, and the per-state Q shift Q_shaped = Q_base - psi.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .envs import GRID_ACTIONS, GridworldSpec, diameter, enumerate_states, grid_next
from .errors import UnsupportedError, ValidationError

S2D = "s2d"
D2S = "d2s"
ONLY_SPARSE = "only_sparse"
ONLY_DENSE = "only_dense"
SCHEDULES = (S2D, D2S, ONLY_SPARSE, ONLY_DENSE)


@dataclass(frozen=True)
class CurriculumSpec:
    """Reward schedule: which stages are dense, and where the stage boundaries sit.

    `transitions` are strictly increasing counts in `unit` ('episodes' or 'steps');
    stage i is active on the half-open interval [T_{i-1}, T_i) with T_0 = 0 and
    T_N = infinity.
    """

    schedule: str
    transitions: tuple = ()
    gamma: float = 0.99
    unit: str = "episodes"

    def __post_init__(self):
        if self.schedule not in SCHEDULES:
            raise ValidationError(f"unknown schedule {self.schedule!r}; want one of {SCHEDULES}")
        ts = tuple(int(t) for t in self.transitions)
        object.__setattr__(self, "transitions", ts)
        if any(t <= 0 for t in ts) or any(a >= b for a, b in zip(ts, ts[1:])):
            raise ValidationError(f"transitions must be strictly increasing positive counts, got {ts}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValidationError(f"gamma must be in (0, 1], got {self.gamma}")
        if self.unit not in ("episodes", "steps"):
            raise ValidationError(f"unit must be 'episodes' or 'steps', got {self.unit!r}")

    @property
    def num_stages(self):
        return len(self.transitions) + 1


@dataclass(frozen=True)
class PotentialSpec:
    """psi(s) = diam - ||s - goal||_2, nonnegative on the state set, maximal at the goal."""

    diam: float
    goal: tuple


def potential_for(env_spec, goal=None):
    if goal is None:
        if not isinstance(env_spec, GridworldSpec) or env_spec.goal is None:
            raise ValidationError("goal required when the env spec does not fix one")
        goal = env_spec.goal
    return PotentialSpec(diam=diameter(env_spec), goal=tuple(goal))


def potential(s, pot):
    d = np.asarray(s, dtype=np.float64) - np.asarray(pot.goal, dtype=np.float64)
    return pot.diam - float(np.linalg.norm(d))


def shaping(s, s_next, gamma, pot):
    return gamma * potential(s_next, pot) - potential(s, pot)


def stage_index(t, spec):
    """1-based stage for count t, half-open boundaries: t in [T_{i-1}, T_i)."""
    if t < 0:
        raise ValidationError(f"t must be nonnegative, got {t}")
    return bisect_right(spec.transitions, t) + 1


def dense_active(spec, t):
    if spec.schedule == ONLY_SPARSE:
        return False
    if spec.schedule == ONLY_DENSE:
        return True
    stage = stage_index(t, spec)
    return stage >= 2 if spec.schedule == S2D else stage == 1


def schedule_reward(spec, pot, t, base_r, s, s_next):
    """Reward the agent sees at count t: base plus shaping whenever the stage is dense."""
    if dense_active(spec, t):
        return base_r + shaping(s, s_next, spec.gamma, pot)
    return base_r


# --- exact oracles on enumerable gridworlds -------------------------------

def _require_grid(spec):
    if not isinstance(spec, GridworldSpec):
        raise UnsupportedError("exact oracles need an enumerable (gridworld) spec")


def absorbing_next(spec, goal, s, a):
    """Transition of the oracle MDP: the goal is absorbing, all else moves on the grid."""
    return goal if s == goal else grid_next(spec, s, a)


def sparse_reward_fn(spec, goal, success_only=False):
    """Base reward: living penalty (unless success_only) plus the success bonus on entering the goal.

    The absorbing goal yields zero base reward.
    """
    goal = tuple(goal)

    def reward(s, a):
        if s == goal:
            return 0.0
        r = 0.0 if success_only else spec.living_penalty
        if grid_next(spec, s, a) == goal:
            r += spec.success_reward
        return r

    return reward


def shaping_reward_fn(spec, goal, gamma, pot=None):
    """Pure shaping term on the oracle MDP, applied on every transition.

    Goal self-loops get (gamma - 1) * psi(goal): psi is not zeroed at the goal, which
    is exactly what makes Q_shaped - Q_base = -psi(s) hold with no boundary terms.
    """
    goal = tuple(goal)
    pot = pot or potential_for(spec, goal)

    def reward(s, a):
        nxt = absorbing_next(spec, goal, s, a)
        return gamma * potential(nxt, pot) - potential(s, pot)

    return reward


def add_reward_fns(*fns):
    def reward(s, a):
        return sum(f(s, a) for f in fns)

    return reward


def support(spec, reward_fn):
    """supp(R) = {s | exists a with R(s, a) != 0}, by exhaustive enumeration."""
    _require_grid(spec)
    return frozenset(
        s for s, actions in enumerate_states(spec) if any(reward_fn(s, a) != 0.0 for a in actions)
    )


@dataclass
class SupportReport:
    supports: list
    inclusion_chain_ok: bool
    sparsity: list  # |supp(R_i)| / |S| per stage


def support_report(spec, stage_fns):
    _require_grid(spec)
    n = len(spec.cells())
    supports = [support(spec, fn) for fn in stage_fns]
    ok = all(a <= b for a, b in zip(supports, supports[1:]))
    return SupportReport(supports, ok, [len(s) / n for s in supports])


@dataclass
class QTable:
    """Exact action values from value iteration, with tie-tolerant greedy sets."""

    states: list
    actions: tuple
    q: np.ndarray  # (n_states, n_actions)
    v: np.ndarray  # (n_states,)
    greedy_sets: list  # frozenset of argmax actions per state
    residual: float
    iterations: int

    def index(self, s):
        return self._index[s]

    def __post_init__(self):
        self._index = {s: i for i, s in enumerate(self.states)}

    def q_of(self, s, a):
        return float(self.q[self._index[s], a])

    def v_of(self, s):
        return float(self.v[self._index[s]])

    def greedy_of(self, s):
        return self.greedy_sets[self._index[s]]


GREEDY_TIE_TOL = 1e-9


def value_iteration(spec, goal, reward_fn, gamma, tol=1e-10, max_iter=1_000_000):
    """Synchronous value iteration on the absorbing-goal MDP to a sup-norm Bellman residual <= tol.

    Synchronous sweeps keep symmetric states bit-identical, so exact greedy ties
    survive and the 1e-9 tie tolerance is safe.
    """
    _require_grid(spec)
    if not 0.0 < gamma < 1.0:
        raise UnsupportedError("value iteration oracle needs gamma < 1")
    if tol <= 0.0:
        raise ValidationError("tol must be positive")
    goal = tuple(goal)
    states = [s for s, _ in enumerate_states(spec)]
    index = {s: i for i, s in enumerate(states)}
    n, m = len(states), len(GRID_ACTIONS)
    nxt = np.empty((n, m), dtype=np.int64)
    rew = np.empty((n, m))
    for i, s in enumerate(states):
        for a in GRID_ACTIONS:
            nxt[i, a] = index[absorbing_next(spec, goal, s, a)]
            rew[i, a] = reward_fn(s, a)
    q = np.zeros((n, m))
    residual = np.inf
    iterations = 0
    while residual > tol:
        if iterations >= max_iter:
            raise ValidationError(f"value iteration did not reach tol={tol} in {max_iter} sweeps")
        v = q.max(axis=1)
        q_new = rew + gamma * v[nxt]
        residual = float(np.abs(q_new - q).max())
        q = q_new
        iterations += 1
    v = q.max(axis=1)
    greedy = [
        frozenset(int(a) for a in GRID_ACTIONS if q[i, a] >= v[i] - GREEDY_TIE_TOL)
        for i in range(n)
    ]
    return QTable(states, GRID_ACTIONS, q, v, greedy, residual, iterations)


def s2d_stage_pair(spec, goal=None, gamma=0.99):
    """The shipped two-stage curriculum on a gridworld.

    Returns (stage reward fns, support-component fns, potential). Stage values keep
    the living penalty; the support components use the success-only reward so that
    support growth is visible (a living penalty is nonzero everywhere by design).
    """
    _require_grid(spec)
    goal = tuple(goal) if goal is not None else spec.goal
    if goal is None:
        raise ValidationError("goal required for the oracle on random-goal specs")
    pot = potential_for(spec, goal)
    base = sparse_reward_fn(spec, goal)
    shaped = add_reward_fns(base, shaping_reward_fn(spec, goal, gamma, pot))
    base_supp = sparse_reward_fn(spec, goal, success_only=True)
    shaped_supp = add_reward_fns(base_supp, shaping_reward_fn(spec, goal, gamma, pot))
    return [base, shaped], [base_supp, shaped_supp], pot


def check_s2d_conditions(spec, stages, gamma, *, goal=None, tol=1e-10,
                         potential_spec=None, support_stages=None):
    """Certify a stage sequence as a sparse-to-dense curriculum.

    Support inclusion is checked on `support_stages` when given (success-only
    components for the shipped pair), greedy-policy nesting on the stage values
    themselves via value iteration. When `potential_spec` is given, the expected
    Q shift Q_{i+1}(s,a) = Q_i(s,a) - psi(s) is verified to 10*tol for each
    consecutive pair.
    """
    _require_grid(spec)
    if len(stages) < 2:
        raise ValidationError("need at least two stages")
    goal = tuple(goal) if goal is not None else spec.goal
    if goal is None:
        raise ValidationError("goal required for the oracle on random-goal specs")

    supp = support_report(spec, support_stages or stages)
    tables = [value_iteration(spec, goal, fn, gamma, tol=tol) for fn in stages]

    eq2_violations = []
    for i in range(len(tables) - 1):
        for s in tables[i].states:
            extra = tables[i + 1].greedy_of(s) - tables[i].greedy_of(s)
            if extra:
                eq2_violations.append({"stage_pair": (i + 1, i + 2), "state": s,
                                       "extra_actions": sorted(extra)})
    eq2_ok = not eq2_violations

    q_shift_max_residual = None
    if potential_spec is not None:
        psi = np.array([potential(s, potential_spec) for s in tables[0].states])
        q_shift_max_residual = 0.0
        for a_tab, b_tab in zip(tables, tables[1:]):
            resid = np.abs(b_tab.q - (a_tab.q - psi[:, None])).max()
            q_shift_max_residual = max(q_shift_max_residual, float(resid))

    greedy_identical = all(
        a_tab.greedy_sets == b_tab.greedy_sets for a_tab, b_tab in zip(tables, tables[1:])
    )

    return {
        "schema": 1,
        "gamma": gamma,
        "tol": tol,
        "eq1_ok": supp.inclusion_chain_ok,
        "eq2_ok": eq2_ok,
        "greedy_identical": greedy_identical,
        "q_shift_max_residual": q_shift_max_residual,
        "q_shift_tolerance": 10.0 * tol if potential_spec is not None else None,
        "supp_sizes": [len(s) for s in supp.supports],
        "num_states": len(tables[0].states),
        "sparsity": supp.sparsity,
        "support_component": "as_given" if support_stages is None else "success_only",
        "eq2_violations": eq2_violations[:16],
        "ok": supp.inclusion_chain_ok and eq2_ok and (
            q_shift_max_residual is None or q_shift_max_residual < 10.0 * tol
        ),
    }
