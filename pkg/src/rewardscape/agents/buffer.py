"""Bounded FIFO replay buffer with order-preserving deterministic sampling."""

from __future__ import annotations

import hashlib
from collections import deque, namedtuple
from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError

Transition = namedtuple("Transition", ["state", "action", "reward", "next_state", "done", "episode"])


@dataclass
class Batch:
    """Stacked transitions, chronological when produced by deterministic_sample.

    `old_log_probs`/`advantages` are filled only for policy-gradient eval batches,
    frozen at batch-creation time so perturbed re-evaluations stay comparable.
    """

    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    dones: np.ndarray
    episodes: np.ndarray
    old_log_probs: np.ndarray | None = None
    advantages: np.ndarray | None = None

    def __len__(self):
        return self.states.shape[0]

    def fingerprint(self):
        h = hashlib.sha256()
        for arr in (self.states, self.actions, self.rewards, self.next_states,
                    self.dones, self.episodes):
            h.update(str(arr.shape).encode())
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()[:16]


class ReplayBuffer:
    """Insertion-ordered transitions, oldest evicted first once capacity is hit."""

    def __init__(self, capacity):
        if capacity < 1:
            raise ValidationError("capacity must be positive")
        self.capacity = capacity
        self._memory = deque(maxlen=capacity)

    def __len__(self):
        return len(self._memory)

    def push(self, state, action, reward, next_state, done, episode):
        self._memory.append(Transition(
            np.array(state, dtype=np.float64),
            np.asarray(action),
            float(reward),
            np.array(next_state, dtype=np.float64),
            bool(done),
            int(episode),
        ))

    def _stack(self, items):
        return Batch(
            states=np.stack([t.state for t in items]),
            actions=np.stack([t.action for t in items]),
            rewards=np.array([t.reward for t in items]),
            next_states=np.stack([t.next_state for t in items]),
            dones=np.array([t.done for t in items], dtype=bool),
            episodes=np.array([t.episode for t in items], dtype=np.int64),
        )

    def deterministic_sample(self, size):
        """The most recent min(size, len) transitions in chronological order.

        Pure: repeated calls without pushes return equal batches.
        """
        if not self._memory:
            raise ValidationError("deterministic_sample on empty buffer")
        n = min(int(size), len(self._memory))
        items = [self._memory[i] for i in range(len(self._memory) - n, len(self._memory))]
        return self._stack(items)

    def sample(self, rng, size):
        """Uniform random batch (without replacement when the buffer is large enough)."""
        if not self._memory:
            raise ValidationError("sample on empty buffer")
        n = len(self._memory)
        replace = n < size
        idx = rng.choice(n, size=size, replace=replace)
        return self._stack([self._memory[int(i)] for i in idx])

    def clone(self):
        out = ReplayBuffer(self.capacity)
        for t in self._memory:
            out._memory.append(Transition(
                t.state.copy(), np.array(t.action), t.reward,
                t.next_state.copy(), t.done, t.episode,
            ))
        return out
