"""Least-squares adversarial discriminator and its reward signal.

D maps a (normalized observation, one-hot action) pair to a score in (0, 1)
through a small tanh MLP with a sigmoid head. It is trained to push expert
transitions toward label 1 and policy transitions toward label 0 under the
least-squares objective, and the per-step imitation reward is the logit of the
clamped score: log(d) - log(1 - d).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalAbortError
from .mlp import Adam, mlp_backward, mlp_forward


@dataclass(frozen=True)
class DiscConfig:
    label_policy: float = 0.0
    label_expert: float = 1.0
    learning_rate: float = 1e-3
    epochs_per_iteration: int = 3
    batch_size: int = 128
    replay_capacity: int = 50_000
    clamp_epsilon: float = 1e-6
    hidden_size: int = 64

    def validate(self):
        if not (0 <= self.label_policy < self.label_expert):
            raise ValueError("labels must satisfy 0 <= policy < expert")
        if not (0.0 < self.clamp_epsilon < 0.5):
            raise ValueError("clamp_epsilon must lie in (0, 0.5)")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if self.epochs_per_iteration < 0 or self.batch_size < 1 or self.replay_capacity < 1:
            raise ValueError("bad discriminator schedule")
        if self.hidden_size < 1:
            raise ValueError("hidden_size must be positive")
        return self

    @property
    def reward_bound(self) -> float:
        return math.log((1.0 - self.clamp_epsilon) / self.clamp_epsilon)


@dataclass
class Transition:
    """One normalized observation paired with a one-hot action."""

    s: np.ndarray
    a_onehot: np.ndarray

    def features(self) -> np.ndarray:
        return np.concatenate([self.s, self.a_onehot])


@dataclass
class TransitionBatch:
    """Column store of transitions: (M, n) states plus integer action indices."""

    z: np.ndarray
    actions: np.ndarray

    def __len__(self) -> int:
        return self.z.shape[0]

    def features(self, p: int) -> np.ndarray:
        onehot = np.zeros((len(self), p))
        onehot[np.arange(len(self)), self.actions] = 1.0
        return np.hstack([self.z, onehot])

    def take(self, idx: np.ndarray) -> "TransitionBatch":
        return TransitionBatch(self.z[idx], self.actions[idx])


@dataclass
class DiscriminatorParams:
    sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def copy(self) -> "DiscriminatorParams":
        return DiscriminatorParams(
            self.sizes, [w.copy() for w in self.weights], [b.copy() for b in self.biases]
        )

    @property
    def in_dim(self) -> int:
        return self.sizes[0]


def init_discriminator(n: int, p: int, cfg: DiscConfig, rng: np.random.Generator) -> DiscriminatorParams:
    """Small random init, layer sizes [n+p, h, h, 1]."""
    sizes = (n + p, cfg.hidden_size, cfg.hidden_size, 1)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.standard_normal((fan_out, fan_in)) / np.sqrt(fan_in))
        biases.append(np.zeros(fan_out))
    return DiscriminatorParams(sizes, weights, biases)


def zero_discriminator(n: int, p: int, cfg: DiscConfig) -> DiscriminatorParams:
    """All-zero weights: D == sigmoid(0) == 0.5 exactly, everywhere."""
    sizes = (n + p, cfg.hidden_size, cfg.hidden_size, 1)
    weights = [np.zeros((o, i)) for i, o in zip(sizes[:-1], sizes[1:])]
    biases = [np.zeros(o) for o in sizes[1:]]
    return DiscriminatorParams(sizes, weights, biases)


def d_forward_batch(phi: DiscriminatorParams, x: np.ndarray) -> np.ndarray:
    scores, _ = mlp_forward(phi.weights, phi.biases, x)
    return scores


def d_forward(phi: DiscriminatorParams, t: Transition) -> float:
    x = t.features()
    if x.shape[0] != phi.in_dim:
        raise ValueError("transition dimension mismatch")
    return float(d_forward_batch(phi, x[None])[0])


def ls_loss(phi: DiscriminatorParams, expert_batch: TransitionBatch, policy_batch: TransitionBatch, cfg: DiscConfig) -> float:
    if len(expert_batch) == 0 or len(policy_batch) == 0:
        raise ValueError("batches must be nonempty")
    p = phi.sizes[0] - expert_batch.z.shape[1]
    de = d_forward_batch(phi, expert_batch.features(p))
    dp = d_forward_batch(phi, policy_batch.features(p))
    return float(
        0.5 * np.mean((de - cfg.label_expert) ** 2) + 0.5 * np.mean((dp - cfg.label_policy) ** 2)
    )


def d_backward(phi: DiscriminatorParams, expert_batch: TransitionBatch, policy_batch: TransitionBatch, cfg: DiscConfig):
    """Exact gradient of ls_loss w.r.t. every weight and bias."""
    if len(expert_batch) == 0 or len(policy_batch) == 0:
        raise ValueError("batches must be nonempty")
    p = phi.sizes[0] - expert_batch.z.shape[1]
    x = np.vstack([expert_batch.features(p), policy_batch.features(p)])
    scores, cache = mlp_forward(phi.weights, phi.biases, x)
    me, mp = len(expert_batch), len(policy_batch)
    dscore = np.empty(me + mp)
    dscore[:me] = (scores[:me] - cfg.label_expert) / me
    dscore[me:] = (scores[me:] - cfg.label_policy) / mp
    return mlp_backward(phi.weights, cache, dscore)


class ReplayBuffer:
    """Fixed-capacity ring of recent policy transitions."""

    def __init__(self, capacity: int, n: int):
        self.capacity = capacity
        self.z = np.zeros((capacity, n))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.size = 0
        self.head = 0

    def __len__(self) -> int:
        return self.size

    def push(self, z: np.ndarray, actions: np.ndarray):
        for row, a in zip(z, actions):
            self.z[self.head] = row
            self.actions[self.head] = a
            self.head = (self.head + 1) % self.capacity
            self.size = min(self.size + 1, self.capacity)

    def push_batch(self, z: np.ndarray, actions: np.ndarray):
        m = z.shape[0]
        if m >= self.capacity:
            self.z[:] = z[m - self.capacity :]
            self.actions[:] = actions[m - self.capacity :]
            self.head = 0
            self.size = self.capacity
            return
        first = min(m, self.capacity - self.head)
        self.z[self.head : self.head + first] = z[:first]
        self.actions[self.head : self.head + first] = actions[:first]
        rest = m - first
        if rest:
            self.z[:rest] = z[first:]
            self.actions[:rest] = actions[first:]
        self.head = (self.head + m) % self.capacity
        self.size = min(self.size + m, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        idx = rng.integers(0, self.size, size=batch_size)
        return TransitionBatch(self.z[idx], self.actions[idx])


def d_update(
    phi: DiscriminatorParams,
    expert_buffer: TransitionBatch,
    policy_buffer,
    cfg: DiscConfig,
    rng: np.random.Generator | None = None,
) -> DiscriminatorParams:
    """Minibatch Adam on the least-squares loss; returns new parameters.

    One epoch is one pass worth of the policy buffer: ceil(len/batch) uniform
    minibatch draws from each side.
    """
    if len(expert_buffer) < cfg.batch_size or len(policy_buffer) < cfg.batch_size:
        raise ValueError("buffers must hold at least batch_size transitions")
    rng = rng if rng is not None else np.random.default_rng(0)
    out = phi.copy()
    arrays = out.weights + out.biases
    adam = Adam(arrays, lr=cfg.learning_rate)
    steps_per_epoch = -(-len(policy_buffer) // cfg.batch_size)
    expert_idx_all = np.arange(len(expert_buffer))
    for _ in range(cfg.epochs_per_iteration):
        for _ in range(steps_per_epoch):
            e_idx = rng.choice(expert_idx_all, size=cfg.batch_size)
            e_batch = expert_buffer.take(e_idx)
            if isinstance(policy_buffer, ReplayBuffer):
                p_batch = policy_buffer.sample(cfg.batch_size, rng)
            else:
                p_idx = rng.integers(0, len(policy_buffer), size=cfg.batch_size)
                p_batch = policy_buffer.take(p_idx)
            dws, dbs = d_backward(out, e_batch, p_batch, cfg)
            adam.step(arrays, dws + dbs)
            for a in arrays:
                if not np.all(np.isfinite(a)):
                    raise NumericalAbortError("discriminator weights became non-finite")
    return out


def reward(phi: DiscriminatorParams, t: Transition, cfg: DiscConfig) -> float:
    d = min(max(d_forward(phi, t), cfg.clamp_epsilon), 1.0 - cfg.clamp_epsilon)
    return math.log(d) - math.log(1.0 - d)


def rewards_batch(phi: DiscriminatorParams, x: np.ndarray, cfg: DiscConfig) -> np.ndarray:
    d = np.clip(d_forward_batch(phi, x), cfg.clamp_epsilon, 1.0 - cfg.clamp_epsilon)
    return np.log(d) - np.log(1.0 - d)
