"""Discrete driving policy and running state normalization.

The policy is a bias-free matrix map from whitened observations to 5 action
logits: either a single p x n matrix ("linear") or theta_out . tanh(theta_in . z)
("two_layer"). Action selection is deterministic argmax with ties broken toward
the lowest action index, which keeps rollouts reproducible for random search.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

NUM_ACTIONS = 5


class Action(enum.IntEnum):
    MAINTAIN = 0
    ACCELERATE = 1
    DECELERATE = 2
    LANE_LEFT = 3
    LANE_RIGHT = 4

    def one_hot(self) -> np.ndarray:
        v = np.zeros(NUM_ACTIONS)
        v[self.value] = 1.0
        return v


LINEAR = "linear"
TWO_LAYER = "two_layer"


@dataclass(frozen=True)
class PolicyShape:
    variant: str
    n: int
    h: int = 64
    p: int = NUM_ACTIONS

    def matrix_shapes(self) -> tuple[tuple[int, int], ...]:
        if self.variant == LINEAR:
            return ((self.p, self.n),)
        if self.variant == TWO_LAYER:
            return ((self.h, self.n), (self.p, self.h))
        raise ValueError(f"unknown policy variant {self.variant!r}")


@dataclass
class PolicyParams:
    """Weight matrices acting on column vectors; no bias terms."""

    variant: str
    weights: tuple[np.ndarray, ...]

    def __post_init__(self):
        self.weights = tuple(np.asarray(w, dtype=np.float64) for w in self.weights)
        expected = 1 if self.variant == LINEAR else 2
        if self.variant not in (LINEAR, TWO_LAYER) or len(self.weights) != expected:
            raise ValueError("weights inconsistent with variant")
        if any(not np.all(np.isfinite(w)) for w in self.weights):
            raise ValueError("policy weights must be finite")

    @property
    def matrix(self) -> np.ndarray:
        assert self.variant == LINEAR
        return self.weights[0]

    @property
    def theta_in(self) -> np.ndarray:
        assert self.variant == TWO_LAYER
        return self.weights[0]

    @property
    def theta_out(self) -> np.ndarray:
        assert self.variant == TWO_LAYER
        return self.weights[1]

    @property
    def shape(self) -> PolicyShape:
        if self.variant == LINEAR:
            p, n = self.weights[0].shape
            return PolicyShape(LINEAR, n=n, h=0, p=p)
        h, n = self.weights[0].shape
        p = self.weights[1].shape[0]
        return PolicyShape(TWO_LAYER, n=n, h=h, p=p)

    def copy(self) -> "PolicyParams":
        return PolicyParams(self.variant, tuple(w.copy() for w in self.weights))


def zero_params(shape: PolicyShape) -> PolicyParams:
    return PolicyParams(shape.variant, tuple(np.zeros(s) for s in shape.matrix_shapes()))


def random_params(shape: PolicyShape, rng: np.random.Generator, scale=0.1) -> PolicyParams:
    mats = tuple(
        scale * rng.standard_normal(s) / np.sqrt(s[1]) for s in shape.matrix_shapes()
    )
    return PolicyParams(shape.variant, mats)


@dataclass
class NormalizerState:
    """Welford running statistics: mean and sum of squared deviations per component."""

    count: int = 0
    mean: np.ndarray = field(default_factory=lambda: np.zeros(0))
    m2: np.ndarray = field(default_factory=lambda: np.zeros(0))
    epsilon: float = 1e-8

    def variance(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros_like(self.m2)
        return self.m2 / self.count

    def scale(self) -> np.ndarray:
        """Per-component divisor max(std, sqrt(epsilon))."""
        return np.maximum(np.sqrt(self.variance()), np.sqrt(self.epsilon))

    def copy(self) -> "NormalizerState":
        return NormalizerState(self.count, self.mean.copy(), self.m2.copy(), self.epsilon)


def init_normalizer(n: int, epsilon: float = 1e-8) -> NormalizerState:
    return NormalizerState(0, np.zeros(n), np.zeros(n), epsilon)


def normalize(obs: np.ndarray, norm: NormalizerState) -> np.ndarray:
    """Componentwise (s - mean) / max(std, sqrt(eps)); identity until count >= 2."""
    obs = np.asarray(obs, dtype=np.float64)
    if norm.count < 2:
        return obs.copy()
    if obs.shape[-1] != norm.mean.shape[0]:
        raise ValueError("observation dimension mismatch")
    return (obs - norm.mean) / norm.scale()


def update_normalizer(norm: NormalizerState, obs: np.ndarray) -> NormalizerState:
    """Welford single-sample update; returns a new state."""
    obs = np.asarray(obs, dtype=np.float64)
    if norm.count == 0:
        return NormalizerState(1, obs.copy(), np.zeros_like(obs), norm.epsilon)
    if obs.shape != norm.mean.shape:
        raise ValueError("observation dimension mismatch")
    count = norm.count + 1
    delta = obs - norm.mean
    mean = norm.mean + delta / count
    m2 = norm.m2 + delta * (obs - mean)
    return NormalizerState(count, mean, m2, norm.epsilon)


def merge_batch(norm: NormalizerState, count: int, mean: np.ndarray, m2: np.ndarray) -> NormalizerState:
    """Chan parallel merge of precomputed batch moments into the running state."""
    if count == 0:
        return norm.copy()
    if norm.count == 0:
        return NormalizerState(count, mean.copy(), m2.copy(), norm.epsilon)
    total = norm.count + count
    delta = mean - norm.mean
    new_mean = norm.mean + delta * (count / total)
    new_m2 = norm.m2 + m2 + delta * delta * (norm.count * count / total)
    return NormalizerState(total, new_mean, new_m2, norm.epsilon)


def batch_moments(obs: np.ndarray) -> tuple[int, np.ndarray, np.ndarray]:
    """(count, mean, sum of squared deviations) of a (M, n) batch."""
    obs = np.asarray(obs, dtype=np.float64)
    count = obs.shape[0]
    if count == 0:
        return 0, np.zeros(obs.shape[-1]), np.zeros(obs.shape[-1])
    mean = obs.mean(axis=0)
    m2 = ((obs - mean) ** 2).sum(axis=0)
    return count, mean, m2


def update_normalizer_batch(norm: NormalizerState, obs: np.ndarray) -> NormalizerState:
    return merge_batch(norm, *batch_moments(obs))


def forward(params: PolicyParams, z: np.ndarray) -> np.ndarray:
    """Action logits for one normalized observation."""
    if params.variant == LINEAR:
        return params.weights[0] @ z
    return params.weights[1] @ np.tanh(params.weights[0] @ z)


def forward_batch(params: PolicyParams, z: np.ndarray) -> np.ndarray:
    """(M, p) logits for an (M, n) batch under a single parameter set."""
    if params.variant == LINEAR:
        return z @ params.weights[0].T
    return np.tanh(z @ params.weights[0].T) @ params.weights[1].T


def forward_stacked(weight_stacks: tuple[np.ndarray, ...], z: np.ndarray) -> np.ndarray:
    """Logits for B rollouts in lockstep, one parameter set per row.

    weight_stacks: per-matrix arrays of shape (B, rows, cols); z: (B, n).
    """
    if len(weight_stacks) == 1:
        return np.einsum("bpn,bn->bp", weight_stacks[0], z)
    hidden = np.tanh(np.einsum("bhn,bn->bh", weight_stacks[0], z))
    return np.einsum("bph,bh->bp", weight_stacks[1], hidden)


def act(params: PolicyParams, norm: NormalizerState, obs: np.ndarray) -> Action:
    """Deterministic argmax action; ties resolve to the lowest index."""
    logits = forward(params, normalize(obs, norm))
    return Action(int(np.argmax(logits)))


def perturb(params: PolicyParams, delta, nu: float, sign: int) -> PolicyParams:
    """theta + sign * nu * delta, elementwise over every weight matrix."""
    deltas = delta.deltas if hasattr(delta, "deltas") else tuple(delta)
    if len(deltas) != len(params.weights):
        raise ValueError("direction shape mismatch")
    out = []
    for w, d in zip(params.weights, deltas):
        d = np.asarray(d, dtype=np.float64)
        if d.shape != w.shape:
            raise ValueError("direction shape mismatch")
        out.append(w + (sign * nu) * d)
    return PolicyParams(params.variant, tuple(out))
