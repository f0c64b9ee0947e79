"""Hand-rolled feed-forward machinery shared by the discriminator and BC.

Dense layers with tanh hidden activations, reverse-mode gradients written out
explicitly, and a minimal Adam optimizer. Gradients are exact; the test suite
checks every component against central finite differences.
"""

import numpy as np


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(logits))


def mlp_forward(weights, biases, x: np.ndarray):
    """Tanh-hidden MLP with sigmoid scalar output.

    x: (M, in_dim). Returns (scores (M,), caches) where caches holds the
    layer activations needed for the backward pass.
    """
    acts = [x]
    a = x
    for w, b in zip(weights[:-1], biases[:-1]):
        a = np.tanh(a @ w.T + b)
        acts.append(a)
    z_out = a @ weights[-1].T + biases[-1]
    scores = sigmoid(z_out[:, 0])
    return scores, (acts, scores)


def mlp_backward(weights, cache, dscore: np.ndarray):
    """Gradients of sum_i dscore_i * score_i w.r.t. every weight and bias."""
    acts, scores = cache
    dz = (dscore * scores * (1.0 - scores))[:, None]
    dws = [None] * len(weights)
    dbs = [None] * len(weights)
    for layer in range(len(weights) - 1, -1, -1):
        dws[layer] = dz.T @ acts[layer]
        dbs[layer] = dz.sum(axis=0)
        if layer > 0:
            da = dz @ weights[layer]
            dz = (1.0 - acts[layer] ** 2) * da
    return dws, dbs


def policy_logits(variant: str, weights, z: np.ndarray):
    """Batch logits plus cache for the bias-free policy net."""
    if variant == "linear":
        return z @ weights[0].T, (z,)
    hidden = np.tanh(z @ weights[0].T)
    return hidden @ weights[1].T, (z, hidden)


def policy_backward(variant: str, weights, cache, dlogits: np.ndarray):
    """Gradients of sum(dlogits * logits) w.r.t. the policy matrices."""
    if variant == "linear":
        (z,) = cache
        return [dlogits.T @ z]
    z, hidden = cache
    d_out = dlogits.T @ hidden
    dh = dlogits @ weights[1]
    dpre = (1.0 - hidden**2) * dh
    d_in = dpre.T @ z
    return [d_in, d_out]


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean softmax cross-entropy; labels are integer class indices."""
    ls = log_softmax(logits)
    return float(-ls[np.arange(len(labels)), labels].mean())


def cross_entropy_grad(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    g = softmax(logits)
    g[np.arange(len(labels)), labels] -= 1.0
    return g / len(labels)


class Adam:
    """Adam on a flat list of arrays; updates the arrays in place."""

    def __init__(self, arrays, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(a) for a in arrays]
        self.v = [np.zeros_like(a) for a in arrays]

    def step(self, arrays, grads):
        self.t += 1
        b1c = 1.0 - self.beta1**self.t
        b2c = 1.0 - self.beta2**self.t
        for a, g, m, v in zip(arrays, grads, self.m, self.v):
            m += (1.0 - self.beta1) * (g - m)
            v += (1.0 - self.beta2) * (g * g - v)
            a -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)
