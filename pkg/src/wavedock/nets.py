"""Dense feed-forward networks with analytic backpropagation.

Small tanh MLPs sized for two-dimensional landing states. A network is a
trunk of tanh layers plus one of four output heads:

  linear    raw affine outputs (Q-values, critic value)
  softmax   probabilities summing to 1
  dueling   value stream + mean-centred advantage stream
  gaussian  squashed action mean in [lo, hi] plus a learnable log-std

Plain SGD with optional global-norm gradient clipping is the only
optimizer. Everything is float64 numpy; no autodiff framework.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

HEADS = ("linear", "softmax", "dueling", "gaussian")
_MAGIC = b"WDNET1\n"


class NetworkFormatError(ValueError):
    """Raised when a parameter file cannot be parsed."""


@dataclass
class GradientSet:
    """Per-parameter gradients, shape-congruent with a network's parameters()."""

    arrays: list

    def global_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(a * a)) for a in self.arrays)))

    def scaled(self, factor: float) -> "GradientSet":
        return GradientSet([a * factor for a in self.arrays])


def _init_dense(rng, n_out: int, n_in: int):
    bound = 1.0 / np.sqrt(n_in)
    w = rng.uniform(-bound, bound, size=(n_out, n_in))
    b = rng.uniform(-bound, bound, size=n_out)
    return w, b


class MlpNetwork:
    """Tanh trunk plus a typed output head.

    layer_sizes includes the input width, e.g. [2, 32, 32, 16]. n_out is
    the head's output count (ignored for gaussian, which always emits
    [mean, log_std]). bounds is the gaussian action interval.
    """

    def __init__(self, layer_sizes, head="linear", n_out=1, bounds=(0.0, 1.0),
                 log_std_init=0.0, head_init_scale=1.0, seed=None):
        if head not in HEADS:
            raise ValueError(f"unknown head {head!r}; expected one of {HEADS}")
        if len(layer_sizes) < 1:
            raise ValueError("layer_sizes must at least contain the input width")
        self.layer_sizes = [int(s) for s in layer_sizes]
        self.head = head
        self.n_out = 1 if head == "gaussian" else int(n_out)
        self.bounds = (float(bounds[0]), float(bounds[1]))
        rng = np.random.default_rng(seed)

        self.weights, self.biases = [], []
        for n_in, n_o in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            w, b = _init_dense(rng, n_o, n_in)
            self.weights.append(w)
            self.biases.append(b)

        # head_init_scale < 1 keeps the initial head output near zero; for a
        # squashed gaussian mean that is the centre of the action interval
        last = self.layer_sizes[-1]
        if head == "dueling":
            self.w_value, self.b_value = _init_dense(rng, 1, last)
            self.w_adv, self.b_adv = _init_dense(rng, self.n_out, last)
            for p in (self.w_value, self.b_value, self.w_adv, self.b_adv):
                p *= head_init_scale
        elif head == "gaussian":
            self.w_out, self.b_out = _init_dense(rng, 1, last)
            self.w_out *= head_init_scale
            self.b_out *= head_init_scale
            self.log_std = np.array([float(log_std_init)])
        else:
            self.w_out, self.b_out = _init_dense(rng, self.n_out, last)
            self.w_out *= head_init_scale
            self.b_out *= head_init_scale

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    def parameters(self) -> list:
        """Live parameter arrays in a fixed order (trunk first, then head)."""
        params = []
        for w, b in zip(self.weights, self.biases):
            params.extend([w, b])
        if self.head == "dueling":
            params.extend([self.w_value, self.b_value, self.w_adv, self.b_adv])
        elif self.head == "gaussian":
            params.extend([self.w_out, self.b_out, self.log_std])
        else:
            params.extend([self.w_out, self.b_out])
        return params

    def clone(self) -> "MlpNetwork":
        other = MlpNetwork(self.layer_sizes, self.head, self.n_out, self.bounds)
        for dst, src in zip(other.parameters(), self.parameters()):
            dst[...] = src
        return other

    # -- forward / backward ------------------------------------------------

    def _trunk(self, x: np.ndarray) -> list:
        """Activations per layer; hs[0] is the input, hs[-1] the last hidden."""
        hs = [x]
        for w, b in zip(self.weights, self.biases):
            hs.append(np.tanh(hs[-1] @ w.T + b))
        return hs

    def forward(self, x) -> np.ndarray:
        """Evaluate the network; accepts a single state or a batch of rows."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        xb = x[None, :] if single else x
        if xb.shape[1] != self.n_in:
            raise ValueError(f"input width {xb.shape[1]} != network input {self.n_in}")
        h = self._trunk(xb)[-1]
        if self.head == "dueling":
            v = h @ self.w_value.T + self.b_value
            a = h @ self.w_adv.T + self.b_adv
            out = v + a - a.mean(axis=1, keepdims=True)
        elif self.head == "gaussian":
            raw = h @ self.w_out.T + self.b_out
            lo, hi = self.bounds
            mean = 0.5 * (lo + hi) + 0.5 * (hi - lo) * np.tanh(raw)
            out = np.concatenate([mean, np.full_like(mean, self.log_std[0])], axis=1)
        else:
            out = h @ self.w_out.T + self.b_out
            if self.head == "softmax":
                out = out - out.max(axis=1, keepdims=True)
                np.exp(out, out=out)
                out /= out.sum(axis=1, keepdims=True)
        return out[0] if single else out

    def backward(self, x, upstream) -> GradientSet:
        """Gradient of sum_i upstream_i . output_i with respect to all parameters.

        Recomputes the forward pass internally; upstream has the output's
        shape. Batch rows contribute additively.
        """
        x = np.asarray(x, dtype=float)
        upstream = np.asarray(upstream, dtype=float)
        if x.ndim == 1:
            x, upstream = x[None, :], upstream[None, :]
        if not np.all(np.isfinite(upstream)):
            raise FloatingPointError("non-finite upstream gradient")
        hs = self._trunk(x)
        h = hs[-1]

        if self.head == "dueling":
            d_v = upstream.sum(axis=1, keepdims=True)
            d_a = upstream - upstream.mean(axis=1, keepdims=True)
            head_grads = [d_v.T @ h, d_v.sum(axis=0), d_a.T @ h, d_a.sum(axis=0)]
            d_h = d_v @ self.w_value + d_a @ self.w_adv
        elif self.head == "gaussian":
            raw = h @ self.w_out.T + self.b_out
            t = np.tanh(raw)
            d_mean, d_logstd = upstream[:, :1], upstream[:, 1:2]
            d_raw = d_mean * 0.5 * (self.bounds[1] - self.bounds[0]) * (1.0 - t * t)
            head_grads = [d_raw.T @ h, d_raw.sum(axis=0), np.array([d_logstd.sum()])]
            d_h = d_raw @ self.w_out
        else:
            if self.head == "softmax":
                y = self.forward(x)
                d_pre = y * (upstream - (upstream * y).sum(axis=1, keepdims=True))
            else:
                d_pre = upstream
            head_grads = [d_pre.T @ h, d_pre.sum(axis=0)]
            d_h = d_pre @ self.w_out

        trunk_grads = []
        for layer in range(len(self.weights) - 1, -1, -1):
            d_pre = d_h * (1.0 - hs[layer + 1] ** 2)
            trunk_grads.append(d_pre.sum(axis=0))
            trunk_grads.append(d_pre.T @ hs[layer])
            d_h = d_pre @ self.weights[layer]
        trunk_grads.reverse()
        return GradientSet(trunk_grads + head_grads)


def sgd_step(net: MlpNetwork, grads: GradientSet, lr: float, clip=None) -> None:
    """In-place SGD update, rescaling the whole gradient to `clip` L2 norm if above it."""
    if lr <= 0.0:
        raise ValueError("learning rate must be positive")
    params = net.parameters()
    if len(params) != len(grads.arrays):
        raise ValueError("gradient set does not match network parameters")
    arrays = grads.arrays
    if clip is not None:
        norm = grads.global_norm()
        if norm > clip:
            arrays = [a * (clip / norm) for a in arrays]
    for p, g in zip(params, arrays):
        p -= lr * g


def soft_update(target: MlpNetwork, source: MlpNetwork, tau: float) -> None:
    """Blend target parameters toward the source: theta_t <- tau*theta_s + (1-tau)*theta_t."""
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must lie in (0, 1]")
    t_params, s_params = target.parameters(), source.parameters()
    if len(t_params) != len(s_params) or any(
        t.shape != s.shape for t, s in zip(t_params, s_params)
    ):
        raise ValueError("target and source networks have incongruent shapes")
    for t, s in zip(t_params, s_params):
        t *= 1.0 - tau
        t += tau * s


# -- persistence -----------------------------------------------------------


def serialize(net: MlpNetwork) -> bytes:
    """Byte-exact parameter blob: magic, JSON header, raw float64 arrays."""
    header = {
        "version": 1,
        "head": net.head,
        "layer_sizes": net.layer_sizes,
        "n_out": net.n_out,
        "activation": "tanh",
    }
    if net.head == "gaussian":
        header["bounds"] = list(net.bounds)
    hbytes = json.dumps(header, sort_keys=True).encode()
    chunks = [_MAGIC, struct.pack("<I", len(hbytes)), hbytes]
    for p in net.parameters():
        chunks.append(np.ascontiguousarray(p, dtype="<f8").tobytes())
    return b"".join(chunks)


def deserialize(blob: bytes) -> MlpNetwork:
    """Rebuild a network from serialize() output; raises NetworkFormatError on damage."""
    if blob[: len(_MAGIC)] != _MAGIC:
        raise NetworkFormatError("bad magic at byte 0")
    pos = len(_MAGIC)
    if len(blob) < pos + 4:
        raise NetworkFormatError(f"truncated header length at byte {pos}")
    (hlen,) = struct.unpack("<I", blob[pos : pos + 4])
    pos += 4
    if len(blob) < pos + hlen:
        raise NetworkFormatError(f"truncated header at byte {pos}")
    try:
        header = json.loads(blob[pos : pos + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise NetworkFormatError(f"unreadable header at byte {pos}: {exc}") from exc
    pos += hlen
    if header.get("version") != 1:
        raise NetworkFormatError(f"unsupported version {header.get('version')!r}")
    if header.get("head") not in HEADS:
        raise NetworkFormatError(f"unknown head {header.get('head')!r}")

    net = MlpNetwork(
        header["layer_sizes"],
        head=header["head"],
        n_out=header["n_out"],
        bounds=tuple(header.get("bounds", (0.0, 1.0))),
    )
    for p in net.parameters():
        nbytes = p.size * 8
        if len(blob) < pos + nbytes:
            raise NetworkFormatError(f"truncated parameters at byte {pos}")
        p[...] = np.frombuffer(blob[pos : pos + nbytes], dtype="<f8").reshape(p.shape)
        pos += nbytes
    if pos != len(blob):
        raise NetworkFormatError(f"{len(blob) - pos} trailing bytes at byte {pos}")
    return net


def save_network(net: MlpNetwork, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(net))


def load_network(path) -> MlpNetwork:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
