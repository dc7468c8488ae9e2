"""
Polar code representation: construction, encoding, membership test and
decoding-tree node classification.

Conventions
-----------
``x = u G`` with ``G = B_N F^{(x)n}`` over GF(2). Frozen indices refer to the
natural-order ``u`` vector. In the decoding tree, node ``m`` of layer ``i``
covers leaves ``u[m * 2**(n-i) : (m + 1) * 2**(n-i)]`` and nodes are numbered
in level order, ``2**i - 1 + m``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAX_N_LOG = 20


class CodeError(ValueError):
    """Invalid code parameters or frozen-set file."""


class NodeClass(enum.IntEnum):
    RATE0 = 0
    RATE1 = 1
    MIXED = 2


@dataclass(frozen=True, eq=False)
class PolarCode:
    """An (N, K) polar code defined by its frozen-bit mask.

    Parameters
    ----------
    frozen : array-like of bool, length ``N = 2**n``
        ``True`` marks a frozen position of ``u``.
    """

    frozen: np.ndarray
    n: int = field(init=False)
    N: int = field(init=False)
    K: int = field(init=False)

    def __post_init__(self):
        frozen = np.asarray(self.frozen, dtype=bool).copy()
        if frozen.ndim != 1:
            raise CodeError("frozen mask must be one-dimensional")
        N = frozen.size
        if N < 2 or N & (N - 1):
            raise CodeError(f"block length must be a power of two >= 2, got {N}")
        n = N.bit_length() - 1
        if n > MAX_N_LOG:
            raise CodeError(f"n = {n} exceeds the supported maximum {MAX_N_LOG}")
        frozen.setflags(write=False)
        object.__setattr__(self, "frozen", frozen)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "K", int(N - frozen.sum()))

    @classmethod
    def from_frozen_indices(cls, n: int, frozen_indices) -> "PolarCode":
        N = 1 << n
        mask = np.zeros(N, dtype=bool)
        idx = np.asarray(list(frozen_indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= N):
            raise CodeError(f"frozen index out of range for N = {N}")
        mask[idx] = True
        return cls(mask)

    @property
    def frozen_indices(self) -> np.ndarray:
        return np.flatnonzero(self.frozen)

    @property
    def info_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.frozen)

    @property
    def rate(self) -> float:
        return self.K / self.N

    def __eq__(self, other):
        if not isinstance(other, PolarCode):
            return NotImplemented
        return np.array_equal(self.frozen, other.frozen)

    def __hash__(self):
        return hash(self.frozen.tobytes())

    def __repr__(self):
        return f"PolarCode(N={self.N}, K={self.K})"


# --------------------------------------------------------------------------
# construction

def bhattacharyya_parameters(n: int, z0: float = 0.5) -> np.ndarray:
    """Bhattacharyya parameters of the ``2**n`` synthetic channels of a BEC(z0).

    Index ``j`` of the result is the channel seen by ``u_j``.
    """
    z = np.array([z0], dtype=np.float64)
    for _ in range(n):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


def construct_frozen_set(n: int, K: int, design_erasure_prob: float = 0.5) -> PolarCode:
    """Freeze the ``N - K`` least reliable positions (largest Bhattacharyya
    parameter); ties freeze the lower index first."""
    if not 1 <= n <= MAX_N_LOG:
        raise CodeError(f"n must lie in [1, {MAX_N_LOG}], got {n}")
    N = 1 << n
    if not 0 <= K <= N:
        raise CodeError(f"K must lie in [0, {N}], got {K}")
    if not 0.0 < design_erasure_prob < 1.0:
        raise CodeError("design erasure probability must lie in (0, 1)")
    z = bhattacharyya_parameters(n, design_erasure_prob)
    # lexsort: last key is primary -> descending z, then ascending index
    order = np.lexsort((np.arange(N), -z))
    return PolarCode.from_frozen_indices(n, order[: N - K])


def load_frozen_file(path) -> PolarCode:
    """Read a frozen-set file: ``"N K"`` on line 1, ascending frozen indices
    on line 2 (may be empty when ``K = N``)."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise CodeError(f"{path}: empty frozen-set file")
    try:
        header = [int(t) for t in lines[0].split()]
        idx = [int(t) for t in lines[1].split()] if len(lines) > 1 else []
    except ValueError as exc:
        raise CodeError(f"{path}: malformed frozen-set file ({exc})") from None
    if len(header) != 2:
        raise CodeError(f"{path}: line 1 must be 'N K'")
    if any(line.strip() for line in lines[2:]):
        raise CodeError(f"{path}: unexpected content after line 2")
    N, K = header
    if N < 2 or N & (N - 1):
        raise CodeError(f"{path}: N = {N} is not a power of two")
    if not 0 <= K <= N:
        raise CodeError(f"{path}: K = {K} out of range")
    if len(idx) != N - K:
        raise CodeError(f"{path}: expected {N - K} frozen indices, found {len(idx)}")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise CodeError(f"{path}: frozen indices must be strictly ascending")
    return PolarCode.from_frozen_indices(N.bit_length() - 1, idx)


def format_frozen_file(code: PolarCode) -> str:
    return f"{code.N} {code.K}\n" + " ".join(str(j) for j in code.frozen_indices) + "\n"


def save_frozen_file(code: PolarCode, path) -> None:
    Path(path).write_text(format_frozen_file(code))


# --------------------------------------------------------------------------
# encoding

def bit_reversal_permutation(n: int) -> np.ndarray:
    N = 1 << n
    j = np.arange(N)
    rev = np.zeros(N, dtype=np.int64)
    for b in range(n):
        rev |= ((j >> b) & 1) << (n - 1 - b)
    return rev


def polar_transform(v: np.ndarray) -> np.ndarray:
    """Multiply row vector(s) by ``G = B_N F^{(x)n}`` over GF(2).

    Works on the last axis, so a ``(frames, N)`` batch is transformed at once.
    ``G`` is an involution, hence this is also its own inverse.
    """
    v = np.asarray(v)
    N = v.shape[-1]
    n = N.bit_length() - 1
    out = (v[..., bit_reversal_permutation(n)] & 1).astype(np.uint8)
    lead = out.shape[:-1]
    half = N // 2
    while half >= 1:
        blocks = out.reshape(*lead, N // (2 * half), 2, half)
        blocks[..., 0, :] ^= blocks[..., 1, :]
        half //= 2
    return out


def encode(code: PolarCode, u) -> np.ndarray:
    """Encode ``u`` (length N, zeros at frozen positions) into ``x = u G``."""
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != code.N:
        raise CodeError(f"u must have length {code.N}, got {u.shape[-1]}")
    if np.any(u[..., code.frozen]):
        raise CodeError("nonzero value at a frozen position of u")
    return polar_transform(u)


def is_valid_codeword(code: PolarCode, x) -> bool:
    """True iff ``x G`` vanishes on every frozen position."""
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (code.N,):
        raise CodeError(f"x must have length {code.N}")
    return not np.any(polar_transform(x)[code.frozen])


# --------------------------------------------------------------------------
# decoding tree

def classify_tree(code: PolarCode) -> np.ndarray:
    """Rate-0 / rate-1 / mixed class of all ``2N - 1`` tree nodes, level order."""
    N = code.N
    classes = np.empty(2 * N - 1, dtype=np.int8)
    layer = np.where(code.frozen, NodeClass.RATE0, NodeClass.RATE1).astype(np.int8)
    classes[N - 1:] = layer
    width = N
    while width > 1:
        left, right = layer[0::2], layer[1::2]
        layer = np.where(left == right, left, NodeClass.MIXED).astype(np.int8)
        width //= 2
        classes[width - 1: 2 * width - 1] = layer
    classes.setflags(write=False)
    return classes


def node_class_counts(classes) -> dict:
    classes = np.asarray(classes)
    return {c.name.lower(): int(np.sum(classes == c)) for c in NodeClass}
