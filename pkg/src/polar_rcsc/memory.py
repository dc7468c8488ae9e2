"""
LLR storage of the RCSC decoder and the per-step stage indices.

Left messages ``L[i]`` (i = 0..n), odd right messages ``Ro[i]`` (i = 1..n)
and even right messages ``Re[i]`` (i = 0..n) each hold ``2**(n-i)`` values.
``L[0]`` carries the channel LLRs and ``Re[0]`` the extrinsic soft output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@njit(cache=True)
def s_index(j, n):
    """First stage updated by the left pass at step ``j``."""
    if j == 0:
        return 1
    if j & 1:
        return n
    p = 0
    while not (j >> p) & 1:
        p += 1
    return n - p


@njit(cache=True)
def e_index(j, n):
    """Last stage written by the right pass at odd step ``j``."""
    k = 0
    while k < n and (j >> k) & 1:
        k += 1
    if k == n:
        return 0
    return n - k


@njit(cache=True)
def level(flat, n, i):
    """View of stage ``i`` inside a packed ``L`` or ``Re`` buffer (2N - 1 slots)."""
    off = (2 << n) - (2 << (n - i))
    return flat[off:off + (1 << (n - i))]


@njit(cache=True)
def odd_level(flat, n, i):
    """View of stage ``i >= 1`` inside a packed ``Ro`` buffer (N - 1 slots)."""
    off = (1 << n) - (2 << (n - i))
    return flat[off:off + (1 << (n - i))]


@dataclass
class MessageMemory:
    """Packed stage arrays; ``L(i)``, ``Ro(i)`` and ``Re(i)`` return views."""

    n: int
    L_buf: np.ndarray
    Ro_buf: np.ndarray
    Re_buf: np.ndarray

    @property
    def N(self) -> int:
        return 1 << self.n

    def L(self, i: int) -> np.ndarray:
        return level(self.L_buf, self.n, i)

    def Re(self, i: int) -> np.ndarray:
        return level(self.Re_buf, self.n, i)

    def Ro(self, i: int) -> np.ndarray:
        if not 1 <= i <= self.n:
            raise IndexError(f"Ro has stages 1..{self.n}")
        return odd_level(self.Ro_buf, self.n, i)

    @property
    def total_slots(self) -> int:
        return self.L_buf.size + self.Ro_buf.size + self.Re_buf.size

    def reset(self) -> None:
        for buf in (self.L_buf, self.Ro_buf, self.Re_buf):
            buf[:] = 0.0

    def load_channel(self, llrs) -> None:
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.shape != (self.N,):
            raise ValueError(f"expected {self.N} channel LLRs, got shape {llrs.shape}")
        self.L(0)[:] = llrs


def alloc(n: int) -> MessageMemory:
    """Zero-initialised memory for a length ``2**n`` code."""
    if n < 1:
        raise ValueError("n must be >= 1")
    N = 1 << n
    return MessageMemory(n, np.zeros(2 * N - 1), np.zeros(N - 1), np.zeros(2 * N - 1))


def accounted_llrs(algorithm: str, n: int) -> int:
    """Stored-LLR count under the usual accounting convention of each decoder.

    BP: ``N(n+1)``; SCAN: ``4N - 2 + Nn/2``; RCSC and S-RCSC: ``5N - 3``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    N = 1 << n
    algorithm = algorithm.upper().replace("-", "")
    if algorithm == "BP":
        return N * (n + 1)
    if algorithm == "SCAN":
        return 4 * N - 2 + N * n // 2
    if algorithm in ("RCSC", "SRCSC"):
        return 5 * N - 3
    raise ValueError(f"unknown algorithm {algorithm!r}")
