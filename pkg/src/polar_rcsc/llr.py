"""
LLR arithmetic: the min-sum kernel, saturating addition and channel
quantization.

Sign convention: a positive LLR favours bit 0.

Two arithmetic modes share one code path. Values are carried as float64;
the fixed-point mode stores integer codes and clamps every finite sum to
``[-S, S]`` with ``S = 2**(Q-1) - 1``. Frozen-bit certainty is the dedicated
symbol ``+inf`` in both modes, so saturated finite values never alias it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

INF = math.inf


def saturation_bound(q_bits: int) -> int:
    """Largest magnitude of a symmetric ``q_bits`` two's-complement code."""
    return (1 << (q_bits - 1)) - 1


@dataclass(frozen=True)
class QuantSpec:
    """Bit widths and step size of the fixed-point pipeline.

    ``scale`` is the LLR value of one channel code step.
    """

    q_channel: int = 5
    q_internal: int = 7
    scale: float = 0.25

    def __post_init__(self):
        if not 2 <= self.q_channel <= self.q_internal:
            raise ValueError("need 2 <= q_channel <= q_internal")
        if self.q_internal > 31:
            raise ValueError("q_internal above 31 bits is not supported")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def channel_bound(self) -> int:
        return saturation_bound(self.q_channel)

    @property
    def internal_bound(self) -> int:
        return saturation_bound(self.q_internal)


# --------------------------------------------------------------------------
# jitted kernels, used by every decoder

@njit(inline="always")
def fminsum(a, b):
    ma = abs(a)
    mb = abs(b)
    m = ma if ma < mb else mb
    if m == 0.0:
        return 0.0
    # sign(0) counts as +; -0.0 < 0 is False
    if (a < 0.0) != (b < 0.0):
        return -m
    return m


@njit(inline="always")
def satadd(a, b, bound):
    s = a + b
    if s != s:
        # +inf + -inf: conflicting certainties cancel
        return 0.0
    if s > bound:
        return s if s == np.inf else bound
    if s < -bound:
        return s if s == -np.inf else -bound
    return s


# --------------------------------------------------------------------------
# scalar API

def f_minsum(a, b):
    """``sign(a) sign(b) min(|a|, |b|)`` with ``sign(0) = +``."""
    r = fminsum(float(a), float(b))
    if _all_int(a, b) and math.isfinite(r):
        return int(r)
    return r


def sat_add(a, b, q_bits: int | None = None):
    """Add two LLRs.

    With ``q_bits=None`` this is real addition with infinities propagating
    and ``inf + (-inf) = 0``. Otherwise finite results are clamped to the
    symmetric ``q_bits`` range; ``+-inf`` operands keep their meaning.
    """
    bound = np.inf if q_bits is None else float(saturation_bound(q_bits))
    r = satadd(float(a), float(b), bound)
    if q_bits is None or not math.isfinite(r):
        return r
    return int(r)


def quantize_channel(y_llr, spec: QuantSpec = QuantSpec()):
    """Map real channel LLR(s) to integer codes of ``spec.q_channel`` bits.

    Returns float64 codes (integral values) for direct use by the decoders.
    """
    s = spec.channel_bound
    codes = np.clip(np.rint(np.asarray(y_llr, dtype=np.float64) / spec.scale), -s, s)
    return codes + 0.0  # drop -0.0


def _all_int(*vals) -> bool:
    return all(isinstance(v, (int, np.integer)) for v in vals)
