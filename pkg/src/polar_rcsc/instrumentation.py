"""
Operation counting and the analytical decoding-energy comparison.

Counting convention: every min-sum evaluation is one comparison and every
real-valued addition is one addition. Leaf assignments and the final hard
decision are free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .code import PolarCode


@dataclass
class OpCounters:
    additions: int = 0
    comparisons: int = 0
    node_visits: int = 0
    per_iteration: list = field(default_factory=list)

    @classmethod
    def from_array(cls, counts: np.ndarray, visits_per_iteration: int = 0) -> "OpCounters":
        """Build from an ``(iterations, 2)`` array of (additions, comparisons)."""
        per_it = [(int(a), int(c)) for a, c in np.asarray(counts)]
        return cls(
            additions=sum(a for a, _ in per_it),
            comparisons=sum(c for _, c in per_it),
            node_visits=visits_per_iteration * len(per_it),
            per_iteration=per_it,
        )

    def __iadd__(self, other: "OpCounters") -> "OpCounters":
        self.additions += other.additions
        self.comparisons += other.comparisons
        self.node_visits += other.node_visits
        self.per_iteration.extend(other.per_iteration)
        return self


def formula_counts(algorithm: str, n: int) -> tuple[int, int]:
    """Closed-form (additions, comparisons) of one full iteration."""
    N = 1 << n
    algorithm = algorithm.upper().replace("-", "")
    if algorithm in ("BP", "SCAN"):
        return 2 * N * n, 2 * N * n
    if algorithm == "RCSC":
        return 3 * N * n // 2 + N // 2, 2 * N * n
    raise ValueError(f"no closed form for {algorithm!r}")


def count_full_iteration(algorithm: str, code: PolarCode) -> tuple[int, int]:
    """Measured (additions, comparisons) of one iteration without early exit."""
    from .decoders import DecoderConfig, decode

    cfg = DecoderConfig(algorithm=algorithm, i_max=1, early_stop=False)
    llrs = np.linspace(-1.0, 1.0, code.N)
    res = decode(code, llrs, cfg)
    return res.counters.per_iteration[0]


@dataclass(frozen=True)
class EnergyModel:
    """Per-operation energies (arbitrary units) and average iteration counts."""

    i_av: float
    i_av_bp: float
    e_add: float = 1.0
    e_cmp: float = 1.0

    def __post_init__(self):
        if not (self.e_add > 0 and self.e_cmp > 0):
            raise ValueError("operation energies must be positive")


def energy_ratio(model: EnergyModel, additions: int, comparisons: int, code: PolarCode) -> float:
    """``E_bp / E_decoder`` for the given per-iteration decoder counts.

    ``E_decoder = i_av (additions e_add + comparisons e_cmp)`` and
    ``E_bp = 2 N n (e_add + e_cmp) i_av_bp``.
    """
    e_dec = model.i_av * (additions * model.e_add + comparisons * model.e_cmp)
    e_bp = 2 * code.N * code.n * (model.e_add + model.e_cmp) * model.i_av_bp
    if e_dec == 0:
        raise ZeroDivisionError("decoder energy is zero")
    return e_bp / e_dec
