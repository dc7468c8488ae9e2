"""
Soft-output polar decoders: BP (flooding), SCAN, RCSC and S-RCSC.

All four share the min-sum kernels of :mod:`polar_rcsc.llr` and return the
coded-bit estimate, the a-posteriori soft output and the iteration count.
Kernels run per frame under numba; ``decode_batch`` loops frames inside
compiled code for Monte Carlo use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .code import NodeClass, PolarCode, bit_reversal_permutation, classify_tree, polar_transform
from .instrumentation import OpCounters
from .llr import QuantSpec, fminsum, quantize_channel, satadd
from .memory import MessageMemory, alloc, e_index, level, odd_level, s_index

ALGORITHMS = ("BP", "SCAN", "RCSC", "SRCSC")

_INF = np.inf


@dataclass(frozen=True)
class DecoderConfig:
    algorithm: str = "SRCSC"
    i_max: int = 2
    arithmetic: str = "float"
    quant: QuantSpec = QuantSpec()
    early_stop: bool = True

    def __post_init__(self):
        algo = self.algorithm.upper().replace("-", "")
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        object.__setattr__(self, "algorithm", algo)
        if self.i_max < 1:
            raise ValueError("i_max must be >= 1")
        if self.arithmetic not in ("float", "fixed"):
            raise ValueError("arithmetic must be 'float' or 'fixed'")

    @property
    def bound(self) -> float:
        """Saturation bound of internal sums (``inf`` in floating point)."""
        return float(self.quant.internal_bound) if self.arithmetic == "fixed" else _INF


@dataclass
class DecodeResult:
    x_hat: np.ndarray
    soft_out: np.ndarray
    iterations_used: int
    valid: bool
    u_hat: np.ndarray
    counters: OpCounters = field(default_factory=OpCounters)


# --------------------------------------------------------------------------
# shared kernels

@njit(cache=True)
def _pair(out, be, bo, a, bound, cnt):
    # beta_v from (beta_l, beta_r, alpha_v); also the BP right update
    size = be.shape[0]
    for k in range(size):
        out[2 * k] = fminsum(be[k], satadd(bo[k], a[2 * k + 1], bound))
        out[2 * k + 1] = satadd(bo[k], fminsum(be[k], a[2 * k]), bound)
    cnt[0] += 2 * size
    cnt[1] += 2 * size


@njit(cache=True)
def _alpha_left(out, a, bound, cnt):
    for k in range(out.shape[0]):
        out[k] = fminsum(a[2 * k], a[2 * k + 1])
    cnt[1] += out.shape[0]


@njit(cache=True)
def _alpha_left_fed(out, a, r, bound, cnt):
    # left message still fed by the previous-iteration right message
    for k in range(out.shape[0]):
        out[k] = fminsum(a[2 * k], satadd(a[2 * k + 1], r[k], bound))
    cnt[0] += out.shape[0]
    cnt[1] += out.shape[0]


@njit(cache=True)
def _alpha_right(out, a, be, bound, cnt):
    for k in range(out.shape[0]):
        out[k] = satadd(a[2 * k + 1], fminsum(a[2 * k], be[k]), bound)
    cnt[0] += out.shape[0]
    cnt[1] += out.shape[0]


@njit(cache=True)
def _decide(l0, r0, bound, x, soft):
    for j in range(l0.shape[0]):
        s = satadd(l0[j], r0[j], bound)
        soft[j] = s
        x[j] = 0 if s >= 0.0 else 1


@njit(cache=True)
def _is_valid(x, frozen, perm, work):
    N = x.shape[0]
    for j in range(N):
        work[j] = x[perm[j]]
    half = N // 2
    while half >= 1:
        for start in range(0, N, 2 * half):
            for t in range(half):
                work[start + t] ^= work[start + half + t]
        half //= 2
    for j in range(N):
        if frozen[j] and work[j]:
            return False
    return True


@njit(cache=True)
def _leaf_value(frozen, j):
    return np.inf if frozen[j] else 0.0


# --------------------------------------------------------------------------
# RCSC: serial schedule with the modified left update

@njit(cache=True)
def _lcomp(j, n, L, Ro, Re, bound, cnt):
    s = s_index(j, n)
    if j == 0:
        _alpha_left_fed(level(L, n, s), level(L, n, s - 1), odd_level(Ro, n, s), bound, cnt)
    else:
        _alpha_right(level(L, n, s), level(L, n, s - 1), level(Re, n, s), bound, cnt)
    for i in range(s + 1, n + 1):
        _alpha_left(level(L, n, i), level(L, n, i - 1), bound, cnt)


@njit(cache=True)
def _rcomp(j, n, L, Ro, Re, bound, cnt):
    e = e_index(j, n)
    for i in range(n - 1, e, -1):
        _pair(odd_level(Ro, n, i), level(Re, n, i + 1), odd_level(Ro, n, i + 1),
              level(L, n, i), bound, cnt)
    _pair(level(Re, n, e), level(Re, n, e + 1), odd_level(Ro, n, e + 1),
          level(L, n, e), bound, cnt)


@njit(cache=True)
def _rcsc_iteration(n, frozen, L, Ro, Re, bound, cnt):
    for j in range(1 << n):
        _lcomp(j, n, L, Ro, Re, bound, cnt)
        if j % 2 == 0:
            level(Re, n, n)[0] = _leaf_value(frozen, j)
        else:
            odd_level(Ro, n, n)[0] = _leaf_value(frozen, j)
            _rcomp(j, n, L, Ro, Re, bound, cnt)


@njit(cache=True)
def _rcsc_frame(llr, frozen, perm, i_max, early_stop, bound, L, Ro, Re, x, soft, cnt, work):
    n = _log2(llr.shape[0])
    L[:] = 0.0
    Ro[:] = 0.0
    Re[:] = 0.0
    L[:llr.shape[0]] = llr
    valid = False
    for it in range(i_max):
        _rcsc_iteration(n, frozen, L, Ro, Re, bound, cnt[it])
        _decide(level(L, n, 0), level(Re, n, 0), bound, x, soft)
        valid = _is_valid(x, frozen, perm, work)
        if early_stop and valid:
            return it + 1, valid
    return i_max, valid


# --------------------------------------------------------------------------
# S-RCSC: tree traversal compiled into a flat instruction list

OP_ALPHA_LEFT = 0
OP_ALPHA_RIGHT = 1
OP_SET_RE = 2
OP_SET_RO = 3
OP_BETA_RE = 4
OP_BETA_RO = 5


def build_srcsc_schedule(code: PolarCode) -> tuple[np.ndarray, int]:
    """Instruction list of one S-RCSC iteration and its node-visit count.

    Each row is ``(op, layer, frozen_flag)``. Pure-rate children are never
    entered: their beta is written as all-inf (rate 0) or all-zero (rate 1).
    """
    classes = classify_tree(code)
    n = code.n
    prog: list[tuple[int, int, int]] = []

    def cls(i, m):
        return classes[(1 << i) - 1 + m]

    def visit(i, m):
        for child, side in ((2 * m, 0), (2 * m + 1, 1)):
            c = cls(i + 1, child)
            if c != NodeClass.MIXED:
                prog.append((OP_SET_RO if side else OP_SET_RE, i + 1, int(c == NodeClass.RATE0)))
            else:
                prog.append((OP_ALPHA_RIGHT if side else OP_ALPHA_LEFT, i + 1, 0))
                visit(i + 1, child)
        prog.append((OP_BETA_RO if m % 2 and i > 0 else OP_BETA_RE, i, 0))

    root = cls(0, 0)
    if root == NodeClass.MIXED:
        visit(0, 0)
    else:
        prog.append((OP_SET_RE, 0, int(root == NodeClass.RATE0)))
    sched = np.array(prog, dtype=np.int64).reshape(-1, 3)
    visits = 1 + sum(1 for op, _, _ in prog if op <= OP_SET_RO) if root == NodeClass.MIXED else 1
    return sched, visits


@njit(cache=True)
def _srcsc_iteration(n, sched, L, Ro, Re, bound, cnt):
    for r in range(sched.shape[0]):
        op = sched[r, 0]
        i = sched[r, 1]
        if op == OP_ALPHA_LEFT:
            if i == 1:
                _alpha_left_fed(level(L, n, 1), level(L, n, 0), odd_level(Ro, n, 1), bound, cnt)
            else:
                _alpha_left(level(L, n, i), level(L, n, i - 1), bound, cnt)
        elif op == OP_ALPHA_RIGHT:
            _alpha_right(level(L, n, i), level(L, n, i - 1), level(Re, n, i), bound, cnt)
        elif op == OP_SET_RE:
            level(Re, n, i)[:] = np.inf if sched[r, 2] else 0.0
        elif op == OP_SET_RO:
            odd_level(Ro, n, i)[:] = np.inf if sched[r, 2] else 0.0
        else:
            out = level(Re, n, i) if op == OP_BETA_RE else odd_level(Ro, n, i)
            _pair(out, level(Re, n, i + 1), odd_level(Ro, n, i + 1), level(L, n, i), bound, cnt)


@njit(cache=True)
def _srcsc_frame(llr, frozen, perm, sched, i_max, early_stop, bound, L, Ro, Re, x, soft, cnt, work):
    n = _log2(llr.shape[0])
    L[:] = 0.0
    Ro[:] = 0.0
    Re[:] = 0.0
    L[:llr.shape[0]] = llr
    valid = False
    for it in range(i_max):
        _srcsc_iteration(n, sched, L, Ro, Re, bound, cnt[it])
        _decide(level(L, n, 0), level(Re, n, 0), bound, x, soft)
        valid = _is_valid(x, frozen, perm, work)
        if early_stop and valid:
            return it + 1, valid
    return i_max, valid


# --------------------------------------------------------------------------
# SCAN: same schedule, every left update fed by the stored odd right messages
#
# L and Re are packed as for RCSC. The odd right messages of stage i keep one
# block per right child, N/2 values per stage, packed at (i - 1) * N/2.

@njit(cache=True)
def scan_odd_block(RoS, n, i, m):
    """Stored beta of right child ``m`` (odd) of stage ``i``."""
    size = 1 << (n - i)
    off = (i - 1) * (1 << (n - 1)) + (m >> 1) * size
    return RoS[off:off + size]


@njit(cache=True)
def _scan_lcomp(j, n, L, RoS, Re, bound, cnt):
    s = s_index(j, n)
    for i in range(s, n + 1):
        if i == s and j != 0:
            _alpha_right(level(L, n, i), level(L, n, i - 1), level(Re, n, i), bound, cnt)
        else:
            # the sibling of left child m is m + 1, which shares block m >> 1
            r = scan_odd_block(RoS, n, i, j >> (n - i))
            _alpha_left_fed(level(L, n, i), level(L, n, i - 1), r, bound, cnt)


@njit(cache=True)
def _scan_rcomp(j, n, L, RoS, Re, bound, cnt):
    e = e_index(j, n)
    for i in range(n - 1, e - 1, -1):
        m = j >> (n - i)
        bo = scan_odd_block(RoS, n, i + 1, 2 * m + 1)
        out = scan_odd_block(RoS, n, i, m) if i > e else level(Re, n, i)
        _pair(out, level(Re, n, i + 1), bo, level(L, n, i), bound, cnt)


@njit(cache=True)
def _scan_iteration(n, frozen, L, RoS, Re, bound, cnt):
    for j in range(1 << n):
        _scan_lcomp(j, n, L, RoS, Re, bound, cnt)
        if j % 2 == 0:
            level(Re, n, n)[0] = _leaf_value(frozen, j)
        else:
            scan_odd_block(RoS, n, n, j)[0] = _leaf_value(frozen, j)
            _scan_rcomp(j, n, L, RoS, Re, bound, cnt)


@njit(cache=True)
def _scan_frame(llr, frozen, perm, i_max, early_stop, bound, L, RoS, Re, x, soft, cnt, work):
    n = _log2(llr.shape[0])
    L[:] = 0.0
    RoS[:] = 0.0
    Re[:] = 0.0
    L[:llr.shape[0]] = llr
    valid = False
    for it in range(i_max):
        _scan_iteration(n, frozen, L, RoS, Re, bound, cnt[it])
        _decide(level(L, n, 0), level(Re, n, 0), bound, x, soft)
        valid = _is_valid(x, frozen, perm, work)
        if early_stop and valid:
            return it + 1, valid
    return i_max, valid


# --------------------------------------------------------------------------
# BP: flooding schedule over the full factor graph
#
# Column i lists the alpha vectors of the 2**i tree nodes of layer i back to
# back. The unit graph (m, k) between columns i and i+1 joins entries
# m*Nv + 2k, m*Nv + 2k + 1 of column i with m*Nv + k, m*Nv + Nv/2 + k of
# column i+1, where Nv = 2**(n-i).

@njit(cache=True)
def _bp_iteration(n, Lm, Rm, bound, cnt):
    N = 1 << n
    for i in range(n):
        nv = N >> i
        h = nv // 2
        a = Lm[i]
        out = Lm[i + 1]
        r = Rm[i + 1]
        for m in range(1 << i):
            base = m * nv
            for k in range(h):
                j0 = base + 2 * k
                j2 = base + k
                j3 = base + h + k
                out[j2] = fminsum(satadd(r[j3], a[j0 + 1], bound), a[j0])
                out[j3] = satadd(fminsum(r[j2], a[j0]), a[j0 + 1], bound)
    for i in range(n - 1, -1, -1):
        nv = N >> i
        h = nv // 2
        a = Lm[i]
        r = Rm[i + 1]
        out = Rm[i]
        for m in range(1 << i):
            base = m * nv
            for k in range(h):
                j0 = base + 2 * k
                j2 = base + k
                j3 = base + h + k
                out[j0] = fminsum(r[j2], satadd(r[j3], a[j0 + 1], bound))
                out[j0 + 1] = satadd(r[j3], fminsum(r[j2], a[j0]), bound)
    cnt[0] += 2 * N * n
    cnt[1] += 2 * N * n


@njit(cache=True)
def _bp_frame(llr, frozen, perm, i_max, early_stop, bound, Lm, Rm, x, soft, cnt, work):
    n = Lm.shape[0] - 1
    Lm[:] = 0.0
    Rm[:] = 0.0
    Lm[0] = llr
    for j in range(llr.shape[0]):
        Rm[n, j] = _leaf_value(frozen, j)
    valid = False
    for it in range(i_max):
        _bp_iteration(n, Lm, Rm, bound, cnt[it])
        _decide(Lm[0], Rm[0], bound, x, soft)
        valid = _is_valid(x, frozen, perm, work)
        if early_stop and valid:
            return it + 1, valid
    return i_max, valid


# --------------------------------------------------------------------------
# batch drivers

@njit(cache=True)
def _log2(N):
    n = 0
    while (1 << n) < N:
        n += 1
    return n


@njit(cache=True)
def _batch_rcsc(llrs, frozen, perm, i_max, early_stop, bound, xs, softs, iters, valids, cnt):
    N = llrs.shape[1]
    L = np.zeros(2 * N - 1)
    Ro = np.zeros(N - 1)
    Re = np.zeros(2 * N - 1)
    work = np.empty(N, np.uint8)
    for b in range(llrs.shape[0]):
        iters[b], valids[b] = _rcsc_frame(llrs[b], frozen, perm, i_max, early_stop, bound,
                                          L, Ro, Re, xs[b], softs[b], cnt, work)


@njit(cache=True)
def _batch_srcsc(llrs, frozen, perm, sched, i_max, early_stop, bound, xs, softs, iters, valids, cnt):
    N = llrs.shape[1]
    L = np.zeros(2 * N - 1)
    Ro = np.zeros(N - 1)
    Re = np.zeros(2 * N - 1)
    work = np.empty(N, np.uint8)
    for b in range(llrs.shape[0]):
        iters[b], valids[b] = _srcsc_frame(llrs[b], frozen, perm, sched, i_max, early_stop, bound,
                                           L, Ro, Re, xs[b], softs[b], cnt, work)


@njit(cache=True)
def _batch_scan(llrs, frozen, perm, i_max, early_stop, bound, xs, softs, iters, valids, cnt):
    N = llrs.shape[1]
    n = _log2(N)
    L = np.zeros(2 * N - 1)
    RoS = np.zeros(n * N // 2)
    Re = np.zeros(2 * N - 1)
    work = np.empty(N, np.uint8)
    for b in range(llrs.shape[0]):
        iters[b], valids[b] = _scan_frame(llrs[b], frozen, perm, i_max, early_stop, bound,
                                          L, RoS, Re, xs[b], softs[b], cnt, work)


@njit(cache=True)
def _batch_bp(llrs, frozen, perm, i_max, early_stop, bound, xs, softs, iters, valids, cnt):
    N = llrs.shape[1]
    n = _log2(N)
    Lm = np.zeros((n + 1, N))
    Rm = np.zeros((n + 1, N))
    work = np.empty(N, np.uint8)
    for b in range(llrs.shape[0]):
        iters[b], valids[b] = _bp_frame(llrs[b], frozen, perm, i_max, early_stop, bound,
                                        Lm, Rm, xs[b], softs[b], cnt, work)


# --------------------------------------------------------------------------
# public API

@dataclass
class BatchResult:
    x_hat: np.ndarray
    soft_out: np.ndarray
    iterations_used: np.ndarray
    valid: np.ndarray
    counts: np.ndarray  # (i_max, 2) additions/comparisons summed over frames


def allocated_llrs(algorithm: str, n: int) -> int:
    """LLR slots actually allocated by this implementation."""
    N = 1 << n
    algorithm = algorithm.upper().replace("-", "")
    if algorithm in ("RCSC", "SRCSC"):
        return alloc(n).total_slots
    if algorithm == "SCAN":
        return 2 * (2 * N - 1) + n * N // 2
    if algorithm == "BP":
        return 2 * N * (n + 1)
    raise ValueError(f"unknown algorithm {algorithm!r}")


class Decoder:
    """A decoder bound to one code and configuration.

    Instances keep no state between frames, so one instance may be reused;
    use separate instances for concurrent threads.
    """

    def __init__(self, code: PolarCode, cfg: DecoderConfig = DecoderConfig()):
        self.code = code
        self.cfg = cfg
        self._frozen = code.frozen.astype(np.uint8)
        self._perm = bit_reversal_permutation(code.n)
        self.schedule = None
        if cfg.algorithm == "SRCSC":
            self.schedule, self.visits_per_iteration = build_srcsc_schedule(code)
        elif cfg.algorithm == "BP":
            self.visits_per_iteration = 0
        else:
            self.visits_per_iteration = 2 * code.N - 1

    def _channel(self, llrs) -> np.ndarray:
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.ndim != 2 or llrs.shape[1] != self.code.N:
            raise ValueError(f"expected channel LLRs of length {self.code.N}, got shape {llrs.shape}")
        if self.cfg.arithmetic == "fixed":
            llrs = quantize_channel(llrs, self.cfg.quant)
        return np.ascontiguousarray(llrs)

    def decode_batch(self, llrs) -> BatchResult:
        """Decode a ``(frames, N)`` array of channel LLRs."""
        ch = self._channel(llrs)
        B, N = ch.shape
        cfg = self.cfg
        xs = np.zeros((B, N), np.uint8)
        softs = np.zeros((B, N))
        iters = np.zeros(B, np.int64)
        valids = np.zeros(B, np.bool_)
        cnt = np.zeros((cfg.i_max, 2), np.int64)
        common = (cfg.i_max, cfg.early_stop, cfg.bound, xs, softs, iters, valids, cnt)
        if cfg.algorithm == "RCSC":
            _batch_rcsc(ch, self._frozen, self._perm, *common)
        elif cfg.algorithm == "SRCSC":
            _batch_srcsc(ch, self._frozen, self._perm, self.schedule, *common)
        elif cfg.algorithm == "SCAN":
            _batch_scan(ch, self._frozen, self._perm, *common)
        else:
            _batch_bp(ch, self._frozen, self._perm, *common)
        if cfg.arithmetic == "fixed":
            softs *= cfg.quant.scale
        return BatchResult(xs, softs, iters, valids, cnt)

    def decode(self, llrs) -> DecodeResult:
        res = self.decode_batch(np.asarray(llrs, dtype=np.float64)[None, :])
        it = int(res.iterations_used[0])
        x = res.x_hat[0]
        return DecodeResult(
            x_hat=x,
            soft_out=res.soft_out[0],
            iterations_used=it,
            valid=bool(res.valid[0]),
            u_hat=polar_transform(x),
            counters=OpCounters.from_array(res.counts[:it], self.visits_per_iteration),
        )


def decode(code: PolarCode, channel_llrs, cfg: DecoderConfig = DecoderConfig()) -> DecodeResult:
    return Decoder(code, cfg).decode(channel_llrs)


def _checked(algorithm):
    def run(code: PolarCode, channel_llrs, cfg: DecoderConfig = None) -> DecodeResult:
        if cfg is None:
            cfg = DecoderConfig(algorithm=algorithm)
        if cfg.algorithm != algorithm:
            raise ValueError(f"configuration is for {cfg.algorithm}, not {algorithm}")
        return decode(code, channel_llrs, cfg)
    run.__name__ = f"{algorithm.lower()}_decode"
    run.__doc__ = f"Decode one frame with the {algorithm} decoder."
    return run


rcsc_decode = _checked("RCSC")
srcsc_decode = _checked("SRCSC")
scan_decode = _checked("SCAN")
bp_decode = _checked("BP")


# --------------------------------------------------------------------------
# step-level access to the RCSC passes

def lcomp(j: int, mem: MessageMemory, bound: float = _INF, counters: np.ndarray | None = None) -> None:
    """Left pass of RCSC step ``j`` on ``mem`` (in place)."""
    cnt = np.zeros(2, np.int64) if counters is None else counters
    _lcomp(j, mem.n, mem.L_buf, mem.Ro_buf, mem.Re_buf, bound, cnt)


def rcomp(j: int, mem: MessageMemory, bound: float = _INF, counters: np.ndarray | None = None) -> None:
    """Right pass of odd RCSC step ``j`` on ``mem`` (in place)."""
    if j % 2 == 0:
        raise ValueError("the right pass runs on odd steps only")
    cnt = np.zeros(2, np.int64) if counters is None else counters
    _rcomp(j, mem.n, mem.L_buf, mem.Ro_buf, mem.Re_buf, bound, cnt)
