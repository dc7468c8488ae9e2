"""
BPSK/AWGN Monte Carlo harness and a brute-force ML reference decoder.

Frames are generated in fixed-size blocks. Block ``b`` of SNR point ``s``
draws from its own Philox stream keyed by ``(seed, s, b)``, and blocks are
merged in index order with a frame-exact stop rule. Results therefore do
not depend on the number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .code import PolarCode, construct_frozen_set, load_frozen_file, polar_transform
from .decoders import Decoder, DecoderConfig
from .llr import QuantSpec

log = logging.getLogger(__name__)

CSV_HEADER = ("snr_db", "frames", "frame_errors", "bit_errors", "fer", "ber", "avg_iters")

BLOCK_FRAMES = 256


@dataclass(frozen=True)
class CodeSource:
    """Either a Bhattacharyya construction or a frozen-set file."""

    n: int = 10
    k: int = 512
    design_erasure_prob: float = 0.5
    frozen_file: str | None = None

    def build(self) -> PolarCode:
        if self.frozen_file:
            code = load_frozen_file(self.frozen_file)
            if code.n != self.n or code.K != self.k:
                log.info("frozen file %s defines (%d, %d)", self.frozen_file, code.N, code.K)
            return code
        return construct_frozen_set(self.n, self.k, self.design_erasure_prob)


@dataclass(frozen=True)
class SimConfig:
    code: CodeSource = CodeSource()
    decoder: DecoderConfig = DecoderConfig()
    snr_points: tuple = (2.0,)
    min_frame_errors: int = 100
    max_frames: int = 100_000
    seed: int = 1
    workers: int = 1
    zero_codeword: bool = False

    def __post_init__(self):
        if len(self.snr_points) == 0:
            raise ValueError("snr_points must not be empty")
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        object.__setattr__(self, "snr_points", tuple(float(s) for s in self.snr_points))

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FerPoint:
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    fer: float
    ber: float
    avg_iterations: float
    block_length: int = field(default=0, repr=False)

    def row(self) -> tuple:
        return (self.snr_db, self.frames, self.frame_errors, self.bit_errors,
                self.fer, self.ber, self.avg_iterations)


# --------------------------------------------------------------------------
# channel

def noise_sigma(snr_db: float, rate: float) -> float:
    """Noise standard deviation for ``Eb/N0 = snr_db`` with unit-energy BPSK."""
    return float(np.sqrt(1.0 / (2.0 * rate * 10.0 ** (snr_db / 10.0))))


def transmit(code: PolarCode, x, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """BPSK-modulate codeword(s) ``x``, add AWGN and return channel LLRs."""
    x = np.asarray(x)
    sigma = noise_sigma(snr_db, code.rate)
    y = 1.0 - 2.0 * x + sigma * rng.standard_normal(x.shape)
    return 2.0 * y / sigma**2


def block_rng(seed: int, snr_index: int, block_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, snr_index, block_index])))


def random_codewords(code: PolarCode, frames: int, rng: np.random.Generator, zero: bool = False):
    u = np.zeros((frames, code.N), np.uint8)
    if not zero:
        u[:, code.info_indices] = rng.integers(0, 2, (frames, code.K), dtype=np.uint8)
    return u, polar_transform(u)


# --------------------------------------------------------------------------
# Monte Carlo engine

_WORKER_STATE: dict = {}


def _block_decoder(sim: SimConfig) -> tuple[PolarCode, Decoder]:
    key = (sim.code, sim.decoder)
    if _WORKER_STATE.get("key") != key:
        code = sim.code.build()
        _WORKER_STATE.update(key=key, code=code, decoder=Decoder(code, sim.decoder))
    return _WORKER_STATE["code"], _WORKER_STATE["decoder"]


def simulate_block(sim: SimConfig, snr_index: int, block_index: int):
    """Per-frame (frame_error, bit_errors, iterations) of one block."""
    code, dec = _block_decoder(sim)
    rng = block_rng(sim.seed, snr_index, block_index)
    _, x = random_codewords(code, BLOCK_FRAMES, rng, sim.zero_codeword)
    llrs = transmit(code, x, sim.snr_points[snr_index], rng)
    res = dec.decode_batch(llrs)
    bit_err = np.count_nonzero(res.x_hat != x, axis=1)
    return bit_err > 0, bit_err, res.iterations_used


def _blocks(sim: SimConfig, snr_index: int, pool):
    """Yield block results in index order, keeping ``workers`` blocks in flight."""
    b = 0
    if pool is None:
        while True:
            yield simulate_block(sim, snr_index, b)
            b += 1
    pending = []
    while True:
        while len(pending) < 2 * sim.workers:
            pending.append(pool.submit(simulate_block, sim, snr_index, b))
            b += 1
        yield pending.pop(0).result()


def _run_point(sim: SimConfig, snr_index: int, N: int, pool) -> FerPoint:
    frames = errors = bits = iters = 0
    for err, bit_err, it in _blocks(sim, snr_index, pool):
        take = min(len(err), sim.max_frames - frames)
        cum = errors + np.cumsum(err[:take])
        hit = np.flatnonzero(cum >= sim.min_frame_errors)
        if hit.size:
            take = int(hit[0]) + 1
        frames += take
        errors += int(err[:take].sum())
        bits += int(bit_err[:take].sum())
        iters += int(it[:take].sum())
        if errors >= sim.min_frame_errors or frames >= sim.max_frames:
            break
    snr = sim.snr_points[snr_index]
    log.info("snr %.3f dB: %d frames, %d errors", snr, frames, errors)
    return FerPoint(snr, frames, errors, bits, errors / frames, bits / (frames * N), iters / frames, N)


def run_fer(sim: SimConfig) -> list[FerPoint]:
    code, _ = _block_decoder(sim)
    if sim.workers == 1:
        return [_run_point(sim, s, code.N, None) for s in range(len(sim.snr_points))]
    with ProcessPoolExecutor(sim.workers) as pool:
        return [_run_point(sim, s, code.N, pool) for s in range(len(sim.snr_points))]


# --------------------------------------------------------------------------
# output

def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def results_csv(points: list[FerPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow([_fmt(v) for v in p.row()])
    return buf.getvalue()


def results_json(points: list[FerPoint], sim: SimConfig) -> str:
    doc = {
        "config": sim.to_dict(),
        "points": [dict(zip(CSV_HEADER, p.row())) for p in points],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# --------------------------------------------------------------------------
# maximum-likelihood reference

MAX_ML_K = 16


class MLDecoder:
    """Exhaustive correlation decoder over all ``2**K`` codewords."""

    def __init__(self, code: PolarCode):
        if code.K > MAX_ML_K:
            raise ValueError(f"ML enumeration limited to K <= {MAX_ML_K}, got {code.K}")
        self.code = code
        m = np.arange(1 << code.K)
        u = np.zeros((m.size, code.N), np.uint8)
        # first information index is the most significant bit: integer order
        # of m equals lexicographic order of u
        for pos, j in enumerate(code.info_indices):
            u[:, j] = (m >> (code.K - 1 - pos)) & 1
        self.codebook = polar_transform(u)
        self._signs = 1.0 - 2.0 * self.codebook

    def decode(self, llrs) -> np.ndarray:
        llrs = np.asarray(llrs, dtype=np.float64)
        best = np.argmax(llrs @ self._signs.T, axis=-1)
        return self.codebook[best]


def ml_oracle_decode(code: PolarCode, channel_llrs) -> np.ndarray:
    return MLDecoder(code).decode(channel_llrs)


__all__ = [
    "CodeSource", "SimConfig", "FerPoint", "MLDecoder", "QuantSpec",
    "transmit", "run_fer", "ml_oracle_decode", "results_csv", "results_json",
]
