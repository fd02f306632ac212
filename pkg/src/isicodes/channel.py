"""Quasi-static Rayleigh MIMO-ISI channel with joint ML decoding.

The channel has nu+1 taps H_0..H_nu, each M_r x M_t with i.i.d. CN(0, 1)
entries, fixed over one block of T channel uses:

    y[n] = sum_l H_l x[n - l] + z[n],   x[n] = 0 for n < 0,

with z[n] i.i.d. CN(0, sigma2) per receive antenna. Equivalently
Y = [H_0 .. H_nu] X where X is the block Toeplitz stack of X1.

SNR is P / sigma2 with P = 1 the total average transmit power per
(non-tail) channel use.

Random streams
--------------
Trials are grouped in batches of ``batch_size``. Batch b at SNR index s
draws from ``Philox(SeedSequence(seed, spawn_key=(s, b)))``: first the
messages, then the channel taps, then the noise. Every batch is a pure
function of (seed, s, b), so results do not depend on the number of
worker threads.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError, EmptyCodebook, InsufficientPoints, ShapeMismatch
from .multilevel import toeplitz_stack

THREADS_ENV = "ISICODES_THREADS"
DEFAULT_BATCH = 4096
DECODE_ELEMENTS = 1 << 21


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def complex_normal(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian with E|z|^2 = var."""
    scale = math.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_channel(M_r: int, M_t: int, nu: int, rng: np.random.Generator) -> np.ndarray:
    """Taps as an array of shape (nu+1, M_r, M_t)."""
    return complex_normal(rng, (nu + 1, M_r, M_t))


def stacked_taps(H: np.ndarray) -> np.ndarray:
    """[H_0 H_1 .. H_nu] of shape (..., M_r, (nu+1) M_t)."""
    return np.concatenate([H[..., l, :, :] for l in range(H.shape[-3])], axis=-1)


def convolve(X1: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Noise-free output by direct convolution over the tap index."""
    n_taps, M_r, M_t = H.shape
    if X1.shape[0] != M_t:
        raise ShapeMismatch(f"X1 has {X1.shape[0]} rows, channel expects M_t={M_t}")
    T = X1.shape[1]
    Y = np.zeros((M_r, T), dtype=complex)
    for l in range(n_taps):
        Y[:, l:] += H[l] @ X1[:, :T - l]
    return Y


def transmit(X1: np.ndarray, H: np.ndarray, sigma2: float,
             rng: Optional[np.random.Generator] = None) -> np.ndarray:
    nu = H.shape[0] - 1
    if nu and np.any(X1[:, X1.shape[1] - nu:]):
        raise ShapeMismatch(f"X1 must end in {nu} zero columns")
    Y = convolve(X1, H)
    if sigma2 > 0:
        if rng is None:
            raise ValueError("noisy transmission needs an rng")
        Y = Y + complex_normal(rng, Y.shape, sigma2)
    return Y


def codebook_images(codebook: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Noise-free outputs of every codeword: (..., N, M_r, T)."""
    nu = H.shape[-3] - 1
    stacks = toeplitz_stack(codebook, nu)  # N, (nu+1)M_t, T
    return np.einsum("...ri,nit->...nrt", stacked_taps(H), stacks)


def ml_decode(Y: np.ndarray, H: np.ndarray, codebook: np.ndarray) -> int:
    """Index minimising ||Y - H X_c||_F^2; ties go to the lowest index."""
    codebook = np.asarray(codebook)
    if codebook.shape[0] == 0:
        raise EmptyCodebook("codebook is empty")
    images = codebook_images(codebook, H)
    dist = np.sum(np.abs(images - Y[None]) ** 2, axis=(1, 2))
    return int(np.argmin(dist))


def normalize_codebook(codebook: np.ndarray, nu: int, power: float = 1.0) -> Tuple[np.ndarray, dict]:
    """Scale so the mean energy per non-tail channel use is ``power``.

    Returns the scaled codebook and the energy per channel use both with
    the tail uses excluded and included.
    """
    T = codebook.shape[-1]
    energy = float(np.mean(np.sum(np.abs(codebook) ** 2, axis=(1, 2))))
    if energy == 0:
        raise EmptyCodebook("codebook has zero energy")
    scale = math.sqrt(power * (T - nu) / energy)
    scaled = codebook * scale
    e = float(np.mean(np.sum(np.abs(scaled) ** 2, axis=(1, 2))))
    return scaled, {"per_use_excluding_tail": e / (T - nu), "per_use_including_tail": e / T}


@dataclass
class SimConfig:
    snr_grid_db: List[float]
    trials_per_snr: int
    seed: int = 0
    min_errors: int = 100
    stop_errors: Optional[int] = None  # stop a point early once this many errors are seen
    batch_size: int = DEFAULT_BATCH
    M_r: int = 1
    power: float = 1.0
    threads: int = field(default_factory=default_threads)

    def validate(self) -> None:
        if self.trials_per_snr <= 0:
            raise ConfigError("trials_per_snr must be positive")
        if not self.snr_grid_db:
            raise ConfigError("snr grid is empty")
        if any(b <= a for a, b in zip(self.snr_grid_db, self.snr_grid_db[1:])):
            raise ConfigError("snr grid must be strictly increasing")
        if self.batch_size <= 0 or self.M_r <= 0 or self.threads <= 0:
            raise ConfigError("batch_size, M_r and threads must be positive")
        if self.power <= 0:
            raise ConfigError("power must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("threads")  # does not affect results
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {k: d[k] for k in cls.__dataclass_fields__ if k in d}
        try:
            return cls(**known)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class SimPoint:
    snr_db: float
    trials: int
    errors: int
    layer_errors: List[int]

    @property
    def pe(self) -> float:
        return self.errors / self.trials if self.trials else 0.0


@dataclass
class SimResult:
    points: List[SimPoint]
    energy: dict
    n_layers: int

    @property
    def snr_db(self) -> List[float]:
        return [p.snr_db for p in self.points]

    @property
    def pe(self) -> List[float]:
        return [p.pe for p in self.points]

    def to_csv(self) -> str:
        lines = ["snr_db,trials,errors,pe,layer,layer_errors"]
        for p in self.points:
            for l, e in enumerate(p.layer_errors, start=1):
                lines.append(f"{p.snr_db:.4f},{p.trials},{p.errors},{p.pe:.6e},{l},{e}")
        return "\n".join(lines) + "\n"


def _batch_rng(seed: int, snr_index: int, batch_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(snr_index, batch_index))
    return np.random.Generator(np.random.Philox(ss))


def _run_batch(codebook: np.ndarray, stacks: np.ndarray, layer_msgs: np.ndarray, nu: int,
               M_r: int, sigma2: float, n: int, rng: np.random.Generator) -> Tuple[int, np.ndarray]:
    N, M_t, T = codebook.shape
    sent = rng.integers(0, N, size=n)
    H = complex_normal(rng, (n, nu + 1, M_r, M_t))
    noise = complex_normal(rng, (n, M_r, T), sigma2)
    Hs = stacked_taps(H)  # n, M_r, (nu+1)M_t
    decoded = np.empty(n, dtype=np.int64)
    # decode in chunks so the (chunk, N, M_r, T) image array stays bounded
    step = max(1, DECODE_ELEMENTS // (N * M_r * T))
    for a in range(0, n, step):
        sl = slice(a, min(n, a + step))
        images = np.einsum("bri,nit->bnrt", Hs[sl], stacks)
        Y = images[np.arange(images.shape[0]), sent[sl]] + noise[sl]
        diff = images - Y[:, None]
        dist = (np.einsum("bnrt,bnrt->bn", diff.real, diff.real)
                + np.einsum("bnrt,bnrt->bn", diff.imag, diff.imag))
        decoded[sl] = np.argmin(dist, axis=1)
    wrong = decoded != sent
    layer_wrong = layer_msgs[decoded] != layer_msgs[sent]
    return int(wrong.sum()), layer_wrong.sum(axis=0)


def run_monte_carlo(codebook: np.ndarray, nu: int, cfg: SimConfig,
                    layer_messages: Optional[np.ndarray] = None,
                    normalize: bool = True) -> SimResult:
    """Block and per-layer error counts at every SNR of the grid.

    ``codebook`` is (N, M_t, T); ``layer_messages`` is (N, L) with the
    per-layer message of each joint codeword (defaults to one layer equal to
    the codeword index). With ``stop_errors`` set, a point stops at the
    first batch boundary where the running block-error count reaches it.
    """
    cfg.validate()
    codebook = np.asarray(codebook, dtype=complex)
    if codebook.shape[0] == 0:
        raise EmptyCodebook("codebook is empty")
    if layer_messages is None:
        layer_messages = np.arange(codebook.shape[0])[:, None]
    if normalize:
        codebook, energy = normalize_codebook(codebook, nu, cfg.power)
    else:
        T = codebook.shape[-1]
        e = float(np.mean(np.sum(np.abs(codebook) ** 2, axis=(1, 2))))
        energy = {"per_use_excluding_tail": e / (T - nu), "per_use_including_tail": e / T}
    stacks = toeplitz_stack(codebook, nu)
    n_layers = layer_messages.shape[1]
    n_batches = -(-cfg.trials_per_snr // cfg.batch_size)
    points = []
    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        for s, snr_db in enumerate(cfg.snr_grid_db):
            sigma2 = cfg.power / 10 ** (snr_db / 10)
            trials = errors = 0
            layer_err = np.zeros(n_layers, dtype=np.int64)

            def job(b, s=s, sigma2=sigma2):
                n = min(cfg.batch_size, cfg.trials_per_snr - b * cfg.batch_size)
                return n, _run_batch(codebook, stacks, layer_messages, nu, cfg.M_r, sigma2, n,
                                     _batch_rng(cfg.seed, s, b))

            b = 0
            done = False
            while b < n_batches and not done:
                wave = range(b, min(n_batches, b + cfg.threads))
                # results are consumed in batch order, so stopping is schedule-invariant
                for n, (e, le) in pool.map(job, wave):
                    trials += n
                    errors += e
                    layer_err += le
                    if cfg.stop_errors is not None and errors >= cfg.stop_errors:
                        done = True
                        break
                b = wave.stop
            points.append(SimPoint(float(snr_db), trials, errors, [int(x) for x in layer_err]))
    return SimResult(points, energy, n_layers)


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    snr_db: List[float]
    pe: List[float]
    window: Tuple[float, float]


def estimate_slope(result: SimResult, window: Tuple[float, float] = (1e-4, 1e-2),
                   min_errors: int = 100) -> SlopeFit:
    """Negated least-squares slope of log10 Pe against log10 SNR.

    Uses only points with Pe inside ``window`` and at least ``min_errors``
    block errors.
    """
    lo, hi = window
    pts = [p for p in result.points if lo <= p.pe <= hi and p.errors >= min_errors]
    if len(pts) < 2:
        raise InsufficientPoints(f"{len(pts)} qualifying points in window {window}; need 2")
    x = np.array([p.snr_db / 10 for p in pts])
    y = np.log10([p.pe for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return SlopeFit(float(-slope), float(intercept), [p.snr_db for p in pts], [p.pe for p in pts], window)


def fit_slope(snr_db: Sequence[float], pe: Sequence[float]) -> float:
    """Slope fit on raw arrays, without windowing."""
    slope, _ = np.polyfit(np.asarray(snr_db) / 10, np.log10(pe), 1)
    return float(-slope)


def summary_json(result: SimResult, fit: Optional[SlopeFit], manifest: dict) -> str:
    doc = {
        "manifest": manifest,
        "energy": result.energy,
        "points": [
            {"snr_db": p.snr_db, "trials": p.trials, "errors": p.errors, "pe": p.pe,
             "layer_errors": p.layer_errors}
            for p in result.points
        ],
        "fit": None if fit is None else {
            "slope": fit.slope, "intercept": fit.intercept, "window": list(fit.window),
            "snr_db": fit.snr_db, "pe": fit.pe,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
