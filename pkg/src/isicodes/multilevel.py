"""Diversity-embedded multi-level space-time codes.

Layer l (1-based) draws a binary M_t x T matrix from its code set and
supplies bit b_{l-1} of every constellation label. The label matrix is
mapped entrywise; zero-tailed layers give a zero transmitted tail.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .binmat import BinaryMatrix
from .constellation import MapperConfig, map_matrix
from .errors import CodebookTooLarge, IncompatibleLayerParams, IndexOutOfRange
from .rankcodes import CodeSet, RankReport, verify_rank_distance

DEFAULT_CODEBOOK_LIMIT = 1 << 16


@dataclass
class LayerSpec:
    code: CodeSet
    index: int = 1

    @property
    def d(self) -> int:
        """Diversity target: flat rank guarantee of the layer's set."""
        return self.code.params.d

    @property
    def size(self) -> int:
        return len(self.code)

    @property
    def rate(self) -> Fraction:
        """Bits per channel use: log2|set| / T."""
        return Fraction(self.code.dimension, self.code.params.T)


def make_layers(codes: Sequence[CodeSet]) -> List[LayerSpec]:
    return [LayerSpec(c, i + 1) for i, c in enumerate(codes)]


def check_layers(layers: Sequence[LayerSpec], mapper: Optional[MapperConfig] = None) -> None:
    if not layers:
        raise IncompatibleLayerParams("need at least one layer")
    shape = {(l.code.params.M_t, l.code.params.nu, l.code.params.T) for l in layers}
    if len(shape) != 1:
        raise IncompatibleLayerParams(f"layers disagree on (M_t, nu, T): {sorted(shape)}")
    ds = [l.d for l in layers]
    if any(a < b for a, b in zip(ds, ds[1:])):
        raise IncompatibleLayerParams(f"diversity targets must be non-increasing, got {ds}")
    if mapper is not None and mapper.L != len(layers):
        raise IncompatibleLayerParams(f"{len(layers)} layers need L={len(layers)}, constellation has L={mapper.L}")


def T_thr(layers: Sequence[LayerSpec]) -> int:
    """Block-length threshold for the whole code: the largest per-layer value."""
    return max(l.code.params.T_thr for l in layers)


@dataclass
class SpaceTimeCodeword:
    X1: np.ndarray  # complex M_t x T, zero tail
    messages: Tuple[int, ...]
    labels: np.ndarray  # int M_t x T

    def toeplitz(self, nu: int) -> np.ndarray:
        return toeplitz_stack(self.X1, nu)


def toeplitz_stack(X1: np.ndarray, nu: int) -> np.ndarray:
    """(nu+1)M_t x T block Toeplitz matrix; block r is X1 delayed by r."""
    M_t, T = X1.shape[-2:]
    out = np.zeros(X1.shape[:-2] + ((nu + 1) * M_t, T), dtype=complex)
    for r in range(nu + 1):
        out[..., r * M_t:(r + 1) * M_t, r:] = X1[..., :, :T - r]
    return out


def label_matrix(layers: Sequence[LayerSpec], matrices: Sequence[BinaryMatrix]) -> np.ndarray:
    M_t, T = matrices[0].shape
    labels = np.zeros((M_t, T), dtype=np.int64)
    for l, B in enumerate(matrices):
        labels |= B.to_array().astype(np.int64) << l
    return labels


def encode(layers: Sequence[LayerSpec], messages: Sequence[int], mapper: MapperConfig) -> SpaceTimeCodeword:
    check_layers(layers, mapper)
    if len(messages) != len(layers):
        raise IncompatibleLayerParams(f"{len(messages)} messages for {len(layers)} layers")
    mats = []
    for layer, m in zip(layers, messages):
        if not 0 <= m < layer.size:
            raise IndexOutOfRange(f"layer {layer.index}: message {m} outside 0..{layer.size - 1}")
        mats.append(layer.code.codeword(m))
    labels = label_matrix(layers, mats)
    return SpaceTimeCodeword(map_matrix(mapper, labels), tuple(messages), labels)


def joint_index(layers: Sequence[LayerSpec], messages: Sequence[int]) -> int:
    """Lexicographic index, layer 1 most significant."""
    k = 0
    for layer, m in zip(layers, messages):
        k = k * layer.size + m
    return k


def split_index(layers: Sequence[LayerSpec], k: int) -> Tuple[int, ...]:
    out = []
    for layer in reversed(layers):
        k, m = divmod(k, layer.size)
        out.append(m)
    return tuple(reversed(out))


def codebook_size(layers: Sequence[LayerSpec]) -> int:
    n = 1
    for layer in layers:
        n *= layer.size
    return n


def full_codebook(layers: Sequence[LayerSpec], mapper: MapperConfig,
                  limit: int = DEFAULT_CODEBOOK_LIMIT) -> List[SpaceTimeCodeword]:
    check_layers(layers, mapper)
    n = codebook_size(layers)
    if n > limit:
        raise CodebookTooLarge(f"joint codebook has {n} entries, limit {limit}")
    return [encode(layers, split_index(layers, k), mapper) for k in range(n)]


def codebook_array(codebook: Sequence[SpaceTimeCodeword]) -> np.ndarray:
    """Stack X1 matrices into an (N, M_t, T) array."""
    return np.stack([c.X1 for c in codebook])


def message_table(codebook: Sequence[SpaceTimeCodeword]) -> np.ndarray:
    return np.array([c.messages for c in codebook], dtype=np.int64)


@dataclass
class EmbeddedRankReport:
    layer_reports: List[RankReport]
    claimed: List[int]

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.layer_reports)


def embedded_rank_report(layers: Sequence[LayerSpec], **kwargs) -> EmbeddedRankReport:
    """Binary rank premise of the embedded guarantee, layer by layer.

    Two joint messages whose first differing layer is l have lifted label
    difference whose layer-l bit plane is Theta of a nonzero codeword of
    set l, so the minimum over such pairs is that set's rank distance.
    """
    check_layers(layers)
    claims = [l.d * (l.code.params.nu + 1) for l in layers]
    reports = [verify_rank_distance(l.code, c, **kwargs) for l, c in zip(layers, claims)]
    return EmbeddedRankReport(reports, claims)


def rate_lower_bound(M_t: int, d: int, nu: int, T: int) -> Fraction:
    """(M_t - d + 1) - (nu / T) M_t bits per channel use per layer."""
    return Fraction(M_t - d + 1) - Fraction(nu * M_t, T)


def total_rate(layers: Sequence[LayerSpec]) -> Fraction:
    return sum((l.rate for l in layers), Fraction(0))
