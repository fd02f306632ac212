"""Binary-partition mappers for 2^L-PSK and 2^L-QAM.

A label is an L-bit string b_0..b_{L-1}; b_0 is the coarsest partition
level. Labels are also handled as ints with bit l equal to b_l.

PSK: s = prod_l (xi^(2^l))^(b_l) with xi = exp(2 pi i / 2^L).

QAM (even L): s - c(L) is the residue of sum_l b_l (1-i)^l modulo
(1-i)^L = (-2i)^(L/2), i.e. modulo 2^(L/2) in each coordinate, taken in the
centred box [-m, m-1]^2 with m = 2^(L/2-1) and c(L) = (1+i)/2. The point is
then rotated into the translated D_2 realization by p = (1+i) conj(s), which
puts every point on integer coordinates (a, b) with a + b odd.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from .errors import LabelLengthMismatch, UnsupportedL

MAX_PSK_L = 8
MAX_QAM_L = 16


class Kind(str, enum.Enum):
    PSK = "psk"
    QAM = "qam"


def bits_to_label(bits: Sequence[int]) -> int:
    return sum((int(b) & 1) << l for l, b in enumerate(bits))


def label_to_bits(label: int, L: int) -> tuple:
    return tuple((label >> l) & 1 for l in range(L))


def psk_point(bits: Sequence[int]) -> complex:
    L = len(bits)
    xi = cmath.exp(2j * cmath.pi / (1 << L))
    s = 1 + 0j
    for l, b in enumerate(bits):
        if b:
            s *= xi ** (1 << l)
    return s


def _centred(x: int, modulus: int) -> int:
    half = modulus // 2
    return (x + half) % modulus - half


def qam_residue(bits: Sequence[int]) -> complex:
    """Centred residue of sum_l b_l (1-i)^l modulo (1-i)^L as a Gaussian integer."""
    L = len(bits)
    re, im = 0, 0
    pr, pi = 1, 0  # running power of (1 - i)
    for b in bits:
        if b:
            re += pr
            im += pi
        pr, pi = pr + pi, pi - pr
    modulus = 1 << (L // 2)
    return complex(_centred(re, modulus), _centred(im, modulus))


def qam_point(bits: Sequence[int]) -> complex:
    if len(bits) % 2:
        raise UnsupportedL(f"QAM needs an even number of levels, got L={len(bits)}")
    s = qam_residue(bits) + complex(0.5, 0.5)
    return (1 + 1j) * s.conjugate()


@dataclass(frozen=True)
class MapperConfig:
    """Constellation choice plus the derived lookup table.

    ``table[label]`` is the transmitted value: the raw point minus the point
    of the all-zero label, scaled by ``normalization`` so the average energy
    over all 2^L labels is one. With ``translate=False`` the raw points are
    only scaled; this suits codes without a zero tail (nu = 0).
    """

    kind: Kind
    L: int
    translate: bool = True
    normalization: float = field(init=False)
    table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.L < 1:
            raise UnsupportedL("L must be positive")
        if self.kind is Kind.PSK and self.L > MAX_PSK_L:
            raise UnsupportedL(f"PSK supports 1 <= L <= {MAX_PSK_L}, got {self.L}")
        if self.kind is Kind.QAM and (self.L % 2 or self.L > MAX_QAM_L):
            raise UnsupportedL(f"QAM supports even L <= {MAX_QAM_L}, got {self.L}")
        raw = np.array([map_bits(self, label_to_bits(k, self.L)) for k in range(1 << self.L)])
        shifted = raw - raw[0] if self.translate else raw
        scale = 1.0 / np.sqrt(np.mean(np.abs(shifted) ** 2))
        object.__setattr__(self, "normalization", float(scale))
        object.__setattr__(self, "table", shifted * scale)

    @property
    def size(self) -> int:
        return 1 << self.L

    def __str__(self) -> str:
        return f"{self.kind.value}:{self.L}"


def parse_constellation(text: str, translate: bool = True) -> MapperConfig:
    """Parse ``psk:L`` or ``qam:L``."""
    try:
        kind, level = text.strip().lower().split(":")
        return MapperConfig(Kind(kind), int(level), translate)
    except ValueError as exc:
        raise ValueError(f"bad constellation {text!r}; expected psk:L or qam:L") from exc


def map_bits(cfg: MapperConfig, bits: Sequence[int]) -> complex:
    """Raw constellation point of one label (no translation, no scaling)."""
    if len(bits) != cfg.L:
        raise LabelLengthMismatch(f"label has {len(bits)} bits, constellation needs L={cfg.L}")
    if cfg.kind is Kind.PSK:
        return psk_point(bits)
    return qam_point(bits)


def map_matrix(cfg: MapperConfig, labels) -> np.ndarray:
    """Map a matrix of labels to transmitted values.

    ``labels`` is either an int array of labels or an array whose last axis
    holds the L bits. The constellation has unit average energy and, when
    ``cfg.translate`` is set, the all-zero label maps to 0.
    """
    arr = np.asarray(labels)
    if arr.ndim == 3:
        if arr.shape[-1] != cfg.L:
            raise LabelLengthMismatch(f"labels carry {arr.shape[-1]} bits, constellation needs L={cfg.L}")
        arr = (arr.astype(np.int64) << np.arange(cfg.L)).sum(axis=-1)
    arr = arr.astype(np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= cfg.size):
        raise LabelLengthMismatch(f"label outside 0..{cfg.size - 1}")
    return cfg.table[arr]


# The QPSK labels drawn with the QAM partition figure: 1, -1, i, -i carry
# b_0 b_1 = 00, 01, 11, 10. The product formula gives a level-wise
# relabelling of the same point set; both tables are exposed.
QPSK_FIGURE_LABELS: Dict[tuple, complex] = {
    (0, 0): 1 + 0j,
    (0, 1): -1 + 0j,
    (1, 1): 1j,
    (1, 0): -1j,
}


def qpsk_product_labels() -> Dict[tuple, complex]:
    return {bits: complex(np.round(psk_point(bits), 12)) for bits in QPSK_FIGURE_LABELS}
