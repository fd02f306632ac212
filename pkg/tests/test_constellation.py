import cmath
import itertools

import numpy as np
import pytest

from isicodes.constellation import (QPSK_FIGURE_LABELS, Kind, MapperConfig, bits_to_label, label_to_bits, map_bits,
                                    map_matrix, parse_constellation, qpsk_product_labels)
from isicodes.errors import LabelLengthMismatch, UnsupportedL


def close(a, b):
    return abs(a - b) < 1e-12


def all_bits(L):
    return list(itertools.product((0, 1), repeat=L))


def test_psk_zero_label():
    assert map_bits(MapperConfig("psk", 2), (0, 0)) == 1


def test_qpsk_product_table():
    cfg = MapperConfig("psk", 2)
    for bits, want in {(0, 1): -1, (1, 0): 1j, (1, 1): -1j}.items():
        assert close(map_bits(cfg, bits), want)
    assert qpsk_product_labels() == {(0, 0): 1, (0, 1): -1, (1, 1): -1j, (1, 0): 1j}


def test_qpsk_point_sets():
    want = {1, -1, 1j, -1j}
    for kind in ("psk", "qam"):
        cfg = MapperConfig(kind, 2)
        pts = {complex(np.round(map_bits(cfg, b), 12)) for b in all_bits(2)}
        assert pts == want


def test_four_qam_matches_figure_labels():
    cfg = MapperConfig("qam", 2)
    for bits, want in QPSK_FIGURE_LABELS.items():
        assert close(map_bits(cfg, bits), want)


@pytest.mark.parametrize("kind,L", [("psk", 1), ("psk", 2), ("psk", 3), ("qam", 2), ("qam", 4), ("qam", 6)])
def test_bijective(kind, L):
    cfg = MapperConfig(kind, L)
    pts = [map_bits(cfg, b) for b in all_bits(L)]
    assert len({(round(p.real, 9), round(p.imag, 9)) for p in pts}) == 1 << L
    assert len({(round(p.real, 9), round(p.imag, 9)) for p in cfg.table}) == 1 << L


@pytest.mark.parametrize("L", [1, 2, 3, 5])
def test_psk_unit_modulus(L):
    cfg = MapperConfig("psk", L)
    for b in all_bits(L):
        p = map_bits(cfg, b)
        assert close(abs(p), 1)
        # p is a 2^L-th root of unity with exponent sum_l b_l 2^l
        assert close(p, cmath.exp(2j * cmath.pi * bits_to_label(b) / (1 << L)))


def _gauss_divides(z, w):
    """True when the Gaussian integer z is a multiple of w."""
    q = z / w
    return close(q.real, round(q.real)) and close(q.imag, round(q.imag))


@pytest.mark.parametrize("L", [2, 4])
def test_qam_residue_classes(L):
    cfg = MapperConfig("qam", L)
    half = (L // 2)
    m = 1 << (half - 1)
    region = {(1 + 1j) * complex(x + 0.5, -(y + 0.5)) for x in range(-m, m) for y in range(-m, m)}
    image = set()
    for b in all_bits(L):
        p = map_bits(cfg, b)
        a, c = round(p.real), round(p.imag)
        assert close(p, complex(a, c)) and (a + c) % 2 == 1  # translated D_2
        s = (p / (1 + 1j)).conjugate()
        target = sum(bit * (1 - 1j) ** l for l, bit in enumerate(b))
        assert _gauss_divides(s - (0.5 + 0.5j) - target, (1 - 1j) ** L)
        image.add(complex(a, c))
    assert image == {complex(round(z.real), round(z.imag)) for z in region}


def test_normalization_and_translation():
    for kind, L in [("psk", 1), ("psk", 3), ("qam", 2), ("qam", 4)]:
        cfg = MapperConfig(kind, L)
        assert close(float(np.mean(np.abs(cfg.table) ** 2)), 1)
        assert cfg.table[0] == 0
        raw = MapperConfig(kind, L, translate=False)
        assert close(float(np.mean(np.abs(raw.table) ** 2)), 1)


def test_map_matrix_entries():
    cfg = MapperConfig("psk", 2, translate=False)
    assert close(map_matrix(cfg, [[(1, 0)]])[0, 0], 1j)
    assert close(map_matrix(cfg, [[bits_to_label((1, 0))]])[0, 0], 1j)
    translated = MapperConfig("psk", 2)
    assert np.all(map_matrix(translated, np.zeros((2, 5), dtype=int)) == 0)


def test_map_matrix_bpsk_codeword(t5_code):
    raw = MapperConfig("psk", 1, translate=False)
    cfg = MapperConfig("psk", 1)
    for k in range(8):
        labels = t5_code.codeword(k).to_array()
        X = map_matrix(raw, labels)
        assert np.allclose(X, np.where(labels == 1, -1, 1))
        Xt = map_matrix(cfg, labels)
        assert np.allclose(Xt, np.where(labels == 1, -np.sqrt(2), 0))
        assert np.all(Xt[:, -1] == 0)


def test_errors():
    with pytest.raises(UnsupportedL):
        MapperConfig("qam", 3)
    with pytest.raises(UnsupportedL):
        MapperConfig("psk", 9)
    with pytest.raises(UnsupportedL):
        MapperConfig("psk", 0)
    cfg = MapperConfig("psk", 2)
    with pytest.raises(LabelLengthMismatch):
        map_bits(cfg, (1,))
    with pytest.raises(LabelLengthMismatch):
        map_matrix(cfg, [[4]])
    with pytest.raises(LabelLengthMismatch):
        map_matrix(cfg, [[(1, 0, 1)]])


def test_parse():
    cfg = parse_constellation("QAM:4")
    assert cfg.kind is Kind.QAM and cfg.L == 4 and str(cfg) == "qam:4"
    with pytest.raises(ValueError):
        parse_constellation("ask:2")
    assert label_to_bits(6, 3) == (0, 1, 1)
