"""Zero-tailed binary convolutional codes with monomial generators.

Binary polynomials in D are ints with bit k the coefficient of D^k, the
same packing as a :class:`~isicodes.binmat.BinaryMatrix` row, so the
coefficient map Omega is the identity on row ints.

The generator entry in row l, column q (both 1-based) is
g_l^(q)(D) = xi^((q-1) 2^(l-1)) with xi = D^((nu+1)(2^R-1)), a monomial; only
its degree is stored.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple

from .binmat import BinaryMatrix, binary_rank
from .errors import BlockTooShort, EnumerationTooLarge, MessageDegreeTooHigh, ParamsOutOfRange, ParseError
from .rankcodes import theta_lift

MAX_TRELLIS_MESSAGES = 1 << 20


def block_threshold(M_t: int, R: int, nu: int) -> int:
    q = (1 << R) - 1
    return q * nu + q * (nu + 1) * ((M_t - 2) * q + R)


@dataclass(frozen=True)
class TrellisGenerator:
    M_t: int
    R: int
    nu: int
    T: int
    degrees: Tuple[Tuple[int, ...], ...]  # R x M_t

    @property
    def xi_degree(self) -> int:
        return (self.nu + 1) * ((1 << self.R) - 1)

    @property
    def max_degree(self) -> int:
        return max(max(row) for row in self.degrees)

    @property
    def message_length(self) -> int:
        """Coefficients per message polynomial: max degree + 1 (may be 0)."""
        return max(0, self.T - self.nu - self.max_degree)

    @property
    def message_degree_bound(self) -> int:
        return self.T - 1 - self.nu - self.max_degree

    @property
    def n_messages(self) -> int:
        return 1 << (self.R * self.message_length)

    @property
    def claimed_rank(self) -> int:
        return (self.M_t - self.R + 1) * (self.nu + 1)

    def lifted_degrees(self) -> Tuple[Tuple[int, ...], ...]:
        """Degrees of G-tilde: column block r holds D^r times G."""
        return tuple(
            tuple(d + r for r in range(self.nu + 1) for d in row) for row in self.degrees
        )


def build_generator(M_t: int, R: int, nu: int, T: int) -> TrellisGenerator:
    if not 1 <= R <= M_t or nu < 0:
        raise ParamsOutOfRange(f"need 1 <= R <= M_t and nu >= 0, got R={R}, M_t={M_t}, nu={nu}")
    thr = block_threshold(M_t, R, nu)
    if T < thr:
        raise BlockTooShort(f"T={T} below the block threshold {thr}")
    xi = (nu + 1) * ((1 << R) - 1)
    degrees = tuple(tuple(xi * (q - 1) * (1 << (l - 1)) for q in range(1, M_t + 1)) for l in range(1, R + 1))
    return TrellisGenerator(M_t, R, nu, T, degrees)


def _check_message(gen: TrellisGenerator, u: Sequence[int]) -> None:
    if len(u) != gen.R:
        raise ParamsOutOfRange(f"expected {gen.R} message polynomials, got {len(u)}")
    for i, p in enumerate(u):
        if p < 0 or p.bit_length() > gen.message_length:
            raise MessageDegreeTooHigh(
                f"u_{i + 1} has degree {p.bit_length() - 1}, bound is {gen.message_degree_bound}"
            )


def encode_trellis(gen: TrellisGenerator, u: Sequence[int]) -> BinaryMatrix:
    """P = Omega(G^t(D) u(D)); row q is p_q(D) = sum_l g_l^(q) u_l."""
    _check_message(gen, u)
    rows = []
    for q in range(gen.M_t):
        p = 0
        for l in range(gen.R):
            p ^= u[l] << gen.degrees[l][q]
        rows.append(p)
    P = BinaryMatrix(tuple(rows), gen.T)
    if not P.tail_is_zero(gen.nu):
        raise MessageDegreeTooHigh("encoded matrix has a nonzero tail")
    return P


def encode_lifted(gen: TrellisGenerator, u: Sequence[int]) -> BinaryMatrix:
    """Omega(G-tilde^t(D) u(D)), computed from the lifted generator directly."""
    _check_message(gen, u)
    lifted = gen.lifted_degrees()
    rows = []
    for c in range((gen.nu + 1) * gen.M_t):
        p = 0
        for l in range(gen.R):
            p ^= u[l] << lifted[l][c]
        rows.append(p)
    return BinaryMatrix(tuple(rows), gen.T)


def effective_rate(gen: TrellisGenerator) -> Fraction:
    """Bits per transmission after the zero tail."""
    q = (1 << gen.R) - 1
    return Fraction(gen.R * (gen.T - gen.nu - (gen.nu + 1) * (gen.M_t - 1) * q * (1 << (gen.R - 1))), gen.T)


def message_from_index(gen: TrellisGenerator, k: int) -> Tuple[int, ...]:
    n = gen.message_length
    mask = (1 << n) - 1
    return tuple((k >> (l * n)) & mask for l in range(gen.R))


def random_message(gen: TrellisGenerator, rng: random.Random) -> Tuple[int, ...]:
    return tuple(rng.getrandbits(gen.message_length) if gen.message_length else 0 for _ in range(gen.R))


def messages(gen: TrellisGenerator) -> Iterator[Tuple[int, ...]]:
    return (message_from_index(gen, k) for k in range(gen.n_messages))


@dataclass
class TrellisReport:
    min_rank: Optional[int]
    witness: Optional[Tuple[int, ...]]
    claimed: int
    scanned: int
    histogram: dict

    @property
    def holds(self) -> bool:
        return self.min_rank is None or self.min_rank >= self.claimed


def verify_trellis_rank(gen: TrellisGenerator, claimed: Optional[int] = None,
                        limit: int = MAX_TRELLIS_MESSAGES) -> TrellisReport:
    """Minimum rank of Theta(P) over every nonzero message."""
    if gen.n_messages > limit:
        raise EnumerationTooLarge(f"{gen.n_messages} messages exceed the limit {limit}")
    claimed = gen.claimed_rank if claimed is None else claimed
    best = witness = None
    hist: dict = {}
    scanned = 0
    for k in range(1, gen.n_messages):
        u = message_from_index(gen, k)
        r = binary_rank(theta_lift(encode_trellis(gen, u), gen.nu))
        scanned += 1
        hist[r] = hist.get(r, 0) + 1
        if best is None or r < best:
            best, witness = r, u
    return TrellisReport(best, witness, claimed, scanned, dict(sorted(hist.items())))


def format_generator(gen: TrellisGenerator) -> str:
    lines = [f"{gen.M_t} {gen.nu} {gen.R} {gen.T}"]
    lines += [" ".join(str(d) for d in row) for row in gen.degrees]
    return "\n".join(lines) + "\n"


def parse_generator(text: str) -> TrellisGenerator:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    try:
        M_t, nu, R, T = (int(x) for x in rows[0])
        degrees = tuple(tuple(int(x) for x in row) for row in rows[1:])
    except (IndexError, ValueError) as exc:
        raise ParseError(f"malformed generator file: {exc}") from exc
    gen = build_generator(M_t, R, nu, T)
    if degrees != gen.degrees:
        raise ParseError("degree matrix does not match the monomial construction")
    return gen
