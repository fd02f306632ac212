"""Binary rank-distance code sets for ISI channels from linearized polynomials.

A message is a linearized polynomial f(x) = sum_l f_l x^(2^l) over GF(2^T).
Its codeword C_f is the M_t x T binary matrix whose row j is the coordinate
vector of f(point_j). In ISI mode the points are xi^0..xi^(M_t-1) with
xi = alpha^((2^R - 1)(nu + 1)) and f is restricted to the GF(2)-subspace S
that forces the last nu columns of C_f to zero.

Polynomials are packed into one int of R*T bits: coefficient f_l occupies
bits [l*T, (l+1)*T).
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from .binmat import BinaryMatrix, binary_rank, combination, right_kernel
from .errors import EnumerationTooLarge, NotZeroTailed, ParamsOutOfRange, TailNotZero
from .gf import FieldContext, make_field

DEFAULT_ENUMERATION_LIMIT = 1 << 24


class EvalMode(str, enum.Enum):
    ISI = "ISI"
    FLAT = "FLAT"


@dataclass(frozen=True)
class CodeParams:
    M_t: int
    nu: int
    T: int
    R: int
    M_r: int = 1
    eval_mode: EvalMode = EvalMode.ISI

    def __post_init__(self):
        object.__setattr__(self, "eval_mode", EvalMode(self.eval_mode))
        if self.M_t < 1 or self.M_r < 1:
            raise ParamsOutOfRange("antenna counts must be positive")
        if self.nu < 0:
            raise ParamsOutOfRange("nu must be >= 0")
        if not 1 <= self.R <= self.M_t:
            raise ParamsOutOfRange(f"rate R={self.R} outside 1..M_t={self.M_t}")
        if self.T <= self.nu:
            raise ParamsOutOfRange(f"block length T={self.T} must exceed nu={self.nu}")

    @property
    def d(self) -> int:
        """Flat-fading rank guarantee M_t - R + 1."""
        return self.M_t - self.R + 1

    @property
    def T_thr(self) -> int:
        return self.R * self.nu + (self.M_t - 1) * (self.nu + 1) * ((1 << self.R) - 1)

    @property
    def claimed_rank(self) -> int:
        """Rank every nonzero lifted codeword must reach when T >= T_thr."""
        return self.d * (self.nu + 1)

    @property
    def xi_exponent(self) -> int:
        if self.eval_mode is EvalMode.FLAT:
            return 1
        return ((1 << self.R) - 1) * (self.nu + 1)

    @property
    def n_unknowns(self) -> int:
        return self.R * self.T

    def guarantee_applies(self) -> bool:
        return (
            self.eval_mode is EvalMode.ISI
            and self.T >= self.T_thr
            and self.T >= (self.nu + 1) * self.M_t
        )


@dataclass(frozen=True)
class LinearizedPolynomial:
    coeffs: Tuple[int, ...]  # f_0 .. f_{R-1}

    @property
    def R(self) -> int:
        return len(self.coeffs)

    def pack(self, T: int) -> int:
        return sum(c << (l * T) for l, c in enumerate(self.coeffs))

    @classmethod
    def unpack(cls, vec: int, R: int, T: int) -> "LinearizedPolynomial":
        mask = (1 << T) - 1
        return cls(tuple((vec >> (l * T)) & mask for l in range(R)))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def describe(self, ctx: FieldContext) -> str:
        parts = []
        for l, c in enumerate(self.coeffs):
            parts.append(f"f_{l}=" + ("0" if c == 0 else f"alpha^{ctx.log(c)}"))
        return ", ".join(parts)


def eval_linpoly(ctx: FieldContext, f: LinearizedPolynomial, x: int) -> int:
    out = 0
    xp = x
    for c in f.coeffs:
        out ^= ctx.mul(c, xp)
        xp = ctx.mul(xp, xp)
    return out


def evaluation_points(ctx: FieldContext, params: CodeParams) -> List[int]:
    xi = ctx.alpha_pow(params.xi_exponent)
    return [ctx.pow(xi, j) for j in range(params.M_t)]


def check_isi_params(ctx: FieldContext, params: CodeParams) -> None:
    if ctx.degree != params.T:
        raise ParamsOutOfRange(f"field degree {ctx.degree} != block length T={params.T}")
    if params.eval_mode is EvalMode.ISI and params.T < (params.nu + 1) * params.M_t:
        raise ParamsOutOfRange(
            f"ISI construction needs T >= (nu+1)M_t = {(params.nu + 1) * params.M_t}, got T={params.T}"
        )


def build_constraint_system(ctx: FieldContext, params: CodeParams) -> BinaryMatrix:
    """Homogeneous GF(2) system whose right kernel is S.

    One row per (point j, coordinate i) with i in T-nu..T-1: the row holds
    Tr(theta_i alpha^m point_j^(2^l)) at unknown column l*T + m, so that
    row . f = Tr(theta_i f(point_j)). FLAT mode imposes no constraints.
    """
    check_isi_params(ctx, params)
    T, R = params.T, params.R
    if params.eval_mode is EvalMode.FLAT or params.nu == 0:
        return BinaryMatrix((), R * T)
    points = evaluation_points(ctx, params)
    powers = [ctx.pow(ctx.alpha, m) for m in range(T)]
    rows = []
    for p in points:
        frob = []
        y = p
        for _ in range(R):
            frob.append(y)
            y = ctx.mul(y, y)
        for i in range(T - params.nu, T):
            theta = ctx.dual_basis[i]
            row = 0
            for l in range(R):
                for m in range(T):
                    bit = ctx.trace(ctx.mul(theta, ctx.mul(powers[m], frob[l])))
                    row |= bit << (l * T + m)
            rows.append(row)
    return BinaryMatrix(tuple(rows), R * T)


def codeword_matrix(ctx: FieldContext, f: LinearizedPolynomial, params: CodeParams) -> BinaryMatrix:
    """C_f: row j holds the coordinates of f(point_j)."""
    rows = tuple(eval_linpoly(ctx, f, p) for p in evaluation_points(ctx, params))
    m = BinaryMatrix(rows, params.T)
    if params.eval_mode is EvalMode.ISI and not m.tail_is_zero(params.nu):
        raise NotZeroTailed("f is not in S: codeword has a nonzero tail")
    return m


def theta_lift(B: BinaryMatrix, nu: int) -> BinaryMatrix:
    """Stack nu+1 copies of B, block r shifted right by r columns."""
    if not B.tail_is_zero(nu):
        raise TailNotZero(f"last {nu} columns of B must be zero")
    rows = tuple(r << s for s in range(nu + 1) for r in B.rows)
    return BinaryMatrix(rows, B.ncols)


@dataclass
class CodeSet:
    """The set S as a GF(2) subspace, indexed by kernel coordinates.

    Index k selects the XOR of the kernel basis vectors at the set bits of k,
    so index order is the deterministic codeword order used in files.
    """

    ctx: FieldContext
    params: CodeParams
    basis: List[int]
    constraints: BinaryMatrix
    _basis_rows: List[Tuple[int, ...]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._basis_rows = [self._rows_of(v) for v in self.basis]

    def _rows_of(self, vec: int) -> Tuple[int, ...]:
        f = LinearizedPolynomial.unpack(vec, self.params.R, self.params.T)
        return tuple(eval_linpoly(self.ctx, f, p) for p in evaluation_points(self.ctx, self.params))

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return 1 << self.dimension

    def packed(self, index: int) -> int:
        return combination(self.basis, index)

    def poly(self, index: int) -> LinearizedPolynomial:
        return LinearizedPolynomial.unpack(self.packed(index), self.params.R, self.params.T)

    def codeword(self, index: int) -> BinaryMatrix:
        """C_f by linearity: XOR of the basis codewords selected by index."""
        rows = [0] * self.params.M_t
        k = 0
        while index:
            if index & 1:
                rows = [a ^ b for a, b in zip(rows, self._basis_rows[k])]
            index >>= 1
            k += 1
        return BinaryMatrix(tuple(rows), self.params.T)

    def indices(self, limit: int = DEFAULT_ENUMERATION_LIMIT, exhaustive: bool = True,
                samples: int = 4096, seed: int = 0) -> Tuple[Iterator[int], bool]:
        """Index iterator plus a flag saying whether it covers all of S."""
        n = len(self)
        if n <= limit:
            return iter(range(n)), True
        if exhaustive:
            raise EnumerationTooLarge(f"|S| = 2^{self.dimension} exceeds limit {limit}")
        rng = random.Random(seed)
        return (rng.randrange(1, n) for _ in range(samples)), False

    def __iter__(self) -> Iterator[LinearizedPolynomial]:
        it, _ = self.indices()
        return (self.poly(k) for k in it)


def enumerate_S(ctx: FieldContext, params: CodeParams) -> CodeSet:
    """Kernel basis of the constraint system, wrapped for enumeration."""
    system = build_constraint_system(ctx, params)
    basis = right_kernel(system.rows, system.ncols)
    return CodeSet(ctx, params, basis, system)


def construct(params: CodeParams, prim_poly: Optional[int] = None) -> CodeSet:
    return enumerate_S(make_field(params.T, prim_poly), params)


@dataclass
class RankReport:
    min_rank: Optional[int]
    witness_index: Optional[int]
    witness: Optional[LinearizedPolynomial]
    witness_matrix: Optional[BinaryMatrix]
    claimed: Optional[int]
    scanned: int
    skipped_nonzero_tail: int
    exhaustive: bool
    histogram: dict

    @property
    def holds(self) -> bool:
        if self.claimed is None or self.min_rank is None:
            return True
        return self.min_rank >= self.claimed


def verify_rank_distance(code: CodeSet, claimed: Optional[int] = None,
                         limit: int = DEFAULT_ENUMERATION_LIMIT, exhaustive: bool = True,
                         seed: int = 0) -> RankReport:
    """Minimum rank of theta_lift(C_f) over nonzero f in S.

    The code is linear, so this is its rank distance. Codewords with a
    nonzero tail (possible only in FLAT mode) cannot be zero-padded and are
    skipped and counted. The first index reaching the minimum is the witness.
    """
    nu = code.params.nu
    it, complete = code.indices(limit, exhaustive, seed=seed)
    best = None
    witness = None
    scanned = skipped = 0
    hist: dict = {}
    for k in it:
        if k == 0:
            continue
        C = code.codeword(k)
        if not C.tail_is_zero(nu):
            skipped += 1
            continue
        r = binary_rank(theta_lift(C, nu))
        scanned += 1
        hist[r] = hist.get(r, 0) + 1
        if best is None or r < best:
            best, witness = r, k
    return RankReport(
        min_rank=best,
        witness_index=witness,
        witness=None if witness is None else code.poly(witness),
        witness_matrix=None if witness is None else code.codeword(witness),
        claimed=claimed,
        scanned=scanned,
        skipped_nonzero_tail=skipped,
        exhaustive=complete,
        histogram=dict(sorted(hist.items())),
    )


def cardinality_bound(params: CodeParams) -> int:
    """log2 of the guaranteed size of S: R*T - nu*M_t."""
    return params.R * params.T - params.nu * params.M_t
