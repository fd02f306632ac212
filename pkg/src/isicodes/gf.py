"""Arithmetic in GF(2^T) for 1 <= T <= 32.

Elements are plain Python ints holding the coordinates in the polynomial
basis 1, alpha, ..., alpha^(T-1) (bit k is the coefficient of alpha^k), where
alpha is a root of the defining primitive polynomial. Addition is XOR.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, List, Sequence, Tuple

from .errors import DegreeMismatch, PolynomialNotPrimitive, SingularGramMatrix

MAX_DEGREE = 32

# bit k = coefficient of x^k
DEFAULT_PRIMITIVE_POLYNOMIALS = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x37,  # x^5+x^4+x^2+x+1
    6: 0x43,
    7: 0x83,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
    17: 0x20009,
    18: 0x40081,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x1000087,
    25: 0x2000009,
    26: 0x4000047,
    27: 0x8000027,
    28: 0x10000009,
    29: 0x20000005,
    30: 0x40800007,
    31: 0x80000009,
    32: 0x100400007,
}

# distinct prime factors of 2^T - 1
MERSENNE_PRIME_FACTORS = {
    1: (),
    2: (3,),
    3: (7,),
    4: (3, 5),
    5: (31,),
    6: (3, 7),
    7: (127,),
    8: (3, 5, 17),
    9: (7, 73),
    10: (3, 11, 31),
    11: (23, 89),
    12: (3, 5, 7, 13),
    13: (8191,),
    14: (3, 43, 127),
    15: (7, 31, 151),
    16: (3, 5, 17, 257),
    17: (131071,),
    18: (3, 7, 19, 73),
    19: (524287,),
    20: (3, 5, 11, 31, 41),
    21: (7, 127, 337),
    22: (3, 23, 89, 683),
    23: (47, 178481),
    24: (3, 5, 7, 13, 17, 241),
    25: (31, 601, 1801),
    26: (3, 2731, 8191),
    27: (7, 73, 262657),
    28: (3, 5, 29, 43, 113, 127),
    29: (233, 1103, 2089),
    30: (3, 7, 11, 31, 151, 331),
    31: (2147483647,),
    32: (3, 5, 17, 257, 65537),
}


def parity(x: int) -> int:
    return bin(x).count("1") & 1


def poly_degree(p: int) -> int:
    """Degree of a GF(2)[x] polynomial given as a bitmask; -1 for zero."""
    return p.bit_length() - 1


def format_poly(p: int, var: str = "x") -> str:
    """Render a bitmask polynomial, e.g. 0x37 -> 'x^5+x^4+x^2+x+1'."""
    if p == 0:
        return "0"
    terms = []
    for k in range(p.bit_length() - 1, -1, -1):
        if (p >> k) & 1:
            terms.append("1" if k == 0 else var if k == 1 else f"{var}^{k}")
    return "+".join(terms)


def _solve_gf2(matrix: Sequence[int], n: int) -> List[int]:
    """Invert an n x n GF(2) matrix given as row bitmasks (bit j = column j).

    Returns the rows of the inverse; raises SingularGramMatrix if singular.
    """
    work = [(row, 1 << i) for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if (work[r][0] >> col) & 1), None)
        if pivot is None:
            raise SingularGramMatrix(f"column {col} has no pivot")
        work[col], work[pivot] = work[pivot], work[col]
        prow, pinv = work[col]
        for r in range(n):
            if r != col and (work[r][0] >> col) & 1:
                work[r] = (work[r][0] ^ prow, work[r][1] ^ pinv)
    return [inv for _, inv in work]


@dataclass(frozen=True)
class FieldContext:
    """GF(2^T) defined by a primitive polynomial.

    Use :func:`make_field` to build one; it checks primitivity and fills in
    the trace-dual basis.
    """

    degree: int
    primitive_polynomial: int
    dual_basis: Tuple[int, ...] = field(default=(), repr=False)
    trace_mask: int = field(default=0, repr=False)

    @property
    def order(self) -> int:
        return 1 << self.degree

    @property
    def alpha(self) -> int:
        # for T = 1 the root of x+1 is 1 itself
        return 1 if self.degree == 1 else 2

    @property
    def mask(self) -> int:
        return self.order - 1

    def contains(self, x: int) -> bool:
        return 0 <= x < self.order

    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        """Shift-and-add multiplication with interleaved reduction."""
        T = self.degree
        poly = self.primitive_polynomial
        top = 1 << T
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & top:
                a ^= poly
        return r

    def square(self, a: int) -> int:
        return self.mul(a, a)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def alpha_pow(self, k: int) -> int:
        return self.pow(self.alpha, k % (self.order - 1))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^T)")
        return self.pow(a, self.order - 2)

    def frobenius(self, a: int, k: int) -> int:
        """a^(2^k)."""
        for _ in range(k):
            a = self.mul(a, a)
        return a

    def trace(self, x: int) -> int:
        """Absolute trace to GF(2); linear, so a parity against a fixed mask."""
        return parity(x & self.trace_mask)

    def log(self, x: int) -> int:
        """Discrete log base alpha by exhaustive search (small fields only)."""
        if x == 0:
            raise ValueError("log of 0")
        y = 1
        for k in range(self.order - 1):
            if y == x:
                return k
            y = self.mul(y, self.alpha)
        raise ValueError(f"{x} is not a power of alpha")

    def from_bits(self, bits: Sequence[int]) -> int:
        return sum((int(b) & 1) << k for k, b in enumerate(bits))


def _trace_slow(degree: int, poly: int, x: int) -> int:
    ctx = FieldContext(degree, poly)
    acc = 0
    y = x
    for _ in range(degree):
        acc ^= y
        y = ctx.mul(y, y)
    if acc not in (0, 1):
        raise PolynomialNotPrimitive("trace left GF(2); polynomial is not irreducible")
    return acc


def multiplicative_order(ctx: FieldContext, a: int) -> int:
    """Order of a nonzero element via the factor table of 2^T - 1."""
    n = ctx.order - 1
    order = n
    for p in MERSENNE_PRIME_FACTORS[ctx.degree]:
        while order % p == 0 and ctx.pow(a, order // p) == 1:
            order //= p
    return order


def make_field(T: int, prim_poly: int | None = None) -> FieldContext:
    """Build GF(2^T) from a primitive polynomial (bitmask, bit k = x^k).

    Parameters
    ----------
    T : int
        Extension degree, 1 <= T <= 32.
    prim_poly : int, optional
        Defining polynomial; defaults to :data:`DEFAULT_PRIMITIVE_POLYNOMIALS`.

    Raises
    ------
    DegreeMismatch
        If the polynomial's degree is not T or T is out of range.
    PolynomialNotPrimitive
        If the root of the polynomial does not have order 2^T - 1.
    """
    if not 1 <= T <= MAX_DEGREE:
        raise DegreeMismatch(f"T={T} outside 1..{MAX_DEGREE}")
    if prim_poly is None:
        prim_poly = DEFAULT_PRIMITIVE_POLYNOMIALS[T]
    if poly_degree(prim_poly) != T:
        raise DegreeMismatch(
            f"polynomial {format_poly(prim_poly)} has degree {poly_degree(prim_poly)}, expected {T}"
        )
    if not prim_poly & 1:
        raise PolynomialNotPrimitive(f"{format_poly(prim_poly)} is divisible by x")
    bare = FieldContext(T, prim_poly)
    if bare.pow(bare.alpha, bare.order - 1) != 1 or multiplicative_order(bare, bare.alpha) != bare.order - 1:
        order = _brute_order(bare)
        raise PolynomialNotPrimitive(
            f"{format_poly(prim_poly)} is not primitive: order of its root is {order}, not {bare.order - 1}"
        )
    tmask = 0
    for m in range(T):
        tmask |= _trace_slow(T, prim_poly, bare.pow(bare.alpha, m)) << m
    with_trace = FieldContext(T, prim_poly, (), tmask)
    return FieldContext(T, prim_poly, tuple(dual_basis(with_trace)), tmask)


def _brute_order(ctx: FieldContext) -> int | str:
    y = ctx.alpha
    for k in range(1, ctx.order):
        if y == 1:
            return k
        y = ctx.mul(y, ctx.alpha)
    return "undefined (x is not invertible)"


def trace(ctx: FieldContext, x: int) -> int:
    return ctx.trace(x)


def dual_basis(ctx: FieldContext) -> List[int]:
    """Trace-dual basis theta_0..theta_{T-1} of the basis alpha^0..alpha^{T-1}.

    Solves Gram @ coeffs = I where Gram[i][j] = Tr(alpha^i alpha^j), so that
    Tr(theta_i alpha^j) = delta_ij.
    """
    T = ctx.degree
    powers = [ctx.pow(ctx.alpha, k) for k in range(T)]
    gram = []
    for i in range(T):
        row = 0
        for j in range(T):
            row |= ctx.trace(ctx.mul(powers[i], powers[j])) << j
        gram.append(row)
    inverse = _solve_gf2(gram, T)
    # theta_i = sum_k inverse[i][k] alpha^k; Gram is symmetric so row i works
    return [
        reduce(lambda acc, k: acc ^ powers[k], (k for k in range(T) if (inverse[i] >> k) & 1), 0)
        for i in range(T)
    ]


def expand(ctx: FieldContext, x: int) -> List[int]:
    """Coordinates of x in the basis alpha^0..alpha^{T-1}: beta_i = Tr(theta_i x)."""
    return [ctx.trace(ctx.mul(theta, x)) for theta in ctx.dual_basis]


def combine(ctx: FieldContext, coeffs: Iterable[int]) -> int:
    """Inverse of :func:`expand`: sum_i coeffs[i] alpha^i."""
    out = 0
    for i, c in enumerate(coeffs):
        if c & 1:
            out ^= ctx.pow(ctx.alpha, i)
    return out
