"""Null-space machinery behind the general rank guarantee.

Gamma is the set of field elements sum_{t<=nu} delta_t alpha^t. Because
nu < T, such an element is simply an int below 2^(nu+1), and its delta
coefficients are its bits. A Gamma-vector is a tuple of M_t such ints.

G_f collects the Gamma-vectors g with g . c_f = 0; it is the image of the
left null space of U_f under :func:`psi`. :func:`find_minimal_basis` builds a
small generating set of G_f by the degree-reduction steps ("tilde" and
"hat") of the existence argument and :func:`check_minimal_basis` re-checks
properties (i)-(iv) by brute force.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from . import gfmatrix
from .binmat import binary_rank
from .errors import NotRepresentable, ParamsOutOfRange, ShapeMismatch, SpaceTooLarge, ThresholdNotMet
from .gf import FieldContext
from .rankcodes import CodeParams

GammaVector = Tuple[int, ...]

NEG_INF = -math.inf  # degree of the zero element
MAX_SCAN_BITS = 24


def deg(x: int) -> float:
    """Degree of a Gamma element; ``NEG_INF`` for zero."""
    return x.bit_length() - 1 if x else NEG_INF


def deg_vec(g: Sequence[int]) -> float:
    return max((deg(x) for x in g), default=NEG_INF)


def phi(g: Sequence[int]) -> int:
    """Bitmask of the alpha^0 coefficients: bit k is delta_{k,0}."""
    return sum((x & 1) << k for k, x in enumerate(g))


def in_gamma(x: int, nu: int) -> bool:
    return x >> (nu + 1) == 0


def in_gamma_vec(g: Sequence[int], nu: int) -> bool:
    return all(in_gamma(x, nu) for x in g)


def gamma_elements(nu: int) -> range:
    return range(1 << (nu + 1))


def scale(ctx: FieldContext, gamma: int, g: Sequence[int]) -> GammaVector:
    return tuple(ctx.mul(gamma, x) for x in g)


def vec_add(a: Sequence[int], b: Sequence[int]) -> GammaVector:
    return tuple(x ^ y for x, y in zip(a, b))


def strip_alpha(g: Sequence[int]) -> Tuple[GammaVector, int]:
    """Remove the largest common alpha^t factor; returns (g / alpha^t, t)."""
    nz = [x for x in g if x]
    if not nz:
        return tuple(g), 0
    t = min((x & -x).bit_length() - 1 for x in nz)
    return tuple(x >> t for x in g), t


def psi(b: int, params: CodeParams) -> GammaVector:
    """Map a binary vector of length (nu+1)M_t to a Gamma-vector.

    Bit i*M_t + k of ``b`` (the weight of row i*M_t + k of U_f) becomes the
    alpha^i coefficient of entry k.
    """
    M_t = params.M_t
    return tuple(
        sum(((b >> (i * M_t + k)) & 1) << i for i in range(params.nu + 1)) for k in range(M_t)
    )


def psi_inverse(g: Sequence[int], params: CodeParams) -> int:
    M_t = params.M_t
    b = 0
    for k, x in enumerate(g):
        for i in range(params.nu + 1):
            b |= ((x >> i) & 1) << (i * M_t + k)
    return b


def dot(ctx: FieldContext, g: Sequence[int], c: Sequence[int]) -> int:
    acc = 0
    for x, y in zip(g, c):
        acc ^= ctx.mul(x, y)
    return acc


def enumerate_Gf(ctx: FieldContext, params: CodeParams, c_f: Sequence[int]) -> FrozenSet[GammaVector]:
    """All g in Gamma^{1 x M_t} with g . c_f = 0, by exhaustive scan.

    The scan walks the 2^((nu+1)M_t) candidates in Gray-code order, updating
    g . c_f with one XOR per step.
    """
    n = (params.nu + 1) * params.M_t
    if n > MAX_SCAN_BITS:
        raise SpaceTooLarge(f"2^{n} candidates exceed the 2^{MAX_SCAN_BITS} scan limit")
    if len(c_f) != params.M_t:
        raise ShapeMismatch(f"c_f has {len(c_f)} entries, expected M_t={params.M_t}")
    images = [ctx.mul(ctx.pow(ctx.alpha, bit // params.M_t), c_f[bit % params.M_t]) for bit in range(n)]
    out = [psi(0, params)]
    b = 0
    value = 0
    for step in range(1, 1 << n):
        bit = (step & -step).bit_length() - 1
        b ^= 1 << bit
        value ^= images[bit]
        if value == 0:
            out.append(psi(b, params))
    return frozenset(out)


def admissible_multipliers(ctx: FieldContext, g: Sequence[int], nu: int) -> List[int]:
    """Gamma elements gamma with gamma * g still in Gamma^{1 x M_t} (0 included)."""
    return [gm for gm in gamma_elements(nu) if in_gamma_vec(scale(ctx, gm, g), nu)]


def span_D(ctx: FieldContext, vectors: Sequence[Sequence[int]], params: CodeParams) -> FrozenSet[GammaVector]:
    """D(g1..gd): sums of gamma_i g_i with every gamma_i g_i inside Gamma^{1 x M_t}."""
    if len(vectors) * (params.nu + 1) > MAX_SCAN_BITS:
        raise SpaceTooLarge("D-set too large to enumerate")
    zero = (0,) * params.M_t
    acc = {zero}
    for g in vectors:
        multiples = {scale(ctx, gm, g) for gm in admissible_multipliers(ctx, g, params.nu)}
        acc = {vec_add(a, m) for a in acc for m in multiples}
    return frozenset(acc)


def _phi_dependency(vecs: Sequence[GammaVector]) -> Optional[List[int]]:
    """Indices of a nonempty set whose Phi images sum to zero, or None."""
    basis: List[Tuple[int, int]] = []  # (reduced phi, set of indices as bitmask)
    for i, g in enumerate(vecs):
        v, combo = phi(g), 1 << i
        for bv, bc in basis:
            if v ^ bv < v:
                v ^= bv
                combo ^= bc
        if v == 0:
            return [j for j in range(len(vecs)) if (combo >> j) & 1]
        basis.append((v, combo))
        basis.sort(reverse=True)
    return None


def _combinations(ctx: FieldContext, vecs: Sequence[GammaVector], nu: int):
    """Yield (gammas, products) over all admissible multiplier tuples, not all zero."""
    choices = [admissible_multipliers(ctx, g, nu) for g in vecs]
    for gammas in itertools.product(*choices):
        if not any(gammas):
            continue
        yield gammas, [scale(ctx, gm, g) for gm, g in zip(gammas, vecs)]


def find_degree_collapse(ctx: FieldContext, vecs: Sequence[GammaVector], nu: int):
    """First multiplier tuple violating property (iii), or None."""
    for gammas, products in _combinations(ctx, vecs, nu):
        total = (0,) * len(vecs[0])
        for p in products:
            total = vec_add(total, p)
        if deg_vec(total) < max(deg_vec(p) for p in products):
            return gammas, products
    return None


@dataclass
class MinimalBasis:
    vectors: List[GammaVector]
    iterations: int

    @property
    def d(self) -> int:
        return len(self.vectors)


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self):
        self.used += 1
        if self.used > self.limit:
            raise NotRepresentable(f"degree reduction did not terminate within {self.limit} steps")


def _tilde(vecs: List[GammaVector], budget: _Budget) -> List[GammaVector]:
    """Restore GF(2)-independence of the Phi images by degree reduction."""
    while True:
        dep = _phi_dependency(vecs)
        if dep is None:
            return vecs
        budget.tick()
        top = max(deg_vec(vecs[i]) for i in dep)
        k = min(i for i in dep if deg_vec(vecs[i]) == top)
        s = (0,) * len(vecs[k])
        for i in dep:
            s = vec_add(s, vecs[i])
        if not any(s):
            # vecs[k] is a GF(2) sum of lower-or-equal degree members: drop it
            vecs = vecs[:k] + vecs[k + 1:]
            continue
        reduced, t = strip_alpha(s)
        if t < 1:
            raise NotRepresentable("Phi-dependent sum without a common alpha factor")
        vecs = vecs[:k] + [reduced] + vecs[k + 1:]


def _hat(ctx: FieldContext, vecs: List[GammaVector], nu: int, budget: _Budget) -> List[GammaVector]:
    """Restore property (iii) by cancelling leading terms."""
    while True:
        found = find_degree_collapse(ctx, vecs, nu)
        if found is None:
            return vecs
        budget.tick()
        gammas, products = found
        t = max(deg_vec(p) for p in products)
        top = [i for i, p in enumerate(products) if gammas[i] and deg_vec(p) == t]
        w = min(deg(gammas[i]) for i in top)
        k = min(i for i in top if deg(gammas[i]) == w)
        new = vecs[k]
        for i in top:
            if i != k:
                shift = int(deg(gammas[i]) - w)
                new = vec_add(new, tuple(x << shift for x in vecs[i]))
        if not deg_vec(new) < deg_vec(vecs[k]):
            raise NotRepresentable("leading-term cancellation did not lower the degree")
        vecs = vecs[:k] + [new] + vecs[k + 1:]


def find_minimal_basis(ctx: FieldContext, Gf: Iterable[Sequence[int]], params: CodeParams) -> MinimalBasis:
    """Minimal basis vectors of G_f.

    Starting from the empty set, repeatedly adjoin an element of G_f outside
    the current D-set (with its common alpha factor removed), then apply the
    tilde step (Phi independence) and the hat step (no degree collapse).
    Each step strictly lowers a degree; the total number of steps is checked
    against (nu+1) * d * |Gamma|.
    """
    nu = params.nu
    if params.T <= 2 * nu:
        # products of two Gamma elements would wrap around the field modulus
        raise ParamsOutOfRange(f"degree bookkeeping needs T > 2*nu, got T={params.T}, nu={nu}")
    gf_set = frozenset(tuple(g) for g in Gf)
    if not gf_set:
        raise NotRepresentable("G_f must contain at least the zero vector")
    gamma_size = 1 << (nu + 1)
    budget = _Budget((nu + 1) * (params.M_t + 1) * gamma_size * max(1, len(gf_set)))
    basis: List[GammaVector] = []
    while True:
        covered = span_D(ctx, basis, params)
        missing = gf_set - covered
        if not missing:
            break
        if not covered <= gf_set:
            raise NotRepresentable("D-set escaped G_f")
        pick = min(missing, key=lambda g: (deg_vec(g), g))
        fresh, _ = strip_alpha(pick)
        if fresh not in gf_set:
            raise NotRepresentable("alpha-stripped element left G_f")
        basis = _hat(ctx, _tilde(basis + [fresh], budget), nu, budget)
    steps = budget.used
    if steps > (nu + 1) * max(1, len(basis)) * gamma_size:
        raise NotRepresentable(f"{steps} reduction steps exceed the (nu+1)*d*|Gamma| bound")
    return MinimalBasis(basis, steps)


@dataclass
class BasisCheck:
    in_Gf: bool
    phi_nonzero: bool
    phi_independent: bool
    no_degree_collapse: bool
    spans_Gf: bool

    @property
    def ok(self) -> bool:
        return all(vars(self).values())


def check_minimal_basis(ctx: FieldContext, vectors: Sequence[GammaVector], Gf: Iterable[Sequence[int]],
                        params: CodeParams) -> BasisCheck:
    """Brute-force check of properties (i)-(iv), subset by subset."""
    nu = params.nu
    gf_set = frozenset(tuple(g) for g in Gf)
    phis = [phi(g) for g in vectors]
    collapse = False
    for size in range(1, len(vectors) + 1):
        for subset in itertools.combinations(range(len(vectors)), size):
            pools = []
            for i in subset:
                pools.append([gm for gm in range(1, 1 << (nu + 1))
                              if in_gamma_vec(scale(ctx, gm, vectors[i]), nu)])
            for gammas in itertools.product(*pools):
                prods = [scale(ctx, gm, vectors[i]) for gm, i in zip(gammas, subset)]
                total = (0,) * params.M_t
                for p in prods:
                    total = vec_add(total, p)
                if deg_vec(total) < max(deg_vec(p) for p in prods):
                    collapse = True
                    break
            if collapse:
                break
        if collapse:
            break
    return BasisCheck(
        in_Gf=all(tuple(g) in gf_set for g in vectors),
        phi_nonzero=all(phis),
        phi_independent=binary_rank(phis) == len(vectors),
        no_degree_collapse=not collapse,
        spans_Gf=span_D(ctx, vectors, params) == gf_set,
    )


def format_gamma_vector(g: Sequence[int], nu: int) -> str:
    """One line: the delta coefficients (alpha^0 first) of each entry."""
    return " ".join("".join(str((x >> t) & 1) for t in range(nu + 1)) for x in g)


def dump_basis(Gf: Iterable[Sequence[int]], basis: MinimalBasis, nu: int) -> str:
    lines = [f"# G_f ({len(list(Gf))} vectors)"]
    lines += [format_gamma_vector(g, nu) for g in sorted(Gf)]
    lines.append(f"# minimal basis (d={basis.d})")
    lines += [format_gamma_vector(g, nu) for g in basis.vectors]
    return "\n".join(lines) + "\n"


def cauchy_binet_check(ctx: FieldContext, A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> bool:
    """det(AB) == sum over m-subsets S of det(A[:, S]) det(B[S, :])."""
    m, n = gfmatrix.shape(A)
    n2, m2 = gfmatrix.shape(B)
    if n != n2 or m != m2 or m > n:
        raise ShapeMismatch(f"need A m x n and B n x m with m <= n, got {m}x{n} and {n2}x{m2}")
    lhs = gfmatrix.det(ctx, gfmatrix.matmul(ctx, A, B))
    rhs = 0
    for S in itertools.combinations(range(n), m):
        a_s = [[row[j] for j in S] for row in A]
        b_s = [list(B[j]) for j in S]
        rhs ^= ctx.mul(gfmatrix.det(ctx, a_s), gfmatrix.det(ctx, b_s))
    return lhs == rhs


def detP_threshold(params: CodeParams) -> int:
    q = (1 << params.R) - 1
    return q * params.nu + q * (params.nu + 1) * ((params.M_t - 2) * q + params.R)


def moore_matrix(ctx: FieldContext, params: CodeParams) -> List[List[int]]:
    """W: row q is ((xi^q)^(2^(R-1)), ..., (xi^q)^2, xi^q)."""
    xi = ctx.alpha_pow(params.xi_exponent)
    R = params.R
    return [[ctx.frobenius(ctx.pow(xi, q), R - 1 - c) for c in range(R)] for q in range(params.M_t)]


def detP(ctx: FieldContext, params: CodeParams, vectors: Sequence[Sequence[int]]) -> int:
    if params.T < detP_threshold(params):
        raise ThresholdNotMet(f"T={params.T} below the threshold {detP_threshold(params)}")
    if len(vectors) != params.R or any(len(g) != params.M_t for g in vectors):
        raise ShapeMismatch(f"need R={params.R} vectors of length M_t={params.M_t}")
    P = gfmatrix.matmul(ctx, [list(g) for g in vectors], moore_matrix(ctx, params))
    return gfmatrix.det(ctx, P)


def verify_detP(ctx: FieldContext, params: CodeParams, vectors: Sequence[Sequence[int]]) -> bool:
    """True when P = [g^(1); ...; g^(R)] W is nonsingular."""
    return detP(ctx, params, vectors) != 0


def nullspace_report(ctx: FieldContext, params: CodeParams, c_f: Sequence[int], U_rank: int) -> Dict[str, int]:
    Gf = enumerate_Gf(ctx, params, c_f)
    return {"Gf_size": len(Gf), "left_null_dim": (params.nu + 1) * params.M_t - U_rank}
