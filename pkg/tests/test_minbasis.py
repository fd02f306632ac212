import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from isicodes import gfmatrix
from isicodes import minbasis as mb
from isicodes.binmat import left_nullspace
from isicodes.errors import NotRepresentable, ParamsOutOfRange, ShapeMismatch, SpaceTooLarge, ThresholdNotMet
from isicodes.gf import make_field
from isicodes.rankcodes import CodeParams, EvalMode, theta_lift


def cofactor_det(ctx, a):
    """Laplace expansion along the first row (char 2: no signs)."""
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    acc = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        acc ^= ctx.mul(a[0][j], cofactor_det(ctx, minor))
    return acc


def test_psi_basics():
    p = CodeParams(3, 1, 8, 1)
    assert mb.psi(0, p) == (0, 0, 0)
    # bit i*M_t + k -> alpha^i coefficient of entry k
    assert mb.psi(1 << (1 * 3 + 2), p) == (0, 0, 2)
    p0 = CodeParams(4, 0, 5, 1)
    for b in range(16):
        assert mb.psi(b, p0) == tuple((b >> k) & 1 for k in range(4))


def test_psi_round_trip():
    rng = random.Random(5)
    p = CodeParams(3, 2, 9, 1)
    for _ in range(100):
        b = rng.getrandbits(9)
        assert mb.psi_inverse(mb.psi(b, p), p) == b


def test_degrees():
    assert mb.deg(0) == mb.NEG_INF < 0
    assert mb.deg(1) == 0 and mb.deg(0b110) == 2
    assert mb.deg_vec((0, 0)) == mb.NEG_INF
    assert mb.deg_vec((1, 0b10)) == 1
    assert mb.phi((1, 2, 3)) == 0b101


def test_Gf_for_zero_vector(field5):
    p = CodeParams(2, 1, 5, 1)
    Gf = mb.enumerate_Gf(field5, p, (0, 0))
    assert len(Gf) == 16
    assert Gf == {(a, b) for a in range(4) for b in range(4)}


def test_Gf_full_rank_codeword(field5, t5_code):
    k = next(k for k in range(8) if t5_code.poly(k).coeffs[0] == 2)  # f_0 = alpha
    C = t5_code.codeword(k)
    assert mb.enumerate_Gf(field5, t5_code.params, C.rows) == {(0, 0)}
    assert left_nullspace(theta_lift(C, 1)) == []


def test_Gf_flat_codeword(field5):
    p = CodeParams(2, 1, 5, 1, eval_mode=EvalMode.FLAT)
    Gf = mb.enumerate_Gf(field5, p, (1, 2))  # f_0 = 1 at 1 and alpha
    assert len(Gf) == 2
    assert Gf == {(0, 0), (2, 1)}  # alpha * 1 + 1 * alpha = 0


def test_Gf_size_limit(field5):
    with pytest.raises(SpaceTooLarge):
        mb.enumerate_Gf(make_field(9), CodeParams(5, 4, 9, 1), (0,) * 5)
    with pytest.raises(ShapeMismatch):
        mb.enumerate_Gf(field5, CodeParams(2, 1, 5, 1), (1,))


def test_minimal_basis_trivial(field5):
    p = CodeParams(2, 1, 5, 1)
    basis = mb.find_minimal_basis(field5, {(0, 0)}, p)
    assert basis.d == 0
    assert mb.span_D(field5, [], p) == {(0, 0)}


def test_minimal_basis_whole_gamma(field5):
    p = CodeParams(1, 1, 5, 1)
    Gf = mb.enumerate_Gf(field5, p, (0,))
    basis = mb.find_minimal_basis(field5, Gf, p)
    assert basis.vectors == [(1,)]
    assert mb.span_D(field5, basis.vectors, p) == Gf


def _check_all(code):
    p, ctx = code.params, code.ctx
    max_d = 0
    for k in range(1, len(code)):
        C = code.codeword(k)
        Gf = mb.enumerate_Gf(ctx, p, C.rows)
        assert len(Gf) == 1 << len(left_nullspace(theta_lift(C, p.nu)))
        basis = mb.find_minimal_basis(ctx, Gf, p)
        assert mb.check_minimal_basis(ctx, basis.vectors, Gf, p).ok
        max_d = max(max_d, basis.d)
    return max_d


def test_minimal_basis_t5(t5_code):
    assert _check_all(t5_code) == 0


def test_minimal_basis_t8(t8_code):
    assert _check_all(t8_code) <= 1


def test_minimal_basis_arbitrary_vectors():
    rng = random.Random(2)
    for M_t, nu, T in [(2, 1, 5), (3, 1, 5), (3, 2, 6), (2, 3, 7)]:
        ctx = make_field(T)
        p = CodeParams(M_t, nu, T, 1)
        for _ in range(40):
            c = [rng.choice([0, 1, rng.randrange(ctx.order)]) for _ in range(M_t)]
            Gf = mb.enumerate_Gf(ctx, p, c)
            basis = mb.find_minimal_basis(ctx, Gf, p)
            assert mb.check_minimal_basis(ctx, basis.vectors, Gf, p).ok


def test_tilde_step_reduces_dependent_pair():
    # Phi images coincide; the sum alpha*(1, 0) has a common alpha factor
    out = mb._tilde([(1, 1), (3, 1)], mb._Budget(10))
    assert out == [(1, 1), (1, 0)]
    assert mb._tilde([(1, 1), (1, 1)], mb._Budget(10)) == [(1, 1)]


def test_hat_step_removes_degree_collapse(field5):
    vecs = [(1, 0), (2, 1)]  # (2, 1) + alpha*(1, 0) = (0, 1) has lower degree
    assert mb.find_degree_collapse(field5, vecs, 1) is not None
    out = mb._hat(field5, vecs, 1, mb._Budget(10))
    assert out == [(1, 0), (0, 1)]
    assert mb.find_degree_collapse(field5, out, 1) is None


def test_non_closed_set_is_not_representable(field5):
    with pytest.raises(NotRepresentable):
        mb.find_minimal_basis(field5, {(0,), (2,)}, CodeParams(1, 1, 5, 1))


def test_wraparound_guard():
    with pytest.raises(ParamsOutOfRange):
        mb.find_minimal_basis(make_field(4), {(0, 0)}, CodeParams(2, 2, 4, 1))


def test_span_D_single_top_degree(field5):
    p = CodeParams(2, 1, 5, 1)
    assert mb.span_D(field5, [(2, 3)], p) == {(0, 0), (2, 3)}


def test_span_D_size_and_membership(field5):
    rng = random.Random(9)
    p = CodeParams(3, 1, 5, 1)
    for _ in range(50):
        vecs = [tuple(rng.randrange(4) for _ in range(3)) for _ in range(2)]
        D = mb.span_D(field5, vecs, p)
        assert len(D) <= 16
        # recheck membership by brute force decomposition
        for g in D:
            assert any(
                mb.in_gamma_vec(mb.scale(field5, a, vecs[0]), 1) and mb.in_gamma_vec(mb.scale(field5, b, vecs[1]), 1)
                and mb.vec_add(mb.scale(field5, a, vecs[0]), mb.scale(field5, b, vecs[1])) == g
                for a, b in itertools.product(range(4), repeat=2)
            )


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 7), st.lists(st.integers(0, 7), min_size=3, max_size=3))
def test_degree_of_products(gamma, g):
    ctx = make_field(7)
    prod = mb.scale(ctx, gamma, g)
    if gamma and any(g) and mb.in_gamma_vec(prod, 2):
        assert mb.deg_vec(prod) == mb.deg(gamma) + mb.deg_vec(g)


def test_dump_format():
    basis = mb.MinimalBasis([(1, 2)], 0)
    text = mb.dump_basis([(0, 0), (1, 2)], basis, 1)
    assert text.splitlines() == ["# G_f (2 vectors)", "00 00", "10 01", "# minimal basis (d=1)", "10 01"]


def test_cauchy_binet_trivial(field5):
    assert mb.cauchy_binet_check(field5, [[7]], [[9]])
    assert gfmatrix.det(field5, gfmatrix.matmul(field5, [[7]], [[9]])) == field5.mul(7, 9)
    A = [[0, 1, 0], [0, 0, 1]]
    B = [[3, 4], [5, 6], [7, 8]]
    assert gfmatrix.det(field5, gfmatrix.matmul(field5, A, B)) == cofactor_det(field5, [[5, 6], [7, 8]])
    assert mb.cauchy_binet_check(field5, A, B)


def test_cauchy_binet_random(field5):
    rng = random.Random(17)
    for _ in range(500):
        m = rng.randint(1, 4)
        n = rng.randint(m, 6)
        A = [[rng.randrange(32) for _ in range(n)] for _ in range(m)]
        B = [[rng.randrange(32) for _ in range(m)] for _ in range(n)]
        AB = gfmatrix.matmul(field5, A, B)
        assert gfmatrix.det(field5, AB) == cofactor_det(field5, AB)
        assert mb.cauchy_binet_check(field5, A, B)


def test_cauchy_binet_shapes(field5):
    with pytest.raises(ShapeMismatch):
        mb.cauchy_binet_check(field5, [[1, 2]], [[1, 2]])
    with pytest.raises(ShapeMismatch):
        mb.cauchy_binet_check(field5, [[1], [2]], [[1, 2]])


def test_detP_threshold_value():
    assert mb.detP_threshold(CodeParams(2, 1, 15, 2)) == 3 * 1 + 3 * 2 * (0 + 2) == 15
    assert mb.detP_threshold(CodeParams(2, 1, 5, 1)) == 3


def test_detP_rate_one(field5):
    p = CodeParams(2, 1, 5, 1)
    for g in [(1, 0), (0, 1), (3, 2)]:
        expected = field5.mul(g[0], 1) ^ field5.mul(g[1], field5.alpha_pow(2))
        assert mb.detP(field5, p, [g]) == expected != 0


def test_detP_random_independent():
    ctx = make_field(15)
    p = CodeParams(2, 1, 15, 2)
    rng = random.Random(23)
    hits = 0
    while hits < 200:
        vecs = [tuple(rng.randrange(4) for _ in range(2)) for _ in range(2)]
        if gfmatrix.rank(ctx, vecs) < 2:
            assert mb.detP(ctx, p, vecs) == 0
            continue
        assert mb.verify_detP(ctx, p, vecs)
        hits += 1


def test_detP_preconditions(field5):
    with pytest.raises(ThresholdNotMet):
        mb.detP(make_field(14), CodeParams(2, 1, 14, 2), [(1, 0), (0, 1)])
    with pytest.raises(ShapeMismatch):
        mb.detP(field5, CodeParams(2, 1, 5, 1), [(1, 0), (0, 1)])


def test_gfmatrix_errors(field5):
    with pytest.raises(ShapeMismatch):
        gfmatrix.det(field5, [[1, 2]])
    with pytest.raises(ShapeMismatch):
        gfmatrix.matmul(field5, [[1, 2]], [[1, 2]])
    assert gfmatrix.det(field5, []) == 1
    assert gfmatrix.rank(field5, [[1, 2], [2, 4]]) == 1
