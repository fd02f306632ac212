import pytest

from isicodes.gf import make_field
from isicodes.rankcodes import CodeParams, EvalMode, construct

POLY_T5 = 0x37  # x^5+x^4+x^2+x+1


# 2x5 codewords of the (M_t=2, nu=1, T=5, R=1) set over POLY_T5, rows as bit strings
LISTED_T5_CODEWORDS = {
    ("00000", "00000"),
    ("10000", "00100"),
    ("01000", "00010"),
    ("11000", "00110"),
    ("00110", "11100"),
    ("10110", "11000"),
    ("01110", "11110"),
    ("11110", "11010"),
}
LISTED_T5_LOGS = {1, 17, 19, 21, 24, 26, 31}  # nonzero f_0 = alpha^k


def rows_to_strings(matrix):
    return tuple("".join(str((r >> c) & 1) for c in range(matrix.ncols)) for r in matrix.rows)


@pytest.fixture(scope="session")
def field5():
    return make_field(5, POLY_T5)


@pytest.fixture(scope="session")
def t5_code():
    return construct(CodeParams(2, 1, 5, 1), POLY_T5)


@pytest.fixture(scope="session")
def flat_t5_code():
    return construct(CodeParams(2, 1, 5, 1, eval_mode=EvalMode.FLAT), POLY_T5)


@pytest.fixture(scope="session")
def t8_code():
    return construct(CodeParams(2, 1, 8, 2))
