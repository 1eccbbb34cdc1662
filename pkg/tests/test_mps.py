import numpy as np
import pytest

from riskexpansion import RiskSettings, build, flex_setting, read_interchange, solve, write_interchange
from riskexpansion.lp import LinearProgram
from riskexpansion.solve import MPSParseError

INF = np.inf


def small_lp(**kw):
    base = dict(
        c=[1.0, -2.0, 0.0, 0.0], A=[[1, 1, 0, 0], [1, -1, 1, 0], [0, 1, 0, 0], [0, 0, 1, 1]],
        row_lo=[-INF, 1.0, 0.5, -INF], row_hi=[4.0, 1.0, 3.0, INF],
        col_lo=[0.0, -INF, -INF, 2.0], col_hi=[INF, 10.0, INF, 2.0],
        col_names=["x", "y", "zeta", "f"], row_names=["cap", "bal", "rng", "free"],
        name="small", offset=1.5,
    )
    base.update(kw)
    return LinearProgram(**{k: (np.asarray(v, dtype=float) if k in ("c", "A", "row_lo", "row_hi", "col_lo", "col_hi") else v)
                            for k, v in base.items()})


def same_lp(a, b):
    assert a.col_names == b.col_names and a.row_names == b.row_names
    assert np.array_equal(a.c, b.c)
    assert (a.A != b.A).nnz == 0
    for f in ("row_lo", "row_hi", "col_lo", "col_hi"):
        assert np.array_equal(getattr(a, f), getattr(b, f)), f
    assert a.offset == b.offset


def test_round_trip_small():
    lp = small_lp()
    text = write_interchange(lp)
    back = read_interchange(text)
    same_lp(lp, back)
    assert write_interchange(back) == text
    assert " FR BND  zeta" in text
    assert " MI BND  y" in text and " FX BND  f  2" in text
    assert "RANGES\n    RNG  rng  2.5" in text
    assert " N  free" in text


def test_empty_lp_round_trip():
    lp = LinearProgram(c=np.zeros(0), A=np.zeros((0, 0)), row_lo=np.zeros(0), row_hi=np.zeros(0),
                       col_lo=np.zeros(0), col_hi=np.zeros(0), col_names=[], row_names=[], name="empty")
    text = write_interchange(lp)
    assert text.splitlines()[0].startswith("NAME") and text.endswith("ENDATA\n")
    back = read_interchange(text)
    assert back.shape == (0, 0)


def test_names_are_sanitised_and_unique():
    long = "a" * 300
    lp = small_lp(col_names=[long + "1", long + "2", "with space", "f"], row_names=["COST", "b", "c", "d"])
    text = write_interchange(lp)
    back = read_interchange(text)
    assert len(set(back.col_names)) == 4
    assert all(len(n) <= 255 and " " not in n for n in back.col_names)
    assert back.row_names[0] != "COST"
    assert write_interchange(lp) == text


def test_model_round_trip_solves_identically(hedging):
    lp = build(hedging, RiskSettings(0.4), flex_setting("dr-high"))
    back = read_interchange(write_interchange(lp))
    assert back.shape == lp.shape
    a, b = solve(lp), solve(back)
    assert b.objective == pytest.approx(a.objective, rel=1e-9)


def test_objsense_max_is_negated():
    text = "NAME t\nOBJSENSE\n    MAX\nROWS\n N  obj\n L  c\nCOLUMNS\n    x  obj  1  c  1\nRHS\n    RHS  c  3\nENDATA\n"
    lp = read_interchange(text)
    assert lp.c[0] == -1.0
    assert solve(lp).objective == pytest.approx(-3.0)


@pytest.mark.parametrize("text,line", [
    ("NAME t\nROWS\n N  obj\n Q  c\nENDATA\n", 4),
    ("NAME t\nROWS\n N  obj\nCOLUMNS\n    x  nope  1\nENDATA\n", 5),
    ("NAME t\nROWS\n N  obj\nCOLUMNS\n    x  obj  abc\nENDATA\n", 5),
    ("NAME t\nBOGUS\nENDATA\n", 2),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(MPSParseError) as err:
        read_interchange(text)
    assert err.value.lineno == line
