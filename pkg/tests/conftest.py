from fractions import Fraction

from hypothesis import strategies as st

from groupoid_limits import region as rg

T = rg.IntervalSpace((-1, 1))
T2 = rg.IntervalSpace((0, 1), (2, 3))
GRID = 8


def grid_points(space, denom=GRID * 4):
    """Dense rational probes including every grid endpoint and the midpoints between them."""
    pts = []
    for a, b in space.components:
        steps = int((b - a) * denom)
        pts.extend(a + Fraction(k, denom) for k in range(steps + 1))
    return pts


@st.composite
def raw_intervals(draw, space=T, max_pieces=4):
    pieces = []
    comps = space.components
    for _ in range(draw(st.integers(0, max_pieces))):
        a, b = comps[draw(st.integers(0, len(comps) - 1))]
        n = int((b - a) * GRID)
        i = draw(st.integers(0, n))
        j = draw(st.integers(i, n))
        lo, hi = a + Fraction(i, GRID), a + Fraction(j, GRID)
        pieces.append((lo, hi, draw(st.booleans()), draw(st.booleans())))
    return pieces


@st.composite
def regions(draw, space=T):
    return rg.normalize(space, draw(raw_intervals(space)))


def raw_contains(pieces, t):
    return any(rg.Interval(lo, hi, lc, hc).contains(t) for lo, hi, lc, hc in pieces)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    RESULTS = getattr(module, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
