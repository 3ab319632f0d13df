import pytest
from gmpy2 import mpq
from hypothesis import strategies as st

from rigidcr.series_core import GaussRat, TruncSeries

small_q = st.builds(lambda p, q: mpq(p, q), st.integers(-5, 5), st.integers(1, 4))
gauss = st.builds(GaussRat, small_q, small_q)


def _exponents(max_deg, holo):
    out = []
    for a in range(max_deg + 1):
        for b in range(max_deg + 1 - a):
            for c in range(max_deg + 1 - a - b):
                for d in range(max_deg + 1 - a - b - c):
                    if not holo or (c == 0 and d == 0):
                        out.append((a, b, c, d))
    return out


def series(max_deg=3, max_terms=5, order=st.just(4), holo=False, const=True):
    """Small sparse series; terms are (exponent index, re numerator, im numerator, denominator)."""
    table = [e for e in _exponents(max_deg, holo) if const or sum(e) > 0]
    term = st.tuples(st.integers(0, len(table) - 1), st.integers(-5, 5), st.integers(-5, 5),
                     st.integers(1, 4))

    def build(terms, n):
        return TruncSeries({table[i]: GaussRat(mpq(r, q), mpq(m, q)) for i, r, m, q in terms}, n)
    return st.builds(build, st.lists(term, max_size=max_terms), order)


# acceptance lines, printed once at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line("%s %s  %s" % (key, "PASS" if ok else "FAIL", detail))


@pytest.fixture
def acceptance():
    def record(key, ok, detail=""):
        ACCEPTANCE[key] = (bool(ok), detail)
        print("%s %s  %s" % (key, "PASS" if ok else "FAIL", detail))
        return ok
    return record


def random_series(rng, max_deg=3, max_terms=5, order=4, holo=False, const=True):
    table = [e for e in _exponents(max_deg, holo) if const or sum(e) > 0]
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        q = rng.randint(1, 4)
        terms[rng.choice(table)] = GaussRat(mpq(rng.randint(-5, 5), q), mpq(rng.randint(-5, 5), q))
    return TruncSeries(terms, order)


seeds = st.integers(0, 2 ** 32 - 1)
