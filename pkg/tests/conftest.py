import os
import sys
import random

import hypothesis
from hypothesis import strategies as st

from supertoric.superlie import Subspace

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=8, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


small_ints = st.integers(min_value=-3, max_value=3)


def int_matrix(rows, cols, elements=small_ints):
    return st.lists(st.lists(elements, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


@st.composite
def matrices(draw, max_rows=4, max_cols=4):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return draw(int_matrix(r, c))


@st.composite
def subspaces(draw, n):
    k = draw(st.integers(0, n))
    vecs = draw(st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=k, max_size=k))
    return Subspace.span(vecs, n)


seeds = st.integers(min_value=0, max_value=2**32 - 1).map(random.Random)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
