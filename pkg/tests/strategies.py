from __future__ import annotations

from hypothesis import strategies as st

from nccalc.exactmath import QQ, ExactMatrix
from nccalc.freealg import NcPoly
from nccalc.twistlab import Twist


def small_polys(n, max_len=3, max_terms=3):
    word = st.lists(st.integers(1, n), max_size=max_len).map(tuple)
    coeff = st.integers(-2, 2).filter(bool)
    return st.dictionaries(word, coeff, max_size=max_terms).map(lambda t: NcPoly(n, QQ, t))


def random_twist(n, values=(-1, 0, 1, 2)):
    size = n * n
    return st.lists(st.lists(st.sampled_from(values), min_size=size, max_size=size),
                    min_size=size, max_size=size).map(lambda rows: Twist(n, ExactMatrix(QQ, rows)))
