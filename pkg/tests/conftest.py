import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import strategies as st

from linkage_moduli.chambers import enumerate_chambers
from linkage_moduli.lenvec import (LengthEntry, LengthVector, Weight, is_d_regular, is_generic, is_short,
                                   sort_with_permutation)


# Independent oracles: plain Weight arithmetic over explicit index sets.

def weight_of(lv, idx):
    w = Weight(Fraction(0), 0)
    for i in idx:
        w = w + lv[i].weight
    return w


def brute_verdict(lv, idx):
    rest = [i for i in range(1, lv.n + 1) if i not in idx]
    a, b = weight_of(lv, idx), weight_of(lv, rest)
    return "short" if a < b else "long" if a > b else "tight"


def brute_generic(lv):
    n = lv.n
    for r in range(n + 1):
        for idx in combinations(range(1, n + 1), r):
            if brute_verdict(lv, idx) == "tight":
                return False
    return True


def brute_short_levels(lv):
    """Short subsets containing n, as sorted tuples of index tuples per level."""
    n = lv.n
    levels = []
    for k in range(n - 2):
        level = [idx + (n,) for idx in combinations(range(1, n), k) if brute_verdict(lv, idx + (n,)) == "short"]
        levels.append(sorted(level))
    return levels


def brute_d_regular(lv, d):
    n = lv.n
    if all(e.eps == 0 and e.base.denominator == 1 for e in lv.entries):
        vals = [int(e.base) for e in lv.entries]
        total = sum(vals)
        longs = [set(idx) for idx in combinations(range(1, n + 1), d - 1)
                 if 2 * sum(vals[i - 1] for i in idx) > total]
    else:
        longs = [set(idx) for idx in combinations(range(1, n + 1), d - 1) if brute_verdict(lv, idx) == "long"]
    common = set(range(1, n + 1))
    for s in longs:
        common &= s
    return bool(common)


@st.composite
def length_vectors(draw, min_n=3, max_n=8, eps=True, max_value=20):
    n = draw(st.integers(min_n, max_n))
    entries = []
    for _ in range(n):
        if eps and draw(st.integers(0, 5)) == 0:
            entries.append(LengthEntry(Fraction(0), 1))
        else:
            num = draw(st.integers(1, max_value))
            den = draw(st.sampled_from([1, 1, 1, 2, 3]))
            entries.append(LengthEntry(Fraction(num, den)))
    return LengthVector(tuple(entries))


def random_generic_vectors(count, n_range, seed, max_value=None):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.choice(list(n_range))
        hi = max_value or 4 * n
        lv = LengthVector(tuple(rng.randint(1, hi) for _ in range(n)))
        if is_generic(lv):
            out.append(lv)
    return out


@pytest.fixture(scope="session")
def atlases():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = enumerate_chambers(n)
        return cache[n]
    return get


def _ring_ok(lv, d):
    s, _ = sort_with_permutation(lv)
    return is_d_regular(s, d) and is_short(s, 1 << (s.n - 1))


@pytest.fixture(scope="session")
def ring_vectors(atlases):
    """(vector, d) pairs meeting the ring hypotheses: n=7,8 atlas chambers plus random n=9..11."""
    out = []
    for n in (7, 8):
        for rec in atlases(n).records:
            if _ring_ok(rec.witness, 5):
                out.append((rec.witness, 5))
    for lv in random_generic_vectors(60, range(9, 12), seed=11):
        for d in (5, 7):
            if lv.n >= d + 2 and _ring_ok(lv, d):
                out.append((lv, d))
    out.append((LengthVector.parse("1,1,1,1,1,1,1,1,15/2"), 5))
    return out
