"""Exact arithmetic on length vectors.

Entries live in the ordered field Q(eps) restricted to ``base + m*eps`` with a
single shared infinitesimal ``eps``.  Subsets of ``{1..n}`` are int bitmasks:
index ``i`` is bit ``i - 1``.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DomainError, NonPositive, NotOrdered, ParseError

# subset-sum tables are precomputed up to this size (2**16 entries)
_TABLE_MAX_N = 16


def mask_of(indices: Iterable[int]) -> int:
    """Bitmask for a collection of 1-based indices."""
    m = 0
    for i in indices:
        if i < 1:
            raise ValueError(f"index {i} out of range")
        m |= 1 << (i - 1)
    return m


def indices_of(mask: int) -> list[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True, order=True)
class Weight:
    """An element ``base + eps_count*eps``; ordering is lexicographic."""
    base: Fraction
    eps_count: int = 0

    def __add__(self, other: Weight) -> Weight:
        return Weight(self.base + other.base, self.eps_count + other.eps_count)

    def __sub__(self, other: Weight) -> Weight:
        return Weight(self.base - other.base, self.eps_count - other.eps_count)

    def is_positive(self) -> bool:
        return self > Weight(Fraction(0), 0)


@dataclass(frozen=True, order=True)
class LengthEntry:
    base: Fraction
    eps: int = 0

    def __post_init__(self):
        object.__setattr__(self, "base", Fraction(self.base))
        if self.base < 0:
            raise NonPositive(f"negative base part {self.base}")
        if not (self.base > 0 or self.eps > 0):
            raise NonPositive("length entries must be positive in Q(eps)")

    @property
    def weight(self) -> Weight:
        return Weight(self.base, self.eps)

    def __str__(self) -> str:
        if self.eps == 0:
            return str(self.base)
        e = "eps" if abs(self.eps) == 1 else f"{abs(self.eps)}eps"
        if self.base == 0:
            return e
        return f"{self.base}{'+' if self.eps > 0 else '-'}{e}"


EPS = LengthEntry(Fraction(0), 1)

_TOKEN = re.compile(
    r"^(?P<rat>[+]?\d+(?:/\d+|\.\d+)?)?"
    r"(?:(?P<sign>[+-])?(?P<mult>\d*)eps)?$"
)


def parse_entry(token) -> LengthEntry:
    if isinstance(token, LengthEntry):
        return token
    if isinstance(token, (int, Fraction)):
        if isinstance(token, bool):
            raise ParseError(f"bad length entry {token!r}")
        return LengthEntry(Fraction(token))
    if isinstance(token, float):
        raise ParseError("floating-point entries are not supported")
    tok = str(token).strip().lower().replace(" ", "")
    m = _TOKEN.match(tok)
    if not tok or m is None:
        raise ParseError(f"bad length entry {token!r}")
    rat, sign, mult = m.group("rat"), m.group("sign"), m.group("mult")
    has_eps = tok.endswith("eps")
    if rat is not None and has_eps and sign is None:
        # "3eps": the leading number is the multiplicity
        if not rat.lstrip("+").isdigit() or mult:
            raise ParseError(f"bad length entry {token!r}")
        rat, mult = None, rat.lstrip("+")
    try:
        base = Fraction(rat) if rat else Fraction(0)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad length entry {token!r}") from exc
    eps = 0
    if has_eps:
        eps = int(mult) if mult else 1
        if sign == "-":
            eps = -eps
    try:
        return LengthEntry(base, eps)
    except NonPositive as exc:
        raise ParseError(f"length entry {token!r} is not positive") from exc


@dataclass(frozen=True)
class LengthVector:
    entries: tuple[LengthEntry, ...]

    def __post_init__(self):
        ents = tuple(parse_entry(e) for e in self.entries)
        object.__setattr__(self, "entries", ents)
        if len(ents) < 3:
            raise DomainError("a length vector needs at least 3 entries")

    @classmethod
    def of(cls, *values) -> LengthVector:
        return cls(tuple(values))

    @classmethod
    def parse(cls, text: str) -> LengthVector:
        tokens = [t for t in text.split(",")]
        if any(not t.strip() for t in tokens):
            raise ParseError(f"empty token in {text!r}")
        try:
            return cls(tuple(parse_entry(t) for t in tokens))
        except DomainError as exc:
            raise ParseError(str(exc)) from exc

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> LengthEntry:
        """1-based access, matching subset indices."""
        if not 1 <= i <= self.n:
            raise IndexError(i)
        return self.entries[i - 1]

    def __str__(self) -> str:
        return ",".join(str(e) for e in self.entries)

    def scaled(self, factor) -> LengthVector:
        """Multiply every base part by a positive rational; eps parts stay."""
        factor = Fraction(factor)
        if factor <= 0:
            raise NonPositive("scale factor must be positive")
        return LengthVector(tuple(LengthEntry(e.base * factor, e.eps) for e in self.entries))

    def permuted(self, perm: Sequence[int]) -> LengthVector:
        """Vector whose i-th entry is the ``perm[i]``-th entry of self (1-based)."""
        return LengthVector(tuple(self[p] for p in perm))

    # Integer keys: key(J) = B_J*M + E_J with B the base parts over a common
    # denominator and M large enough that comparisons of 2*key(J) against the
    # total never let the eps part carry into the base part.
    @cached_property
    def _keys(self) -> tuple[int, ...]:
        den = math.lcm(*(e.base.denominator for e in self.entries))
        spread = 4 * sum(abs(e.eps) for e in self.entries) + 1
        return tuple(int(e.base * den) * spread + e.eps for e in self.entries)

    @cached_property
    def _total(self) -> int:
        return sum(self._keys)

    @cached_property
    def _table(self) -> list[int] | None:
        if self.n > _TABLE_MAX_N:
            return None
        keys = self._keys
        sums = [0] * (1 << self.n)
        for m in range(1, 1 << self.n):
            low = m & -m
            sums[m] = sums[m ^ low] + keys[low.bit_length() - 1]
        return sums

    def _key(self, mask: int) -> int:
        table = self._table
        if table is not None:
            return table[mask]
        keys = self._keys
        s = 0
        while mask:
            low = mask & -mask
            s += keys[low.bit_length() - 1]
            mask ^= low
        return s

    def _sign(self, mask: int) -> int:
        """-1 short, +1 long, 0 tight."""
        c = 2 * self._key(mask) - self._total
        return (c > 0) - (c < 0)

    def _check_mask(self, mask: int) -> None:
        if mask < 0 or mask > self.full_mask:
            raise ValueError(f"subset mask {mask:#x} exceeds n={self.n}")


class Verdict(enum.Enum):
    SHORT = "short"
    LONG = "long"
    TIGHT = "tight"


_VERDICT = {-1: Verdict.SHORT, 1: Verdict.LONG, 0: Verdict.TIGHT}


def as_vector(v) -> LengthVector:
    if isinstance(v, LengthVector):
        return v
    if isinstance(v, str):
        return LengthVector.parse(v)
    return LengthVector(tuple(v))


def subset_weight(lv: LengthVector, mask: int) -> Weight:
    lv._check_mask(mask)
    w = Weight(Fraction(0), 0)
    for i in indices_of(mask):
        w = w + lv[i].weight
    return w


def total_weight(lv: LengthVector) -> Weight:
    return subset_weight(lv, lv.full_mask)


def classify_subset(lv: LengthVector, mask: int) -> Verdict:
    lv._check_mask(mask)
    return _VERDICT[lv._sign(mask)]


def is_short(lv: LengthVector, mask: int) -> bool:
    return lv._sign(mask) < 0


def is_long(lv: LengthVector, mask: int) -> bool:
    return lv._sign(mask) > 0


def tight_witness(lv: LengthVector) -> int | None:
    """First tight subset of ``{1..n-1}`` in mask order, or None.

    Every subset pairs with its complement, so scanning the 2**(n-1) subsets
    avoiding ``n`` decides genericity.
    """
    sign = lv._sign
    for m in range(1 << (lv.n - 1)):
        if sign(m) == 0:
            return m
    return None


def is_generic(lv: LengthVector) -> bool:
    return tight_witness(lv) is None


def is_ordered(lv: LengthVector) -> bool:
    e = lv.entries
    return all(e[i] <= e[i + 1] for i in range(len(e) - 1))


def sort_with_permutation(lv: LengthVector) -> tuple[LengthVector, list[int]]:
    """Stable sort; ``perm[i]`` is the original (1-based) index now at position i+1."""
    perm = sorted(range(1, lv.n + 1), key=lambda i: lv[i])
    return lv.permuted(perm), perm


def long_subsets_of_size(lv: LengthVector, size: int) -> list[int]:
    out = []
    for combo in combinations(range(lv.n), size):
        m = 0
        for i in combo:
            m |= 1 << i
        if lv._sign(m) > 0:
            out.append(m)
    return out


def is_d_regular(lv: LengthVector, d: int) -> bool:
    """The long (d-1)-subsets have a common element (vacuous if there are none)."""
    if d < 2:
        raise DomainError(f"d must be at least 2, got {d}")
    if d - 1 > lv.n:
        raise DomainError(f"d-1={d - 1} exceeds n={lv.n}")
    common = lv.full_mask
    for m in long_subsets_of_size(lv, d - 1):
        common &= m
        if not common:
            return False
    return True


def is_d_regular_ordered(lv: LengthVector, d: int) -> bool:
    if not is_ordered(lv):
        raise NotOrdered("fast regularity check needs an ordered vector")
    if d < 2:
        raise DomainError(f"d must be at least 2, got {d}")
    n = lv.n
    if d - 1 > n:
        raise DomainError(f"d-1={d - 1} exceeds n={n}")
    if d - 1 == n:
        # the only (d-1)-subset is everything
        return True
    heaviest = mask_of(range(n - d + 1, n))
    return lv._sign(heaviest) <= 0


def contract(lv: LengthVector, mask: int) -> LengthVector:
    """Fuse the links in ``mask`` (a subset of ``{1..n-1}``) onto link n."""
    n = lv.n
    if mask >> (n - 1):
        raise ValueError("contracted subset must avoid n")
    kept = [lv[i] for i in range(1, n) if not mask >> (i - 1) & 1]
    last = lv[n].weight
    for i in indices_of(mask):
        last = last + lv[i].weight
    return LengthVector(tuple(kept) + (LengthEntry(last.base, last.eps_count),))


def derive_plus(lv: LengthVector, j: int) -> LengthVector:
    if not 1 <= j <= lv.n - 1:
        raise DomainError(f"j must lie in 1..{lv.n - 1}")
    return contract(lv, 1 << (j - 1))


def derive_minus(lv: LengthVector, j: int) -> LengthVector:
    """Link j folded back against link n: last entry becomes l_n - l_j."""
    n = lv.n
    if not 1 <= j <= n - 1:
        raise DomainError(f"j must lie in 1..{n - 1}")
    diff = lv[n].weight - lv[j].weight
    if not diff.is_positive():
        raise NonPositive(f"l_n - l_j = {diff.base}{diff.eps_count:+d}eps is not positive")
    kept = [lv[i] for i in range(1, n) if i != j]
    return LengthVector(tuple(kept) + (LengthEntry(diff.base, diff.eps_count),))
