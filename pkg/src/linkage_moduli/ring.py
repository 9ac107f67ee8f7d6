"""Z/2 model of the intersection ring of a linkage space, d odd.

The model is the polynomial algebra on ``R, X_1..X_k`` modulo

* ``X_i**2 = R*X_i``,
* ``X_J = 0`` whenever ``J + {n}`` is long,
* every monomial of degree above ``n - d``.

No other relations are imposed, so in degrees >= 3 the model dimensions are
upper bounds for the true ring.  Normal-form monomials are ``R**a * X_J`` with
``J`` squarefree, ``J + {n}`` short and ``a + |J| <= n - d``.
"""
from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .errors import (DomainError, EmptySpace, EvenD, LengthMismatch, NotGeneric,
                     NotRegular, ParseError, PresentationMismatch, UnknownGenerator)
from .lenvec import (LengthVector, as_vector, indices_of, is_d_regular, popcount,
                     sort_with_permutation, tight_witness)
from .short_complex import ShortComplex, first_difference, short_complex

# degrees at or above this are reported as model upper bounds
UPPER_BOUND_DEGREE = 3


class Monomial(NamedTuple):
    r_exp: int
    support: int

    @property
    def degree(self) -> int:
        return self.r_exp + popcount(self.support)

    def sort_key(self):
        return (self.degree, -self.r_exp, indices_of(self.support))

    def __str__(self) -> str:
        parts = []
        if self.r_exp == 1:
            parts.append("R")
        elif self.r_exp > 1:
            parts.append(f"R^{self.r_exp}")
        if self.support:
            parts.append("X{" + ",".join(map(str, indices_of(self.support))) + "}")
        return "*".join(parts) or "1"


class RawMonomial(NamedTuple):
    """Unreduced monomial: a power of R and arbitrary exponents on the X_i."""
    r_exp: int
    x_exps: tuple[tuple[int, int], ...]

    @classmethod
    def make(cls, r_exp: int = 0, x_exps: Mapping[int, int] | None = None) -> RawMonomial:
        items = tuple(sorted((i, e) for i, e in (x_exps or {}).items() if e))
        return cls(r_exp, items)


@dataclass(frozen=True, eq=False)
class RingPresentation:
    vector: LengthVector
    permutation: tuple[int, ...]
    d: int
    complex: ShortComplex
    k: int = field(init=False)
    truncation: int = field(init=False)
    _short: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "k", self.complex.a_vector()[1])
        object.__setattr__(self, "truncation", self.n - self.d)
        object.__setattr__(self, "_short", self.complex.masks())

    @property
    def n(self) -> int:
        return self.vector.n

    @property
    def generator_origin(self) -> dict[int, int]:
        """Generator index j -> index of that link in the caller's vector."""
        return {j: self.permutation[j - 1] for j in range(1, self.k + 1)}

    def is_short_support(self, support: int) -> bool:
        return (support | 1 << (self.n - 1)) in self._short

    # elements
    def element(self, monomials: Iterable[Monomial] = ()) -> RingElement:
        acc: set[Monomial] = set()
        for m in monomials:
            acc ^= {m}
        return RingElement(self, frozenset(acc))

    @property
    def zero(self) -> RingElement:
        return RingElement(self, frozenset())

    @property
    def one(self) -> RingElement:
        return self.element([Monomial(0, 0)] if self.truncation >= 0 else [])

    @property
    def R(self) -> RingElement:
        return normalize(self, [RawMonomial.make(1)])

    def X(self, j: int) -> RingElement:
        return normalize(self, [RawMonomial.make(0, {j: 1})])

    def basis(self, r: int) -> list[Monomial]:
        """Normal-form monomials of degree r."""
        if r < 0 or r > self.truncation:
            return []
        top = 1 << (self.n - 1)
        out = []
        for s in range(0, min(r, len(self.complex.levels) - 1) + 1):
            for mask in self.complex.levels[s]:
                out.append(Monomial(r - s, mask ^ top))
        return sorted(out, key=Monomial.sort_key)

    def parse(self, text: str) -> RingElement:
        return normalize(self, parse_raw(text))


@dataclass(frozen=True)
class RingElement:
    ring: RingPresentation
    monomials: frozenset

    def __add__(self, other: RingElement) -> RingElement:
        _same_ring(self, other)
        return RingElement(self.ring, self.monomials ^ other.monomials)

    __sub__ = __add__

    def __mul__(self, other: RingElement) -> RingElement:
        return multiply(self, other)

    def __bool__(self) -> bool:
        return bool(self.monomials)

    def homogeneous_part(self, r: int) -> RingElement:
        return RingElement(self.ring, frozenset(m for m in self.monomials if m.degree == r))

    def sorted_monomials(self) -> list[Monomial]:
        return sorted(self.monomials, key=Monomial.sort_key)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        return " + ".join(str(m) for m in self.sorted_monomials())


def _same_ring(a: RingElement, b: RingElement) -> None:
    if a.ring is not b.ring:
        raise PresentationMismatch("elements belong to different ring presentations")


_RULES = ("square", "long", "degree")


def _rewrite(ring: RingPresentation, raw: RawMonomial, rng: random.Random | None) -> Monomial | None:
    """Reduce one monomial by single rewrite steps; ``rng`` shuffles the rule order."""
    r = raw.r_exp
    exps = dict(raw.x_exps)
    for i in exps:
        if not 1 <= i <= ring.k:
            raise UnknownGenerator(f"X{i} is not a generator (k={ring.k})")
    if r < 0 or any(e < 0 for e in exps.values()):
        raise ParseError("negative exponent")
    while True:
        support = 0
        for i, e in exps.items():
            if e:
                support |= 1 << (i - 1)
        applicable = []
        if any(e >= 2 for e in exps.values()):
            applicable.append("square")
        if not ring.is_short_support(support):
            applicable.append("long")
        if r + sum(exps.values()) > ring.truncation:
            applicable.append("degree")
        if not applicable:
            return Monomial(r, support)
        rule = rng.choice(applicable) if rng is not None else applicable[0]
        if rule != "square":
            return None
        squares = sorted(i for i, e in exps.items() if e >= 2)
        i = rng.choice(squares) if rng is not None else squares[0]
        exps[i] -= 1
        r += 1


def normalize(ring: RingPresentation, raw: Iterable[RawMonomial | Monomial],
              rng: random.Random | None = None) -> RingElement:
    acc: set[Monomial] = set()
    for term in raw:
        if isinstance(term, Monomial):
            term = RawMonomial.make(term.r_exp, {i: 1 for i in indices_of(term.support)})
        m = _rewrite(ring, term, rng)
        if m is not None:
            acc ^= {m}
    return RingElement(ring, frozenset(acc))


def _raw_product(a: Monomial, b: Monomial) -> RawMonomial:
    exps: dict[int, int] = {}
    for i in indices_of(a.support) + indices_of(b.support):
        exps[i] = exps.get(i, 0) + 1
    return RawMonomial.make(a.r_exp + b.r_exp, exps)


def multiply(a: RingElement, b: RingElement) -> RingElement:
    _same_ring(a, b)
    return normalize(a.ring, (_raw_product(x, y) for x in a.monomials for y in b.monomials))


_FACTOR = re.compile(r"^(R|X\{([\d,\s]*)\}|X(\d+)|1)(?:\^(\d+))?$")


def parse_raw(text: str) -> list[RawMonomial]:
    """Parse ``"R^2*X{1,2} + X{3}"``-style text into unreduced monomials."""
    text = text.strip()
    if text == "0":
        return []
    out = []
    for term in text.split("+"):
        term = term.strip()
        if not term:
            raise ParseError(f"empty term in {text!r}")
        r = 0
        exps: dict[int, int] = {}
        for factor in term.split("*"):
            m = _FACTOR.match(factor.strip())
            if m is None:
                raise ParseError(f"bad factor {factor!r}")
            power = int(m.group(4)) if m.group(4) else 1
            if m.group(1) == "R":
                r += power
            elif m.group(1) == "1":
                pass
            else:
                idx = [m.group(3)] if m.group(3) else [s for s in m.group(2).split(",") if s.strip()]
                for s in idx:
                    i = int(s)
                    exps[i] = exps.get(i, 0) + power
        out.append(RawMonomial.make(r, exps))
    return out


def build_ring(lv, d: int) -> RingPresentation:
    lv = as_vector(lv)
    n = lv.n
    if d % 2 == 0:
        raise EvenD(f"d={d} is even; this model covers odd d >= 5")
    if d < 5:
        raise DomainError(f"the ring model needs odd d >= 5, got {d}")
    if n < d + 2:
        raise DomainError(f"the ring model needs n >= d+2, got n={n}, d={d}")
    w = tight_witness(lv)
    if w is not None:
        raise NotGeneric(w)
    ordered, perm = sort_with_permutation(lv)
    if not is_d_regular(ordered, d):
        raise NotRegular(f"length vector is not {d}-regular")
    sc = short_complex(ordered)
    if sc.a_vector()[0] == 0:
        raise EmptySpace("{n} is long, so the moduli space is empty")
    ring = RingPresentation(ordered, tuple(perm), d, sc)
    # for an ordered vector the short pairs {j, n} form an initial segment
    assert all(ring.is_short_support(1 << (j - 1)) == (j <= ring.k) for j in range(1, n))
    return ring


def graded_dimension(ring: RingPresentation, r: int) -> int:
    if not 0 <= r <= ring.truncation:
        raise DomainError(f"degree {r} outside 0..{ring.truncation}")
    return len(ring.basis(r))


def graded_dimensions(ring: RingPresentation) -> list[int]:
    return [graded_dimension(ring, r) for r in range(ring.truncation + 1)]


def x_minus(ring: RingPresentation, j: int) -> RingElement:
    """Class of the antiparallel fusion of link j with n, i.e. R + X_j over Z/2."""
    if not 1 <= j <= ring.k:
        raise DomainError(f"j={j} outside 1..{ring.k}")
    return ring.R + ring.X(j)


def _gf2_solutions(rows: list[tuple[int, int]], nvars: int) -> list[int]:
    """All solutions of a GF(2) system; each row is (coefficient mask, rhs bit)."""
    pivots: list[tuple[int, int, int]] = []  # (pivot bit, mask, rhs)
    for mask, rhs in rows:
        for bit, pm, pr in pivots:
            if mask >> bit & 1:
                mask ^= pm
                rhs ^= pr
        if mask == 0:
            if rhs:
                return []
            continue
        bit = mask.bit_length() - 1
        # keep the pivot table fully reduced
        pivots = [(b, pm ^ mask, pr ^ rhs) if pm >> bit & 1 else (b, pm, pr)
                  for b, pm, pr in pivots]
        pivots.append((bit, mask, rhs))
    pivot_bits = {b for b, _, _ in pivots}
    free = [b for b in range(nvars) if b not in pivot_bits]
    sols = []
    for choice in range(1 << len(free)):
        x = 0
        for t, b in enumerate(free):
            if choice >> t & 1:
                x |= 1 << b
        for b, pm, pr in pivots:
            val = pr ^ (popcount(pm & x & ~(1 << b)) & 1)
            if val:
                x |= 1 << b
        sols.append(x)
    return sols


def detect_euler_candidates(ring: RingPresentation) -> tuple[RingElement, ...]:
    """Degree-one Z with Z*X_j = X_j**2 for every generator X_j.

    Unknown 0 is the coefficient of R, unknown i that of X_i.  Products with R
    itself are not used as constraints: they land in R*(...), where the true
    ring has further relations that the model does not know.
    """
    if ring.n < ring.d + 3:
        raise DomainError(f"Euler detection needs n >= d+3, got n={ring.n}, d={ring.d}")
    k = ring.k
    unknowns = [ring.R] + [ring.X(i) for i in range(1, k + 1)]
    coord: dict[Monomial, int] = {}
    rows: list[tuple[int, int]] = []
    for j in range(1, k + 1):
        xj = ring.X(j)
        target = xj * xj
        eq: dict[Monomial, list[int]] = {}
        for u, gen in enumerate(unknowns):
            for m in (gen * xj).monomials:
                eq.setdefault(m, [0, 0])[0] |= 1 << u
        for m in target.monomials:
            eq.setdefault(m, [0, 0])[1] ^= 1
        for m in sorted(eq, key=Monomial.sort_key):
            coord.setdefault(m, len(coord))
            rows.append((eq[m][0], eq[m][1]))
    out = []
    for sol in _gf2_solutions(rows, k + 1):
        z = ring.zero
        for u, gen in enumerate(unknowns):
            if sol >> u & 1:
                z = z + gen
        out.append(z)
    return tuple(sorted(out, key=str))


def face_ring_quotient(ring: RingPresentation) -> list[int]:
    """Graded dimensions of the exterior face ring on the short subsets, degrees 0..n-d."""
    levels = ring.complex.levels
    return [len(levels[r]) if r < len(levels) else 0 for r in range(ring.truncation + 1)]


def quotient_dimensions(ring: RingPresentation) -> list[int]:
    """Graded dimensions of the model ring modulo R, read off the normal forms."""
    return [sum(1 for m in ring.basis(r) if m.r_exp == 0) for r in range(ring.truncation + 1)]


class RingVerdict(enum.Enum):
    SAME_FACE_DATA = "SameFaceData"
    DIFFERENT = "Different"


@dataclass(frozen=True)
class RingComparison:
    verdict: RingVerdict
    differing: tuple[str, ...]
    detail: dict | None

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "differing": list(self.differing), "detail": self.detail}


def compare_rings(lv_a, lv_b, d: int) -> RingComparison:
    lv_a, lv_b = as_vector(lv_a), as_vector(lv_b)
    if lv_a.n != lv_b.n:
        raise LengthMismatch(f"vectors have different lengths ({lv_a.n} vs {lv_b.n})")
    ra, rb = build_ring(lv_a, d), build_ring(lv_b, d)
    differing = []
    if graded_dimensions(ra) != graded_dimensions(rb):
        differing.append("graded_dimension")
    if face_ring_quotient(ra) != face_ring_quotient(rb):
        differing.append("face_ring_dimension")
    if ra.n >= ra.d + 3 and len(detect_euler_candidates(ra)) != len(detect_euler_candidates(rb)):
        differing.append("euler_candidates")
    detail = first_difference(ra.complex, rb.complex)
    if detail is not None:
        differing.append("short_complex")
    verdict = RingVerdict.DIFFERENT if differing else RingVerdict.SAME_FACE_DATA
    return RingComparison(verdict, tuple(differing), detail)


def ring_report(ring: RingPresentation) -> dict:
    dims = graded_dimensions(ring)
    euler = None
    if ring.n >= ring.d + 3:
        euler = [str(z) for z in detect_euler_candidates(ring)]
    return {
        "n": ring.n,
        "d": ring.d,
        "sorted_vector": str(ring.vector),
        "truncation_degree": ring.truncation,
        "generators": ["R"] + [f"X{{{j}}}" for j in range(1, ring.k + 1)],
        "generator_origin": {str(j): o for j, o in ring.generator_origin.items()},
        "graded_dimensions": [
            {"degree": r, "dimension": v, "upper_bound": r >= UPPER_BOUND_DEGREE}
            for r, v in enumerate(dims)
        ],
        "euler_candidates": euler,
        "face_ring_dimensions": face_ring_quotient(ring),
    }
