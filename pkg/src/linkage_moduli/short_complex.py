"""Short-subset systems S_k, a-vectors and chamber fingerprints."""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .errors import LengthMismatch, NotGeneric, ParseError
from .lenvec import LengthVector, as_vector, sort_with_permutation, tight_witness


@dataclass(frozen=True)
class ShortComplex:
    """``levels[k]`` holds the short subsets containing n with k+1 elements.

    There are n-2 levels (k = 0..n-3); empty levels are kept so that two
    complexes compare equal only when n agrees as well.
    """
    n: int
    levels: tuple[tuple[int, ...], ...]

    def a_vector(self) -> list[int]:
        return [len(level) for level in self.levels]

    def masks(self) -> frozenset[int]:
        return frozenset(m for level in self.levels for m in level)

    def to_json(self) -> dict:
        return {"n": self.n, "levels": [[f"{m:#x}" for m in level] for level in self.levels]}

    @classmethod
    def from_json(cls, data) -> ShortComplex:
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n = int(data["n"])
            levels = tuple(tuple(int(m, 16) for m in level) for level in data["levels"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed fingerprint record: {exc}") from exc
        if len(levels) != n - 2:
            raise ParseError(f"fingerprint for n={n} must have {n - 2} levels")
        return cls(n, levels)

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_json(), separators=(",", ":")).encode()


# The fingerprint of a chamber is the short complex of its sorted vector.
Fingerprint = ShortComplex


def _require_generic(lv: LengthVector) -> None:
    w = tight_witness(lv)
    if w is not None:
        raise NotGeneric(w)


def _levels(lv: LengthVector) -> tuple[tuple[int, ...], ...]:
    n = lv.n
    top = 1 << (n - 1)
    levels = []
    for k in range(n - 2):
        level = []
        for combo in combinations(range(n - 1), k):
            m = top
            for i in combo:
                m |= 1 << i
            if lv._sign(m) < 0:
                level.append(m)
        level.sort()
        levels.append(tuple(level))
    return tuple(levels)


def short_complex(lv) -> ShortComplex:
    lv = as_vector(lv)
    _require_generic(lv)
    return ShortComplex(lv.n, _levels(lv))


def a_vector(lv) -> list[int]:
    return short_complex(lv).a_vector()


def fingerprint(lv) -> Fingerprint:
    lv = as_vector(lv)
    _require_generic(lv)
    ordered, _ = sort_with_permutation(lv)
    return ShortComplex(lv.n, _levels(ordered))


def first_difference(a: ShortComplex, b: ShortComplex) -> dict | None:
    """Lowest level where two complexes disagree, with the masks unique to each side."""
    if a.n != b.n:
        return {"level": None, "reason": f"n differs ({a.n} vs {b.n})"}
    for k, (la, lb) in enumerate(zip(a.levels, b.levels)):
        if la != lb:
            sa, sb = set(la), set(lb)
            return {
                "level": k,
                "only_in_a": [f"{m:#x}" for m in sorted(sa - sb)],
                "only_in_b": [f"{m:#x}" for m in sorted(sb - sa)],
            }
    return None


def same_chamber_up_to_permutation(lv_a, lv_b) -> bool:
    lv_a, lv_b = as_vector(lv_a), as_vector(lv_b)
    if lv_a.n != lv_b.n:
        raise LengthMismatch(f"vectors have different lengths ({lv_a.n} vs {lv_b.n})")
    return fingerprint(lv_a) == fingerprint(lv_b)
