"""Chambers of the wall arrangement up to permutation, for small n.

Everything happens in the ordered cone ``0 < x_1 <= ... <= x_n``, where a
chamber is determined by which subsets containing ``n`` are short.  Starting
from a few seed vectors, the search flips the verdict of one subset at a time
and asks the exact LP whether the flipped sign pattern is realizable.
"""
from __future__ import annotations

import json
import logging
import os
import random
import tempfile
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .errors import DomainError, GuardExceeded, ParseError
from .lenvec import (LengthEntry, LengthVector, is_d_regular, is_generic, popcount,
                     sort_with_permutation, tight_witness)
from .lp import LinearSystem, feasible_interior, integer_point, ordered_cone
from .short_complex import Fingerprint, ShortComplex, _levels, fingerprint

log = logging.getLogger(__name__)

DEFAULT_GUARD = 8
ATLAS_HEADER = "LINKAGE-ATLAS v1 n={n}"


def max_n_guard() -> int:
    env = os.environ.get("LINKAGE_MAX_N")
    return int(env) if env else DEFAULT_GUARD


# Shift order on subsets containing n: one step up either adds index 1 or
# moves some i to a free i+1 < n.  Moving up never decreases the weight of a
# subset of an ordered vector, so short sets are closed downward under it.

def _up_steps(mask: int, n: int) -> list[int]:
    out = []
    if not mask & 1:
        out.append(mask | 1)
    for i in range(n - 2):
        if mask >> i & 1 and not mask >> (i + 1) & 1:
            out.append(mask ^ (0b11 << i))
    return out


def _down_steps(mask: int, n: int) -> list[int]:
    out = []
    if mask & 1:
        out.append(mask ^ 1)
    for i in range(1, n - 1):
        if mask >> i & 1 and not mask >> (i - 1) & 1:
            out.append(mask ^ (0b11 << (i - 1)))
    return out


def _masks_with_n(n: int) -> range:
    top = 1 << (n - 1)
    return range(top, 2 * top)


def boundary_sets(short: frozenset, n: int) -> tuple[list[int], list[int]]:
    """Maximal short and minimal long subsets (containing n) in the shift order."""
    maximal_short, minimal_long = [], []
    for m in _masks_with_n(n):
        if m in short:
            if not any(u in short for u in _up_steps(m, n)):
                maximal_short.append(m)
        elif all(v in short for v in _down_steps(m, n) if v >> (n - 1)):
            minimal_long.append(m)
    return maximal_short, minimal_long


def _short_row(mask: int, n: int) -> list[int]:
    # sum over complement minus sum over J > 0
    return [-1 if mask >> i & 1 else 1 for i in range(n)]


def chamber_system(short: frozenset, n: int, reduced: bool = True) -> LinearSystem:
    """Sign pattern as a strict system on the ordered cone.

    With ``reduced`` only the boundary sets are listed; the shift order makes
    every other verdict follow on the ordered cone.
    """
    if reduced:
        shorts, longs = boundary_sets(short, n)
    else:
        shorts = [m for m in _masks_with_n(n) if m in short]
        longs = [m for m in _masks_with_n(n) if m not in short]
    rows = [_short_row(m, n) for m in shorts]
    rows += [[-c for c in _short_row(m, n)] for m in longs]
    return ordered_cone(n, strict=rows)


def _complex_from_short(short: frozenset, n: int) -> ShortComplex:
    levels = [[] for _ in range(n - 2)]
    for m in short:
        k = popcount(m) - 1
        if k < n - 2:
            levels[k].append(m)
    return ShortComplex(n, tuple(tuple(sorted(level)) for level in levels))


def flip_candidates(fp: Fingerprint) -> list[int]:
    """Subsets whose verdict can flip without breaking shift-order closure."""
    n = fp.n
    shorts, longs = boundary_sets(fp.masks(), n)
    # sets of size n-1 or n are long on the whole ordered cone
    longs = [m for m in longs if popcount(m) <= n - 2]
    return sorted(shorts + longs)


def realize(short: frozenset, n: int) -> LengthVector | None:
    """Integer ordered witness for a sign pattern, or None if it is infeasible."""
    x = feasible_interior(chamber_system(short, n))
    if x is None:
        return None
    return LengthVector(tuple(integer_point(x)))


def rationalize(lv: LengthVector, start: int = 2, limit_bits: int = 64) -> LengthVector:
    """Replace eps by 1/M, doubling M until the fingerprint is stable twice in a row."""
    if all(e.eps == 0 for e in lv.entries):
        return lv
    target = fingerprint(lv)
    prev, streak, M = None, 0, start
    while M < 1 << limit_bits:
        approx = LengthVector(tuple(LengthEntry(e.base + Fraction(e.eps, M)) for e in lv.entries))
        fp = fingerprint(approx) if is_generic(approx) else None
        streak = streak + 1 if fp is not None and fp == prev else 0
        prev = fp
        if streak >= 2 and fp == target:
            return approx
        M *= 2
    raise DomainError(f"could not find a rational point in the chamber of {lv}")


def seed_vectors(n: int) -> list[LengthVector]:
    eps_seed = LengthVector(tuple(["eps"] * (n - 1) + [1]))
    heavy = LengthVector(tuple([1] * (n - 1) + [n - 2]))
    if n % 2:
        equi = LengthVector(tuple([1] * n))
    else:
        equi = LengthVector(tuple([2] * (n - 1) + [3]))
    return [eps_seed, heavy, equi]


@dataclass
class ChamberRecord:
    fingerprint: Fingerprint
    witness: LengthVector
    regular: dict[int, bool] = field(default_factory=dict)

    def to_line(self) -> str:
        return json.dumps({
            "fingerprint": self.fingerprint.to_json(),
            "witness": str(self.witness),
            "regular": {str(d): self.regular[d] for d in sorted(self.regular)},
        }, separators=(",", ":"))

    @classmethod
    def from_line(cls, line: str) -> ChamberRecord:
        try:
            data = json.loads(line)
            rec = cls(
                ShortComplex.from_json(data["fingerprint"]),
                LengthVector.parse(data["witness"]),
                {int(d): bool(v) for d, v in data["regular"].items()},
            )
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise ParseError(f"malformed atlas record: {exc}") from exc
        return rec


@dataclass
class ChamberAtlas:
    n: int
    records: list[ChamberRecord]

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: r.fingerprint.canonical_bytes())

    def __len__(self) -> int:
        return len(self.records)

    def fingerprints(self) -> set[Fingerprint]:
        return {r.fingerprint for r in self.records}

    def dumps(self) -> str:
        lines = [ATLAS_HEADER.format(n=self.n)] + [r.to_line() for r in self.records]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> ChamberAtlas:
        lines = text.splitlines()
        if not lines or not lines[0].startswith("LINKAGE-ATLAS v1 n="):
            raise ParseError("missing atlas header")
        try:
            n = int(lines[0].split("n=", 1)[1])
        except ValueError as exc:
            raise ParseError("bad atlas header") from exc
        records = [ChamberRecord.from_line(line) for line in lines[1:] if line.strip()]
        if any(r.fingerprint.n != n for r in records):
            raise ParseError("record n does not match header")
        return cls(n, records)


def write_atlas(atlas: ChamberAtlas, path) -> None:
    """Write the whole file at once through a temporary file and rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=".atlas-", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(atlas.dumps())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_atlas(path) -> ChamberAtlas:
    return ChamberAtlas.loads(Path(path).read_text(encoding="utf-8"))


def default_regularity_ds(n: int) -> list[int]:
    return list(range(5, n, 2))


def enumerate_chambers(n: int, guard: int | None = None) -> ChamberAtlas:
    guard = max_n_guard() if guard is None else guard
    if n < 4:
        raise DomainError(f"enumeration needs n >= 4, got {n}")
    if n > guard:
        raise GuardExceeded(f"n={n} exceeds the enumeration guard {guard} (set LINKAGE_MAX_N)")
    found: dict[Fingerprint, LengthVector] = {}
    queue: deque[Fingerprint] = deque()
    for seed in seed_vectors(n):
        w, _ = sort_with_permutation(rationalize(seed))
        w = LengthVector(integer_point([e.base for e in w.entries]))
        fp = fingerprint(w)
        if fp not in found:
            found[fp] = w
            queue.append(fp)
    while queue:
        fp = queue.popleft()
        short = fp.masks()
        for m in flip_candidates(fp):
            flipped = short ^ {m}
            target = _complex_from_short(flipped, n)
            if target in found:
                continue
            w = realize(flipped, n)
            if w is None:
                continue
            got = fingerprint(w)
            assert got == target, f"witness {w} does not realize the flipped pattern"
            found[target] = w
            queue.append(target)
    log.debug("n=%d: %d chambers", n, len(found))
    ds = default_regularity_ds(n)
    records = [ChamberRecord(fp, w, {d: is_d_regular(w, d) for d in ds}) for fp, w in found.items()]
    return ChamberAtlas(n, records)


def annotate_regularity(atlas: ChamberAtlas, d_list) -> ChamberAtlas:
    records = []
    for r in atlas.records:
        flags = dict(r.regular)
        for d in d_list:
            flags[d] = is_d_regular(r.witness, d)
        records.append(ChamberRecord(r.fingerprint, r.witness, flags))
    return ChamberAtlas(atlas.n, records)


def _random_vector(rng: random.Random, n: int) -> list:
    vals: list = [rng.randint(1, 4 * n) for _ in range(n)]
    if rng.random() < 0.25:
        for i in rng.sample(range(n), rng.randint(1, n - 1)):
            vals[i] = "eps"
    return vals


def sample_fingerprints(n: int, trials: int, seed: int = 0) -> set[Fingerprint]:
    """Fingerprints of random generic vectors; the completeness oracle."""
    if trials < 1:
        raise DomainError("trials must be positive")
    rng = random.Random(seed)
    seen: dict[tuple, Fingerprint | None] = {}
    out: set[Fingerprint] = set()
    for _ in range(trials):
        vals = _random_vector(rng, n)
        key = tuple(sorted(vals, key=lambda v: (0, 0) if v == "eps" else (1, v)))
        if key in seen:
            continue
        lv = LengthVector(key)
        fp = None
        if tight_witness(lv) is None:
            fp = ShortComplex(n, _levels(lv))
            out.add(fp)
        seen[key] = fp
    return out
