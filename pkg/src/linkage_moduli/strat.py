"""Dimension, codimension and perversity arithmetic for the rank stratification.

A perversity is stored as a total table on the singular strata indexed by
``k`` in ``{2..d-2}`` (stratum of points with rank exactly ``d - k``).  The
one-point compactification of the disc bundle adds a ``star`` stratum that
only the q-perversities use.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import DomainError


def strata_indices(d: int) -> range:
    return range(2, d - 1)


def dim_moduli(n: int, d: int) -> int:
    if d < 2 or n < d:
        raise DomainError(f"dimension formula needs n >= d >= 2, got n={n}, d={d}")
    return (n - 3) * (d - 1) - (d - 2) * (d - 3) // 2


def codim_stratum(n: int, d: int, k: int) -> int:
    if not 2 <= k <= d - 2:
        raise DomainError(f"stratum index k={k} outside 2..{d - 2}")
    return k * (n - d) + k * (k - 1) // 2


@dataclass(frozen=True)
class PerversityTable:
    d: int
    values: dict[int, int]
    star: int | None = None

    def __post_init__(self):
        if set(self.values) != set(strata_indices(self.d)):
            raise DomainError(f"perversity table must cover k=2..{self.d - 2}")

    def __getitem__(self, k: int) -> int:
        return self.values[k]

    def __add__(self, other: PerversityTable) -> PerversityTable:
        _same_domain(self, other)
        return PerversityTable(self.d, {k: self[k] + other[k] for k in self.values})

    def __sub__(self, other: PerversityTable) -> PerversityTable:
        _same_domain(self, other)
        return PerversityTable(self.d, {k: self[k] - other[k] for k in self.values})

    def __eq__(self, other):
        if not isinstance(other, PerversityTable):
            return NotImplemented
        return self.d == other.d and self.values == other.values and self.star == other.star

    def __hash__(self):
        return hash((self.d, tuple(sorted(self.values.items())), self.star))

    def to_json(self) -> dict:
        out = {"values": {str(k): v for k, v in sorted(self.values.items())}}
        if self.star is not None:
            out["star"] = self.star
        return out


def _same_domain(a: PerversityTable, b: PerversityTable) -> None:
    if a.d != b.d:
        raise DomainError("perversity tables over different d")


def zero_perversity(d: int) -> PerversityTable:
    return PerversityTable(d, {k: 0 for k in strata_indices(d)})


def perversity_p(j: int, d: int) -> PerversityTable:
    if j < 0:
        raise DomainError("j must be non-negative")
    return PerversityTable(d, {k: j * k for k in strata_indices(d)})


def perversity_top(n: int, d: int) -> PerversityTable:
    if n < d + 1:
        raise DomainError(f"top perversity needs n >= d+1, got n={n}, d={d}")
    return PerversityTable(d, {k: codim_stratum(n, d, k) - 2 for k in strata_indices(d)})


def perversity_dual(p: PerversityTable, n: int, d: int) -> PerversityTable:
    if p.d != d:
        raise DomainError("perversity table was built for a different d")
    return perversity_top(n, d) - p


def is_goresky_macpherson(p: PerversityTable, n: int, d: int) -> bool:
    """Growth conditions on the ordinary strata; any star value is ignored."""
    ks = list(strata_indices(d))
    if not ks:
        return True
    if p[2] > 2 * (n - d) - 1:
        return False
    return all(p[k + 1] - p[k] <= n - d + k for k in ks[:-1])


class StarMode(enum.Enum):
    GM = "gm"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class BarPerversity:
    """Perversity on the disc-bundle stratification: two strata per k plus star."""
    outer: PerversityTable
    inner: PerversityTable
    star: int


def perversity_q(r: int, d: int, star_mode: StarMode = StarMode.TRUNCATED) -> BarPerversity:
    if r < 0:
        raise DomainError("r must be non-negative")
    outer = PerversityTable(d, {k: r * k - 1 for k in strata_indices(d)})
    inner = PerversityTable(d, {k: r * k for k in strata_indices(d)})
    star = r * (d - 2)
    if r == 1 and StarMode(star_mode) is StarMode.TRUNCATED:
        star = 0
    return BarPerversity(outer, inner, star)


@dataclass(frozen=True)
class BarStratProfile:
    n: int
    d: int
    codim_outer: dict[int, int] = field(init=False)
    codim_inner: dict[int, int] = field(init=False)

    def __post_init__(self):
        c = {k: codim_stratum(self.n, self.d, k) for k in strata_indices(self.d)}
        object.__setattr__(self, "codim_outer", {k: v + k - 1 for k, v in c.items()})
        object.__setattr__(self, "codim_inner", {k: v + k for k, v in c.items()})


def _check_r(n: int, d: int, r: int) -> None:
    if not 0 <= r <= n - d - 1:
        raise DomainError(f"r={r} outside 0..{n - d - 1}")


def check_inclusion_allowability(n: int, d: int, r: int) -> bool:
    """Zero section: margin of p_r on M equals margin of q_{r+1} on the inner stratum."""
    _check_r(n, d, r)
    p = perversity_p(r, d)
    q = perversity_q(r + 1, d)
    bar = BarStratProfile(n, d)
    return all(
        p[k] - codim_stratum(n, d, k) == q.inner[k] - bar.codim_inner[k]
        for k in strata_indices(d)
    )


def check_projection_allowability(n: int, d: int, r: int) -> bool:
    """Bundle projection: margin of q_{r+1} on the outer stratum equals that of p_r."""
    _check_r(n, d, r)
    p = perversity_p(r, d)
    q = perversity_q(r + 1, d)
    bar = BarStratProfile(n, d)
    return all(
        q.outer[k] - bar.codim_outer[k] == p[k] - codim_stratum(n, d, k)
        for k in strata_indices(d)
    )


def lemma_strata_margin(n: int, d: int, k: int, l: int) -> tuple[int, int, bool]:
    """Dual of p_1 at stratum m = 2(k-l-1) versus codim(m) - 2(k-l), for d = 2k+1."""
    if d != 2 * k + 1:
        raise DomainError(f"need d = 2k+1, got d={d}, k={k}")
    if not 0 <= l <= k - 2:
        raise DomainError(f"l={l} outside 0..{k - 2}")
    if n < d + 1:
        raise DomainError(f"need n >= d+1, got n={n}")
    m = 2 * (k - l - 1)
    lhs = perversity_dual(perversity_p(1, d), n, d)[m]
    rhs = codim_stratum(n, d, m) - 2 * (k - l)
    return lhs, rhs, lhs == rhs


def stratification_table(n: int, d: int) -> dict:
    """Everything the ``perversities`` command reports for one (n, d)."""
    if n < d + 1:
        raise DomainError(f"need n >= d+1, got n={n}, d={d}")
    ks = list(strata_indices(d))
    top = perversity_top(n, d)
    bar = BarStratProfile(n, d)
    rows = []
    for k in ks:
        rows.append({
            "k": k,
            "codim": codim_stratum(n, d, k),
            "codim_outer": bar.codim_outer[k],
            "codim_inner": bar.codim_inner[k],
            "top": top[k],
        })
    perv = []
    for j in range(0, n - d):
        p = perversity_p(j, d)
        q = perversity_q(j + 1, d)
        perv.append({
            "j": j,
            "degree": dim_moduli(n - j, d) if n - j >= d else None,
            "p": p.to_json()["values"],
            "dual": perversity_dual(p, n, d).to_json()["values"],
            "goresky_macpherson": is_goresky_macpherson(p, n, d),
            "q_next": {"outer": q.outer.to_json()["values"],
                       "inner": q.inner.to_json()["values"], "star": q.star},
            "inclusion_allowable": check_inclusion_allowability(n, d, j),
            "projection_allowable": check_projection_allowability(n, d, j),
        })
    return {"n": n, "d": d, "dim": dim_moduli(n, d), "strata": rows, "perversities": perv}
