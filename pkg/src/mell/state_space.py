"""Constrained Fock spaces of the M_l chain.

A configuration is an ``N``-bit integer: bit ``i-1`` is the occupation of
site ``i``, so site 1 is the lowest bit.  Strings such as ``"101110011001"``
list sites ``1..N`` from left to right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Union


class InvalidSpec(ValueError):
    pass


class ResourceError(MemoryError):
    """The requested object is too large to build at desk scale."""


MAX_ENUMERATION_SITES = 24


@dataclass(frozen=True)
class Periodic:
    def __str__(self) -> str:
        return "periodic"


@dataclass(frozen=True)
class Special:
    c1: int
    cN: int

    def __str__(self) -> str:
        return f"special({self.c1},{self.cN})"


Boundary = Union[Periodic, Special]


@dataclass(frozen=True, order=False)
class ChainSpec:
    n_sites: int
    max_cluster: int
    boundary: Boundary = field(default_factory=Periodic)

    def __post_init__(self):
        if not isinstance(self.n_sites, int) or self.n_sites < 1:
            raise InvalidSpec(f"n_sites must be a positive integer, got {self.n_sites!r}")
        if not isinstance(self.max_cluster, int) or self.max_cluster < 1:
            raise InvalidSpec(f"max_cluster must be a positive integer, got {self.max_cluster!r}")
        b = self.boundary
        if isinstance(b, Special):
            for c in (b.c1, b.cN):
                if not 0 <= c <= self.max_cluster:
                    raise InvalidSpec(f"special boundary value {c} outside [0, {self.max_cluster}]")
        elif not isinstance(b, Periodic):
            raise InvalidSpec(f"unknown boundary {b!r}")

    @classmethod
    def periodic(cls, n_sites: int, max_cluster: int) -> "ChainSpec":
        return cls(n_sites, max_cluster, Periodic())

    @classmethod
    def special(cls, n_sites: int, max_cluster: int, c1: int, cN: int) -> "ChainSpec":
        return cls(n_sites, max_cluster, Special(c1, cN))

    @classmethod
    def free(cls, n_sites: int, max_cluster: int) -> "ChainSpec":
        return cls(n_sites, max_cluster, Special(max_cluster, max_cluster))

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.boundary, Periodic)

    def with_sites(self, n_sites: int) -> "ChainSpec":
        return ChainSpec(n_sites, self.max_cluster, self.boundary)

    @property
    def sort_key(self) -> tuple:
        b = self.boundary
        return (self.max_cluster, 0 if self.is_periodic else 1, getattr(b, "c1", -1), getattr(b, "cN", -1), self.n_sites)

    def label(self) -> str:
        return f"l={self.max_cluster} N={self.n_sites} {self.boundary}"

    def to_dict(self) -> dict:
        b = self.boundary
        bd = {"kind": "periodic"} if self.is_periodic else {"kind": "special", "c1": b.c1, "cN": b.cN}
        return {"n_sites": self.n_sites, "max_cluster": self.max_cluster, "boundary": bd}


class Cluster(NamedTuple):
    start_site: int
    length: int


def word_from_string(s: str) -> int:
    """``"0110"`` -> word with sites 2 and 3 occupied."""
    w = 0
    for i, ch in enumerate(s):
        if ch == "1":
            w |= 1 << i
        elif ch != "0":
            raise ValueError(f"bad occupation character {ch!r}")
    return w


def word_to_string(word: int, n_sites: int) -> str:
    return "".join("1" if word >> i & 1 else "0" for i in range(n_sites))


def popcount(word: int) -> int:
    return bin(word).count("1")


def occupied(word: int, site: int) -> bool:
    return bool(word >> (site - 1) & 1)


def cluster_decomposition(spec: ChainSpec, word: int) -> list[Cluster]:
    """Maximal runs of occupied sites, ordered by their lowest site index.

    On periodic chains a run through the seam is a single cluster whose
    ``start_site`` is its first site in increasing order modulo N; the fully
    occupied ring is reported as one cluster of length ``N + 1``.
    """
    n = spec.n_sites
    if word >> n:
        raise ValueError(f"word {word} has more than {n} bits")
    full = (1 << n) - 1
    if spec.is_periodic and word == full:
        return [Cluster(1, n + 1)]
    runs = []
    i = 1
    while i <= n:
        if occupied(word, i):
            j = i
            while j < n and occupied(word, j + 1):
                j += 1
            runs.append(Cluster(i, j - i + 1))
            i = j + 1
        else:
            i += 1
    if spec.is_periodic and len(runs) > 1 and runs[0].start_site == 1 and runs[-1].start_site + runs[-1].length - 1 == n:
        last = runs.pop()
        runs[0] = Cluster(last.start_site, last.length + runs[0].length)
    return runs


def _has_run(word: int, length: int) -> bool:
    x = word
    for k in range(1, length):
        x &= word >> k
    return x != 0


def is_allowed(spec: ChainSpec, word: int) -> bool:
    n, ell = spec.n_sites, spec.max_cluster
    full = (1 << n) - 1
    if word & ~full:
        return False
    if spec.is_periodic:
        if word == full:
            return False
        return not _has_run(word | (word << n), ell + 1)
    if _has_run(word, ell + 1):
        return False
    b = spec.boundary
    # run touching site 1 occupies the lowest bits
    low = (~word & (word + 1)).bit_length() - 1
    if low > b.c1:
        return False
    high = 0
    while high < n and occupied(word, n - high):
        high += 1
    return high <= b.cN


@dataclass(frozen=True)
class GradedBasis:
    spec: ChainSpec
    grades: tuple[tuple[int, ...], ...]
    index: dict = field(compare=False, hash=False, repr=False)

    @property
    def f_max(self) -> int:
        return len(self.grades) - 1

    def dims(self) -> list[int]:
        return [len(g) for g in self.grades]

    def dim(self, f: int) -> int:
        if 0 <= f < len(self.grades):
            return len(self.grades[f])
        return 0

    def grade(self, f: int) -> tuple[int, ...]:
        if 0 <= f < len(self.grades):
            return self.grades[f]
        return ()

    def position(self, word: int) -> tuple[int, int]:
        return self.index[word]

    def __contains__(self, word: int) -> bool:
        return word in self.index

    @property
    def total(self) -> int:
        return len(self.index)

    def to_dict(self) -> dict:
        d = self.spec.to_dict()
        d["grades"] = [{"f": f, "dim": len(g), "words": list(g)} for f, g in enumerate(self.grades)]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@lru_cache(maxsize=128)
def enumerate_basis(spec: ChainSpec) -> GradedBasis:
    n = spec.n_sites
    if n > MAX_ENUMERATION_SITES:
        raise ResourceError(f"refusing to enumerate 2**{n} configurations")
    by_grade: dict[int, list[int]] = {}
    for w in range(1 << n):
        if is_allowed(spec, w):
            by_grade.setdefault(popcount(w), []).append(w)
    f_max = max(by_grade)
    grades = tuple(tuple(by_grade.get(f, ())) for f in range(f_max + 1))
    index = {w: (f, i) for f, g in enumerate(grades) for i, w in enumerate(g)}
    return GradedBasis(spec, grades, index)


def dim(spec: ChainSpec, f: int) -> int:
    return enumerate_basis(spec).dim(f)
