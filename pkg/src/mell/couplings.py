"""Cluster amplitudes lambda_{m,n} generated from the primitives lambda_{m,1}."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .matrix import Rational, normalize


@dataclass(frozen=True, eq=False)
class CouplingScheme:
    primitive: tuple[Rational, ...]
    mu: tuple[Rational, ...] = field(repr=False)
    table: dict[tuple[int, int], Rational] = field(repr=False)

    def _key(self):
        return (self.primitive, tuple(sorted(self.table.items())))

    def __eq__(self, other):
        if not isinstance(other, CouplingScheme):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def max_cluster(self) -> int:
        return len(self.primitive)

    def amplitude(self, m: int, n: int) -> Rational:
        return self.table[m, n]

    def is_all_ones(self) -> bool:
        return all(v == 1 for v in self.primitive)

    def label(self) -> str:
        return ",".join(str(Fraction(v)) for v in self.primitive)


def build_scheme(primitive: Sequence) -> CouplingScheme:
    prim = tuple(normalize(Fraction(p)) for p in primitive)
    if not prim:
        raise ValueError("need at least one primitive amplitude")
    if any(p == 0 for p in prim):
        raise ValueError("primitive amplitudes must be non-zero")
    mu = [1]
    for p in prim:
        mu.append(normalize(mu[-1] * Fraction(p)))
    table = {}
    for m in range(1, len(prim) + 1):
        for n in range(1, m + 1):
            table[m, n] = normalize(Fraction(mu[m]) / (Fraction(mu[n - 1]) * mu[m - n]))
    return CouplingScheme(prim, tuple(mu), table)


def all_ones(ell: int) -> CouplingScheme:
    return build_scheme([1] * ell)


def random_scheme(ell: int, rng: random.Random, max_num: int = 9, max_den: int = 9) -> CouplingScheme:
    """Random nonzero rationals p/q with |p| <= max_num and 1 <= q <= max_den."""
    prim = []
    for _ in range(ell):
        p = 0
        while p == 0:
            p = rng.randint(-max_num, max_num)
        prim.append(Fraction(p, rng.randint(1, max_den)))
    return build_scheme(prim)


def check_compatibility(scheme: CouplingScheme) -> bool:
    """lambda_{m,n} lambda_{m-n,p-n} == lambda_{m,p} lambda_{p-1,n} for 1 <= n < p <= m."""
    t = scheme.table
    ell = scheme.max_cluster
    for m in range(1, ell + 1):
        for p in range(2, m + 1):
            for n in range(1, p):
                if t[m, n] * t[m - n, p - n] != t[m, p] * t[p - 1, n]:
                    return False
    return True


def with_table(scheme: CouplingScheme, updates: dict[tuple[int, int], Rational]) -> CouplingScheme:
    """Copy of ``scheme`` with some table entries overwritten (for corruption tests)."""
    table = dict(scheme.table)
    table.update({k: normalize(Fraction(v)) for k, v in updates.items()})
    return CouplingScheme(scheme.primitive, scheme.mu, table)


def parse_couplings(text: str) -> CouplingScheme:
    """Parse ``"1,2/3,-5"`` into a scheme."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    return build_scheme([Fraction(p) for p in parts])
